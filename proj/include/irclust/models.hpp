#pragma once

// Synthetic data generators: stochastic block models (plain, contextual,
// symmetric) and the signed variant where edges carry +1 within and -1
// across communities with independent sign flips.

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "irclust/dense_matrix.hpp"
#include "irclust/partition.hpp"
#include "irclust/rng.hpp"
#include "irclust/sparse_symmetric.hpp"

namespace irclust {

struct MembershipSpec {
  enum class Mode { fixed, multinomial, balanced };
  Mode mode = Mode::multinomial;
  std::vector<int> labels;      // fixed
  std::vector<double> weights;  // multinomial; empty means uniform

  static MembershipSpec fixed(std::vector<int> l) {
    MembershipSpec s;
    s.mode = Mode::fixed;
    s.labels = std::move(l);
    return s;
  }
  static MembershipSpec multinomial(std::vector<double> w = {}) {
    MembershipSpec s;
    s.mode = Mode::multinomial;
    s.weights = std::move(w);
    return s;
  }
  static MembershipSpec balanced() {
    MembershipSpec s;
    s.mode = Mode::balanced;
    return s;
  }
};

struct SbmSpec {
  std::size_t n = 0;
  std::size_t K = 0;
  DenseMatrix Pi;  // K x K symmetric, entries in [0,1]
  MembershipSpec membership;
  bool self_loops = false;

  void validate() const {
    if (K < 1 || n < K) throw std::invalid_argument("sbm spec: require 1 <= K <= n");
    if (Pi.rows != K || Pi.cols != K) throw std::invalid_argument("sbm spec: Pi must be K x K");
    for (std::size_t a = 0; a < K; ++a)
      for (std::size_t b = 0; b < K; ++b) {
        if (!(Pi(a, b) >= 0.0 && Pi(a, b) <= 1.0))
          throw std::invalid_argument("sbm spec: Pi entries must lie in [0,1]");
        if (std::abs(Pi(a, b) - Pi(b, a)) > 1e-12)
          throw std::invalid_argument("sbm spec: Pi must be symmetric");
      }
  }
};

struct CovariateSpec {
  DenseMatrix centers;  // K x d
  double sigma = 0.0;

  void validate(std::size_t K) const {
    if (centers.rows != K) throw std::invalid_argument("covariate spec: centers must have K rows");
    if (!(sigma >= 0.0)) throw std::invalid_argument("covariate spec: sigma must be >= 0");
  }
};

struct SignedSbmSpec {
  std::size_t n = 0;
  std::size_t K = 0;
  double p = 0.0;    // edge probability
  double eta = 0.0;  // sign flip probability, in [0, 0.5)
  MembershipSpec membership;

  void validate() const {
    if (K < 1 || n < K) throw std::invalid_argument("signed sbm spec: require 1 <= K <= n");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("signed sbm spec: p in [0,1]");
    if (!(eta >= 0.0 && eta < 0.5)) throw std::invalid_argument("signed sbm spec: eta in [0,0.5)");
  }
};

inline LabeledPartition generate_partition(std::size_t n, std::size_t K,
                                           const MembershipSpec& membership, Rng& rng) {
  if (K > n) throw std::invalid_argument("generate_partition: K > n");
  std::vector<int> labels;
  switch (membership.mode) {
    case MembershipSpec::Mode::fixed:
      if (membership.labels.size() != n)
        throw std::invalid_argument("generate_partition: fixed labels length mismatch");
      labels = membership.labels;
      break;
    case MembershipSpec::Mode::multinomial: {
      std::vector<double> w = membership.weights;
      if (w.empty()) w.assign(K, 1.0 / double(K));
      if (w.size() != K)
        throw std::invalid_argument("generate_partition: weight count must equal K");
      labels.reserve(n);
      for (std::size_t i = 0; i < n; ++i) labels.push_back(int(rng.multinomial(w)));
      break;
    }
    case MembershipSpec::Mode::balanced: {
      // floor(n/K) or ceil(n/K) per cluster, shuffled into place.
      labels.reserve(n);
      const std::size_t base = n / K, extra = n % K;
      for (std::size_t k = 0; k < K; ++k) {
        const std::size_t size = base + (k < extra ? 1 : 0);
        labels.insert(labels.end(), size, int(k));
      }
      rng.shuffle(std::span<int>(labels));
      break;
    }
  }
  LabeledPartition z(std::move(labels), int(K));
  z.validate();
  return z;
}

inline SparseSymmetric generate_sbm(const LabeledPartition& z, const DenseMatrix& Pi,
                                    bool self_loops, Rng& rng) {
  const std::size_t n = z.n();
  SparseSymmetric a(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = self_loops ? i : i + 1;
    for (std::size_t j = j0; j < n; ++j)
      if (rng.bernoulli(Pi(std::size_t(z.labels[i]), std::size_t(z.labels[j]))))
        a.entries.push_back({std::uint32_t(i), std::uint32_t(j), 1.0});
  }
  return a;
}

inline DenseMatrix generate_covariates(const LabeledPartition& z, const CovariateSpec& spec,
                                       Rng& rng) {
  spec.validate(std::size_t(z.K));
  const std::size_t d = spec.centers.cols;
  DenseMatrix x(z.n(), d);
  for (std::size_t i = 0; i < z.n(); ++i)
    for (std::size_t c = 0; c < d; ++c)
      x(i, c) = spec.centers(std::size_t(z.labels[i]), c) + rng.gaussian(0.0, spec.sigma);
  return x;
}

inline std::pair<SparseSymmetric, LabeledPartition> generate_signed_sbm(const SignedSbmSpec& spec,
                                                                        Rng& rng) {
  spec.validate();
  LabeledPartition z = generate_partition(spec.n, spec.K, spec.membership, rng);
  SparseSymmetric a(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i)
    for (std::size_t j = i + 1; j < spec.n; ++j) {
      if (!rng.bernoulli(spec.p)) continue;
      double sign = z.labels[i] == z.labels[j] ? 1.0 : -1.0;
      if (rng.bernoulli(spec.eta)) sign = -sign;
      a.entries.push_back({std::uint32_t(i), std::uint32_t(j), sign});
    }
  return {std::move(a), std::move(z)};
}

// P = Z Pi Z^T, diagonal included; zeros are not stored.
inline SparseSymmetric expected_matrix(const LabeledPartition& z, const DenseMatrix& Pi) {
  if (Pi.rows != std::size_t(z.K) || Pi.cols != std::size_t(z.K))
    throw std::invalid_argument("expected_matrix: Pi must be K x K");
  const std::size_t n = z.n();
  SparseSymmetric p(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double w = Pi(std::size_t(z.labels[i]), std::size_t(z.labels[j]));
      if (w != 0.0) p.entries.push_back({std::uint32_t(i), std::uint32_t(j), w});
    }
  return p;
}

}  // namespace irclust
