#pragma once

// Partition evaluation: confusion counts, misclustering rate via optimal
// label matching, normalized mutual information, plain Hamming distance,
// and the parameter-separation quantities used as diagnostics.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "irclust/dense_matrix.hpp"
#include "irclust/partition.hpp"

namespace irclust {

struct ConfusionMatrix {
  std::size_t K = 0;
  std::vector<std::size_t> counts;  // K x K row-major; counts[a][b] = #{z=a, z_hat=b}

  std::size_t at(std::size_t a, std::size_t b) const { return counts[a * K + b]; }
};

inline ConfusionMatrix confusion(const LabeledPartition& z, const LabeledPartition& z_hat) {
  if (z.n() != z_hat.n()) throw std::invalid_argument("confusion: length mismatch");
  if (z.K != z_hat.K) throw std::invalid_argument("confusion: K mismatch");
  ConfusionMatrix c;
  c.K = std::size_t(z.K);
  c.counts.assign(c.K * c.K, 0);
  for (std::size_t i = 0; i < z.n(); ++i)
    ++c.counts[std::size_t(z.labels[i]) * c.K + std::size_t(z_hat.labels[i])];
  return c;
}

namespace detail {

// Shortest augmenting path assignment with potentials; returns the minimum
// total cost. row_of[c] maps columns to assigned rows.
inline double assignment_min_cost(const DenseMatrix& cost, std::vector<int>* row_of = nullptr) {
  const int n = int(cost.rows);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, n), way(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    p[n] = i;
    int j0 = n;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = -1;
      for (int j = 0; j < n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != n);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != n);
  }
  double total = 0.0;
  for (int j = 0; j < n; ++j) total += cost(p[j], j);
  if (row_of) {
    row_of->assign(n, -1);
    for (int j = 0; j < n; ++j) (*row_of)[j] = p[j];
  }
  return total;
}

}  // namespace detail

// Minimum-cost perfect matching on a square cost matrix. Among optimal
// assignments the lexicographically smallest permutation (row -> column)
// is returned: rows are fixed in order to the smallest column that still
// admits an optimal completion.
inline std::vector<int> hungarian(const DenseMatrix& cost, double* total_out = nullptr) {
  if (cost.rows != cost.cols || cost.rows == 0)
    throw std::invalid_argument("hungarian: cost matrix must be square and nonempty");
  for (double w : cost.data)
    if (!std::isfinite(w)) throw std::invalid_argument("hungarian: cost entries must be finite");
  const std::size_t K = cost.rows;
  const double best = detail::assignment_min_cost(cost);
  const double tol = 1e-9 * (1.0 + std::abs(best));

  std::vector<int> perm(K, -1);
  std::vector<bool> col_used(K, false);
  double fixed_cost = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t c = 0; c < K; ++c) {
      if (col_used[c]) continue;
      const std::size_t rem = K - i - 1;
      double completion = 0.0;
      if (rem > 0) {
        DenseMatrix sub(rem, rem);
        std::size_t cc = 0;
        for (std::size_t c2 = 0; c2 < K; ++c2) {
          if (col_used[c2] || c2 == c) continue;
          for (std::size_t r2 = i + 1; r2 < K; ++r2) sub(r2 - i - 1, cc) = cost(r2, c2);
          ++cc;
        }
        completion = detail::assignment_min_cost(sub);
      }
      if (fixed_cost + cost(i, c) + completion <= best + tol) {
        perm[i] = int(c);
        col_used[c] = true;
        fixed_cost += cost(i, c);
        break;
      }
    }
    if (perm[i] < 0) throw std::runtime_error("hungarian: no optimal completion found");
  }
  if (total_out) *total_out = fixed_cost;
  return perm;
}

// Fraction of misassigned nodes minimized over cluster relabelings,
// computed by maximum-agreement assignment on the confusion matrix.
inline double misclustering_rate(const LabeledPartition& z_hat, const LabeledPartition& z) {
  const ConfusionMatrix c = confusion(z, z_hat);
  DenseMatrix cost(c.K, c.K);
  for (std::size_t a = 0; a < c.K; ++a)
    for (std::size_t b = 0; b < c.K; ++b) cost(a, b) = -double(c.at(a, b));
  double neg_agreement = 0.0;
  hungarian(cost, &neg_agreement);
  return 1.0 + neg_agreement / double(z.n());
}

// 2 I(z1;z2) / (H(z1) + H(z2)) with natural-log entropies; two constant
// partitions are a perfect match by convention.
inline double nmi(const LabeledPartition& z1, const LabeledPartition& z2) {
  if (z1.n() != z2.n()) throw std::invalid_argument("nmi: length mismatch");
  const std::size_t n = z1.n();
  if (n == 0) throw std::invalid_argument("nmi: empty partitions");
  const std::size_t K1 = std::size_t(z1.K), K2 = std::size_t(z2.K);
  std::vector<double> joint(K1 * K2, 0.0), m1(K1, 0.0), m2(K2, 0.0);
  const double inv = 1.0 / double(n);
  for (std::size_t i = 0; i < n; ++i) {
    joint[std::size_t(z1.labels[i]) * K2 + std::size_t(z2.labels[i])] += inv;
    m1[std::size_t(z1.labels[i])] += inv;
    m2[std::size_t(z2.labels[i])] += inv;
  }
  double h1 = 0.0, h2 = 0.0, mutual = 0.0;
  for (double p : m1)
    if (p > 0.0) h1 -= p * std::log(p);
  for (double p : m2)
    if (p > 0.0) h2 -= p * std::log(p);
  for (std::size_t a = 0; a < K1; ++a)
    for (std::size_t b = 0; b < K2; ++b) {
      const double p = joint[a * K2 + b];
      if (p > 0.0) mutual += p * std::log(p / (m1[a] * m2[b]));
    }
  if (h1 + h2 == 0.0) return 1.0;
  const double value = 2.0 * mutual / (h1 + h2);
  return value < 0.0 ? 0.0 : (value > 1.0 ? 1.0 : value);
}

// Positions that differ, with no permutation minimization.
inline std::size_t hamming(const LabeledPartition& z, const LabeledPartition& z_prime) {
  if (z.n() != z_prime.n()) throw std::invalid_argument("hamming: length mismatch");
  std::size_t count = 0;
  for (std::size_t i = 0; i < z.n(); ++i)
    if (z.labels[i] != z_prime.labels[i]) ++count;
  return count;
}

struct SeparationProfile {
  DenseMatrix delta_sq;  // K x K, symmetric, zero diagonal
  double delta_min = 0.0;
  double lambda = 0.0;
};

// delta_sq(a,b) = ||mu_a - mu_b||^2 + lambda ||Pi_a: - Pi_b:||^2.
inline SeparationProfile separation_profile(const DenseMatrix& mu, const DenseMatrix& Pi,
                                            double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("separation_profile: lambda must be >= 0");
  const std::size_t K = std::max(mu.rows, Pi.rows);
  if ((mu.rows != 0 && mu.rows != K) || (Pi.rows != 0 && Pi.rows != K))
    throw std::invalid_argument("separation_profile: row count mismatch");
  SeparationProfile out;
  out.lambda = lambda;
  out.delta_sq = DenseMatrix(K, K);
  out.delta_min = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = a + 1; b < K; ++b) {
      double d = 0.0;
      if (mu.rows) d += squared_distance(mu.row(a), mu.row(b));
      if (Pi.rows) d += lambda * squared_distance(Pi.row(a), Pi.row(b));
      out.delta_sq(a, b) = out.delta_sq(b, a) = d;
      if (d < out.delta_min) out.delta_min = d;
    }
  if (K < 2) out.delta_min = 0.0;
  return out;
}

// l(z,z') = sum over disagreeing positions of delta_sq(z_i, z'_i).
inline double loss_l(const LabeledPartition& z, const LabeledPartition& z_prime,
                     const SeparationProfile& profile) {
  if (z.n() != z_prime.n()) throw std::invalid_argument("loss_l: length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < z.n(); ++i)
    if (z.labels[i] != z_prime.labels[i])
      total += profile.delta_sq(std::size_t(z.labels[i]), std::size_t(z_prime.labels[i]));
  return total;
}

// SNR combining the smallest covariate-center gap with the Chernoff-type
// graph term: (1/8) min ||mu_k - mu_k'||^2 + (log n / K)(sqrt(p')-sqrt(q'))^2.
inline double snr_tilde(const DenseMatrix& mu, double p_prime, double q_prime, std::size_t n,
                        std::size_t K) {
  if (!(p_prime >= q_prime && q_prime > 0.0))
    throw std::invalid_argument("snr_tilde: require p' >= q' > 0");
  if (K < 2) throw std::invalid_argument("snr_tilde: require K >= 2");
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < mu.rows; ++a)
    for (std::size_t b = a + 1; b < mu.rows; ++b)
      min_gap = std::min(min_gap, squared_distance(mu.row(a), mu.row(b)));
  if (!(min_gap < std::numeric_limits<double>::infinity())) min_gap = 0.0;
  const double graph = (std::log(double(n)) / double(K)) *
                       (std::sqrt(p_prime) - std::sqrt(q_prime)) *
                       (std::sqrt(p_prime) - std::sqrt(q_prime));
  return min_gap / 8.0 + graph;
}

}  // namespace irclust
