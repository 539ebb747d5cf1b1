#pragma once

// Initialization and baseline clusterers: spectral clustering on the
// adjacency / regularized normalized adjacency / covariate kernel, the
// embedding-plus-covariates GMM initializer, its signed-graph counterpart,
// and the oracle regularized combination baseline.

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "irclust/dense_matrix.hpp"
#include "irclust/eigs.hpp"
#include "irclust/gmm.hpp"
#include "irclust/kmeans.hpp"
#include "irclust/metrics.hpp"
#include "irclust/partition.hpp"
#include "irclust/rng.hpp"
#include "irclust/sparse_symmetric.hpp"

namespace irclust {

struct EigsFailure : std::runtime_error {
  explicit EigsFailure(const EigenDecompTopK& decomp)
      : std::runtime_error("eigensolver did not converge; worst residual " +
                           std::to_string(worst(decomp))) {}
  static double worst(const EigenDecompTopK& d) {
    double w = 0.0;
    for (double r : d.residuals) w = std::max(w, r);
    return w;
  }
};

namespace detail {

inline DenseMatrix embedding_or_throw(const SparseSymmetric& m, std::size_t K, double tol,
                                      std::size_t max_iter, std::uint64_t seed) {
  EigenDecompTopK decomp = eigs_topk_abs(m, K, tol, max_iter, seed);
  if (!decomp.converged) throw EigsFailure(decomp);
  return std::move(decomp.vectors);
}

}  // namespace detail

enum class SpectralMode { adjacency, sym_laplacian };

// Spectral clustering: embed by the top-K |eigenvalue| eigenvectors of the
// matrix (adjacency mode) or of D^-1/2 M D^-1/2 with degrees regularized by
// the mean degree (sym_laplacian mode), then k-means on the rows.
inline LabeledPartition spectral_cluster(const SparseSymmetric& m, std::size_t K,
                                         SpectralMode mode, std::uint64_t seed,
                                         double eigs_tol = 1e-8, std::size_t eigs_max_iter = 0) {
  if (m.n < K) throw std::invalid_argument("spectral_cluster: require n >= K");
  DenseMatrix embedding;
  if (mode == SpectralMode::adjacency) {
    embedding = detail::embedding_or_throw(m, K, eigs_tol, eigs_max_iter,
                                           mix_seed(seed, hash_string("spectral")));
  } else {
    std::vector<double> deg = m.degrees();
    double tau = 0.0;
    for (double d : deg) tau += d;
    tau /= double(m.n);
    if (tau <= 0.0) tau = 1.0;  // empty graph; keep the scaling defined
    std::vector<double> inv_sqrt(m.n);
    for (std::size_t i = 0; i < m.n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(deg[i] + tau);
    SparseSymmetric normalized(m.n);
    normalized.entries.reserve(m.nnz());
    for (const auto& e : m.entries)
      normalized.entries.push_back({e.i, e.j, e.w * inv_sqrt[e.i] * inv_sqrt[e.j]});
    embedding = detail::embedding_or_throw(normalized, K, eigs_tol, eigs_max_iter,
                                           mix_seed(seed, hash_string("spectral")));
  }
  return kmeans(embedding, K, 10, 100, mix_seed(seed, hash_string("spectral-kmeans")));
}

// K_ij = exp(-||X_i - X_j||^2 / (2 bandwidth^2)), unit diagonal, stored
// densely in sparse form.
inline SparseSymmetric gaussian_kernel(const DenseMatrix& x, double bandwidth) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("gaussian_kernel: bandwidth must be > 0");
  const std::size_t n = x.rows;
  SparseSymmetric k(n);
  k.entries.reserve(n * (n + 1) / 2);
  const double denom = 2.0 * bandwidth * bandwidth;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double w = i == j ? 1.0 : std::exp(-squared_distance(x.row(i), x.row(j)) / denom);
      if (w != 0.0) k.entries.push_back({std::uint32_t(i), std::uint32_t(j), w});
    }
  return k;
}

// Median heuristic bandwidth: median over all pairwise distances.
inline double median_pairwise_distance(const DenseMatrix& x) {
  const std::size_t n = x.rows;
  if (n < 2) throw std::invalid_argument("median_pairwise_distance: need at least two rows");
  std::vector<double> dists;
  dists.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dists.push_back(std::sqrt(squared_distance(x.row(i), x.row(j))));
  std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
  return dists[dists.size() / 2];
}

struct EmEmbOptions {
  GmmOptions gmm;
  double eigs_tol = 1e-8;
  std::size_t eigs_max_iter = 0;
};

// Embed the graph by its top-K eigenvectors, append the covariate columns,
// and cluster the concatenated rows with a Gaussian mixture.
inline std::pair<LabeledPartition, GmmModel> em_emb_full(const SparseSymmetric& a,
                                                         const DenseMatrix& x, std::size_t K,
                                                         const EmEmbOptions& opt = {},
                                                         std::uint64_t seed = 0) {
  if (x.cols != 0 && x.rows != a.n) throw std::invalid_argument("em_emb: covariate row mismatch");
  DenseMatrix u = detail::embedding_or_throw(a, K, opt.eigs_tol, opt.eigs_max_iter,
                                             mix_seed(seed, hash_string("em-emb")));
  DenseMatrix merged = hconcat(u, x);
  return gmm_em(merged, K, opt.gmm, mix_seed(seed, hash_string("em-emb-gmm")));
}

inline LabeledPartition em_emb(const SparseSymmetric& a, const DenseMatrix& x, std::size_t K,
                               const EmEmbOptions& opt = {}, std::uint64_t seed = 0) {
  return em_emb_full(a, x, K, opt, seed).first;
}

// Signed graphs: spectral clustering straight on the signed adjacency.
inline LabeledPartition signed_spectral_init(const SparseSymmetric& a_signed, std::size_t K,
                                             std::uint64_t seed) {
  return spectral_cluster(a_signed, K, SpectralMode::adjacency, seed);
}

struct OrlScResult {
  LabeledPartition labels;
  double best_lambda = 0.0;
  double best_nmi = 0.0;
};

// 20 logarithmically spaced values spanning (||A|| / ||Kmat||) * 10^{+-2}.
inline std::vector<double> default_orl_grid(const SparseSymmetric& a, const SparseSymmetric& kmat,
                                            std::uint64_t seed = 0) {
  const double na = std::abs(eigs_topk_abs(a, 1, 1e-6, 0, mix_seed(seed, 1)).values[0]);
  const double nk = std::abs(eigs_topk_abs(kmat, 1, 1e-6, 0, mix_seed(seed, 2)).values[0]);
  const double centre = nk > 0.0 ? (na > 0.0 ? na / nk : 1.0) : 1.0;
  std::vector<double> grid(20);
  for (std::size_t g = 0; g < 20; ++g) {
    const double expo = -2.0 + 4.0 * double(g) / 19.0;
    grid[g] = centre * std::pow(10.0, expo);
  }
  return grid;
}

// Oracle baseline: spectral clustering of A + lambda*Kmat with lambda
// chosen to maximize NMI against the true partition. Every grid point is
// evaluated with the same seed, so lambda = 0 reproduces plain spectral
// clustering of A exactly.
inline OrlScResult orl_sc(const SparseSymmetric& a, const SparseSymmetric& kmat, std::size_t K,
                          const LabeledPartition& z_true, std::span<const double> lambda_grid,
                          std::uint64_t seed) {
  if (lambda_grid.empty()) throw std::invalid_argument("orl_sc: empty lambda grid");
  OrlScResult best;
  bool first = true;
  for (double lambda : lambda_grid) {
    SparseSymmetric combined = add_scaled(a, 1.0, kmat, lambda);
    LabeledPartition labels = spectral_cluster(combined, K, SpectralMode::adjacency, seed);
    const double score = nmi(labels, z_true);
    if (first || score > best.best_nmi) {
      best = {std::move(labels), lambda, score};
      first = false;
    }
  }
  return best;
}

}  // namespace irclust
