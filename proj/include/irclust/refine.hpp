#pragma once

// Iterative refinement clustering. Each iteration estimates block model
// parameters from the current partition (Pi_hat = W^T A W, mu_hat = cluster
// means) and reassigns every node synchronously by a weighted least-squares
// criterion over its connectivity profile A_i: W and covariates. Three
// weightings are provided (full diagonal, spherical, symmetric-model), plus
// the intra-connectivity argmax step for signed graphs and a Bernoulli
// likelihood (MAP) criterion used as a baseline.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "irclust/dense_matrix.hpp"
#include "irclust/metrics.hpp"
#include "irclust/partition.hpp"
#include "irclust/sparse_symmetric.hpp"

namespace irclust {

enum class IrVariant { ir_ls, sir_ls, ir_lss };

inline const char* to_string(IrVariant v) {
  switch (v) {
    case IrVariant::ir_ls: return "ir-ls";
    case IrVariant::sir_ls: return "sir-ls";
    case IrVariant::ir_lss: return "ir-lss";
  }
  return "?";
}

struct BlockParams {
  std::vector<std::size_t> cluster_sizes;  // n_k
  DenseMatrix pi_hat;                      // K x K
  DenseMatrix mu_hat;                      // K x d, 0 x 0 without covariates

  std::size_t K() const { return cluster_sizes.size(); }
  std::size_t n() const {
    std::size_t total = 0;
    for (std::size_t s : cluster_sizes) total += s;
    return total;
  }
};

// Pi_hat = W^T A W (exactly symmetric by construction), mu_hat = per-cluster
// covariate means. Requires every cluster nonempty.
inline BlockParams estimate_params(const SparseSymmetric& a, const DenseMatrix* x,
                                   const LabeledPartition& z) {
  if (z.n() != a.n) throw std::invalid_argument("estimate_params: partition length mismatch");
  if (x && x->cols != 0 && x->rows != a.n)
    throw std::invalid_argument("estimate_params: covariate row mismatch");
  BlockParams params;
  const std::size_t K = std::size_t(z.K);
  params.cluster_sizes = z.cluster_sizes();
  for (std::size_t s : params.cluster_sizes)
    if (s == 0)
      throw std::runtime_error("estimate_params: empty cluster; the refine guard must run first");

  params.pi_hat = DenseMatrix(K, K);
  for (const auto& e : a.entries) {
    const std::size_t ki = std::size_t(z.labels[e.i]), kj = std::size_t(z.labels[e.j]);
    params.pi_hat(ki, kj) += e.w;
    if (e.i != e.j) params.pi_hat(kj, ki) += e.w;
  }
  for (std::size_t p = 0; p < K; ++p)
    for (std::size_t q = 0; q < K; ++q)
      params.pi_hat(p, q) /= double(params.cluster_sizes[p]) * double(params.cluster_sizes[q]);

  if (x && x->cols != 0) {
    params.mu_hat = DenseMatrix(K, x->cols);
    for (std::size_t i = 0; i < a.n; ++i)
      for (std::size_t c = 0; c < x->cols; ++c)
        params.mu_hat(std::size_t(z.labels[i]), c) += (*x)(i, c);
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t c = 0; c < x->cols; ++c)
        params.mu_hat(k, c) /= double(params.cluster_sizes[k]);
  }
  return params;
}

inline double default_clamp_eps(std::size_t n) { return 1.0 / (double(n) * double(n)); }

inline double clamp_probability(double p, double eps) {
  return p < eps ? eps : (p > 1.0 - eps ? 1.0 - eps : p);
}

// Variant-specific weights for the graph term of the refinement criterion.
struct SigmaSpec {
  IrVariant variant = IrVariant::sir_ls;
  DenseMatrix weights;  // ir_ls: K x K (row k = diagonal of Sigma_k); else 1 x 1 scalar

  double weight(std::size_t k, std::size_t kp) const {
    return variant == IrVariant::ir_ls ? weights(k, kp) : weights(0, 0);
  }
  double scalar() const { return weights(0, 0); }
};

inline SigmaSpec sigma_spec(IrVariant variant, const BlockParams& params, double clamp_eps = 0.0) {
  const std::size_t K = params.K();
  const std::size_t n = params.n();
  if (clamp_eps <= 0.0) clamp_eps = default_clamp_eps(n);

  DenseMatrix clamped = params.pi_hat;
  for (double& v : clamped.data) v = clamp_probability(v, clamp_eps);

  SigmaSpec spec;
  spec.variant = variant;
  switch (variant) {
    case IrVariant::ir_ls: {
      spec.weights = DenseMatrix(K, K);
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t kp = 0; kp < K; ++kp)
          spec.weights(k, kp) = double(params.cluster_sizes[kp]) / clamped(k, kp);
      break;
    }
    case IrVariant::sir_ls: {
      std::size_t n_min = params.cluster_sizes[0];
      for (std::size_t s : params.cluster_sizes) n_min = std::min(n_min, s);
      double pi_max = clamped.data[0];
      for (double v : clamped.data) pi_max = std::max(pi_max, v);
      spec.weights = DenseMatrix(1, 1, double(n_min) / pi_max);
      break;
    }
    case IrVariant::ir_lss: {
      double p = 0.0, q = 0.0;
      for (std::size_t k = 0; k < K; ++k) p += clamped(k, k);
      p /= double(K);
      if (K > 1) {
        for (std::size_t k = 0; k < K; ++k)
          for (std::size_t kp = 0; kp < K; ++kp)
            if (k != kp) q += clamped(k, kp);
        q /= double(K * K - K);
      }
      if (p <= q) throw std::domain_error("non-assortative estimate; use IR-LS or sIR-LS");
      const double lambda = double(n) / (double(K) * (p - q)) *
                            std::log(p * (1.0 - q) / (q * (1.0 - p)));
      spec.weights = DenseMatrix(1, 1, lambda);
      break;
    }
  }
  for (double v : spec.weights.data)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::runtime_error("sigma_spec: weights must be finite and positive");
  return spec;
}

namespace detail {

// B = A W from the snapshot partition: B(i,k) = sum_{j in C_k} A_ij / n_k.
inline DenseMatrix connectivity_profile(const SparseSymmetric& a, const LabeledPartition& z,
                                        const std::vector<std::size_t>& sizes) {
  DenseMatrix b(a.n, sizes.size());
  for (const auto& e : a.entries) {
    b(e.i, std::size_t(z.labels[e.j])) += e.w / double(sizes[std::size_t(z.labels[e.j])]);
    if (e.i != e.j)
      b(e.j, std::size_t(z.labels[e.i])) += e.w / double(sizes[std::size_t(z.labels[e.i])]);
  }
  return b;
}

// Per-node, per-cluster assignment cost (lower is better) for the
// least-squares variants.
inline DenseMatrix ls_cost_matrix(const SparseSymmetric& a, const DenseMatrix* x,
                                  const BlockParams& params, const SigmaSpec& sigma,
                                  double sigma_noise, const LabeledPartition& z_in) {
  const std::size_t K = params.K();
  const bool with_cov = x && x->cols != 0;
  if (with_cov && !(sigma_noise > 0.0))
    throw std::invalid_argument("refine_step: sigma_noise must be positive with covariates");
  const DenseMatrix b = connectivity_profile(a, z_in, params.cluster_sizes);
  DenseMatrix cost(a.n, K);
  const double inv_var = with_cov ? 1.0 / (sigma_noise * sigma_noise) : 0.0;
  for (std::size_t i = 0; i < a.n; ++i)
    for (std::size_t k = 0; k < K; ++k) {
      double graph = 0.0;
      for (std::size_t kp = 0; kp < K; ++kp) {
        const double diff = b(i, kp) - params.pi_hat(k, kp);
        graph += sigma.weight(k, kp) * diff * diff;
      }
      double cov = 0.0;
      if (with_cov) cov = squared_distance(x->row(i), params.mu_hat.row(k)) * inv_var;
      cost(i, k) = graph + cov;
    }
  return cost;
}

inline LabeledPartition argmin_assignment(const DenseMatrix& cost, int K) {
  std::vector<int> labels(cost.rows, 0);
  for (std::size_t i = 0; i < cost.rows; ++i) {
    int best = 0;
    double best_c = cost(i, 0);
    for (std::size_t k = 1; k < std::size_t(K); ++k)
      if (cost(i, k) < best_c) {  // strict: ties stay at the lowest index
        best_c = cost(i, k);
        best = int(k);
      }
    labels[i] = best;
  }
  return LabeledPartition(std::move(labels), K);
}

// Relocate the cheapest nodes into emptied clusters so K stays fixed.
// Returns the number of relocations performed.
inline std::size_t fill_empty_clusters(const DenseMatrix& cost, LabeledPartition& z) {
  const std::size_t K = std::size_t(z.K);
  std::size_t fires = 0;
  const std::size_t fire_cap = 2 * K;
  for (;;) {
    std::vector<std::size_t> sizes = z.cluster_sizes();
    std::size_t empty = K;
    for (std::size_t k = 0; k < K; ++k)
      if (sizes[k] == 0) {
        empty = k;
        break;
      }
    if (empty == K || fires >= fire_cap) break;

    std::size_t pick = z.n();
    double pick_margin = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < 2 && pick == z.n(); ++pass) {
      const std::size_t donor_min = pass == 0 ? 2 : 1;  // prefer clusters that stay nonempty
      for (std::size_t i = 0; i < z.n(); ++i) {
        if (sizes[std::size_t(z.labels[i])] < donor_min) continue;
        const double margin = cost(i, empty) - cost(i, std::size_t(z.labels[i]));
        if (margin < pick_margin) {
          pick_margin = margin;
          pick = i;
        }
      }
    }
    if (pick == z.n()) break;
    z.labels[pick] = int(empty);
    ++fires;
  }
  return fires;
}

}  // namespace detail

// One synchronous refinement sweep: every node is reassigned against the
// snapshot parameters; ties go to the lowest cluster index.
inline LabeledPartition refine_step(const SparseSymmetric& a, const DenseMatrix* x,
                                    const BlockParams& params, const SigmaSpec& sigma,
                                    double sigma_noise, const LabeledPartition& z_in) {
  const DenseMatrix cost = detail::ls_cost_matrix(a, x, params, sigma, sigma_noise, z_in);
  return detail::argmin_assignment(cost, int(params.K()));
}

// Signed-graph update: z_i = argmax_k (A W)_ik, ties to the lowest index.
inline LabeledPartition ir_ssbm_step(const SparseSymmetric& a_signed,
                                     const LabeledPartition& z_in) {
  const std::vector<std::size_t> sizes = z_in.cluster_sizes();
  for (std::size_t s : sizes)
    if (s == 0) throw std::runtime_error("ir_ssbm_step: empty cluster in input partition");
  const DenseMatrix b = detail::connectivity_profile(a_signed, z_in, sizes);
  std::vector<int> labels(a_signed.n, 0);
  for (std::size_t i = 0; i < a_signed.n; ++i) {
    int best = 0;
    double best_v = b(i, 0);
    for (std::size_t k = 1; k < sizes.size(); ++k)
      if (b(i, k) > best_v) {
        best_v = b(i, k);
        best = int(k);
      }
    labels[i] = best;
  }
  return LabeledPartition(std::move(labels), z_in.K);
}

// Bernoulli + Gaussian likelihood update. The graph term sums over every
// other node, so a sweep costs O(n^2 K) regardless of sparsity.
inline LabeledPartition ir_map_step(const SparseSymmetric& a, const DenseMatrix* x,
                                    const BlockParams& params, double sigma_noise,
                                    const LabeledPartition& z_in, double clamp_eps = 0.0) {
  const std::size_t n = a.n, K = params.K();
  if (clamp_eps <= 0.0) clamp_eps = default_clamp_eps(n);
  const bool with_cov = x && x->cols != 0;
  if (with_cov && !(sigma_noise > 0.0))
    throw std::invalid_argument("ir_map_step: sigma_noise must be positive with covariates");

  DenseMatrix logp(K, K), log1m(K, K);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t kp = 0; kp < K; ++kp) {
      const double p = clamp_probability(params.pi_hat(k, kp), clamp_eps);
      logp(k, kp) = std::log(p);
      log1m(k, kp) = std::log(1.0 - p);
    }

  const SymmetricRows rows(a);
  std::vector<double> arow(n, 0.0);
  std::vector<int> labels(n, 0);
  const double inv_two_var = with_cov ? 1.0 / (2.0 * sigma_noise * sigma_noise) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto cols = rows.row_cols(i);
    const auto vals = rows.row_vals(i);
    for (std::size_t t = 0; t < cols.size(); ++t) arow[cols[t]] = vals[t];

    int best = 0;
    double best_s = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const std::size_t zj = std::size_t(z_in.labels[j]);
        s += arow[j] * logp(k, zj) + (1.0 - arow[j]) * log1m(k, zj);
      }
      if (with_cov) s -= squared_distance(x->row(i), params.mu_hat.row(k)) * inv_two_var;
      if (s > best_s) {
        best_s = s;
        best = int(k);
      }
    }
    labels[i] = best;
    for (std::size_t t = 0; t < cols.size(); ++t) arow[cols[t]] = 0.0;
  }
  return LabeledPartition(std::move(labels), int(K));
}

struct RefineIteration {
  std::size_t changed = 0;
  double objective = 0.0;  // total assignment cost of the new labels (lower is better)
  double loss_to_truth = std::numeric_limits<double>::quiet_NaN();
  std::size_t hamming_to_truth = std::size_t(-1);
  double wall_ms = 0.0;
};

struct RefinementTrace {
  std::vector<RefineIteration> iterations;  // [0] is the initial partition
  bool converged = false;                   // a sweep left the partition unchanged
  bool degenerate = false;                  // empty-cluster guard fired past its cap
  std::size_t guard_relocations = 0;
};

struct IrOptions {
  static constexpr std::size_t default_T = std::size_t(-1);
  std::size_t T = default_T;  // default_T -> ceil(3 log2 n); 0 runs no sweeps
  double clamp_eps = 0.0;     // 0 -> 1/n^2
  bool early_stop = true;
  const LabeledPartition* truth = nullptr;        // optional trace diagnostics
  const SeparationProfile* profile = nullptr;     // enables loss_to_truth
};

inline std::size_t default_refine_iterations(std::size_t n) {
  return std::size_t(std::ceil(3.0 * std::log2(double(std::max<std::size_t>(n, 2)))));
}

namespace detail {

template <typename CostFn>
std::pair<LabeledPartition, RefinementTrace> refine_loop(const SparseSymmetric& a,
                                                         const LabeledPartition& z0,
                                                         const IrOptions& opt, CostFn cost_fn) {
  LabeledPartition z = z0;
  z.validate();
  if (z.has_empty_cluster())
    throw std::invalid_argument("refinement: initial partition has an empty cluster");

  const std::size_t T = opt.T == IrOptions::default_T ? default_refine_iterations(a.n) : opt.T;
  RefinementTrace trace;

  auto diag = [&](const LabeledPartition& part, std::size_t changed, double objective,
                  double ms) {
    RefineIteration it;
    it.changed = changed;
    it.objective = objective;
    it.wall_ms = ms;
    if (opt.truth) {
      it.hamming_to_truth = hamming(part, *opt.truth);
      if (opt.profile) it.loss_to_truth = loss_l(*opt.truth, part, *opt.profile);
    }
    trace.iterations.push_back(it);
  };
  diag(z, 0, std::numeric_limits<double>::quiet_NaN(), 0.0);

  for (std::size_t t = 0; t < T; ++t) {
    const auto start = std::chrono::steady_clock::now();
    DenseMatrix cost = cost_fn(z);  // n x K, lower is better
    LabeledPartition z_next = argmin_assignment(cost, z.K);
    const std::size_t fires = fill_empty_clusters(cost, z_next);
    trace.guard_relocations += fires;
    if (fires > std::size_t(z.K)) trace.degenerate = true;

    std::size_t changed = 0;
    for (std::size_t i = 0; i < z.n(); ++i)
      if (z.labels[i] != z_next.labels[i]) ++changed;
    double objective = 0.0;
    for (std::size_t i = 0; i < z.n(); ++i) objective += cost(i, std::size_t(z_next.labels[i]));
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    z = std::move(z_next);
    diag(z, changed, objective, ms);
    if (changed == 0 && opt.early_stop) {
      trace.converged = true;
      break;
    }
    if (changed == 0) trace.converged = true;
  }
  return {std::move(z), std::move(trace)};
}

}  // namespace detail

// The full iterative refinement loop for the least-squares variants:
// alternate estimate_params / sigma_spec / refine_step until the partition
// stabilizes or T sweeps have run.
inline std::pair<LabeledPartition, RefinementTrace> ir_cluster(const SparseSymmetric& a,
                                                               const DenseMatrix* x,
                                                               double sigma_noise,
                                                               const LabeledPartition& z0,
                                                               IrVariant variant,
                                                               const IrOptions& opt = {}) {
  return detail::refine_loop(a, z0, opt, [&](const LabeledPartition& z) {
    const BlockParams params = estimate_params(a, x, z);
    const SigmaSpec sigma = sigma_spec(variant, params, opt.clamp_eps);
    return detail::ls_cost_matrix(a, x, params, sigma, sigma_noise, z);
  });
}

inline std::pair<LabeledPartition, RefinementTrace> ir_ssbm(const SparseSymmetric& a_signed,
                                                            const LabeledPartition& z0,
                                                            const IrOptions& opt = {}) {
  return detail::refine_loop(a_signed, z0, opt, [&](const LabeledPartition& z) {
    const std::vector<std::size_t> sizes = z.cluster_sizes();
    DenseMatrix cost = detail::connectivity_profile(a_signed, z, sizes);
    for (double& v : cost.data) v = -v;  // argmax of AW as a min-cost problem
    return cost;
  });
}

inline std::pair<LabeledPartition, RefinementTrace> ir_map(const SparseSymmetric& a,
                                                           const DenseMatrix* x,
                                                           double sigma_noise,
                                                           const LabeledPartition& z0,
                                                           const IrOptions& opt = {}) {
  const std::size_t n = a.n;
  const double clamp_eps = opt.clamp_eps > 0.0 ? opt.clamp_eps : default_clamp_eps(n);
  const bool with_cov = x && x->cols != 0;
  const SymmetricRows rows(a);
  return detail::refine_loop(a, z0, opt, [&, clamp_eps](const LabeledPartition& z) {
    const BlockParams params = estimate_params(a, x, z);
    const std::size_t K = params.K();
    DenseMatrix logp(K, K), log1m(K, K);
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t kp = 0; kp < K; ++kp) {
        const double p = clamp_probability(params.pi_hat(k, kp), clamp_eps);
        logp(k, kp) = std::log(p);
        log1m(k, kp) = std::log(1.0 - p);
      }
    DenseMatrix cost(n, K);
    std::vector<double> arow(n, 0.0);
    const double inv_two_var = with_cov ? 1.0 / (2.0 * sigma_noise * sigma_noise) : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto cols = rows.row_cols(i);
      const auto vals = rows.row_vals(i);
      for (std::size_t t = 0; t < cols.size(); ++t) arow[cols[t]] = vals[t];
      for (std::size_t k = 0; k < K; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          const std::size_t zj = std::size_t(z.labels[j]);
          s += arow[j] * logp(k, zj) + (1.0 - arow[j]) * log1m(k, zj);
        }
        if (with_cov) s -= squared_distance(x->row(i), params.mu_hat.row(k)) * inv_two_var;
        cost(i, k) = -s;
      }
      for (std::size_t t = 0; t < cols.size(); ++t) arow[cols[t]] = 0.0;
    }
    return cost;
  });
}

// Pooled within-cluster standard deviation; the explicit opt-in estimator
// for real data where sigma is unknown.
inline double estimate_sigma_pooled(const DenseMatrix& x, const LabeledPartition& z) {
  if (x.rows != z.n() || x.cols == 0)
    throw std::invalid_argument("estimate_sigma_pooled: bad covariate matrix");
  const std::size_t K = std::size_t(z.K);
  DenseMatrix means(K, x.cols);
  std::vector<std::size_t> sizes = z.cluster_sizes();
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t c = 0; c < x.cols; ++c) means(std::size_t(z.labels[i]), c) += x(i, c);
  for (std::size_t k = 0; k < K; ++k)
    if (sizes[k] > 0)
      for (std::size_t c = 0; c < x.cols; ++c) means(k, c) /= double(sizes[k]);
  double ss = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i)
    ss += squared_distance(x.row(i), means.row(std::size_t(z.labels[i])));
  return std::sqrt(ss / (double(x.rows) * double(x.cols)));
}

}  // namespace irclust
