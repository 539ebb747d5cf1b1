#pragma once

// Top-K eigenpairs of a sparse symmetric matrix, ranked by |eigenvalue|.
// Small matrices (n <= 512) go through the dense tridiagonalization path;
// larger ones use Lanczos with full reorthogonalization. Converged Ritz
// pairs are locked and the iteration restarts deflated against them, which
// also recovers repeated eigenvalues.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "irclust/dense_matrix.hpp"
#include "irclust/eigen_dense.hpp"
#include "irclust/rng.hpp"
#include "irclust/sparse_symmetric.hpp"

namespace irclust {

struct EigenDecompTopK {
  std::vector<double> values;     // sorted by descending |value|
  DenseMatrix vectors;            // n x K, orthonormal columns
  std::vector<double> residuals;  // ||A v_k - value_k v_k||
  bool converged = false;
  std::size_t matvecs = 0;
};

namespace detail {

constexpr std::size_t kDenseEigsThreshold = 512;

// |value| descending; ties broken toward the positive value, then by index.
inline std::vector<std::size_t> rank_by_abs(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double aa = std::abs(values[a]), ab = std::abs(values[b]);
    if (aa != ab) return aa > ab;
    if (values[a] != values[b]) return values[a] > values[b];
    return a < b;
  });
  return order;
}

inline void canonicalize_sign(DenseMatrix& vectors, std::size_t col) {
  std::size_t arg = 0;
  double best = -1.0;
  for (std::size_t r = 0; r < vectors.rows; ++r) {
    const double a = std::abs(vectors(r, col));
    if (a > best) {
      best = a;
      arg = r;
    }
  }
  if (vectors(arg, col) < 0.0)
    for (std::size_t r = 0; r < vectors.rows; ++r) vectors(r, col) = -vectors(r, col);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void orthogonalize_against(std::vector<double>& w,
                                  const std::vector<std::vector<double>>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& u : basis) axpy(-dot(w, u), u, w);
}

}  // namespace detail

inline EigenDecompTopK eigs_topk_abs(const SparseSymmetric& a, std::size_t K,
                                     double tol = 1e-8, std::size_t max_iter = 0,
                                     std::uint64_t seed = 0) {
  if (K < 1 || K > a.n) throw std::invalid_argument("eigs_topk_abs: require 1 <= K <= n");
  if (!(tol > 0.0)) throw std::invalid_argument("eigs_topk_abs: tol must be positive");
  if (max_iter == 0) max_iter = 10 * a.n;

  const std::size_t n = a.n;
  EigenDecompTopK out;
  out.vectors = DenseMatrix(n, K);

  if (n <= detail::kDenseEigsThreshold) {
    SymmetricEigenResult full = eigen_symmetric_dense(a.to_dense());
    const auto order = detail::rank_by_abs(full.values);
    for (std::size_t k = 0; k < K; ++k) {
      out.values.push_back(full.values[order[k]]);
      for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = full.vectors(r, order[k]);
      detail::canonicalize_sign(out.vectors, k);
    }
  } else {
    std::vector<std::vector<double>> locked;
    std::vector<double> locked_values;
    Rng rng(mix_seed(seed, hash_string("eigs")));
    std::size_t matvecs = 0;
    bool gave_up = false;

    while (locked.size() < K && !gave_up) {
      const std::size_t want = K - locked.size();
      const std::size_t cap = std::min(n - locked.size(), std::max(4 * K + 80, std::size_t(240)));

      // Fresh start vector in the orthogonal complement of the locked pairs.
      std::vector<double> v(n);
      double vnorm = 0.0;
      do {
        for (double& x : v) x = rng.gaussian(0.0, 1.0);
        detail::orthogonalize_against(v, locked);
        vnorm = detail::norm2(v);
      } while (vnorm < 1e-12);
      for (double& x : v) x /= vnorm;

      std::vector<std::vector<double>> basis{v};
      std::vector<double> alpha, beta;
      double scale_est = 1.0;
      bool breakdown = false;

      while (true) {
        std::vector<double> w = a.multiply(basis.back());
        ++matvecs;
        const double aj = detail::dot(w, basis.back());
        alpha.push_back(aj);
        detail::axpy(-aj, basis.back(), w);
        if (basis.size() >= 2) detail::axpy(-beta.back(), basis[basis.size() - 2], w);
        detail::orthogonalize_against(w, locked);
        detail::orthogonalize_against(w, basis);
        const double bj = detail::norm2(w);
        scale_est = std::max({scale_est, std::abs(aj), bj});
        breakdown = bj <= 1e-12 * scale_est;

        const std::size_t m = alpha.size();
        const bool at_cap = m >= cap || matvecs >= max_iter;
        if (breakdown || at_cap || m % 8 == 0) {
          SymmetricEigenResult tri = eigen_symmetric_tridiagonal(alpha, beta);
          const auto order = detail::rank_by_abs(tri.values);
          const std::size_t take = std::min(want, m);
          bool all_ok = true;
          for (std::size_t t = 0; t < take; ++t) {
            const double est = breakdown ? 0.0 : std::abs(bj * tri.vectors(m - 1, order[t]));
            if (est > 0.5 * tol * std::max(1.0, scale_est)) all_ok = false;
          }
          if (all_ok || breakdown || at_cap) {
            std::size_t locked_now = 0;
            for (std::size_t t = 0; t < take && locked.size() < K; ++t) {
              const double est = breakdown ? 0.0 : std::abs(bj * tri.vectors(m - 1, order[t]));
              if (est > 0.5 * tol * std::max(1.0, scale_est) && !at_cap && !breakdown) continue;
              if (est > tol * std::max(1.0, scale_est) && at_cap && !breakdown) continue;
              std::vector<double> y(n, 0.0);
              for (std::size_t c = 0; c < m; ++c)
                detail::axpy(tri.vectors(c, order[t]), basis[c], y);
              detail::orthogonalize_against(y, locked);
              const double ynorm = detail::norm2(y);
              if (ynorm < 1e-12) continue;
              for (double& x : y) x /= ynorm;
              locked.push_back(std::move(y));
              locked_values.push_back(tri.values[order[t]]);
              ++locked_now;
            }
            if (breakdown || at_cap || locked.size() >= K) {
              if (at_cap && locked_now == 0 && !breakdown) gave_up = true;
              break;
            }
          }
        }
        if (breakdown) break;
        for (double& x : w) x /= bj;
        beta.push_back(bj);
        basis.push_back(std::move(w));
      }
      if (matvecs >= max_iter && locked.size() < K) gave_up = true;
    }

    // Order locked pairs by |value| and copy out; pad (unconverged case)
    // with whatever we have if the budget ran out early.
    const auto order = detail::rank_by_abs(locked_values);
    const std::size_t have = std::min(K, locked.size());
    for (std::size_t k = 0; k < have; ++k) {
      out.values.push_back(locked_values[order[k]]);
      for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = locked[order[k]][r];
      detail::canonicalize_sign(out.vectors, k);
    }
    for (std::size_t k = have; k < K; ++k) out.values.push_back(0.0);
    out.matvecs = matvecs;
  }

  // True residuals decide convergence for both paths.
  out.residuals.assign(K, 0.0);
  const double scale = std::max(1.0, out.values.empty() ? 0.0 : std::abs(out.values[0]));
  out.converged = true;
  std::vector<double> col(n);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t r = 0; r < n; ++r) col[r] = out.vectors(r, k);
    std::vector<double> av = a.multiply(col);
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double d = av[r] - out.values[k] * col[r];
      s += d * d;
    }
    out.residuals[k] = std::sqrt(s);
    if (out.residuals[k] > tol * scale) out.converged = false;
  }
  return out;
}

}  // namespace irclust
