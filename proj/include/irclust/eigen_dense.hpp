#pragma once

// Full eigendecomposition of dense symmetric matrices: Householder
// reduction to tridiagonal form followed by implicit-shift QL iteration
// with eigenvector accumulation. Also exposes the tridiagonal solve on
// its own, which the Lanczos driver uses for the Ritz step.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "irclust/dense_matrix.hpp"

namespace irclust {

struct SymmetricEigenResult {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // column k is the eigenvector of values[k]
};

namespace detail {

// Householder reduction of a (overwritten with the accumulated transform)
// to tridiagonal form with diagonal d and subdiagonal e (e[0] unused).
inline void householder_tridiagonalize(DenseMatrix& a, std::vector<double>& d,
                                       std::vector<double>& e) {
  const int n = int(a.rows);
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (int i = n - 1; i >= 1; --i) {
    const int l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (int k = 0; k <= l; ++k) scale += std::abs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          a(j, i) = a(i, j) / h;
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (int k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    const int l = i - 1;
    if (d[i] != 0.0) {
      for (int j = 0; j <= l; ++j) {
        double g = 0.0;
        for (int k = 0; k <= l; ++k) g += a(i, k) * a(k, j);
        for (int k = 0; k <= l; ++k) a(k, j) -= g * a(k, i);
      }
    }
    d[i] = a(i, i);
    a(i, i) = 1.0;
    for (int j = 0; j <= l; ++j) a(j, i) = a(i, j) = 0.0;
  }
}

// QL with implicit shifts on (d, e); rotations are accumulated into the
// columns of z. On return d holds eigenvalues (unsorted).
inline void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, DenseMatrix& z) {
  const int n = int(d.size());
  if (n == 0) return;
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 64) throw std::runtime_error("tridiagonal QL: too many iterations");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          e[i + 1] = r = std::hypot(f, g);
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          d[i + 1] = g + (p = s * r);
          g = c * r - b;
          for (std::size_t k = 0; k < z.rows; ++k) {
            f = z(k, std::size_t(i + 1));
            z(k, std::size_t(i + 1)) = s * z(k, std::size_t(i)) + c * f;
            z(k, std::size_t(i)) = c * z(k, std::size_t(i)) - s * f;
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

inline void sort_ascending(SymmetricEigenResult& res) {
  const std::size_t n = res.values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return res.values[a] < res.values[b]; });
  std::vector<double> values(n);
  DenseMatrix vectors(res.vectors.rows, n);
  for (std::size_t k = 0; k < n; ++k) {
    values[k] = res.values[order[k]];
    for (std::size_t r = 0; r < res.vectors.rows; ++r) vectors(r, k) = res.vectors(r, order[k]);
  }
  res.values = std::move(values);
  res.vectors = std::move(vectors);
}

}  // namespace detail

inline SymmetricEigenResult eigen_symmetric_dense(DenseMatrix a) {
  if (a.rows != a.cols) throw std::invalid_argument("eigen_symmetric_dense: matrix not square");
  SymmetricEigenResult res;
  if (a.rows == 0) return res;
  std::vector<double> e;
  detail::householder_tridiagonalize(a, res.values, e);
  detail::tridiagonal_ql(res.values, e, a);
  res.vectors = std::move(a);
  detail::sort_ascending(res);
  return res;
}

// Eigen decomposition of a symmetric tridiagonal matrix given by its
// diagonal and subdiagonal (sub.size() == diag.size() - 1).
inline SymmetricEigenResult eigen_symmetric_tridiagonal(std::vector<double> diag,
                                                        const std::vector<double>& sub) {
  const std::size_t n = diag.size();
  if (n > 0 && sub.size() + 1 != n)
    throw std::invalid_argument("eigen_symmetric_tridiagonal: bad subdiagonal length");
  SymmetricEigenResult res;
  if (n == 0) return res;
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) e[i] = sub[i - 1];
  DenseMatrix z(n, n);
  for (std::size_t i = 0; i < n; ++i) z(i, i) = 1.0;
  res.values = std::move(diag);
  detail::tridiagonal_ql(res.values, e, z);
  res.vectors = std::move(z);
  detail::sort_ascending(res);
  return res;
}

}  // namespace irclust
