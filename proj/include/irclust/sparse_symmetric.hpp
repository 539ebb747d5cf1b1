#pragma once

// Sparse symmetric matrix stored as upper-triangle triplets (i <= j).
// Matrix-vector products expand each off-diagonal triplet to both (i,j)
// and (j,i); diagonal entries count once.

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "irclust/dense_matrix.hpp"

namespace irclust {

struct SparseSymmetric {
  struct Entry {
    std::uint32_t i = 0;
    std::uint32_t j = 0;  // i <= j
    double w = 0.0;
  };

  std::size_t n = 0;
  std::vector<Entry> entries;

  SparseSymmetric() = default;
  explicit SparseSymmetric(std::size_t size) : n(size) {}

  std::size_t nnz() const { return entries.size(); }

  void add(std::uint32_t i, std::uint32_t j, double w) {
    if (i > j) std::swap(i, j);
    entries.push_back({i, j, w});
  }

  // Index ranges, finiteness, nonzero weights, no duplicate coordinates.
  void validate() const {
    for (const Entry& e : entries) {
      if (e.i > e.j || e.j >= n) throw std::invalid_argument("sparse entry index out of range");
      if (e.w == 0.0 || !std::isfinite(e.w))
        throw std::invalid_argument("sparse entry weight must be finite and nonzero");
    }
    std::vector<std::uint64_t> keys;
    keys.reserve(entries.size());
    for (const Entry& e : entries) keys.push_back((std::uint64_t(e.i) << 32) | e.j);
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
      throw std::invalid_argument("duplicate sparse entry");
  }

  std::vector<double> multiply(std::span<const double> v) const {
    if (v.size() != n) throw std::invalid_argument("spmv: dimension mismatch");
    std::vector<double> out(n, 0.0);
    for (const Entry& e : entries) {
      out[e.i] += e.w * v[e.j];
      if (e.i != e.j) out[e.j] += e.w * v[e.i];
    }
    return out;
  }

  // Row sums under symmetric expansion.
  std::vector<double> degrees() const {
    std::vector<double> deg(n, 0.0);
    for (const Entry& e : entries) {
      deg[e.i] += e.w;
      if (e.i != e.j) deg[e.j] += e.w;
    }
    return deg;
  }

  DenseMatrix to_dense() const {
    DenseMatrix d(n, n);
    for (const Entry& e : entries) {
      d(e.i, e.j) += e.w;
      if (e.i != e.j) d(e.j, e.i) += e.w;
    }
    return d;
  }
};

// alpha*a + beta*b with duplicate coordinates merged; zero results dropped.
inline SparseSymmetric add_scaled(const SparseSymmetric& a, double alpha,
                                  const SparseSymmetric& b, double beta) {
  if (a.n != b.n) throw std::invalid_argument("add_scaled: dimension mismatch");
  std::vector<SparseSymmetric::Entry> merged;
  merged.reserve(a.nnz() + b.nnz());
  for (const auto& e : a.entries) merged.push_back({e.i, e.j, alpha * e.w});
  for (const auto& e : b.entries) merged.push_back({e.i, e.j, beta * e.w});
  std::sort(merged.begin(), merged.end(), [](const auto& x, const auto& y) {
    return x.i != y.i ? x.i < y.i : x.j < y.j;
  });
  SparseSymmetric out(a.n);
  for (std::size_t k = 0; k < merged.size();) {
    std::size_t m = k;
    double w = 0.0;
    while (m < merged.size() && merged[m].i == merged[k].i && merged[m].j == merged[k].j)
      w += merged[m++].w;
    if (w != 0.0) out.entries.push_back({merged[k].i, merged[k].j, w});
    k = m;
  }
  return out;
}

// CSR view of the symmetric expansion, for per-row access.
struct SymmetricRows {
  std::size_t n = 0;
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;

  explicit SymmetricRows(const SparseSymmetric& a) : n(a.n), offsets(a.n + 1, 0) {
    for (const auto& e : a.entries) {
      ++offsets[e.i + 1];
      if (e.i != e.j) ++offsets[e.j + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
    cols.resize(offsets[n]);
    vals.resize(offsets[n]);
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& e : a.entries) {
      cols[cursor[e.i]] = e.j;
      vals[cursor[e.i]++] = e.w;
      if (e.i != e.j) {
        cols[cursor[e.j]] = e.i;
        vals[cursor[e.j]++] = e.w;
      }
    }
  }

  std::span<const std::uint32_t> row_cols(std::size_t i) const {
    return {cols.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
  std::span<const double> row_vals(std::size_t i) const {
    return {vals.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
};

}  // namespace irclust
