#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace irclust {

// Row-major dense matrix of doubles.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> init) {
    DenseMatrix m;
    m.rows = init.size();
    m.cols = m.rows ? init.begin()->size() : 0;
    m.data.reserve(m.rows * m.cols);
    for (const auto& r : init) {
      if (r.size() != m.cols) throw std::invalid_argument("from_rows: ragged rows");
      m.data.insert(m.data.end(), r.begin(), r.end());
    }
    return m;
  }

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  DenseMatrix transposed() const {
    DenseMatrix t(cols, rows);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) t(c, r) = (*this)(r, c);
    return t;
  }
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// [a | b] column-wise; either side may have zero columns.
inline DenseMatrix hconcat(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows != b.rows && a.cols != 0 && b.cols != 0)
    throw std::invalid_argument("hconcat: row count mismatch");
  const std::size_t rows = a.cols != 0 ? a.rows : b.rows;
  DenseMatrix out(rows, a.cols + b.cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < a.cols; ++c) out(r, c) = a(r, c);
    for (std::size_t c = 0; c < b.cols; ++c) out(r, a.cols + c) = b(r, c);
  }
  return out;
}

}  // namespace irclust
