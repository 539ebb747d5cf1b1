#pragma once

// Lloyd's algorithm with k-means++ seeding and best-of-restarts selection.
// Restarts are merged deterministically: lowest objective wins, ties go to
// the lowest restart index.

#include <cstdint>
#include <limits>
#include <vector>

#include "irclust/dense_matrix.hpp"
#include "irclust/partition.hpp"
#include "irclust/rng.hpp"

namespace irclust {

struct KmeansResult {
  LabeledPartition partition;
  DenseMatrix centers;
  double objective = 0.0;  // within-cluster sum of squares
  std::size_t iterations = 0;
  bool degenerate = false;  // fewer distinct rows than K
  std::vector<double> objective_history;
};

namespace detail {

inline std::size_t count_distinct_rows(const DenseMatrix& data, std::size_t limit) {
  std::vector<std::size_t> distinct;
  for (std::size_t r = 0; r < data.rows && distinct.size() < limit; ++r) {
    bool seen = false;
    for (std::size_t d : distinct)
      if (squared_distance(data.row(r), data.row(d)) == 0.0) {
        seen = true;
        break;
      }
    if (!seen) distinct.push_back(r);
  }
  return distinct.size();
}

inline DenseMatrix kmeanspp_seed(const DenseMatrix& data, std::size_t K, Rng& rng) {
  const std::size_t n = data.rows;
  DenseMatrix centers(K, data.cols);
  std::vector<double> dist2(n, std::numeric_limits<double>::max());
  std::size_t first = std::size_t(rng.uniform_below(n));
  for (std::size_t c = 0; c < data.cols; ++c) centers(0, c) = data(first, c);
  for (std::size_t k = 1; k < K; ++k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = squared_distance(data.row(i), centers.row(k - 1));
      if (d < dist2[i]) dist2[i] = d;
      total += dist2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double u = rng.uniform01() * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cum += dist2[i];
        if (u < cum) {
          pick = i;
          break;
        }
        pick = i;
      }
    } else {
      pick = std::size_t(rng.uniform_below(n));
    }
    for (std::size_t c = 0; c < data.cols; ++c) centers(k, c) = data(pick, c);
  }
  return centers;
}

inline KmeansResult lloyd_once(const DenseMatrix& data, std::size_t K, std::size_t max_iter,
                               Rng& rng) {
  const std::size_t n = data.rows;
  KmeansResult res;
  res.centers = kmeanspp_seed(data, K, rng);
  std::vector<int> labels(n, 0);
  std::vector<std::size_t> counts(K, 0);

  for (std::size_t it = 0; it < max_iter; ++it) {
    bool changed = it == 0;
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_distance(data.row(i), res.centers.row(0));
      for (std::size_t k = 1; k < K; ++k) {
        const double d = squared_distance(data.row(i), res.centers.row(k));
        if (d < best_d) {
          best_d = d;
          best = int(k);
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
      objective += best_d;
    }
    res.objective_history.push_back(objective);
    res.objective = objective;
    res.iterations = it + 1;
    if (!changed) break;

    std::fill(counts.begin(), counts.end(), 0);
    DenseMatrix sums(K, data.cols);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[std::size_t(labels[i])];
      for (std::size_t c = 0; c < data.cols; ++c) sums(labels[i], c) += data(i, c);
    }
    for (std::size_t k = 0; k < K; ++k)
      if (counts[k] > 0)
        for (std::size_t c = 0; c < data.cols; ++c) res.centers(k, c) = sums(k, c) / double(counts[k]);
    // Re-seed emptied centroids at the point farthest from its assigned
    // center (deterministic: max distance, lowest index, no reuse).
    std::vector<bool> taken(n, false);
    for (std::size_t k = 0; k < K; ++k) {
      if (counts[k] > 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i] || counts[std::size_t(labels[i])] <= 1) continue;
        const double d = squared_distance(data.row(i), res.centers.row(labels[i]));
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      taken[far] = true;
      for (std::size_t c = 0; c < data.cols; ++c) res.centers(k, c) = data(far, c);
    }
  }
  res.partition = LabeledPartition(std::move(labels), int(K));
  return res;
}

}  // namespace detail

inline KmeansResult kmeans_full(const DenseMatrix& data, std::size_t K,
                                std::size_t restarts = 10, std::size_t max_iter = 100,
                                std::uint64_t seed = 0) {
  if (K < 1 || K > data.rows) throw std::invalid_argument("kmeans: require 1 <= K <= rows");
  if (restarts < 1) throw std::invalid_argument("kmeans: restarts must be >= 1");
  Rng root(mix_seed(seed, hash_string("kmeans")));
  KmeansResult best;
  bool first = true;
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng = root.substream(r);
    KmeansResult cur = detail::lloyd_once(data, K, max_iter, rng);
    if (first || cur.objective < best.objective) {
      best = std::move(cur);
      first = false;
    }
  }
  best.degenerate = detail::count_distinct_rows(data, K) < K;
  return best;
}

inline LabeledPartition kmeans(const DenseMatrix& data, std::size_t K, std::size_t restarts = 10,
                               std::size_t max_iter = 100, std::uint64_t seed = 0) {
  return kmeans_full(data, K, restarts, max_iter, seed).partition;
}

}  // namespace irclust
