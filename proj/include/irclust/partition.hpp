#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace irclust {

// Community assignment of n nodes into clusters 0..K-1.
struct LabeledPartition {
  std::vector<int> labels;
  int K = 0;

  LabeledPartition() = default;
  LabeledPartition(std::vector<int> l, int k) : labels(std::move(l)), K(k) {}

  std::size_t n() const { return labels.size(); }

  void validate() const {
    if (K < 1) throw std::invalid_argument("partition: K must be positive");
    for (int l : labels)
      if (l < 0 || l >= K) throw std::invalid_argument("partition: label out of range");
  }

  std::vector<std::size_t> cluster_sizes() const {
    std::vector<std::size_t> sizes(std::size_t(K), 0);
    for (int l : labels) ++sizes[std::size_t(l)];
    return sizes;
  }

  bool has_empty_cluster() const {
    for (std::size_t s : cluster_sizes())
      if (s == 0) return true;
    return false;
  }

  bool operator==(const LabeledPartition& other) const {
    return K == other.K && labels == other.labels;
  }
};

}  // namespace irclust
