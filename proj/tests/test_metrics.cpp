#include <catch2/catch.hpp>

#include <algorithm>

#include "irclust/metrics.hpp"
#include "irclust/rng.hpp"

using namespace irclust;

namespace {

// Exhaustive assignment oracle: minimum total cost and the smallest
// optimal permutation in lexicographic order.
std::pair<double, std::vector<int>> brute_force_assignment(const DenseMatrix& cost) {
  const int K = int(cost.rows);
  std::vector<int> idx(K);
  for (int i = 0; i < K; ++i) idx[i] = i;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_perm;
  do {
    double total = 0;
    for (int i = 0; i < K; ++i) total += cost(i, idx[i]);
    if (total < best - 1e-9) {
      best = total;
      best_perm = idx;
    } else if (std::abs(total - best) <= 1e-9 && idx < best_perm) {
      best_perm = idx;
    }
  } while (std::next_permutation(idx.begin(), idx.end()));
  return {best, best_perm};
}

LabeledPartition random_partition(std::size_t n, int K, Rng& rng) {
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = int(rng.uniform_below(K));
  for (int k = 0; k < K; ++k) labels[k % n] = k;  // keep every cluster inhabited
  return LabeledPartition(std::move(labels), K);
}

}  // namespace

TEST_CASE("confusion counts joint label occurrences", "[metrics]") {
  const LabeledPartition z({0, 1}, 2), zh({0, 1}, 2);
  const auto c = confusion(z, zh);
  REQUIRE(c.at(0, 0) == 1);
  REQUIRE(c.at(1, 1) == 1);
  REQUIRE(c.at(0, 1) == 0);

  const auto anti = confusion(LabeledPartition({0, 0, 1, 1}, 2), LabeledPartition({1, 1, 0, 0}, 2));
  REQUIRE(anti.at(0, 1) == 2);
  REQUIRE(anti.at(1, 0) == 2);
  REQUIRE(anti.at(0, 0) == 0);
}

TEST_CASE("confusion row sums equal true cluster sizes", "[metrics]") {
  Rng rng(50);
  const auto z = random_partition(50, 4, rng);
  const auto zh = random_partition(50, 4, rng);
  const auto c = confusion(z, zh);
  const auto sizes = z.cluster_sizes();
  for (std::size_t a = 0; a < 4; ++a) {
    std::size_t row = 0;
    for (std::size_t b = 0; b < 4; ++b) row += c.at(a, b);
    REQUIRE(row == sizes[a]);
  }
}

TEST_CASE("misclustering rate is zero for any relabeling", "[metrics]") {
  const LabeledPartition z({0, 1, 2, 0, 1, 2}, 3);
  const LabeledPartition relabeled({2, 0, 1, 2, 0, 1}, 3);
  REQUIRE(misclustering_rate(relabeled, z) == 0.0);
}

TEST_CASE("misclustering rate on a small asymmetric pair", "[metrics]") {
  // Best of the two K=2 relabelings leaves one node wrong.
  const LabeledPartition z({0, 0, 0}, 2);
  const LabeledPartition zh({1, 1, 0}, 2);
  REQUIRE(misclustering_rate(zh, z) == Approx(1.0 / 3.0));
}

TEST_CASE("hungarian matching equals brute force over permutations", "[metrics]") {
  Rng rng(51);
  for (int trial = 0; trial < 80; ++trial) {
    const int K = 2 + int(rng.uniform_below(5));
    DenseMatrix cost(K, K);
    for (auto& v : cost.data) v = std::floor(rng.uniform01() * 6);  // frequent ties
    double total = 0;
    const auto perm = hungarian(cost, &total);
    const auto [bf_total, bf_perm] = brute_force_assignment(cost);
    REQUIRE(total == Approx(bf_total).margin(1e-9));
    REQUIRE(perm == bf_perm);
  }
}

TEST_CASE("hungarian picks the obvious assignments", "[metrics]") {
  const DenseMatrix cost = DenseMatrix::from_rows({{1, 2}, {2, 1}});
  double total = 0;
  const auto perm = hungarian(cost, &total);
  REQUIRE(perm == std::vector<int>{0, 1});
  REQUIRE(total == 2.0);

  const DenseMatrix zeros =
      DenseMatrix::from_rows({{9, 0, 9}, {0, 9, 9}, {9, 9, 0}});
  REQUIRE(hungarian(zeros) == std::vector<int>{1, 0, 2});
}

TEST_CASE("misclustering equals brute force on random K=5 pairs", "[metrics]") {
  Rng rng(52);
  for (int trial = 0; trial < 50; ++trial) {
    const auto z = random_partition(40, 5, rng);
    const auto zh = random_partition(40, 5, rng);
    const double rate = misclustering_rate(zh, z);

    std::vector<int> idx{0, 1, 2, 3, 4};
    std::size_t best_agree = 0;
    do {
      std::size_t agree = 0;
      for (std::size_t i = 0; i < 40; ++i)
        if (zh.labels[i] == idx[std::size_t(z.labels[i])]) ++agree;
      best_agree = std::max(best_agree, agree);
    } while (std::next_permutation(idx.begin(), idx.end()));
    REQUIRE(rate == Approx(1.0 - double(best_agree) / 40.0));
  }
}

TEST_CASE("nmi of a partition with itself is one", "[metrics]") {
  const LabeledPartition z({0, 1, 0, 2, 1}, 3);
  REQUIRE(nmi(z, z) == Approx(1.0));
}

TEST_CASE("independent uniform partitions have zero nmi", "[metrics]") {
  const LabeledPartition z1({0, 0, 1, 1}, 2), z2({0, 1, 0, 1}, 2);
  REQUIRE(nmi(z1, z2) == Approx(0.0).margin(1e-12));
}

TEST_CASE("nmi matches the hand-evaluated joint table", "[metrics]") {
  // joint p = [[1/2, 0], [1/4, 1/4]]:
  //   I   = 1/2 ln(4/3) + 1/4 ln(2/3) + 1/4 ln 2 = 0.2157615543...
  //   H1  = ln 2, H2 = -(3/4 ln 3/4 + 1/4 ln 1/4) = 0.5623351446...
  //   nmi = 2 I / (H1 + H2) = 0.3437110999...
  const LabeledPartition z1({0, 0, 1, 1}, 2), z2({0, 0, 0, 1}, 2);
  REQUIRE(nmi(z1, z2) == Approx(0.3437110999).margin(1e-9));
}

TEST_CASE("nmi is symmetric and permutation invariant", "[metrics]") {
  Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const auto z1 = random_partition(30, 3, rng);
    const auto z2 = random_partition(30, 4, rng);
    const double v = nmi(z1, z2);
    REQUIRE(v == Approx(nmi(z2, z1)));
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0);
    LabeledPartition swapped = z1;
    for (auto& l : swapped.labels) l = (l + 1) % 3;
    REQUIRE(nmi(swapped, z2) == Approx(v).margin(1e-12));
  }
}

TEST_CASE("two constant partitions are a perfect match", "[metrics]") {
  const LabeledPartition a(std::vector<int>(5, 0), 1), b(std::vector<int>(5, 0), 1);
  REQUIRE(nmi(a, b) == 1.0);
  const LabeledPartition c({0, 0, 0, 1, 1}, 2);
  REQUIRE(nmi(a, c) == 0.0);
}

TEST_CASE("hamming distance counts differing positions only", "[metrics]") {
  const LabeledPartition a({0, 1, 2}, 3), b({0, 1, 1}, 3);
  REQUIRE(hamming(a, a) == 0);
  REQUIRE(hamming(a, b) == 1);

  Rng rng(54);
  const auto z1 = random_partition(100, 4, rng);
  const auto z2 = random_partition(100, 4, rng);
  std::size_t naive = 0;
  for (std::size_t i = 0; i < 100; ++i)
    if (z1.labels[i] != z2.labels[i]) ++naive;
  REQUIRE(hamming(z1, z2) == naive);
}

TEST_CASE("separation profile evaluates the weighted squared gaps", "[metrics]") {
  const DenseMatrix mu = DenseMatrix::from_rows({{0, 0}, {3, 4}});
  const DenseMatrix Pi = DenseMatrix::from_rows({{0.3, 0.1}, {0.1, 0.2}});
  const auto prof = separation_profile(mu, Pi, 2.0);
  REQUIRE(prof.delta_sq(0, 1) == Approx(25.0 + 2.0 * 0.05));
  REQUIRE(prof.delta_sq(1, 0) == prof.delta_sq(0, 1));
  REQUIRE(prof.delta_sq(0, 0) == 0.0);
  REQUIRE(prof.delta_min == Approx(25.1));

  const auto no_graph = separation_profile(mu, Pi, 0.0);
  REQUIRE(no_graph.delta_sq(0, 1) == Approx(25.0));
}

TEST_CASE("loss is the separation-weighted disagreement count", "[metrics]") {
  const DenseMatrix mu = DenseMatrix::from_rows({{0.0}, {2.0}, {5.0}});
  const auto prof = separation_profile(mu, DenseMatrix(), 0.0);
  const LabeledPartition z({0, 1, 2}, 3);
  REQUIRE(loss_l(z, z, prof) == 0.0);
  const LabeledPartition zp({1, 1, 2}, 3);
  REQUIRE(loss_l(z, zp, prof) == Approx(4.0));  // delta_sq(0,1) = 4
}

TEST_CASE("hamming is bounded by loss over the minimum separation", "[metrics]") {
  Rng rng(55);
  const DenseMatrix mu = DenseMatrix::from_rows({{0, 0}, {1, 3}, {4, 1}});
  const DenseMatrix Pi = DenseMatrix::from_rows({{0.4, 0.1, 0.2}, {0.1, 0.5, 0.1}, {0.2, 0.1, 0.3}});
  const auto prof = separation_profile(mu, Pi, 1.7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto z1 = random_partition(60, 3, rng);
    const auto z2 = random_partition(60, 3, rng);
    REQUIRE(double(hamming(z1, z2)) <= loss_l(z1, z2, prof) / prof.delta_min + 1e-9);
  }
}

TEST_CASE("snr formula matches direct evaluation", "[metrics]") {
  const DenseMatrix mu = DenseMatrix::from_rows({{0.0}, {std::sqrt(8.0)}});
  const double v = snr_tilde(mu, 4.0, 1.0, 100, 2);
  REQUIRE(v == Approx(1.0 + std::log(100.0) / 2.0));

  // degenerate cases: equal block probabilities, shared centers
  REQUIRE(snr_tilde(mu, 1.0, 1.0, 100, 2) == Approx(1.0));
  const DenseMatrix same = DenseMatrix::from_rows({{1.0}, {1.0}});
  REQUIRE(snr_tilde(same, 4.0, 1.0, 100, 2) == Approx(std::log(100.0) / 2.0));
  REQUIRE_THROWS_AS(snr_tilde(mu, 0.5, 1.0, 100, 2), std::invalid_argument);
}
