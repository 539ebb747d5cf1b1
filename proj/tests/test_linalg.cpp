#include <catch2/catch.hpp>

#include <Eigen/Dense>

#include "irclust/eigs.hpp"
#include "irclust/kmeans.hpp"
#include "irclust/metrics.hpp"
#include "irclust/models.hpp"
#include "irclust/rng.hpp"

using namespace irclust;

namespace {

Eigen::MatrixXd to_eigen(const SparseSymmetric& a) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(long(a.n), long(a.n));
  for (const auto& e : a.entries) {
    m(e.i, e.j) += e.w;
    if (e.i != e.j) m(e.j, e.i) += e.w;
  }
  return m;
}

SparseSymmetric random_sparse(std::size_t n, double density, Rng& rng) {
  SparseSymmetric a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (rng.bernoulli(density)) a.entries.push_back({std::uint32_t(i), std::uint32_t(j), rng.gaussian(0, 1)});
  return a;
}

}  // namespace

TEST_CASE("spmv expands a single off-diagonal entry symmetrically", "[linalg]") {
  SparseSymmetric a(2);
  a.add(0, 1, 1.0);
  const std::vector<double> v{1.0, 0.0};
  const auto out = a.multiply(v);
  REQUIRE(out[0] == 0.0);
  REQUIRE(out[1] == 1.0);
}

TEST_CASE("spmv counts diagonal entries once", "[linalg]") {
  SparseSymmetric a(1);
  a.add(0, 0, 2.0);
  const std::vector<double> v{3.0};
  REQUIRE(a.multiply(v)[0] == 6.0);
}

TEST_CASE("spmv equals the dense product on random matrices", "[linalg]") {
  Rng rng(100);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.uniform_below(50);
    SparseSymmetric a = random_sparse(n, 0.3, rng);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.gaussian(0, 1);
    const auto sparse_out = a.multiply(v);
    const DenseMatrix d = a.to_dense();
    for (std::size_t i = 0; i < n; ++i) {
      double dense = 0.0;
      for (std::size_t j = 0; j < n; ++j) dense += d(i, j) * v[j];
      REQUIRE(sparse_out[i] == Approx(dense).margin(1e-12));
    }
  }
}

TEST_CASE("spmv rejects a dimension mismatch", "[linalg]") {
  SparseSymmetric a(3);
  const std::vector<double> v{1.0, 2.0};
  REQUIRE_THROWS_AS(a.multiply(v), std::invalid_argument);
}

TEST_CASE("top-k of a diagonal matrix orders by absolute value", "[eigs]") {
  SparseSymmetric a(3);
  a.add(0, 0, 3.0);
  a.add(1, 1, -5.0);
  a.add(2, 2, 1.0);
  const auto top = eigs_topk_abs(a, 3, 1e-10, 0, 1);
  REQUIRE(top.converged);
  REQUIRE(top.values[0] == Approx(-5.0));
  REQUIRE(top.values[1] == Approx(3.0));
  REQUIRE(top.values[2] == Approx(1.0));
}

TEST_CASE("block expected matrix has the block eigenvalues", "[eigs]") {
  // Two rank-one 0.5 blocks of size 2: both top eigenvalues are 1.0.
  const LabeledPartition z({0, 0, 1, 1}, 2);
  const DenseMatrix Pi = DenseMatrix::from_rows({{0.5, 0.0}, {0.0, 0.5}});
  const SparseSymmetric p = expected_matrix(z, Pi);
  const auto top = eigs_topk_abs(p, 2, 1e-10, 0, 1);
  REQUIRE(top.values[0] == Approx(1.0).margin(1e-9));
  REQUIRE(top.values[1] == Approx(1.0).margin(1e-9));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(p));
  REQUIRE(es.eigenvalues()(3) == Approx(1.0).margin(1e-12));
  REQUIRE(es.eigenvalues()(2) == Approx(1.0).margin(1e-12));
}

TEST_CASE("dense-path eigenpairs match a full dense decomposition", "[eigs]") {
  Rng rng(7);
  SparseSymmetric a = random_sparse(20, 0.5, rng);
  const auto top = eigs_topk_abs(a, 4, 1e-10, 0, 3);
  REQUIRE(top.converged);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a));
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + 20);
  std::sort(ev.begin(), ev.end(), [](double x, double y) { return std::abs(x) > std::abs(y); });
  for (int k = 0; k < 4; ++k) REQUIRE(top.values[k] == Approx(ev[k]).margin(1e-6));
}

TEST_CASE("lanczos path matches the dense oracle on a 700-node graph", "[eigs]") {
  Rng rng(9);
  SparseSymmetric a = random_sparse(700, 0.02, rng);
  const auto top = eigs_topk_abs(a, 4, 1e-8, 0, 13);
  REQUIRE(top.converged);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a));
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + 700);
  std::sort(ev.begin(), ev.end(), [](double x, double y) { return std::abs(x) > std::abs(y); });
  for (int k = 0; k < 4; ++k) REQUIRE(top.values[k] == Approx(ev[k]).margin(1e-6));
  // orthonormal columns
  for (int k = 0; k < 4; ++k)
    for (int l = k; l < 4; ++l) {
      double dot = 0;
      for (std::size_t r = 0; r < 700; ++r) dot += top.vectors(r, k) * top.vectors(r, l);
      REQUIRE(dot == Approx(k == l ? 1.0 : 0.0).margin(1e-8));
    }
}

TEST_CASE("residual bound and ordering hold on random instances", "[eigs]") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 10 + rng.uniform_below(40);
    SparseSymmetric a = random_sparse(n, 0.4, rng);
    const std::size_t K = 1 + rng.uniform_below(std::min<std::size_t>(n, 5));
    const auto top = eigs_topk_abs(a, K, 1e-8, 0, trial);
    REQUIRE(top.converged);
    const double scale = std::max(1.0, std::abs(top.values[0]));
    for (std::size_t k = 0; k < K; ++k) {
      REQUIRE(top.residuals[k] <= 1e-8 * scale);
      if (k > 0) REQUIRE(std::abs(top.values[k]) <= std::abs(top.values[k - 1]) + 1e-12);
    }
  }
}

TEST_CASE("eigenvector sign is canonical and deterministic", "[eigs]") {
  Rng rng(33);
  SparseSymmetric a = random_sparse(25, 0.5, rng);
  const auto t1 = eigs_topk_abs(a, 3, 1e-9, 0, 5);
  const auto t2 = eigs_topk_abs(a, 3, 1e-9, 0, 5);
  REQUIRE(t1.vectors.data == t2.vectors.data);
  for (int k = 0; k < 3; ++k) {
    std::size_t arg = 0;
    double best = -1;
    for (std::size_t r = 0; r < 25; ++r)
      if (std::abs(t1.vectors(r, k)) > best) {
        best = std::abs(t1.vectors(r, k));
        arg = r;
      }
    REQUIRE(t1.vectors(arg, k) > 0.0);
  }
}

TEST_CASE("eigs validates its preconditions", "[eigs]") {
  SparseSymmetric a(3);
  REQUIRE_THROWS_AS(eigs_topk_abs(a, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(eigs_topk_abs(a, 4), std::invalid_argument);
  REQUIRE_THROWS_AS(eigs_topk_abs(a, 1, 0.0), std::invalid_argument);
}

TEST_CASE("kmeans separates two obvious points", "[kmeans]") {
  DenseMatrix data = DenseMatrix::from_rows({{0.0}, {10.0}});
  const auto z = kmeans(data, 2, 4, 50, 1);
  REQUIRE(z.labels[0] != z.labels[1]);
}

TEST_CASE("kmeans splits well-separated pairs", "[kmeans]") {
  DenseMatrix data = DenseMatrix::from_rows({{0, 0}, {0, 0.1}, {5, 5}, {5, 5.1}});
  const auto z = kmeans(data, 2, 4, 50, 1);
  REQUIRE(z.labels[0] == z.labels[1]);
  REQUIRE(z.labels[2] == z.labels[3]);
  REQUIRE(z.labels[0] != z.labels[2]);
}

TEST_CASE("kmeans recovers well-separated gaussian clusters", "[kmeans]") {
  Rng rng(77);
  const DenseMatrix centers = DenseMatrix::from_rows({{0, 0}, {20, 0}, {0, 20}});
  DenseMatrix data(30, 2);
  std::vector<int> truth(30);
  for (int i = 0; i < 30; ++i) {
    const int k = i % 3;
    truth[i] = k;
    // nearest-true-center oracle: noise is far below the center separation
    data(i, 0) = centers(k, 0) + rng.gaussian(0, 1);
    data(i, 1) = centers(k, 1) + rng.gaussian(0, 1);
  }
  const auto z = kmeans(data, 3, 10, 100, 5);
  REQUIRE(misclustering_rate(z, LabeledPartition(truth, 3)) == 0.0);
}

TEST_CASE("kmeans objective is non-increasing within a restart", "[kmeans]") {
  Rng rng(13);
  DenseMatrix data(60, 3);
  for (auto& v : data.data) v = rng.gaussian(0, 1);
  const auto res = kmeans_full(data, 4, 1, 100, 9);
  for (std::size_t t = 1; t < res.objective_history.size(); ++t)
    REQUIRE(res.objective_history[t] <= res.objective_history[t - 1] + 1e-9);
}

TEST_CASE("kmeans flags fewer distinct rows than K", "[kmeans]") {
  DenseMatrix data = DenseMatrix::from_rows({{1.0}, {1.0}, {1.0}});
  const auto res = kmeans_full(data, 2, 2, 20, 3);
  REQUIRE(res.degenerate);
}

TEST_CASE("kmeans is reproducible per seed", "[kmeans]") {
  Rng rng(8);
  DenseMatrix data(40, 2);
  for (auto& v : data.data) v = rng.gaussian(0, 1);
  const auto a = kmeans(data, 3, 5, 100, 17);
  const auto b = kmeans(data, 3, 5, 100, 17);
  REQUIRE(a.labels == b.labels);
}
