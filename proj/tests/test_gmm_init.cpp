#include <catch2/catch.hpp>

#include "irclust/gmm.hpp"
#include "irclust/init.hpp"
#include "irclust/metrics.hpp"
#include "irclust/models.hpp"

using namespace irclust;

TEST_CASE("gmm separates two far-apart 1-d clusters at the midpoint", "[gmm]") {
  Rng rng(1);
  DenseMatrix data(60, 1);
  std::vector<int> truth(60);
  for (int i = 0; i < 60; ++i) {
    truth[i] = i % 2;
    data(i, 0) = (i % 2 ? 100.0 : 0.0) + rng.gaussian(0, 1);
  }
  const auto [z, model] = gmm_em(data, 2, {}, 3);
  for (int i = 0; i < 60; ++i)
    for (int j = 0; j < 60; ++j) {
      // midpoint-threshold oracle
      const bool same_side = (data(i, 0) < 50.0) == (data(j, 0) < 50.0);
      REQUIRE((z.labels[i] == z.labels[j]) == same_side);
    }
  REQUIRE(misclustering_rate(z, LabeledPartition(truth, 2)) == 0.0);
}

TEST_CASE("single-component gmm is the gaussian mle", "[gmm]") {
  Rng rng(2);
  DenseMatrix data(200, 2);
  for (auto& v : data.data) v = rng.gaussian(1.5, 2.0);
  GmmOptions opt;
  opt.covariance = GmmCovariance::spherical;
  opt.restarts = 1;
  const auto [z, model] = gmm_em(data, 1, opt, 4);

  double mean0 = 0, mean1 = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    mean0 += data(i, 0);
    mean1 += data(i, 1);
  }
  mean0 /= 200;
  mean1 /= 200;
  REQUIRE(model.means(0, 0) == Approx(mean0).margin(1e-6));
  REQUIRE(model.means(0, 1) == Approx(mean1).margin(1e-6));

  double var = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    var += (data(i, 0) - mean0) * (data(i, 0) - mean0);
    var += (data(i, 1) - mean1) * (data(i, 1) - mean1);
  }
  var /= 400;  // averaged over dimensions for the spherical model
  REQUIRE(model.variances(0, 0) == Approx(var).epsilon(1e-6));
}

TEST_CASE("gmm agrees with kmeans on separable data", "[gmm]") {
  Rng rng(3);
  DenseMatrix data(90, 2);
  for (int i = 0; i < 90; ++i) {
    const int k = i % 3;
    data(i, 0) = 10.0 * k + rng.gaussian(0, 0.5);
    data(i, 1) = -5.0 * k + rng.gaussian(0, 0.5);
  }
  const auto zk = kmeans(data, 3, 10, 100, 5);
  const auto [zg, model] = gmm_em(data, 3, {}, 5);
  REQUIRE(nmi(zg, zk) >= 0.95);
}

TEST_CASE("gmm log-likelihood is non-decreasing across iterations", "[gmm]") {
  Rng rng(4);
  DenseMatrix data(120, 2);
  for (int i = 0; i < 120; ++i) {
    const int k = i % 2;
    data(i, 0) = 4.0 * k + rng.gaussian(0, 1);
    data(i, 1) = rng.gaussian(0, 1);
  }
  GmmOptions opt;
  opt.restarts = 1;
  const auto [z, model] = gmm_em(data, 2, opt, 6);
  REQUIRE(model.degenerate_reseeds == 0);
  for (std::size_t t = 1; t < model.log_likelihood_history.size(); ++t)
    REQUIRE(model.log_likelihood_history[t] >= model.log_likelihood_history[t - 1] - 1e-7);
}

TEST_CASE("gmm weights stay normalized", "[gmm]") {
  Rng rng(5);
  DenseMatrix data(50, 3);
  for (auto& v : data.data) v = rng.gaussian(0, 1);
  const auto [z, model] = gmm_em(data, 3, {}, 7);
  double sum = 0;
  for (double w : model.weights) {
    REQUIRE(w >= 0.0);
    sum += w;
  }
  REQUIRE(sum == Approx(1.0).margin(1e-9));
}

TEST_CASE("spectral clustering separates two disconnected cliques", "[init]") {
  SparseSymmetric a(8);
  for (std::uint32_t i = 0; i < 4; ++i)
    for (std::uint32_t j = i + 1; j < 4; ++j) {
      a.add(i, j, 1.0);
      a.add(i + 4, j + 4, 1.0);
    }
  const auto z = spectral_cluster(a, 2, SpectralMode::adjacency, 1);
  const LabeledPartition truth({0, 0, 0, 0, 1, 1, 1, 1}, 2);
  REQUIRE(misclustering_rate(z, truth) == 0.0);
  const auto zl = spectral_cluster(a, 2, SpectralMode::sym_laplacian, 1);
  REQUIRE(misclustering_rate(zl, truth) == 0.0);
}

TEST_CASE("spectral clustering is exact on a noiseless block matrix", "[init]") {
  Rng rng(6);
  const auto z = generate_partition(60, 3, MembershipSpec::balanced(), rng);
  const DenseMatrix Pi =
      DenseMatrix::from_rows({{0.6, 0.1, 0.2}, {0.1, 0.5, 0.1}, {0.2, 0.1, 0.4}});
  const auto p = expected_matrix(z, Pi);
  const auto zh = spectral_cluster(p, 3, SpectralMode::adjacency, 2);
  REQUIRE(misclustering_rate(zh, z) == 0.0);
}

TEST_CASE("laplacian mode survives isolated vertices", "[init]") {
  SparseSymmetric a(6);
  a.add(0, 1, 1.0);
  a.add(1, 2, 1.0);
  a.add(3, 4, 1.0);  // node 5 is isolated
  const auto z = spectral_cluster(a, 2, SpectralMode::sym_laplacian, 3);
  REQUIRE(z.n() == 6);
  z.validate();
}

TEST_CASE("gaussian kernel matches the closed form", "[init]") {
  DenseMatrix x = DenseMatrix::from_rows({{0, 0}, {1, 1}, {0, 0}});
  const double bw = 1.0;
  const auto k = gaussian_kernel(x, bw);
  const auto d = k.to_dense();
  REQUIRE(d(0, 0) == 1.0);
  REQUIRE(d(0, 2) == Approx(1.0));                 // identical rows
  REQUIRE(d(0, 1) == Approx(std::exp(-1.0)));      // distance = bw * sqrt(2)
  REQUIRE(d(1, 0) == d(0, 1));
}

TEST_CASE("gaussian kernel equals brute-force pairwise evaluation", "[init]") {
  Rng rng(7);
  DenseMatrix x(5, 3);
  for (auto& v : x.data) v = rng.gaussian(0, 2);
  const double bw = 1.3;
  const auto k = gaussian_kernel(x, bw).to_dense();
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      const double expect = std::exp(-squared_distance(x.row(i), x.row(j)) / (2 * bw * bw));
      REQUIRE(k(i, j) == Approx(expect).margin(1e-12));
      REQUIRE(k(i, j) > 0.0);
      REQUIRE(k(i, j) <= 1.0);
    }
  REQUIRE_THROWS_AS(gaussian_kernel(x, 0.0), std::invalid_argument);
}

TEST_CASE("embedding-plus-covariates reduces to the embedding when x is empty", "[init]") {
  Rng rng(8);
  const auto z = generate_partition(40, 2, MembershipSpec::balanced(), rng);
  const auto a = generate_sbm(z, DenseMatrix::from_rows({{0.8, 0.05}, {0.05, 0.8}}), false, rng);
  const DenseMatrix empty;
  const auto via_em_emb = em_emb(a, empty, 2, {}, 11);

  const auto decomp = eigs_topk_abs(a, 2, 1e-8, 0, mix_seed(11, hash_string("em-emb")));
  const auto direct = gmm_em(decomp.vectors, 2, {}, mix_seed(11, hash_string("em-emb-gmm")));
  REQUIRE(via_em_emb.labels == direct.first.labels);
}

TEST_CASE("covariates carry the embedding when the graph is empty", "[init]") {
  Rng rng(9);
  const auto z = generate_partition(60, 2, MembershipSpec::balanced(), rng);
  const CovariateSpec cov{DenseMatrix::from_rows({{0.0, 0.0}, {8.0, 8.0}}), 0.5};
  const auto x = generate_covariates(z, cov, rng);
  SparseSymmetric empty_graph(60);
  const auto zh = em_emb(empty_graph, x, 2, {}, 13);
  REQUIRE(misclustering_rate(zh, z) == 0.0);
}

TEST_CASE("shared centers stay merged when only covariates inform", "[init]") {
  // Three blocks whose first and third centers coincide: with an empty
  // graph the embedding is uninformative, so the clustering follows the
  // covariates and cannot tell blocks 0 and 2 apart.
  Rng rng(15);
  const auto z = generate_partition(300, 3, MembershipSpec::balanced(), rng);
  const DenseMatrix centers = DenseMatrix::from_rows({{0, 0, 1}, {-1, 1, 0}, {0, 0, 1}});
  const auto x = generate_covariates(z, {centers, std::sqrt(0.2)}, rng);
  SparseSymmetric empty_graph(300);
  const auto zh = em_emb(empty_graph, x, 3, {}, 17);

  // block 1 is cleanly separated: nearly all of its nodes share one label
  std::vector<std::size_t> votes(3, 0);
  std::size_t block1 = 0;
  for (std::size_t i = 0; i < 300; ++i)
    if (z.labels[i] == 1) {
      ++votes[std::size_t(zh.labels[i])];
      ++block1;
    }
  const std::size_t majority = *std::max_element(votes.begin(), votes.end());
  REQUIRE(double(majority) / double(block1) >= 0.9);
  // blocks 0 and 2 are confusable, so full recovery is impossible
  REQUIRE(misclustering_rate(zh, z) > 0.2);
}

TEST_CASE("orl with a zero-only grid is plain spectral clustering", "[init]") {
  Rng rng(10);
  const auto z = generate_partition(50, 2, MembershipSpec::balanced(), rng);
  const auto a = generate_sbm(z, DenseMatrix::from_rows({{0.6, 0.1}, {0.1, 0.6}}), false, rng);
  const auto x = generate_covariates(z, {DenseMatrix::from_rows({{0.0}, {1.0}}), 1.0}, rng);
  const auto kern = gaussian_kernel(x, median_pairwise_distance(x));
  const std::vector<double> grid{0.0};
  const auto res = orl_sc(a, kern, 2, z, grid, 21);
  const auto plain = spectral_cluster(a, 2, SpectralMode::adjacency, 21);
  REQUIRE(res.labels.labels == plain.labels);
  REQUIRE(res.best_lambda == 0.0);
}

TEST_CASE("orl prefers the kernel when the graph is uninformative", "[init]") {
  Rng rng(11);
  const auto z = generate_partition(60, 2, MembershipSpec::balanced(), rng);
  // near-empty graph, clean covariates
  const auto a = generate_sbm(z, DenseMatrix(2, 2, 0.01), false, rng);
  const auto x = generate_covariates(z, {DenseMatrix::from_rows({{0.0}, {10.0}}), 0.3}, rng);
  const auto kern = gaussian_kernel(x, median_pairwise_distance(x));
  const std::vector<double> grid{0.0, 1e6};
  const auto res = orl_sc(a, kern, 2, z, grid, 22);
  REQUIRE(res.best_lambda == 1e6);
  REQUIRE(res.best_nmi >= nmi(spectral_cluster(a, 2, SpectralMode::adjacency, 22), z));
  REQUIRE_THROWS_AS(orl_sc(a, kern, 2, z, std::vector<double>{}, 1), std::invalid_argument);
}

TEST_CASE("signed spectral init recovers a clean two-block signed graph", "[init]") {
  Rng rng(12);
  SignedSbmSpec spec{80, 2, 0.4, 0.0, MembershipSpec::balanced()};
  const auto [a, z] = generate_signed_sbm(spec, rng);
  const auto zh = signed_spectral_init(a, 2, 31);
  REQUIRE(misclustering_rate(zh, z) == 0.0);
}

TEST_CASE("signed spectral init clears the working floor at moderate noise", "[init]") {
  // Monte Carlo floor used by the signed experiments.
  double total = 0;
  for (int rep = 0; rep < 3; ++rep) {
    Rng rng(mix_seed(13, rep));
    SignedSbmSpec spec{2000, 5, 0.04, 0.1, MembershipSpec::multinomial()};
    const auto [a, z] = generate_signed_sbm(spec, rng);
    total += nmi(signed_spectral_init(a, 5, rep), z);
  }
  REQUIRE(total / 3.0 >= 0.8);
}

TEST_CASE("signed spectral init collapses when every sign is coin-flipped", "[init]") {
  Rng rng(14);
  SignedSbmSpec spec{300, 2, 0.2, 0.499, MembershipSpec::balanced()};
  const auto [a, z] = generate_signed_sbm(spec, rng);
  REQUIRE(nmi(signed_spectral_init(a, 2, 7), z) < 0.15);
}

TEST_CASE("median pairwise distance sits inside the sample range", "[init]") {
  DenseMatrix x = DenseMatrix::from_rows({{0.0}, {1.0}, {10.0}});
  const double med = median_pairwise_distance(x);
  REQUIRE(med >= 1.0);
  REQUIRE(med <= 10.0);
}
