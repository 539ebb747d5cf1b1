#include <catch2/catch.hpp>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "irclust/io.hpp"
#include "irclust/models.hpp"

using namespace irclust;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("irclust_io_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("edge list round trip preserves the graph exactly", "[io]") {
  TempDir dir;
  Rng rng(1);
  SparseSymmetric a(20);
  for (std::uint32_t i = 0; i < 20; ++i)
    for (std::uint32_t j = i; j < 20; ++j)
      if (rng.bernoulli(0.3)) a.add(i, j, rng.bernoulli(0.5) ? 1.0 : -rng.uniform01());
  const auto path = dir.file("g.edges.tsv");
  write_edge_list(path, a);
  const auto back = read_edge_list(path);
  REQUIRE(back.n == a.n);
  REQUIRE(back.nnz() == a.nnz());
  const auto da = a.to_dense(), db = back.to_dense();
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 20; ++j) REQUIRE(da(i, j) == db(i, j));
}

TEST_CASE("edge list rejects malformed inputs", "[io]") {
  TempDir dir;
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(dir.file(name));
    out << content;
    return dir.file(name);
  };
  REQUIRE_THROWS_AS(read_edge_list(write("noheader.tsv", "0\t1\t1\n")), IoError);
  REQUIRE_THROWS_AS(read_edge_list(write("badorder.tsv", "# n=3\n1\t0\t1\n")), IoError);
  REQUIRE_THROWS_AS(read_edge_list(write("range.tsv", "# n=2\n0\t5\t1\n")), IoError);
  REQUIRE_THROWS_AS(read_edge_list(write("dup.tsv", "# n=3\n0\t1\t1\n0\t1\t1\n")), IoError);
  REQUIRE_THROWS_AS(read_edge_list(write("cols.tsv", "# n=2\n0\t1\n")), IoError);
  REQUIRE_THROWS_AS(read_edge_list(dir.file("missing.tsv")), IoError);
}

TEST_CASE("covariate csv round trip is lossless", "[io]") {
  TempDir dir;
  Rng rng(2);
  DenseMatrix x(15, 4);
  for (auto& v : x.data) v = rng.gaussian(0, 3);
  x(0, 0) = 1e-17;
  x(1, 1) = -12345678.90123456789;
  const auto path = dir.file("x.csv");
  write_covariates(path, x);
  const auto back = read_covariates(path);
  REQUIRE(back.rows == x.rows);
  REQUIRE(back.cols == x.cols);
  for (std::size_t i = 0; i < x.data.size(); ++i) REQUIRE(back.data[i] == x.data[i]);

  const std::string text = slurp(path);
  REQUIRE(text.rfind("x1,x2,x3,x4\n", 0) == 0);
}

TEST_CASE("label file round trip and inference", "[io]") {
  TempDir dir;
  const LabeledPartition z({0, 2, 1, 1, 0}, 3);
  const auto path = dir.file("z.txt");
  write_labels(path, z);
  const auto back = read_labels(path);
  REQUIRE(back.labels == z.labels);
  REQUIRE(back.K == 3);
  const auto wide = read_labels(path, 5);
  REQUIRE(wide.K == 5);

  std::ofstream(dir.file("neg.txt")) << "0\n-1\n";
  REQUIRE_THROWS_AS(read_labels(dir.file("neg.txt")), IoError);
}

TEST_CASE("results csv round trips every field", "[io]") {
  TempDir dir;
  std::vector<RunRecord> records(2);
  records[0] = {"eta", 0.05, 0, "ir-ssbm", 12345678901234567ULL, 0.987654321,
                0.0123456789, 17, true, 12.25};
  records[1] = {"eta", 0.1, 1, "signed-sc", 42, 1.0 / 3.0, 0.2, 0, false, 0.5};
  const auto path = dir.file("r.csv");
  write_results_csv(path, records);
  const auto back = read_results_csv(path);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    REQUIRE(back[i].sweep_param == records[i].sweep_param);
    REQUIRE(back[i].sweep_value == records[i].sweep_value);
    REQUIRE(back[i].run == records[i].run);
    REQUIRE(back[i].algo == records[i].algo);
    REQUIRE(back[i].seed == records[i].seed);
    REQUIRE(back[i].nmi == records[i].nmi);
    REQUIRE(back[i].error_rate == records[i].error_rate);
    REQUIRE(back[i].iters == records[i].iters);
    REQUIRE(back[i].converged == records[i].converged);
    REQUIRE(back[i].wall_time_ms == records[i].wall_time_ms);
  }

  write_results_csv(path, records, /*zero_timings=*/true);
  for (const auto& r : read_results_csv(path)) REQUIRE(r.wall_time_ms == 0.0);
}

TEST_CASE("seventeen significant digits round trip doubles", "[io]") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double v = rng.gaussian(0, 1) * std::pow(10.0, double(rng.uniform_below(20)) - 10.0);
    const double back = std::stod(format_real(v));
    REQUIRE(back == v);
  }
}

TEST_CASE("atomic writes replace files without leaving temporaries", "[io]") {
  TempDir dir;
  const auto path = dir.file("file.txt");
  const LabeledPartition z1({0, 1}, 2), z2({1, 0}, 2);
  write_labels(path, z1);
  write_labels(path, z2);
  REQUIRE(read_labels(path).labels == z2.labels);
  REQUIRE_FALSE(std::filesystem::exists(path + ".tmp"));
}
