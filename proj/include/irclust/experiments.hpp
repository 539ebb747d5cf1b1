#pragma once

// Config-driven Monte Carlo harness. Every (sweep value, repetition) cell
// generates one dataset from a derived sub-seed and runs every configured
// algorithm on it, so methods are always compared on identical data.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "irclust/dense_matrix.hpp"
#include "irclust/gmm.hpp"
#include "irclust/init.hpp"
#include "irclust/kmeans.hpp"
#include "irclust/metrics.hpp"
#include "irclust/models.hpp"
#include "irclust/partition.hpp"
#include "irclust/refine.hpp"
#include "irclust/rng.hpp"
#include "irclust/sparse_symmetric.hpp"

namespace irclust {

enum class ModelKind { sbm, csbm, cssbm, signed_sbm };

struct GeneratorSpec {
  ModelKind model = ModelKind::sbm;
  std::size_t n = 0;
  std::size_t K = 0;
  MembershipSpec membership;
  DenseMatrix Pi;  // sbm / csbm
  bool self_loops = false;
  bool has_covariates = false;
  DenseMatrix centers;  // K x d
  double sigma = 0.0;
  double p_prime = 0.0, q_prime = 0.0;  // cssbm: p = p' log n / n
  double p = 0.0, eta = 0.0;            // signed
};

struct Dataset {
  SparseSymmetric A;
  DenseMatrix X;  // 0 x 0 when the model has no covariates
  bool has_covariates = false;
  LabeledPartition z;
  double sigma = 0.0;
};

inline Dataset generate_dataset(const GeneratorSpec& g, Rng& rng) {
  Dataset ds;
  switch (g.model) {
    case ModelKind::sbm:
    case ModelKind::csbm: {
      SbmSpec spec{g.n, g.K, g.Pi, g.membership, g.self_loops};
      spec.validate();
      ds.z = generate_partition(g.n, g.K, g.membership, rng);
      ds.A = generate_sbm(ds.z, g.Pi, g.self_loops, rng);
      if (g.model == ModelKind::csbm || g.has_covariates) {
        CovariateSpec cov{g.centers, g.sigma};
        ds.X = generate_covariates(ds.z, cov, rng);
        ds.has_covariates = true;
        ds.sigma = g.sigma;
      }
      break;
    }
    case ModelKind::cssbm: {
      const double logn = std::log(double(g.n));
      const double p = g.p_prime * logn / double(g.n);
      const double q = g.q_prime * logn / double(g.n);
      DenseMatrix Pi(g.K, g.K, q);
      for (std::size_t k = 0; k < g.K; ++k) Pi(k, k) = p;
      SbmSpec spec{g.n, g.K, Pi, MembershipSpec::balanced(), g.self_loops};
      spec.validate();
      ds.z = generate_partition(g.n, g.K, MembershipSpec::balanced(), rng);
      ds.A = generate_sbm(ds.z, Pi, g.self_loops, rng);
      if (g.has_covariates) {
        CovariateSpec cov{g.centers, g.sigma};
        ds.X = generate_covariates(ds.z, cov, rng);
        ds.has_covariates = true;
        ds.sigma = g.sigma;
      }
      break;
    }
    case ModelKind::signed_sbm: {
      SignedSbmSpec spec{g.n, g.K, g.p, g.eta, g.membership};
      spec.validate();
      auto [a, z] = generate_signed_sbm(spec, rng);
      ds.A = std::move(a);
      ds.z = std::move(z);
      break;
    }
  }
  return ds;
}

enum class AlgoKind {
  ir_ls,
  sir_ls,
  ir_lss,
  ir_map,
  ir_ssbm,
  em_emb,
  a_sc,
  l_sc,
  k_sc,
  kmeans_cov,
  orl_sc,
  signed_sc
};

enum class InitKind { none, em_emb, a_sc, l_sc, signed_sc, random };

struct AlgorithmSpec {
  AlgoKind kind = AlgoKind::ir_ls;
  InitKind init = InitKind::none;
  std::size_t T = 0;  // 0 -> default schedule
  bool early_stop = true;
  std::string label;
};

struct SweepSpec {
  enum class Param { none, eta, snr_ratio, c_level };
  Param param = Param::none;
  std::vector<double> values;  // empty with param none

  static const char* name(Param p) {
    switch (p) {
      case Param::none: return "none";
      case Param::eta: return "eta";
      case Param::snr_ratio: return "snr_ratio";
      case Param::c_level: return "c";
    }
    return "?";
  }
};

struct ExperimentConfig {
  std::string name;
  GeneratorSpec generator;
  std::vector<AlgorithmSpec> algorithms;
  std::size_t repetitions = 1;
  std::uint64_t base_seed = 1;
  SweepSpec sweep;
  std::string output_path;
  bool heavy = false;
};

struct RunRecord {
  std::string sweep_param;
  double sweep_value = 0.0;
  std::size_t run = 0;
  std::string algo;
  std::uint64_t seed = 0;
  double nmi = 0.0;
  double error_rate = 0.0;
  std::size_t iters = 0;
  bool converged = true;
  double wall_time_ms = 0.0;
};

inline void apply_sweep_value(GeneratorSpec& g, SweepSpec::Param param, double value) {
  const double logn = std::log(double(g.n));
  switch (param) {
    case SweepSpec::Param::none:
      break;
    case SweepSpec::Param::eta:
      g.eta = value;
      break;
    case SweepSpec::Param::snr_ratio: {
      // Split the target SNR (value * log n) evenly between the covariate
      // and graph terms, with unit noise and q' pinned at 1.
      g.model = ModelKind::cssbm;
      g.q_prime = 1.0;
      const double root = std::sqrt(value * double(g.K) / 2.0);
      g.p_prime = (1.0 + root) * (1.0 + root);
      const double gap = 2.0 * std::sqrt(value * logn);
      g.centers = DenseMatrix(g.K, 1);
      for (std::size_t k = 0; k < g.K; ++k) g.centers(k, 0) = gap * double(k);
      g.sigma = 1.0;
      g.has_covariates = true;
      break;
    }
    case SweepSpec::Param::c_level: {
      // Two-block benchmark: p = 4c log n / n, q = c log n / n, unit-gap
      // centers, and noise scaled so sigma^2 = 1 / (2 c log n).
      g.model = ModelKind::cssbm;
      g.p_prime = 4.0 * value;
      g.q_prime = value;
      g.centers = DenseMatrix(g.K, 1);
      for (std::size_t k = 0; k < g.K; ++k) g.centers(k, 0) = 1.0 + double(k);
      g.sigma = std::sqrt(1.0 / (2.0 * value * logn));
      g.has_covariates = true;
      break;
    }
  }
}

namespace detail {

struct InitCacheEntry {
  LabeledPartition partition;
  double elapsed_ms = 0.0;
};

class CellContext {
 public:
  CellContext(const Dataset& ds, std::uint64_t cell_seed) : ds_(ds), cell_seed_(cell_seed) {}

  const InitCacheEntry& init(InitKind kind) {
    auto it = cache_.find(kind);
    if (it != cache_.end()) return it->second;
    const std::uint64_t seed = mix_seed(cell_seed_, hash_string(init_name(kind)));
    const auto start = std::chrono::steady_clock::now();
    LabeledPartition part;
    switch (kind) {
      case InitKind::em_emb:
        part = em_emb(ds_.A, ds_.X, std::size_t(ds_.z.K), {}, seed);
        break;
      case InitKind::a_sc:
        part = spectral_cluster(ds_.A, std::size_t(ds_.z.K), SpectralMode::adjacency, seed);
        break;
      case InitKind::l_sc:
        part = spectral_cluster(ds_.A, std::size_t(ds_.z.K), SpectralMode::sym_laplacian, seed);
        break;
      case InitKind::signed_sc:
        part = signed_spectral_init(ds_.A, std::size_t(ds_.z.K), seed);
        break;
      case InitKind::random: {
        Rng rng(seed);
        const std::size_t K = std::size_t(ds_.z.K);
        for (std::uint64_t attempt = 0;; ++attempt) {
          std::vector<int> labels(ds_.z.n());
          for (auto& l : labels) l = int(rng.uniform_below(K));
          part = LabeledPartition(std::move(labels), int(K));
          if (!part.has_empty_cluster() || attempt > 64) break;
        }
        break;
      }
      case InitKind::none:
        throw std::logic_error("init(none) requested");
    }
    InitCacheEntry entry{std::move(part),
                         std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count()};
    return cache_.emplace(kind, std::move(entry)).first->second;
  }

  static const char* init_name(InitKind kind) {
    switch (kind) {
      case InitKind::none: return "init:none";
      case InitKind::em_emb: return "init:em-emb";
      case InitKind::a_sc: return "init:a-sc";
      case InitKind::l_sc: return "init:l-sc";
      case InitKind::signed_sc: return "init:signed-sc";
      case InitKind::random: return "init:random";
    }
    return "init:?";
  }

 private:
  const Dataset& ds_;
  std::uint64_t cell_seed_;
  std::map<InitKind, InitCacheEntry> cache_;
};

struct AlgoOutcome {
  LabeledPartition labels;
  std::size_t iters = 0;
  bool converged = true;
  double wall_ms = 0.0;
};

inline AlgoOutcome run_algorithm(const Dataset& ds, const AlgorithmSpec& algo,
                                 CellContext& cell, std::uint64_t algo_seed) {
  const std::size_t K = std::size_t(ds.z.K);
  AlgoOutcome out;
  out.labels = LabeledPartition(std::vector<int>(ds.z.n(), 0), int(K));

  const DenseMatrix* x = ds.has_covariates ? &ds.X : nullptr;
  LabeledPartition init_part;
  if (algo.init != InitKind::none) {
    init_part = cell.init(algo.init).partition;
    out.labels = init_part;  // fallback if the refinement step fails
  }

  const auto start = std::chrono::steady_clock::now();
  auto stop_clock = [&] {
    out.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
  };
  try {
    switch (algo.kind) {
      case AlgoKind::em_emb: {
        const auto& entry = cell.init(InitKind::em_emb);
        out.labels = entry.partition;
        out.wall_ms = entry.elapsed_ms;
        return out;
      }
      case AlgoKind::a_sc: {
        const auto& entry = cell.init(InitKind::a_sc);
        out.labels = entry.partition;
        out.wall_ms = entry.elapsed_ms;
        return out;
      }
      case AlgoKind::l_sc: {
        const auto& entry = cell.init(InitKind::l_sc);
        out.labels = entry.partition;
        out.wall_ms = entry.elapsed_ms;
        return out;
      }
      case AlgoKind::signed_sc: {
        const auto& entry = cell.init(InitKind::signed_sc);
        out.labels = entry.partition;
        out.wall_ms = entry.elapsed_ms;
        return out;
      }
      case AlgoKind::k_sc: {
        if (!ds.has_covariates) throw std::invalid_argument("k-sc requires covariates");
        const SparseSymmetric kern = gaussian_kernel(ds.X, median_pairwise_distance(ds.X));
        out.labels = spectral_cluster(kern, K, SpectralMode::adjacency, algo_seed);
        stop_clock();
        return out;
      }
      case AlgoKind::kmeans_cov: {
        if (!ds.has_covariates) throw std::invalid_argument("kmeans requires covariates");
        out.labels = kmeans(ds.X, K, 10, 100, algo_seed);
        stop_clock();
        return out;
      }
      case AlgoKind::orl_sc: {
        if (!ds.has_covariates) throw std::invalid_argument("orl-sc requires covariates");
        const SparseSymmetric kern = gaussian_kernel(ds.X, median_pairwise_distance(ds.X));
        const std::vector<double> grid = default_orl_grid(ds.A, kern, algo_seed);
        OrlScResult res = orl_sc(ds.A, kern, K, ds.z, grid, algo_seed);
        out.labels = std::move(res.labels);
        stop_clock();
        return out;
      }
      case AlgoKind::ir_ls:
      case AlgoKind::sir_ls:
      case AlgoKind::ir_lss: {
        const IrVariant variant = algo.kind == AlgoKind::ir_ls    ? IrVariant::ir_ls
                                  : algo.kind == AlgoKind::sir_ls ? IrVariant::sir_ls
                                                                  : IrVariant::ir_lss;
        IrOptions opt;
        if (algo.T > 0) opt.T = algo.T;
        opt.early_stop = algo.early_stop;
        auto [labels, trace] = ir_cluster(ds.A, x, ds.sigma, init_part, variant, opt);
        out.labels = std::move(labels);
        out.iters = trace.iterations.empty() ? 0 : trace.iterations.size() - 1;
        out.converged = trace.converged && !trace.degenerate;
        stop_clock();
        return out;
      }
      case AlgoKind::ir_map: {
        IrOptions opt;
        if (algo.T > 0) opt.T = algo.T;
        opt.early_stop = algo.early_stop;
        auto [labels, trace] = ir_map(ds.A, x, ds.sigma, init_part, opt);
        out.labels = std::move(labels);
        out.iters = trace.iterations.empty() ? 0 : trace.iterations.size() - 1;
        out.converged = trace.converged && !trace.degenerate;
        stop_clock();
        return out;
      }
      case AlgoKind::ir_ssbm: {
        IrOptions opt;
        if (algo.T > 0) opt.T = algo.T;
        opt.early_stop = algo.early_stop;
        auto [labels, trace] = ir_ssbm(ds.A, init_part, opt);
        out.labels = std::move(labels);
        out.iters = trace.iterations.empty() ? 0 : trace.iterations.size() - 1;
        out.converged = trace.converged && !trace.degenerate;
        stop_clock();
        return out;
      }
    }
  } catch (const std::exception&) {
    // Partial failure: keep the last valid partition, flag the row.
    out.converged = false;
    stop_clock();
    return out;
  }
  stop_clock();
  return out;
}

}  // namespace detail

inline std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.repetitions < 1) throw std::invalid_argument("run_experiment: repetitions >= 1");
  if (cfg.algorithms.empty()) throw std::invalid_argument("run_experiment: no algorithms");

  std::vector<double> sweep_values = cfg.sweep.values;
  if (cfg.sweep.param == SweepSpec::Param::none) sweep_values = {0.0};

  std::vector<RunRecord> records;
  records.reserve(sweep_values.size() * cfg.repetitions * cfg.algorithms.size());
  for (std::size_t si = 0; si < sweep_values.size(); ++si) {
    GeneratorSpec g = cfg.generator;
    apply_sweep_value(g, cfg.sweep.param, sweep_values[si]);
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
      const std::uint64_t cell_seed = mix_seed(mix_seed(cfg.base_seed, 0xce11 + si), rep);
      Rng data_rng(mix_seed(cell_seed, hash_string("data")));
      const Dataset ds = generate_dataset(g, data_rng);
      detail::CellContext cell(ds, cell_seed);
      for (const AlgorithmSpec& algo : cfg.algorithms) {
        const std::uint64_t algo_seed = mix_seed(cell_seed, hash_string(algo.label));
        detail::AlgoOutcome res = detail::run_algorithm(ds, algo, cell, algo_seed);
        RunRecord rec;
        rec.sweep_param = SweepSpec::name(cfg.sweep.param);
        rec.sweep_value = sweep_values[si];
        rec.run = rep;
        rec.algo = algo.label;
        rec.seed = algo_seed;
        rec.nmi = nmi(res.labels, ds.z);
        rec.error_rate = misclustering_rate(res.labels, ds.z);
        rec.iters = res.iters;
        rec.converged = res.converged;
        rec.wall_time_ms = res.wall_ms;
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

struct SummaryRow {
  std::string algo;
  double sweep_value = 0.0;
  std::size_t count = 0;
  double nmi_mean = 0.0, nmi_sd = 0.0, nmi_min = 0.0, nmi_max = 0.0;
  double err_mean = 0.0, err_sd = 0.0, err_min = 0.0, err_max = 0.0;
  double exact_recovery_freq = 0.0;
  double wall_ms_mean = 0.0;
};

inline std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  std::vector<SummaryRow> rows;
  std::map<std::pair<std::string, double>, std::size_t> index;
  std::map<std::size_t, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : records) {
    const auto key = std::make_pair(r.algo, r.sweep_value);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, rows.size()).first;
      rows.push_back(SummaryRow{r.algo, r.sweep_value});
    }
    groups[it->second].push_back(&r);
  }
  for (auto& [row_idx, group] : groups) {
    SummaryRow& row = rows[row_idx];
    row.count = group.size();
    double nmi_sum = 0.0, err_sum = 0.0, wall_sum = 0.0;
    row.nmi_min = row.err_min = std::numeric_limits<double>::infinity();
    row.nmi_max = row.err_max = -std::numeric_limits<double>::infinity();
    std::size_t exact = 0;
    for (const RunRecord* r : group) {
      nmi_sum += r->nmi;
      err_sum += r->error_rate;
      wall_sum += r->wall_time_ms;
      row.nmi_min = std::min(row.nmi_min, r->nmi);
      row.nmi_max = std::max(row.nmi_max, r->nmi);
      row.err_min = std::min(row.err_min, r->error_rate);
      row.err_max = std::max(row.err_max, r->error_rate);
      if (r->error_rate == 0.0) ++exact;
    }
    row.nmi_mean = nmi_sum / double(row.count);
    row.err_mean = err_sum / double(row.count);
    row.wall_ms_mean = wall_sum / double(row.count);
    row.exact_recovery_freq = double(exact) / double(row.count);
    if (row.count > 1) {
      double nmi_ss = 0.0, err_ss = 0.0;
      for (const RunRecord* r : group) {
        nmi_ss += (r->nmi - row.nmi_mean) * (r->nmi - row.nmi_mean);
        err_ss += (r->error_rate - row.err_mean) * (r->error_rate - row.err_mean);
      }
      row.nmi_sd = std::sqrt(nmi_ss / double(row.count - 1));
      row.err_sd = std::sqrt(err_ss / double(row.count - 1));
    }
  }
  return rows;
}

// Uniform n-scaling for desk-size runs; repetitions are overridden
// separately.
inline void apply_scale(ExperimentConfig& cfg, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("apply_scale: scale must be positive");
  auto& g = cfg.generator;
  g.n = std::max(g.K, std::size_t(std::llround(double(g.n) * scale)));
  if (g.membership.mode == MembershipSpec::Mode::fixed)
    throw std::invalid_argument("apply_scale: cannot scale fixed labels");
}

inline std::vector<std::string> preset_names() {
  return {"fig1_csbm",      "fig3_signed",     "fig3_signed_ci", "signed_p003",
          "heterophilic",   "rank_deficient",  "random_init_snr", "threshold_phase"};
}

inline ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.base_seed = 1;

  auto ir = [](AlgoKind kind, InitKind init, std::size_t T, std::string label) {
    AlgorithmSpec a;
    a.kind = kind;
    a.init = init;
    a.T = T;
    a.label = std::move(label);
    return a;
  };

  if (name == "fig1_csbm" || name == "rank_deficient") {
    auto& g = cfg.generator;
    g.model = ModelKind::csbm;
    g.n = 1000;
    g.K = 3;
    g.membership = MembershipSpec::multinomial();
    const double hi = name == "fig1_csbm" ? 1.6 : 1.5;
    const double mid = name == "fig1_csbm" ? 1.2 : 1.5;
    g.Pi = DenseMatrix::from_rows({{hi, mid, 0.05}, {mid, hi, 0.05}, {0.05, 0.05, name == "fig1_csbm" ? 1.2 : 1.5}});
    for (double& v : g.Pi.data) v *= 0.02;
    g.has_covariates = true;
    g.centers = DenseMatrix::from_rows({{0, 0, 1}, {-1, 1, 0}, {0, 0, 1}});
    g.sigma = std::sqrt(0.2);
    cfg.repetitions = 40;
    cfg.algorithms = {
        ir(AlgoKind::ir_ls, InitKind::em_emb, 30, "ir-ls"),
        ir(AlgoKind::sir_ls, InitKind::em_emb, 30, "sir-ls"),
        ir(AlgoKind::ir_map, InitKind::em_emb, 30, "ir-map"),
        ir(AlgoKind::em_emb, InitKind::em_emb, 0, "em-emb"),
        ir(AlgoKind::orl_sc, InitKind::none, 0, "orl-sc"),
        ir(AlgoKind::l_sc, InitKind::l_sc, 0, "l-sc"),
        ir(AlgoKind::k_sc, InitKind::none, 0, "k-sc"),
    };
  } else if (name == "fig3_signed" || name == "signed_p003" || name == "fig3_signed_ci") {
    auto& g = cfg.generator;
    g.model = ModelKind::signed_sbm;
    if (name == "fig3_signed_ci") {
      g.n = 2000;
      g.K = 5;
      g.p = 0.04;
    } else {
      g.n = 10000;
      g.K = 20;
      g.p = name == "signed_p003" ? 0.03 : 0.01;
      cfg.heavy = true;
    }
    g.membership = MembershipSpec::multinomial();
    cfg.sweep.param = SweepSpec::Param::eta;
    cfg.sweep.values = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45};
    cfg.repetitions = 20;
    cfg.algorithms = {
        ir(AlgoKind::signed_sc, InitKind::signed_sc, 0, "signed-sc"),
        ir(AlgoKind::ir_ssbm, InitKind::signed_sc, 20, "ir-ssbm"),
    };
  } else if (name == "heterophilic") {
    auto& g = cfg.generator;
    g.model = ModelKind::sbm;
    g.n = 1000;
    g.K = 3;
    g.membership = MembershipSpec::multinomial();
    g.Pi = DenseMatrix::from_rows({{0.2, 0.05, 0.1}, {0.05, 0.15, 0.05}, {0.1, 0.05, 0.03}});
    cfg.repetitions = 40;
    cfg.algorithms = {
        ir(AlgoKind::a_sc, InitKind::a_sc, 0, "a-sc"),
        ir(AlgoKind::ir_ls, InitKind::a_sc, 0, "ir-ls"),
        ir(AlgoKind::ir_map, InitKind::a_sc, 1, "ir-map-1"),
        ir(AlgoKind::ir_map, InitKind::a_sc, 0, "ir-map"),
    };
  } else if (name == "random_init_snr") {
    auto& g = cfg.generator;
    g.model = ModelKind::cssbm;
    g.n = 1000;
    g.K = 2;
    cfg.sweep.param = SweepSpec::Param::c_level;
    cfg.sweep.values = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
    cfg.repetitions = 20;
    cfg.algorithms = {
        ir(AlgoKind::sir_ls, InitKind::random, 0, "sir-ls"),
        ir(AlgoKind::ir_map, InitKind::random, 0, "ir-map"),
    };
  } else if (name == "threshold_phase") {
    auto& g = cfg.generator;
    g.model = ModelKind::cssbm;
    g.n = 1000;
    g.K = 2;
    cfg.sweep.param = SweepSpec::Param::snr_ratio;
    cfg.sweep.values = {0.5, 0.75, 1.0, 1.25, 1.5, 2.0};
    cfg.repetitions = 20;
    cfg.algorithms = {
        ir(AlgoKind::em_emb, InitKind::em_emb, 0, "em-emb"),
        ir(AlgoKind::ir_lss, InitKind::em_emb, 0, "ir-lss"),
    };
  } else {
    std::string msg = "unknown preset '" + name + "'; available:";
    for (const auto& p : preset_names()) msg += " " + p;
    throw std::invalid_argument(msg);
  }
  return cfg;
}

}  // namespace irclust
