// Command-line front end: dataset generation, clustering, evaluation, and
// the Monte Carlo experiment runner.
//
// Exit codes: 0 success (including non-converged clustering), 2 usage
// errors, 3 input/config format errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "irclust/irclust.hpp"

namespace {

using nlohmann::json;
using namespace irclust;

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

DenseMatrix parse_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw FormatError(what + " must be a non-empty array of rows");
  DenseMatrix m;
  m.rows = j.size();
  m.cols = j[0].size();
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != m.cols) throw FormatError(what + " has ragged rows");
    for (const auto& v : row) m.data.push_back(v.get<double>());
  }
  return m;
}

MembershipSpec parse_membership(const json& j) {
  if (j.is_null()) return MembershipSpec::multinomial();
  const std::string mode = j.value("mode", "multinomial");
  if (mode == "fixed") {
    if (!j.contains("labels")) throw FormatError("membership mode 'fixed' needs labels");
    return MembershipSpec::fixed(j["labels"].get<std::vector<int>>());
  }
  if (mode == "balanced") return MembershipSpec::balanced();
  if (mode == "multinomial") {
    std::vector<double> w;
    if (j.contains("weights")) w = j["weights"].get<std::vector<double>>();
    return MembershipSpec::multinomial(std::move(w));
  }
  throw FormatError("unknown membership mode: " + mode);
}

GeneratorSpec parse_generator(const std::string& model, const json& j) {
  GeneratorSpec g;
  g.n = j.at("n").get<std::size_t>();
  g.K = j.at("K").get<std::size_t>();
  g.membership = parse_membership(j.contains("membership") ? j["membership"] : json());
  g.self_loops = j.value("self_loops", false);
  if (j.contains("covariates")) {
    const json& cov = j["covariates"];
    g.centers = parse_matrix(cov.at("centers"), "covariates.centers");
    g.sigma = cov.at("sigma").get<double>();
    g.has_covariates = true;
  }
  if (model == "sbm" || model == "csbm") {
    g.model = model == "sbm" && !g.has_covariates ? ModelKind::sbm : ModelKind::csbm;
    g.Pi = parse_matrix(j.at("Pi"), "Pi");
    if (model == "csbm" && !g.has_covariates)
      throw FormatError("model csbm requires a covariates block");
  } else if (model == "cssbm") {
    g.model = ModelKind::cssbm;
    g.p_prime = j.at("p_prime").get<double>();
    g.q_prime = j.at("q_prime").get<double>();
    g.membership = MembershipSpec::balanced();
  } else if (model == "signed") {
    g.model = ModelKind::signed_sbm;
    g.p = j.at("p").get<double>();
    g.eta = j.value("eta", 0.0);
  } else {
    throw FormatError("unknown model: " + model);
  }
  return g;
}

AlgorithmSpec parse_algorithm(const json& j) {
  AlgorithmSpec a;
  const std::string name = j.at("name").get<std::string>();
  static const std::map<std::string, AlgoKind> kinds = {
      {"ir-ls", AlgoKind::ir_ls},       {"sir-ls", AlgoKind::sir_ls},
      {"ir-lss", AlgoKind::ir_lss},     {"ir-map", AlgoKind::ir_map},
      {"ir-ssbm", AlgoKind::ir_ssbm},   {"em-emb", AlgoKind::em_emb},
      {"a-sc", AlgoKind::a_sc},         {"l-sc", AlgoKind::l_sc},
      {"k-sc", AlgoKind::k_sc},         {"kmeans", AlgoKind::kmeans_cov},
      {"orl-sc", AlgoKind::orl_sc},     {"signed-sc", AlgoKind::signed_sc}};
  const auto it = kinds.find(name);
  if (it == kinds.end()) throw FormatError("unknown algorithm: " + name);
  a.kind = it->second;
  static const std::map<std::string, InitKind> inits = {
      {"none", InitKind::none},           {"em-emb", InitKind::em_emb},
      {"a-sc", InitKind::a_sc},           {"l-sc", InitKind::l_sc},
      {"signed-sc", InitKind::signed_sc}, {"random", InitKind::random}};
  std::string init = j.value("init", "");
  if (init.empty()) {
    switch (a.kind) {
      case AlgoKind::ir_ssbm: init = "signed-sc"; break;
      case AlgoKind::ir_ls:
      case AlgoKind::sir_ls:
      case AlgoKind::ir_lss:
      case AlgoKind::ir_map: init = "em-emb"; break;
      default: init = "none"; break;
    }
  }
  const auto ii = inits.find(init);
  if (ii == inits.end()) throw FormatError("unknown init method: " + init);
  a.init = ii->second;
  a.T = j.value("T", 0);
  a.early_stop = j.value("early_stop", true);
  a.label = j.value("label", name);
  return a;
}

ExperimentConfig parse_experiment(const json& j) {
  ExperimentConfig cfg;
  cfg.name = j.value("name", "custom");
  const json& gen = j.at("generator");
  cfg.generator = parse_generator(gen.at("model").get<std::string>(), gen);
  for (const auto& a : j.at("algorithms")) cfg.algorithms.push_back(parse_algorithm(a));
  cfg.repetitions = j.value("repetitions", 1);
  cfg.base_seed = j.value("base_seed", 1);
  if (j.contains("sweep") && !j["sweep"].is_null()) {
    const std::string param = j["sweep"].at("parameter").get<std::string>();
    if (param == "eta")
      cfg.sweep.param = SweepSpec::Param::eta;
    else if (param == "snr_ratio")
      cfg.sweep.param = SweepSpec::Param::snr_ratio;
    else if (param == "c")
      cfg.sweep.param = SweepSpec::Param::c_level;
    else if (param == "none")
      cfg.sweep.param = SweepSpec::Param::none;
    else
      throw FormatError("unknown sweep parameter: " + param);
    if (cfg.sweep.param != SweepSpec::Param::none)
      cfg.sweep.values = j["sweep"].at("values").get<std::vector<double>>();
  }
  cfg.output_path = j.value("output", "");
  return cfg;
}

int cmd_generate(const std::string& model, const std::string& config_path, std::uint64_t seed,
                 const std::string& prefix) {
  const json cfg = load_json(config_path);
  GeneratorSpec g = parse_generator(model, cfg);
  Rng rng(mix_seed(seed, hash_string("generate")));
  Dataset ds = generate_dataset(g, rng);
  write_edge_list(prefix + ".edges.tsv", ds.A);
  write_labels(prefix + ".labels.txt", ds.z);
  if (ds.has_covariates) write_covariates(prefix + ".covariates.csv", ds.X);
  std::cerr << "wrote " << prefix << ".edges.tsv (" << ds.A.nnz() << " edges), " << prefix
            << ".labels.txt" << (ds.has_covariates ? ", covariates" : "") << "\n";
  return 0;
}

LabeledPartition cluster_init(const std::string& init, const SparseSymmetric& a,
                              const DenseMatrix& x, std::size_t K, std::uint64_t seed) {
  if (init.rfind("file:", 0) == 0) {
    LabeledPartition z = read_labels(init.substr(5), int(K));
    if (z.n() != a.n) throw FormatError("init labels length does not match the graph");
    return z;
  }
  if (init == "em-emb") return em_emb(a, x, K, {}, seed);
  if (init == "a-sc") return spectral_cluster(a, K, SpectralMode::adjacency, seed);
  if (init == "l-sc") return spectral_cluster(a, K, SpectralMode::sym_laplacian, seed);
  if (init == "signed-sc") return signed_spectral_init(a, K, seed);
  if (init == "random") {
    Rng rng(mix_seed(seed, hash_string("init:random")));
    for (std::uint64_t attempt = 0;; ++attempt) {
      std::vector<int> labels(a.n);
      for (auto& l : labels) l = int(rng.uniform_below(K));
      LabeledPartition z(std::move(labels), int(K));
      if (!z.has_empty_cluster() || attempt > 64) return z;
    }
  }
  throw CLI::ValidationError("--init", "unknown init method: " + init);
}

int cmd_cluster(const std::string& algo, const std::string& graph_path,
                const std::string& cov_path, std::size_t K, std::optional<double> sigma,
                bool estimate_sigma, std::string init, std::size_t iters, std::uint64_t seed,
                const std::string& out_path) {
  const bool needs_graph = algo != "kmeans" && algo != "k-sc";
  if (needs_graph && graph_path.empty())
    throw CLI::RequiredError("--graph (required by --algo " + algo + ")");
  const bool needs_cov = algo == "kmeans" || algo == "k-sc";
  if (needs_cov && cov_path.empty())
    throw CLI::RequiredError("--covariates (required by --algo " + algo + ")");

  SparseSymmetric a;
  if (!graph_path.empty()) a = read_edge_list(graph_path);
  DenseMatrix x;
  if (!cov_path.empty()) {
    x = read_covariates(cov_path);
    if (needs_graph && x.rows != a.n)
      throw FormatError("covariate row count does not match the graph size");
  }

  const bool iterative = algo == "ir-ls" || algo == "sir-ls" || algo == "ir-lss" ||
                         algo == "ir-map" || algo == "ir-ssbm";
  if (init.empty()) init = algo == "ir-ssbm" ? "signed-sc" : "em-emb";

  LabeledPartition result;
  std::size_t used_iters = 0;
  bool converged = true;

  if (algo == "kmeans") {
    result = kmeans(x, K, 10, 100, seed);
  } else if (algo == "k-sc") {
    result = spectral_cluster(gaussian_kernel(x, median_pairwise_distance(x)), K,
                              SpectralMode::adjacency, seed);
  } else if (algo == "a-sc") {
    result = spectral_cluster(a, K, SpectralMode::adjacency, seed);
  } else if (algo == "l-sc") {
    result = spectral_cluster(a, K, SpectralMode::sym_laplacian, seed);
  } else if (algo == "em-emb") {
    result = em_emb(a, x, K, {}, seed);
  } else if (iterative) {
    LabeledPartition z0 = cluster_init(init, a, x, K, seed);
    const bool with_cov = x.cols != 0 && algo != "ir-ssbm";
    double sigma_noise = 0.0;
    if (with_cov) {
      if (estimate_sigma)
        sigma_noise = estimate_sigma_pooled(x, z0);
      else if (sigma)
        sigma_noise = *sigma;
      else
        throw CLI::RequiredError("--sigma (or --estimate-sigma) with covariates");
    }
    IrOptions opt;
    opt.T = iters;
    const DenseMatrix* xp = with_cov ? &x : nullptr;
    std::pair<LabeledPartition, RefinementTrace> run;
    if (algo == "ir-ssbm")
      run = ir_ssbm(a, z0, opt);
    else if (algo == "ir-map")
      run = ir_map(a, xp, sigma_noise, z0, opt);
    else {
      const IrVariant variant = algo == "ir-ls"    ? IrVariant::ir_ls
                                : algo == "sir-ls" ? IrVariant::sir_ls
                                                   : IrVariant::ir_lss;
      run = ir_cluster(a, xp, sigma_noise, z0, variant, opt);
    }
    result = std::move(run.first);
    used_iters = run.second.iterations.size() - 1;
    converged = run.second.converged && !run.second.degenerate;
  } else {
    throw CLI::ValidationError("--algo", "unknown algorithm: " + algo);
  }

  write_labels(out_path, result);
  std::cerr << "iterations=" << used_iters << " converged=" << (converged ? "true" : "false")
            << "\n";
  return 0;
}

int cmd_evaluate(const std::string& pred_path, const std::string& truth_path,
                 const std::string& metrics) {
  LabeledPartition pred = read_labels(pred_path);
  LabeledPartition truth = read_labels(truth_path);
  if (pred.n() != truth.n()) throw FormatError("label files have different lengths");
  const int K = std::max(pred.K, truth.K);
  pred.K = truth.K = K;
  std::string out;
  for (const auto& m : irclust::detail::split(metrics, ',')) {
    if (!out.empty()) out += ",";
    if (m == "nmi")
      out += format_real(nmi(pred, truth));
    else if (m == "error_rate")
      out += format_real(misclustering_rate(pred, truth));
    else
      throw CLI::ValidationError("--metrics", "unknown metric: " + m);
  }
  std::cout << out << "\n";
  return 0;
}

int cmd_experiment(const std::string& preset_name, const std::string& config_path, double scale,
                   std::size_t reps, std::optional<std::uint64_t> seed, const std::string& out,
                   bool zero_timings) {
  ExperimentConfig cfg;
  if (!preset_name.empty())
    cfg = preset(preset_name);
  else if (!config_path.empty())
    cfg = parse_experiment(load_json(config_path));
  else
    throw CLI::RequiredError("--preset or --config");
  if (scale > 0.0) apply_scale(cfg, scale);
  if (reps > 0) cfg.repetitions = reps;
  if (seed) cfg.base_seed = *seed;

  const auto records = run_experiment(cfg);
  write_results_csv(out, records, zero_timings);
  write_summary_csv(out + ".summary.csv", summarize(records),
                    SweepSpec::name(cfg.sweep.param), zero_timings);
  std::cerr << "wrote " << records.size() << " records to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iterative refinement clustering toolkit"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "sample a synthetic dataset to files");
  std::string gen_model, gen_config, gen_prefix;
  std::uint64_t gen_seed = 0;
  gen->add_option("--model", gen_model, "sbm|cssbm|csbm|signed")->required();
  gen->add_option("--config", gen_config, "JSON parameter file")->required();
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out-prefix", gen_prefix, "output path prefix")->required();

  // cluster
  auto* clu = app.add_subcommand("cluster", "cluster a dataset from files");
  std::string clu_algo, clu_graph, clu_cov, clu_init, clu_out;
  std::size_t clu_k = 0, clu_iters = IrOptions::default_T;
  std::uint64_t clu_seed = 0;
  double clu_sigma_val = 0.0;
  bool clu_estimate_sigma = false;
  clu->add_option("--algo", clu_algo,
                  "ir-ls|sir-ls|ir-lss|ir-ssbm|ir-map|em-emb|a-sc|l-sc|k-sc|kmeans")
      ->required();
  clu->add_option("--graph", clu_graph, "edge list file");
  clu->add_option("--covariates", clu_cov, "covariate CSV");
  clu->add_option("--k", clu_k, "number of clusters")->required();
  auto* sigma_opt = clu->add_option("--sigma", clu_sigma_val, "known covariate noise scale");
  clu->add_flag("--estimate-sigma", clu_estimate_sigma,
                "estimate sigma from the initial partition");
  clu->add_option("--init", clu_init, "em-emb|a-sc|l-sc|signed-sc|random|file:<path>");
  clu->add_option("--iters", clu_iters, "refinement sweeps (default: ceil(3 log2 n))");
  clu->add_option("--seed", clu_seed, "random seed");
  clu->add_option("--out", clu_out, "output label file")->required();

  // evaluate
  auto* eva = app.add_subcommand("evaluate", "compare predicted labels against truth");
  std::string eva_pred, eva_truth, eva_metrics = "nmi,error_rate";
  eva->add_option("--pred", eva_pred, "predicted label file")->required();
  eva->add_option("--truth", eva_truth, "true label file")->required();
  eva->add_option("--metrics", eva_metrics, "comma list of nmi,error_rate");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a Monte Carlo experiment batch");
  std::string exp_preset, exp_config, exp_out;
  double exp_scale = 0.0;
  std::size_t exp_reps = 0;
  std::uint64_t exp_seed = 0;
  bool exp_seed_set = false, exp_zero_timings = false;
  exp->add_option("--preset", exp_preset, "named preset (see README)");
  exp->add_option("--config", exp_config, "experiment JSON file");
  exp->add_option("--scale", exp_scale, "scale factor applied to n");
  exp->add_option("--reps", exp_reps, "override repetitions");
  exp->add_option("--seed", exp_seed, "base seed")->each([&](const std::string&) {
    exp_seed_set = true;
  });
  exp->add_option("--out", exp_out, "results CSV path")->required();
  exp->add_flag("--zero-timings", exp_zero_timings,
                "write wall_time_ms as 0 for byte-reproducible output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_model, gen_config, gen_seed, gen_prefix);
    if (clu->parsed()) {
      std::optional<double> sigma;
      if (sigma_opt->count() > 0) sigma = clu_sigma_val;
      return cmd_cluster(clu_algo, clu_graph, clu_cov, clu_k, sigma, clu_estimate_sigma,
                         clu_init, clu_iters, clu_seed, clu_out);
    }
    if (eva->parsed()) return cmd_evaluate(eva_pred, eva_truth, eva_metrics);
    if (exp->parsed())
      return cmd_experiment(exp_preset, exp_config, exp_scale, exp_reps,
                            exp_seed_set ? std::optional<std::uint64_t>(exp_seed) : std::nullopt,
                            exp_out, exp_zero_timings);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
