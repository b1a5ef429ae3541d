// Command-line driver for the experiments: Monte Carlo sweeps, step-time
// benchmarks and case inspection.

#include "gspmap/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <numbers>

using namespace gspmap;

namespace {

struct CommonOptions {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string config_path;
  std::string output;
  std::string format = "csv";
  int trials = 0;
  std::vector<double> grid;
  std::vector<std::string> estimators;
  double alpha0 = 0.0;
  int t_max = 0;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--seed", o.seed, "Master seed; every trial stream derives from it")->required();
  app->add_option("--threads", o.threads, "Worker threads (default: GSPMAP_THREADS or all cores)");
  app->add_option("--config", o.config_path, "JSON file overriding scenario fields")->check(CLI::ExistingFile);
  app->add_option("--output,-o", o.output, "Write the result table here instead of stdout");
  app->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--trials", o.trials, "Monte Carlo trials per grid point");
  app->add_option("--grid", o.grid, "Sweep values")->delimiter(',');
  app->add_option("--estimators", o.estimators,
                  "Subset of lmmse,gsp-lmmse,map,map-vertex,egfd,sgsp,gsp")
      ->delimiter(',');
  app->add_option("--alpha0", o.alpha0, "Initial line-search step");
  app->add_option("--t-max", o.t_max, "Maximum outer iterations");
}

void apply_config(const std::string& path, Scenario& s) {
  std::ifstream in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig("config " + path + ": " + e.what());
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("trials", s.trials);
  get("grid", s.grid);
  get("estimators", s.estimators);
  get("signal_var", s.signal_var);
  get("noise_var", s.noise_var);
  get("mean_degree", s.mean_degree);
  get("rewire_prob", s.rewire_prob);
  get("graph_per_trial", s.graph_per_trial);
  get("case", s.case_path);
  get("beta", s.beta);
  get("training_size", s.training_size);
  if (j.contains("init")) s.init = j.at("init") == "prior-mean" ? InitPolicy::PriorMean : InitPolicy::GspLmmse;
  if (j.contains("solver")) {
    const auto& js = j.at("solver");
    auto sget = [&](const char* key, auto& field) {
      if (js.contains(key)) field = js.at(key).get<std::decay_t<decltype(field)>>();
    };
    sget("alpha0", s.solver.alpha0);
    sget("gamma", s.solver.gamma);
    sget("delta", s.solver.delta);
    sget("sufficient_decrease", s.solver.sufficient_decrease);
    sget("k_max", s.solver.k_max);
    sget("t_max", s.solver.t_max);
    sget("diag_load_eps", s.solver.diag_load_eps);
  }
}

void finish_scenario(const CommonOptions& o, Scenario& s) {
  s.seed = o.seed;
  if (!o.config_path.empty()) apply_config(o.config_path, s);
  // Explicit flags take precedence over the config file.
  if (o.trials > 0) s.trials = o.trials;
  if (!o.grid.empty()) s.grid = o.grid;
  if (!o.estimators.empty()) s.estimators = o.estimators;
  if (o.alpha0 > 0.0) s.solver.alpha0 = o.alpha0;
  if (o.t_max > 0) s.solver.t_max = o.t_max;
  if (o.threads > 0) set_thread_count(o.threads);
}

void emit(const CommonOptions& o, const ResultTable& table) {
  const ResultFormat format = parse_result_format(o.format);
  if (o.output.empty()) {
    write_results(std::cout, table, format);
  } else {
    emit_results(table, o.output, format);
  }
}

std::string default_case() { return std::string(GSPMAP_DATA_DIR) + "/case118.m"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MAP estimation of graph signals from nonlinear measurements"};
  app.require_subcommand(1);

  // example-a
  CommonOptions ea;
  Scenario ea_s;
  ea_s.kind = ScenarioKind::ExampleANmse;
  ea_s.grid = {20, 50, 100, 200};
  bool ea_runtime = false;
  auto* ea_cmd = app.add_subcommand("example-a", "Cubic graph-frequency model on small-world graphs");
  add_common(ea_cmd, ea);
  ea_cmd->add_option("--signal-var", ea_s.signal_var, "Prior variance of every frequency");
  ea_cmd->add_option("--noise-var", ea_s.noise_var, "Measurement noise variance");
  ea_cmd->add_option("--mean-degree", ea_s.mean_degree, "Watts-Strogatz mean degree");
  ea_cmd->add_option("--rewire", ea_s.rewire_prob, "Watts-Strogatz rewiring probability");
  ea_cmd->add_flag("--graph-per-trial", ea_s.graph_per_trial, "Draw a new graph in every trial");
  ea_cmd->add_flag("--runtime", ea_runtime, "Label the sweep as a runtime study");

  // psse
  CommonOptions ps;
  Scenario ps_s;
  ps_s.case_path = default_case();
  std::string sweep = "noise";
  auto* ps_cmd = app.add_subcommand("psse", "Phase estimation on a power network");
  add_common(ps_cmd, ps);
  ps_cmd->add_option("--case", ps_s.case_path, "MATPOWER case file")->check(CLI::ExistingFile);
  ps_cmd->add_option("--sweep", sweep, "noise (grid = noise variance) or beta")
      ->check(CLI::IsMember({"noise", "beta"}));
  ps_cmd->add_option("--beta", ps_s.beta, "Smoothness level of the prior");
  ps_cmd->add_option("--noise-var", ps_s.noise_var, "Measurement noise variance");
  ps_cmd->add_option("--training", ps_s.training_size, "Training pairs for the linear estimators");

  // init-sensitivity
  CommonOptions is;
  Scenario is_s;
  is_s.case_path = default_case();
  is_s.estimators = {"map", "egfd", "sgsp", "gsp"};
  std::string mode = "noise";
  std::string init = "gsp-lmmse";
  auto* is_cmd = app.add_subcommand("init-sensitivity", "Perturbed initialization of the iterative estimators");
  add_common(is_cmd, is);
  is_cmd->add_option("--mode", mode, "noise (grid = perturbation variance) or topology (grid = removed edges)")
      ->check(CLI::IsMember({"noise", "topology"}));
  is_cmd->add_option("--init", init, "Base initialization: gsp-lmmse or prior-mean")
      ->check(CLI::IsMember({"gsp-lmmse", "prior-mean"}));
  is_cmd->add_option("--case", is_s.case_path, "MATPOWER case file")->check(CLI::ExistingFile);
  is_cmd->add_option("--beta", is_s.beta, "Smoothness level of the prior");
  is_cmd->add_option("--noise-var", is_s.noise_var, "Measurement noise variance");
  is_cmd->add_option("--training", is_s.training_size, "Training pairs for the linear estimators");

  // bench
  std::uint64_t bench_seed = 0;
  std::vector<Index> sizes{64, 128, 256, 512};
  int repeats = 3;
  std::string bench_output;
  auto* bench_cmd = app.add_subcommand("bench", "Per-step time of each update rule versus N");
  bench_cmd->add_option("--seed", bench_seed, "Seed for the benchmark problems")->required();
  bench_cmd->add_option("--sizes", sizes, "Ascending graph sizes")->delimiter(',');
  bench_cmd->add_option("--repeats", repeats, "Timed repetitions (median is reported)");
  bench_cmd->add_option("--output,-o", bench_output, "Write the timing CSV here instead of stdout");

  // case-info
  std::string info_case = default_case();
  auto* info_cmd = app.add_subcommand("case-info", "Summarize a MATPOWER case and its Laplacian");
  info_cmd->add_option("--case", info_case, "MATPOWER case file")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (ea_cmd->parsed()) {
      if (ea_runtime) ea_s.kind = ScenarioKind::ExampleARuntime;
      finish_scenario(ea, ea_s);
      emit(ea, run_scenario(ea_s).table);
    } else if (ps_cmd->parsed()) {
      ps_s.kind = sweep == "beta" ? ScenarioKind::PsseBeta : ScenarioKind::PsseNoise;
      ps_s.grid = sweep == "beta" ? std::vector<double>{1, 3, 10, 30} : std::vector<double>{0.5, 0.1, 0.05, 0.01};
      finish_scenario(ps, ps_s);
      emit(ps, run_scenario(ps_s).table);
    } else if (is_cmd->parsed()) {
      is_s.kind = mode == "topology" ? ScenarioKind::TopologyPerturbation : ScenarioKind::InitNoise;
      is_s.grid = mode == "topology" ? std::vector<double>{0, 5, 10, 20} : std::vector<double>{0, 0.01, 1, 100};
      is_s.init = init == "prior-mean" ? InitPolicy::PriorMean : InitPolicy::GspLmmse;
      finish_scenario(is, is_s);
      emit(is, run_scenario(is_s).table);
    } else if (bench_cmd->parsed()) {
      const ScalingReport report = benchmark_update_steps(sizes, repeats, bench_seed);
      std::ofstream file;
      if (!bench_output.empty()) {
        file.open(bench_output);
        if (!file) throw IoError("cannot open " + bench_output + " for writing");
      }
      std::ostream& out = bench_output.empty() ? std::cout : file;
      out << "n,estimator,seconds,predicted_flops\n";
      for (const auto& t : report.timings) {
        out << t.n << ',' << t.estimator << ',' << t.seconds << ',' << t.predicted_flops << '\n';
      }
      for (const auto& [name, slope] : report.slopes) {
        std::cerr << "slope " << name << ' ' << slope << '\n';
      }
    } else if (info_cmd->parsed()) {
      const PowerCase pc = load_case(info_case);
      const SpectralBasis basis = eigendecompose(laplacian_from_susceptance(pc));
      std::cout << "case " << pc.name << '\n'
                << "buses " << pc.n_buses() << '\n'
                << "lines " << pc.lines.size() << '\n'
                << "lambda_2 " << basis.eigenvalues(1) << '\n'
                << "lambda_max " << basis.eigenvalues(basis.size() - 1) << '\n'
                << "beta_1pct_union " << calibrate_beta(basis, 0.01, BetaRule::UnionBound) << '\n'
                << "beta_1pct_per_bus " << calibrate_beta(basis, 0.01, BetaRule::PerElement) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "gspmap: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
