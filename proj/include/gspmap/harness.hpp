#pragma once

#include "gspmap/common.hpp"
#include "gspmap/estimators.hpp"
#include "gspmap/graph.hpp"
#include "gspmap/measurement.hpp"
#include "gspmap/parallel_kernels.hpp"
#include "gspmap/psse.hpp"
#include "gspmap/statistics.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gspmap {

enum class ScenarioKind {
  ExampleANmse,      // grid: N
  ExampleARuntime,   // grid: N
  PsseNoise,         // grid: noise variance
  PsseBeta,          // grid: beta
  InitNoise,         // grid: variance of the initialization perturbation
  TopologyPerturbation,  // grid: number of removed edges
};

std::string to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& name);

enum class InitPolicy { GspLmmse, PriorMean };

/// Linear baselines are named "lmmse" and "gsp-lmmse"; the iterative
/// estimators use the names of parse_estimator_kind.
struct Scenario {
  ScenarioKind kind = ScenarioKind::ExampleANmse;
  std::vector<double> grid;
  int trials = 1000;
  std::uint64_t seed = 0;
  std::vector<std::string> estimators{"lmmse", "gsp-lmmse", "map", "egfd", "sgsp", "gsp"};

  // Example A
  double signal_var = 0.5;
  double noise_var = 0.05;
  Index mean_degree = 5;
  double rewire_prob = 0.2;
  bool graph_per_trial = false;

  // power system
  std::string case_path;
  double beta = 3.0;
  Index training_size = 500;
  InitPolicy init = InitPolicy::GspLmmse;

  SolverConfig solver;
  Execution execution = Execution::Parallel;

  void validate() const;
};

struct ResultRow {
  std::string scenario;
  double point = 0.0;
  std::string estimator;
  std::string metric;
  double mean = 0.0;
  double stderr_ = 0.0;
  double time_mean = 0.0;
  double iters_mean = 0.0;
  long diverged = 0;

  bool operator==(const ResultRow&) const = default;
};

struct ResultTable {
  std::vector<ResultRow> rows;

  bool operator==(const ResultTable&) const = default;
};

/// Per-trial outcome of one estimator.
struct TrialOutcome {
  double metric = 0.0;
  double seconds = 0.0;
  int iterations = 0;
  bool diverged = false;
};

struct ScenarioOutput {
  ResultTable table;
  // outcomes[point][estimator][trial]
  std::vector<std::vector<std::vector<TrialOutcome>>> outcomes;
};

ScenarioOutput run_scenario(const Scenario& scenario);

// --- building blocks shared with tests and the CLI -------------------------

/// Everything an Example A trial needs: graph basis, prior, noise, cubic model
/// and the analytic-moment linear estimators.
struct ExampleAContext {
  SharedBasis basis;
  std::shared_ptr<const GaussianPrior> prior;
  std::shared_ptr<const NoiseModel> noise;
  std::shared_ptr<const CubicFrequencyModel> model;
  std::shared_ptr<const LmmseEstimator> lmmse;
  std::shared_ptr<const GspLmmseEstimator> gsp_lmmse;
};

ExampleAContext make_example_a(Index n, double signal_var, double noise_var, Index mean_degree,
                               double rewire_prob, std::uint64_t graph_seed);

/// Power-system setup for one (beta, noise) pair, with the sample-mean linear
/// estimators trained once. `estimator_basis` overrides the basis the
/// GSP-LMMSE filter is built on (misspecified topology).
struct PsseContext {
  std::shared_ptr<const AcPowerFlowModel> model;
  std::shared_ptr<const GaussianPrior> prior;
  std::shared_ptr<const NoiseModel> noise;
  std::shared_ptr<const LmmseEstimator> lmmse;
  std::shared_ptr<const GspLmmseEstimator> gsp_lmmse;
};

PsseContext make_psse(const PowerCase& power_case, double beta, double noise_var, Index training_size,
                      std::uint64_t training_seed, Execution execution = Execution::Parallel,
                      SharedBasis estimator_basis = nullptr);

/// Basis of the case Laplacian after removing `removed` lines (connectivity kept).
SharedBasis perturbed_case_basis(const PowerCase& power_case, Index removed, std::uint64_t seed);

struct TrialDraw {
  Vector x;
  Vector y;
};

TrialDraw draw_trial(const GaussianPrior& prior, const NoiseModel& noise, const MeasurementModel& model,
                     Rng& rng);

/// Initial point V (x~0 + p~0) with p~0 ~ N(0, perturb_var I); x~0 is the
/// base initialization in the frequency domain.
Vector perturb_init(const Vector& base_init, const SpectralBasis& basis, double perturb_var, Rng& rng);

/// Starting point of the iterative estimators for one trial: the base
/// initialization of scenario.init, perturbed by `perturb_var` when positive.
Vector scenario_init(const Scenario& scenario, double perturb_var, const GaussianPrior& prior,
                     const GspLmmseEstimator& linear_init, const Vector& y, Rng& rng);

// --- benchmarks -------------------------------------------------------------

struct StepTiming {
  Index n = 0;
  std::string estimator;
  double seconds = 0.0;  // median per-step wall time
  double predicted_flops = 0.0;
};

struct ScalingReport {
  std::vector<StepTiming> timings;
  std::vector<std::pair<std::string, double>> slopes;  // log-log slope per estimator

  double slope(const std::string& estimator) const;
  double seconds(const std::string& estimator, Index n) const;
};

/// Floating-point operation counts of one update step.
double predicted_step_flops(EstimatorKind kind, Index n);

/// Median per-step time of each update rule on the cubic model. Eigen runs
/// single-threaded; every timed call repeats until `min_seconds` elapse.
ScalingReport benchmark_update_steps(const std::vector<Index>& sizes, int repeats, std::uint64_t seed,
                                     const std::vector<EstimatorKind>& kinds =
                                         {EstimatorKind::MapFreq, EstimatorKind::Egfd,
                                          EstimatorKind::Sgsp, EstimatorKind::Gsp},
                                     double min_seconds = 0.02);

// --- result files -----------------------------------------------------------

enum class ResultFormat { Csv, Json };

ResultFormat parse_result_format(const std::string& name);
void write_results(std::ostream& out, const ResultTable& table, ResultFormat format);
ResultTable read_results(std::istream& in, ResultFormat format);
void emit_results(const ResultTable& table, const std::string& path, ResultFormat format);

}  // namespace gspmap
