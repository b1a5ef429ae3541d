#include "gspmap/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>

namespace gspmap {

namespace {

// Stream tags for derive_seed, so graph, training and trial draws never share a stream.
constexpr std::uint64_t kGraphStream = 0x6772617068ULL;
constexpr std::uint64_t kTrainingStream = 0x747261696eULL;
constexpr std::uint64_t kTopologyStream = 0x746f706fULL;
constexpr std::uint64_t kInitStream = 0x696e6974ULL;

bool is_psse(ScenarioKind kind) {
  return kind != ScenarioKind::ExampleANmse && kind != ScenarioKind::ExampleARuntime;
}

struct EstimatorEntry {
  std::string name;
  std::optional<EstimatorKind> kind;  // empty for the linear baselines
};

std::vector<EstimatorEntry> parse_estimators(const std::vector<std::string>& names) {
  std::vector<EstimatorEntry> out;
  for (const auto& name : names) {
    if (name == "lmmse" || name == "gsp-lmmse") {
      out.push_back({name, std::nullopt});
    } else {
      const EstimatorKind kind = parse_estimator_kind(name);
      out.push_back({to_string(kind), kind});
    }
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Per-trial model objects. Example A contexts may differ per trial; power
// system contexts are fixed per grid point.
struct TrialModels {
  const GaussianPrior* prior;
  const NoiseModel* noise;
  const MeasurementModel* model;
  const LmmseEstimator* lmmse;
  const GspLmmseEstimator* gsp_lmmse;
};

std::vector<TrialOutcome> run_trial(const Scenario& sc, const std::vector<EstimatorEntry>& entries,
                                    const TrialModels& m, std::size_t point, double point_value,
                                    int trial) {
  Rng rng(derive_seed(sc.seed, point, static_cast<std::uint64_t>(trial)));
  const TrialDraw draw = draw_trial(*m.prior, *m.noise, *m.model, rng);
  const Problem problem(*m.prior, *m.noise, *m.model, draw.y);
  const bool phases = is_psse(sc.kind);
  auto metric = [&](const Vector& estimate) {
    if (phases) return nmspe(draw.x, estimate);
    return (draw.x - estimate).squaredNorm() / static_cast<double>(draw.x.size());
  };

  Rng init_rng(derive_seed(sc.seed, point, static_cast<std::uint64_t>(trial), kInitStream));
  const double perturb = sc.kind == ScenarioKind::InitNoise ? point_value : 0.0;
  const Vector init = scenario_init(sc, perturb, *m.prior, *m.gsp_lmmse, draw.y, init_rng);

  std::vector<TrialOutcome> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    TrialOutcome o;
    const auto start = std::chrono::steady_clock::now();
    if (!e.kind) {
      const Vector est = e.name == "lmmse" ? m.lmmse->estimate(draw.y) : m.gsp_lmmse->estimate(draw.y);
      o.seconds = seconds_since(start);
      o.metric = metric(est);
    } else {
      try {
        const EstimationRun run = run_estimator(*e.kind, problem, init, sc.solver);
        o.seconds = run.wall_time;
        o.iterations = run.iterations;
        if (run.estimate.allFinite()) {
          o.metric = metric(run.estimate);
        } else {
          o.diverged = true;
        }
      } catch (const NonFinite&) {
        o.diverged = true;
      } catch (const SingularNormalEquations&) {
        o.diverged = true;
      } catch (const SingularFilterSystem&) {
        o.diverged = true;
      }
      if (o.diverged) {
        // A diverged run reports its starting point.
        o.seconds = seconds_since(start);
        o.metric = metric(init);
      }
    }
    out.push_back(o);
  }
  return out;
}

ResultRow aggregate(const Scenario& sc, double point_value, const std::string& estimator,
                    const std::vector<TrialOutcome>& trials) {
  ResultRow row;
  row.scenario = to_string(sc.kind);
  row.point = point_value;
  row.estimator = estimator;
  row.metric = is_psse(sc.kind) ? "nmspe" : "nmse";
  const double count = static_cast<double>(trials.size());
  double sum = 0.0;
  double time = 0.0;
  double iters = 0.0;
  for (const auto& t : trials) {
    sum += t.metric;
    time += t.seconds;
    iters += t.iterations;
    row.diverged += t.diverged ? 1 : 0;
  }
  row.mean = sum / count;
  row.time_mean = time / count;
  row.iters_mean = iters / count;
  if (trials.size() > 1) {
    double ss = 0.0;
    for (const auto& t : trials) ss += (t.metric - row.mean) * (t.metric - row.mean);
    row.stderr_ = std::sqrt(ss / (count - 1.0) / count);
  }
  return row;
}

template <typename TrialFn>
std::vector<std::vector<TrialOutcome>> run_trials(const Scenario& sc, std::size_t estimators,
                                                  TrialFn&& trial_fn) {
  std::vector<std::vector<TrialOutcome>> per_trial(static_cast<std::size_t>(sc.trials));
  if (sc.execution == Execution::Serial) {
    for (int t = 0; t < sc.trials; ++t) per_trial[static_cast<std::size_t>(t)] = trial_fn(t);
  } else {
    std::exception_ptr failure;
    std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
    for (int t = 0; t < sc.trials; ++t) {
      try {
        per_trial[static_cast<std::size_t>(t)] = trial_fn(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  // Transpose to [estimator][trial].
  std::vector<std::vector<TrialOutcome>> by_estimator(estimators);
  for (auto& row : by_estimator) row.reserve(per_trial.size());
  for (const auto& trial : per_trial) {
    for (std::size_t e = 0; e < estimators; ++e) by_estimator[e].push_back(trial[e]);
  }
  return by_estimator;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::ExampleANmse: return "example-a-nmse";
    case ScenarioKind::ExampleARuntime: return "example-a-runtime";
    case ScenarioKind::PsseNoise: return "psse-noise";
    case ScenarioKind::PsseBeta: return "psse-beta";
    case ScenarioKind::InitNoise: return "init-noise";
    case ScenarioKind::TopologyPerturbation: return "topology";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(const std::string& name) {
  for (auto kind : {ScenarioKind::ExampleANmse, ScenarioKind::ExampleARuntime, ScenarioKind::PsseNoise,
                    ScenarioKind::PsseBeta, ScenarioKind::InitNoise, ScenarioKind::TopologyPerturbation}) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidConfig("unknown scenario '" + name + "'");
}

void Scenario::validate() const {
  if (trials < 1) throw InvalidConfig("trials must be at least 1");
  if (grid.empty()) throw InvalidConfig("scenario grid is empty");
  if (estimators.empty()) throw InvalidConfig("no estimators selected");
  parse_estimators(estimators);
  if (!(signal_var > 0.0) || !(noise_var > 0.0)) throw InvalidConfig("variances must be positive");
  if (!(beta > 0.0)) throw InvalidBeta("beta must be positive");
  if (training_size < 2) throw InvalidConfig("training size must be at least 2");
  if (is_psse(kind) && case_path.empty()) throw InvalidConfig("power-system scenarios need a case file");
  for (double g : grid) {
    if (!std::isfinite(g)) throw InvalidConfig("grid values must be finite");
    switch (kind) {
      case ScenarioKind::ExampleANmse:
      case ScenarioKind::ExampleARuntime:
        if (g != std::floor(g) || g <= static_cast<double>(mean_degree)) {
          throw InvalidConfig("Example A grid values must be integers above the mean degree");
        }
        break;
      case ScenarioKind::PsseNoise:
      case ScenarioKind::PsseBeta:
        if (!(g > 0.0)) throw InvalidConfig("grid values must be positive");
        break;
      case ScenarioKind::InitNoise:
        if (g < 0.0) throw InvalidConfig("perturbation variance must be nonnegative");
        break;
      case ScenarioKind::TopologyPerturbation:
        if (g != std::floor(g) || g < 0.0) throw InvalidConfig("removed-edge counts must be integers");
        break;
    }
  }
  solver.validate();
}

ExampleAContext make_example_a(Index n, double signal_var, double noise_var, Index mean_degree,
                               double rewire_prob, std::uint64_t graph_seed) {
  ExampleAContext c;
  const Graph graph = watts_strogatz(n, mean_degree, rewire_prob, graph_seed);
  c.basis = make_basis(build_laplacian(graph));
  c.prior = std::make_shared<const GaussianPrior>(
      GaussianPrior::from_frequency(c.basis, Vector::Zero(n), Matrix::Identity(n, n) * signal_var));
  c.noise = std::make_shared<const NoiseModel>(NoiseModel::white(c.basis, noise_var));
  c.model = std::make_shared<const CubicFrequencyModel>(c.basis);
  const LinearMoments moments = cubic_model_moments(n, signal_var, noise_var);
  c.lmmse = std::make_shared<const LmmseEstimator>(moments);
  c.gsp_lmmse = std::make_shared<const GspLmmseEstimator>(moments, c.basis);
  return c;
}

PsseContext make_psse(const PowerCase& power_case, double beta, double noise_var, Index training_size,
                      std::uint64_t training_seed, Execution execution, SharedBasis estimator_basis) {
  PsseContext c;
  c.model = make_power_flow_model(power_case, execution);
  c.prior = std::make_shared<const GaussianPrior>(smooth_prior(c.model->shared_basis(), beta));
  c.noise = std::make_shared<const NoiseModel>(NoiseModel::white(c.model->shared_basis(), noise_var));
  Rng rng(training_seed);
  const TrainingSet set = generate_training(*c.prior, *c.noise, *c.model, training_size, rng);
  c.lmmse = std::make_shared<const LmmseEstimator>(sample_moments(set), kDefaultLoading);
  c.gsp_lmmse = std::make_shared<const GspLmmseEstimator>(
      set, estimator_basis ? estimator_basis : c.model->shared_basis(), kDefaultLoading);
  return c;
}

SharedBasis perturbed_case_basis(const PowerCase& power_case, Index removed, std::uint64_t seed) {
  const Graph graph{Matrix(-power_case.susceptance)};
  return make_basis(build_laplacian(remove_edges(graph, removed, seed)));
}

TrialDraw draw_trial(const GaussianPrior& prior, const NoiseModel& noise, const MeasurementModel& model,
                     Rng& rng) {
  TrialDraw d;
  d.x = prior.sample(rng);
  d.y = model.evaluate(d.x) + noise.sample(rng);
  return d;
}

Vector perturb_init(const Vector& base_init, const SpectralBasis& basis, double perturb_var, Rng& rng) {
  if (perturb_var < 0.0) throw InvalidConfig("perturbation variance must be nonnegative");
  if (perturb_var == 0.0) return base_init;
  std::normal_distribution<double> dist(0.0, std::sqrt(perturb_var));
  Vector p(base_init.size());
  for (Index i = 0; i < p.size(); ++i) p(i) = dist(rng);
  return basis.eigenvectors * (basis.eigenvectors.transpose() * base_init + p);
}

Vector scenario_init(const Scenario& scenario, double perturb_var, const GaussianPrior& prior,
                     const GspLmmseEstimator& linear_init, const Vector& y, Rng& rng) {
  const Vector base = scenario.init == InitPolicy::PriorMean ? prior.mean() : linear_init.estimate(y);
  return perturb_init(base, prior.basis(), perturb_var, rng);
}

ScenarioOutput run_scenario(const Scenario& sc) {
  sc.validate();
  const auto entries = parse_estimators(sc.estimators);
  ScenarioOutput out;
  std::optional<PowerCase> power_case;
  if (is_psse(sc.kind)) power_case = load_case(sc.case_path);

  for (std::size_t g = 0; g < sc.grid.size(); ++g) {
    const double value = sc.grid[g];
    std::vector<std::vector<TrialOutcome>> results;
    if (!is_psse(sc.kind)) {
      const auto n = static_cast<Index>(value);
      auto context_for = [&](std::uint64_t graph_seed) {
        return make_example_a(n, sc.signal_var, sc.noise_var, sc.mean_degree, sc.rewire_prob, graph_seed);
      };
      if (sc.graph_per_trial) {
        results = run_trials(sc, entries.size(), [&](int t) {
          const ExampleAContext c =
              context_for(derive_seed(sc.seed, g, static_cast<std::uint64_t>(t), kGraphStream));
          return run_trial(sc, entries, {c.prior.get(), c.noise.get(), c.model.get(), c.lmmse.get(),
                                         c.gsp_lmmse.get()},
                           g, value, t);
        });
      } else {
        const ExampleAContext c = context_for(derive_seed(sc.seed, g, kGraphStream));
        const TrialModels m{c.prior.get(), c.noise.get(), c.model.get(), c.lmmse.get(), c.gsp_lmmse.get()};
        results = run_trials(sc, entries.size(), [&](int t) { return run_trial(sc, entries, m, g, value, t); });
      }
    } else {
      double beta = sc.beta;
      double noise_var = sc.noise_var;
      SharedBasis misspecified;
      if (sc.kind == ScenarioKind::PsseNoise) noise_var = value;
      if (sc.kind == ScenarioKind::PsseBeta) beta = value;
      if (sc.kind == ScenarioKind::TopologyPerturbation && value > 0.0) {
        misspecified = perturbed_case_basis(*power_case, static_cast<Index>(value),
                                            derive_seed(sc.seed, g, kTopologyStream));
      }
      const PsseContext c = make_psse(*power_case, beta, noise_var, sc.training_size,
                                      derive_seed(sc.seed, g, kTrainingStream), sc.execution, misspecified);
      const TrialModels m{c.prior.get(), c.noise.get(), c.model.get(), c.lmmse.get(), c.gsp_lmmse.get()};
      results = run_trials(sc, entries.size(), [&](int t) { return run_trial(sc, entries, m, g, value, t); });
    }
    for (std::size_t e = 0; e < entries.size(); ++e) {
      out.table.rows.push_back(aggregate(sc, value, entries[e].name, results[e]));
    }
    out.outcomes.push_back(std::move(results));
  }
  return out;
}

// --- benchmarks -------------------------------------------------------------

double predicted_step_flops(EstimatorKind kind, Index n) {
  const double x = static_cast<double>(n);
  switch (kind) {
    case EstimatorKind::MapVertex:
    case EstimatorKind::MapFreq: return 11.0 * x * x * x + 2.5 * x * x + 1.5 * x;
    case EstimatorKind::Egfd: return 11.0 * x;
    case EstimatorKind::Sgsp: return 10.0 * x * x * x + 10.5 * x * x + 4.0 * x;
    case EstimatorKind::Gsp: return 10.0 * x * x * x + 6.0 * x * x + 5.0 * x;
  }
  return 0.0;
}

double ScalingReport::slope(const std::string& estimator) const {
  for (const auto& [name, s] : slopes) {
    if (name == estimator) return s;
  }
  throw InvalidConfig("no slope recorded for " + estimator);
}

double ScalingReport::seconds(const std::string& estimator, Index n) const {
  for (const auto& t : timings) {
    if (t.estimator == estimator && t.n == n) return t.seconds;
  }
  throw InvalidConfig("no timing recorded for " + estimator);
}

namespace {

// Least-squares slope of log(seconds) against log(n).
double loglog_slope(const std::vector<std::pair<double, double>>& points) {
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [n, t] : points) {
    mx += std::log(n);
    my += std::log(t);
  }
  mx /= static_cast<double>(points.size());
  my /= static_cast<double>(points.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [n, t] : points) {
    sxy += (std::log(n) - mx) * (std::log(t) - my);
    sxx += (std::log(n) - mx) * (std::log(n) - mx);
  }
  return sxy / sxx;
}

template <typename Fn>
double median_step_seconds(Fn&& step, int repeats, double min_seconds) {
  std::vector<double> per_call;
  step();  // warm-up
  for (int r = 0; r < repeats; ++r) {
    long calls = 0;
    const auto start = std::chrono::steady_clock::now();
    double elapsed = 0.0;
    do {
      step();
      ++calls;
      elapsed = seconds_since(start);
    } while (elapsed < min_seconds);
    per_call.push_back(elapsed / static_cast<double>(calls));
  }
  std::sort(per_call.begin(), per_call.end());
  return per_call[per_call.size() / 2];
}

}  // namespace

ScalingReport benchmark_update_steps(const std::vector<Index>& sizes, int repeats, std::uint64_t seed,
                                     const std::vector<EstimatorKind>& kinds, double min_seconds) {
  if (sizes.size() < 3) throw InvalidConfig("scaling fit needs at least three sizes");
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw InvalidConfig("sizes must ascend");
  if (repeats < 1) throw InvalidConfig("repeats must be at least 1");
  ScalingReport report;
  std::vector<std::vector<std::pair<double, double>>> points(kinds.size());
  for (Index n : sizes) {
    const ExampleAContext c = make_example_a(n, 0.5, 0.05, 5, 0.2, derive_seed(seed, static_cast<std::uint64_t>(n)));
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(n), 1));
    const TrialDraw draw = draw_trial(*c.prior, *c.noise, *c.model, rng);
    const Problem problem(*c.prior, *c.noise, *c.model, draw.y);
    const Vector x = c.basis->eigenvectors.transpose() * c.gsp_lmmse->estimate(draw.y);
    const SolverConfig config;
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      const EstimatorKind kind = kinds[k];
      Vector next(n);
      double seconds = 0.0;
      if (kind == EstimatorKind::Egfd) {
        EgfdWorkspace work;
        Vector d(n);
        seconds = median_step_seconds(
            [&] {
              egfd_direction_into(x, problem, work, d);
              next.noalias() = x + config.alpha0 * d;
            },
            repeats, min_seconds);
      } else {
        const Vector start = kind == EstimatorKind::MapVertex ? Vector(c.basis->eigenvectors * x) : x;
        seconds = median_step_seconds(
            [&] { next.noalias() = start + config.alpha0 * estimator_direction(kind, start, problem, config); },
            repeats, min_seconds);
      }
      report.timings.push_back({n, to_string(kind), seconds, predicted_step_flops(kind, n)});
      points[k].emplace_back(static_cast<double>(n), seconds);
    }
  }
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    report.slopes.emplace_back(to_string(kinds[k]), loglog_slope(points[k]));
  }
  return report;
}

}  // namespace gspmap
