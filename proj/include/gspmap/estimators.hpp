#pragma once

#include "gspmap/common.hpp"
#include "gspmap/measurement.hpp"
#include "gspmap/statistics.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gspmap {

struct SolverConfig {
  double alpha0 = 0.5;
  double gamma = 0.83;
  double delta = 0.1;            // stop when the iterate moves less than this
  double sufficient_decrease = 0.01;
  int k_max = 30;
  int t_max = 100;
  double diag_load_eps = 1e-10;  // sGSP-MAP loading, relative to trace / N
  bool always_load = false;      // load every sGSP-MAP solve, not only singular ones
  std::optional<Index> bandlimit;  // keep only the first N_s frequencies
  bool record_iterates = false;

  /// Throws InvalidConfig when a field is out of range.
  void validate() const;
};

enum class EstimatorKind { MapVertex, MapFreq, Egfd, Sgsp, Gsp };

std::string to_string(EstimatorKind kind);
/// Accepts "map-vertex", "map" / "map-freq", "egfd", "sgsp", "gsp".
EstimatorKind parse_estimator_kind(const std::string& name);

/// Measurement y together with the statistical model it was drawn from.
/// Holds references; the prior, noise and model must outlive it.
class Problem {
 public:
  Problem(const GaussianPrior& prior, const NoiseModel& noise, const MeasurementModel& model,
          Vector y);

  const GaussianPrior& prior() const { return *prior_; }
  const NoiseModel& noise() const { return *noise_; }
  const MeasurementModel& model() const { return *model_; }
  const SpectralBasis& basis() const { return model_->basis(); }
  Index size() const { return model_->size(); }
  const Vector& y() const { return y_; }
  const Vector& y_freq() const { return y_freq_; }

 private:
  const GaussianPrior* prior_;
  const NoiseModel* noise_;
  const MeasurementModel* model_;
  Vector y_;
  Vector y_freq_;
};

// --- objectives -------------------------------------------------------------

/// Q(x) = 1/2 (x-mu)^T C_xx^{-1} (x-mu) + 1/2 (y-g)^T C_ww^{-1} (y-g).
double map_objective(const Vector& x, const Problem& problem);
/// Same objective written in graph-frequency coordinates.
double map_objective_freq(const Vector& x_freq, const Problem& problem);
/// Q^(d): both quadratic forms with only the diagonals of the inverse covariances.
double egfd_objective(const Vector& x_freq, const Problem& problem);

// --- line search ------------------------------------------------------------

struct LineSearchResult {
  double alpha = 0.0;  // 0 when no trial passed the decrease test
  double objective = 0.0;  // objective at the accepted point (base value if alpha == 0)
  int trials = 0;
};

/// Tries alpha0, gamma alpha0, ..., gamma^k_max alpha0 and accepts the first
/// with q0 - q(alpha) > sufficient_decrease * |q0|.
LineSearchResult backtracking_line_search(double q0, const std::function<double(double)>& objective_at,
                                          const SolverConfig& config);

// --- update rules -----------------------------------------------------------

/// Gauss-Newton step on Q in the vertex domain.
Vector map_step_vertex(const Vector& x, const Problem& problem, double alpha);
/// Gauss-Newton step in the frequency domain; with `bandlimit` only the first
/// N_s coordinates move.
Vector map_step_freq(const Vector& x_freq, const Problem& problem, double alpha,
                     std::optional<Index> bandlimit = std::nullopt);
/// Elementwise step with diagonal inverse covariances and diag(G~) only.
Vector egfd_step(const Vector& x_freq, const Problem& problem, double alpha);

/// Scratch buffers for the allocation-free eGFD direction.
struct EgfdWorkspace {
  Vector g;
  Vector jac_diag;
};

/// Writes the eGFD search direction (the step for alpha = 1) into `out`.
void egfd_direction_into(const Vector& x_freq, const Problem& problem, EgfdWorkspace& work,
                         Vector& out);

/// Frequency responses of the two filters of the graph-filter update.
struct FilterPair {
  Vector f1;
  Vector f2;
};

/// Filters minimizing the expected linearized objective.
FilterPair gsp_map_filters(const Vector& x_freq, const Problem& problem);

/// Filters minimizing the single-sample linearized objective; S_wx is ignored.
/// An S o M system whose Cholesky factorization breaks down (a zero sample
/// entry makes it singular) is retried with eps * trace / N added to its
/// diagonal (eps alone if the trace is 0). `always_load` loads every solve.
FilterPair sgsp_map_filters(const Vector& x_freq, const SampleCovariances& samples,
                            const Problem& problem, double diag_load_eps, bool always_load = false);

/// x~ + alpha f1 o (x~ - mu~) + alpha f2 o (y~ - g~).
Vector gsp_update(const Vector& x_freq, const FilterPair& filters, double alpha,
                  const Vector& prior_mean_freq, const Vector& residual_freq);

/// The filters that reproduce the eGFD step through gsp_update with alpha = 1.
FilterPair egfd_filters(const Vector& x_freq, const Problem& problem);

// --- driver -----------------------------------------------------------------

enum class Termination { Converged, Stalled, MaxIterations };

std::string to_string(Termination reason);

struct IterationRecord {
  double objective = 0.0;  // after the accepted step
  double alpha = 0.0;
  int line_search_trials = 0;
  double change_norm = 0.0;
  Vector iterate_freq;  // filled when SolverConfig::record_iterates is set
};

struct EstimationRun {
  EstimatorKind kind = EstimatorKind::MapFreq;
  Vector estimate;
  Vector estimate_freq;
  int iterations = 0;  // accepted steps
  bool converged = false;
  Termination reason = Termination::MaxIterations;
  double initial_objective = 0.0;
  std::vector<IterationRecord> trace;
  double wall_time = 0.0;  // seconds
};

/// Runs one iterative estimator from a vertex-domain initial point. Throws
/// NonFinite if the objective or the search direction stops being finite.
EstimationRun run_estimator(EstimatorKind kind, const Problem& problem, const Vector& init,
                            const SolverConfig& config = {});

/// Search direction of `kind` at the given iterate (vertex domain for
/// MapVertex, frequency domain otherwise). The update is iterate + alpha * d.
Vector estimator_direction(EstimatorKind kind, const Vector& iterate, const Problem& problem,
                           const SolverConfig& config = {});

// JSON record of a run, including the full trace.
void write_run_json(std::ostream& out, const EstimationRun& run);

}  // namespace gspmap
