#include "gspmap/estimators.hpp"

#include <chrono>
#include <cmath>

namespace gspmap {

void SolverConfig::validate() const {
  if (!(alpha0 > 0.0 && alpha0 <= 1.0)) throw InvalidConfig("alpha0 must lie in (0, 1]");
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidConfig("gamma must lie in (0, 1)");
  if (!(delta > 0.0)) throw InvalidConfig("delta must be positive");
  if (!(sufficient_decrease >= 0.0 && sufficient_decrease < 1.0)) {
    throw InvalidConfig("sufficient-decrease fraction must lie in [0, 1)");
  }
  if (k_max < 0) throw InvalidConfig("k_max must be nonnegative");
  if (t_max < 1) throw InvalidConfig("t_max must be at least 1");
  if (!(diag_load_eps > 0.0)) throw InvalidConfig("diag_load_eps must be positive");
  if (bandlimit && *bandlimit < 1) throw InvalidConfig("bandlimit must be at least 1");
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::MapVertex: return "map-vertex";
    case EstimatorKind::MapFreq: return "map";
    case EstimatorKind::Egfd: return "egfd";
    case EstimatorKind::Sgsp: return "sgsp";
    case EstimatorKind::Gsp: return "gsp";
  }
  return "unknown";
}

EstimatorKind parse_estimator_kind(const std::string& name) {
  if (name == "map-vertex") return EstimatorKind::MapVertex;
  if (name == "map" || name == "map-freq") return EstimatorKind::MapFreq;
  if (name == "egfd") return EstimatorKind::Egfd;
  if (name == "sgsp") return EstimatorKind::Sgsp;
  if (name == "gsp") return EstimatorKind::Gsp;
  throw InvalidConfig("unknown estimator '" + name + "'");
}

std::string to_string(Termination reason) {
  switch (reason) {
    case Termination::Converged: return "converged";
    case Termination::Stalled: return "stalled";
    case Termination::MaxIterations: return "max-iterations";
  }
  return "unknown";
}

Problem::Problem(const GaussianPrior& prior, const NoiseModel& noise, const MeasurementModel& model,
                 Vector y)
    : prior_(&prior), noise_(&noise), model_(&model), y_(std::move(y)) {
  const Index n = model.size();
  if (prior.size() != n || noise.size() != n || y_.size() != n) {
    throw DomainMismatch("prior, noise, model and measurement dimensions differ");
  }
  y_freq_ = model.basis().eigenvectors.transpose() * y_;
}

// --- objectives -------------------------------------------------------------

double map_objective(const Vector& x, const Problem& p) {
  const Vector a = x - p.prior().mean();
  const Vector r = p.y() - p.model().evaluate(x);
  return 0.5 * a.dot(p.prior().inverse() * a) + 0.5 * r.dot(p.noise().inverse() * r);
}

double map_objective_freq(const Vector& x_freq, const Problem& p) {
  const Vector a = x_freq - p.prior().mean_freq();
  const Vector r = p.y_freq() - p.model().evaluate_freq(x_freq);
  double q = 0.5 * r.dot(p.noise().inverse_freq() * r);
  // Diagonal priors skip the dense product; the pinned ridge makes it ill-scaled.
  if (p.prior().diagonal_in_frequency()) {
    q += 0.5 * a.cwiseAbs2().dot(p.prior().inverse_freq_diagonal());
  } else {
    q += 0.5 * a.dot(p.prior().inverse_freq() * a);
  }
  return q;
}

double egfd_objective(const Vector& x_freq, const Problem& p) {
  const Vector a = x_freq - p.prior().mean_freq();
  const Vector r = p.y_freq() - p.model().evaluate_freq(x_freq);
  return 0.5 * a.cwiseAbs2().dot(p.prior().inverse_freq_diagonal()) +
         0.5 * r.cwiseAbs2().dot(p.noise().inverse_freq_diagonal());
}

// --- line search ------------------------------------------------------------

LineSearchResult backtracking_line_search(double q0, const std::function<double(double)>& objective_at,
                                          const SolverConfig& config) {
  LineSearchResult result;
  result.objective = q0;
  double alpha = config.alpha0;
  const double threshold = config.sufficient_decrease * std::abs(q0);
  for (int k = 0; k <= config.k_max; ++k) {
    const double q = objective_at(alpha);
    ++result.trials;
    if (q0 - q > threshold) {
      result.alpha = alpha;
      result.objective = q;
      return result;
    }
    alpha *= config.gamma;
  }
  return result;
}

// --- directions -------------------------------------------------------------

namespace {

// -(M)^{-1} grad, with M and grad from the linearized objective.
Vector solve_normal_equations(const Matrix& m, const Vector& grad) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw SingularNormalEquations("Gauss-Newton normal matrix is not positive definite");
  }
  Vector d = -llt.solve(grad);
  if (!d.allFinite()) throw SingularNormalEquations("Gauss-Newton step is not finite");
  return d;
}

Vector map_direction_vertex(const Vector& x, const Problem& p) {
  const Matrix g = p.model().jacobian(x);
  const Vector r = p.y() - p.model().evaluate(x);
  const Matrix wg = p.noise().inverse() * g;
  const Matrix m = p.prior().inverse() + g.transpose() * wg;
  const Vector grad = p.prior().inverse() * (x - p.prior().mean()) - wg.transpose() * r;
  return solve_normal_equations(m, grad);
}

Vector map_direction_freq(const Vector& xf, const Problem& p, std::optional<Index> bandlimit) {
  const Matrix g = p.model().jacobian_freq(xf);
  const Vector r = p.y_freq() - p.model().evaluate_freq(xf);
  const Matrix wg = p.noise().inverse_freq() * g;
  const Matrix m = p.prior().inverse_freq() + g.transpose() * wg;
  const Vector grad = p.prior().inverse_freq() * (xf - p.prior().mean_freq()) - wg.transpose() * r;
  const Index n = xf.size();
  if (bandlimit && *bandlimit < n) {
    const Index ns = *bandlimit;
    Vector d = Vector::Zero(n);
    d.head(ns) = solve_normal_equations(m.topLeftCorner(ns, ns), grad.head(ns));
    return d;
  }
  return solve_normal_equations(m, grad);
}

// M = C~x^{-1} + G~^T C~w^{-1} G~, shared by both filter constructions.
Matrix filter_normal_matrix(const Matrix& g, const Problem& p) {
  return p.prior().inverse_freq() + g.transpose() * (p.noise().inverse_freq() * g);
}

Vector solve_filter_system(Matrix a, const Vector& b, double load) {
  a.diagonal().array() += load;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) throw SingularFilterSystem("graph-filter system is singular");
  Vector f = llt.solve(b);
  if (!f.allFinite()) throw SingularFilterSystem("graph-filter response is not finite");
  return f;
}

double loading_for(const Matrix& a, double eps) {
  const double tr = a.trace();
  return tr > 0.0 ? eps * tr / static_cast<double>(a.rows()) : eps;
}

// Unloaded Cholesky first; loading only if it breaks down.
Vector solve_sample_filter_system(const Matrix& a, const Vector& b, double eps, bool always_load) {
  if (!always_load) {
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() == Eigen::Success) {
      Vector f = llt.solve(b);
      if (f.allFinite()) return f;
    }
  }
  return solve_filter_system(a, b, loading_for(a, eps));
}

FilterPair sgsp_filters_with_jacobian(const Matrix& g, const SampleCovariances& s, const Problem& p,
                                      double eps, bool always_load) {
  const Matrix m = filter_normal_matrix(g, p);
  const Matrix a1 = s.xx.cwiseProduct(m);
  const Matrix a2 = s.ww.cwiseProduct(m);
  // diag(S C) for symmetric C is the row sum of S o C.
  const Vector b1 = s.xx.cwiseProduct(p.prior().inverse_freq()).rowwise().sum();
  const Vector b2 = s.ww.cwiseProduct((p.noise().inverse_freq() * g).transpose()).rowwise().sum();
  return {-solve_sample_filter_system(a1, b1, eps, always_load),
          solve_sample_filter_system(a2, b2, eps, always_load)};
}

}  // namespace

Vector estimator_direction(EstimatorKind kind, const Vector& iterate, const Problem& p,
                           const SolverConfig& config) {
  if (iterate.size() != p.size()) throw DomainMismatch("iterate has the wrong length");
  switch (kind) {
    case EstimatorKind::MapVertex: return map_direction_vertex(iterate, p);
    case EstimatorKind::MapFreq: return map_direction_freq(iterate, p, config.bandlimit);
    case EstimatorKind::Egfd: {
      EgfdWorkspace work;
      Vector d;
      egfd_direction_into(iterate, p, work, d);
      return d;
    }
    case EstimatorKind::Sgsp: {
      const Matrix g = p.model().jacobian_freq(iterate);
      const Vector gf = p.model().evaluate_freq(iterate);
      const SampleCovariances s = sample_covariances(iterate, p.y_freq(), gf, p.prior().mean_freq());
      const FilterPair f = sgsp_filters_with_jacobian(g, s, p, config.diag_load_eps, config.always_load);
      return f.f1.cwiseProduct(iterate - p.prior().mean_freq()) + f.f2.cwiseProduct(p.y_freq() - gf);
    }
    case EstimatorKind::Gsp: {
      const FilterPair f = gsp_map_filters(iterate, p);
      const Vector gf = p.model().evaluate_freq(iterate);
      return f.f1.cwiseProduct(iterate - p.prior().mean_freq()) + f.f2.cwiseProduct(p.y_freq() - gf);
    }
  }
  throw InvalidConfig("unknown estimator kind");
}

// --- public steps -----------------------------------------------------------

Vector map_step_vertex(const Vector& x, const Problem& p, double alpha) {
  return x + alpha * map_direction_vertex(x, p);
}

Vector map_step_freq(const Vector& x_freq, const Problem& p, double alpha,
                     std::optional<Index> bandlimit) {
  return x_freq + alpha * map_direction_freq(x_freq, p, bandlimit);
}

void egfd_direction_into(const Vector& x_freq, const Problem& p, EgfdWorkspace& work, Vector& out) {
  const MeasurementModel& model = p.model();
  model.evaluate_freq_into(x_freq, work.g);
  model.jacobian_freq_diagonal_into(x_freq, work.jac_diag);
  const Index n = x_freq.size();
  const Vector& dx = p.prior().inverse_freq_diagonal();
  const Vector& dw = p.noise().inverse_freq_diagonal();
  const Vector& mu = p.prior().mean_freq();
  const Vector& y = p.y_freq();
  out.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double gd = work.jac_diag(i);
    const double num = dx(i) * (x_freq(i) - mu(i)) - dw(i) * gd * (y(i) - work.g(i));
    out(i) = -num / (dx(i) + dw(i) * gd * gd);
  }
}

Vector egfd_step(const Vector& x_freq, const Problem& p, double alpha) {
  if (x_freq.size() != p.size()) throw DomainMismatch("iterate has the wrong length");
  EgfdWorkspace work;
  Vector d;
  egfd_direction_into(x_freq, p, work, d);
  return x_freq + alpha * d;
}

FilterPair gsp_map_filters(const Vector& x_freq, const Problem& p) {
  if (x_freq.size() != p.size()) throw DomainMismatch("iterate has the wrong length");
  const Matrix g = p.model().jacobian_freq(x_freq);
  const Matrix m = filter_normal_matrix(g, p);
  const Index n = x_freq.size();
  const Vector f1 = -solve_filter_system(p.prior().covariance_freq().cwiseProduct(m), Vector::Ones(n), 0.0);
  const Vector f2 = solve_filter_system(p.noise().covariance_freq().cwiseProduct(m), g.diagonal(), 0.0);
  return {f1, f2};
}

FilterPair sgsp_map_filters(const Vector& x_freq, const SampleCovariances& samples, const Problem& p,
                            double diag_load_eps, bool always_load) {
  if (x_freq.size() != p.size()) throw DomainMismatch("iterate has the wrong length");
  if (!(diag_load_eps > 0.0)) throw InvalidConfig("diag_load_eps must be positive");
  const Matrix g = p.model().jacobian_freq(x_freq);
  return sgsp_filters_with_jacobian(g, samples, p, diag_load_eps, always_load);
}

Vector gsp_update(const Vector& x_freq, const FilterPair& f, double alpha,
                  const Vector& prior_mean_freq, const Vector& residual_freq) {
  const Index n = x_freq.size();
  if (f.f1.size() != n || f.f2.size() != n || prior_mean_freq.size() != n ||
      residual_freq.size() != n) {
    throw DomainMismatch("filter update inputs differ in length");
  }
  return x_freq + alpha * (f.f1.cwiseProduct(x_freq - prior_mean_freq) + f.f2.cwiseProduct(residual_freq));
}

FilterPair egfd_filters(const Vector& x_freq, const Problem& p) {
  const Vector gd = p.model().jacobian_freq_diagonal(x_freq);
  const Vector& dx = p.prior().inverse_freq_diagonal();
  const Vector& dw = p.noise().inverse_freq_diagonal();
  const Vector denom = dx + dw.cwiseProduct(gd.cwiseAbs2());
  return {-dx.cwiseQuotient(denom), dw.cwiseProduct(gd).cwiseQuotient(denom)};
}

// --- driver -----------------------------------------------------------------

namespace {

struct BandProjector {
  const SpectralBasis& basis;
  std::optional<Index> bandlimit;
  bool vertex;

  void apply(Vector& v) const {
    if (!bandlimit || *bandlimit >= v.size()) return;
    const Index ns = *bandlimit;
    if (vertex) {
      Vector f = basis.eigenvectors.transpose() * v;
      f.tail(v.size() - ns).setZero();
      v = basis.eigenvectors * f;
    } else {
      v.tail(v.size() - ns).setZero();
    }
  }
};

}  // namespace

EstimationRun run_estimator(EstimatorKind kind, const Problem& p, const Vector& init,
                            const SolverConfig& config) {
  config.validate();
  if (init.size() != p.size()) throw DomainMismatch("initial estimate has the wrong length");
  const auto start = std::chrono::steady_clock::now();
  const Matrix& v = p.basis().eigenvectors;
  const bool vertex = kind == EstimatorKind::MapVertex;
  const BandProjector band{p.basis(), config.bandlimit, vertex};

  std::function<double(const Vector&)> objective;
  if (vertex) {
    objective = [&p](const Vector& x) { return map_objective(x, p); };
  } else if (kind == EstimatorKind::Egfd) {
    objective = [&p](const Vector& x) { return egfd_objective(x, p); };
  } else {
    objective = [&p](const Vector& x) { return map_objective_freq(x, p); };
  }

  EstimationRun run;
  run.kind = kind;
  Vector x = vertex ? init : Vector(v.transpose() * init);
  band.apply(x);
  double q = objective(x);
  if (!std::isfinite(q)) throw NonFinite("objective is not finite at the initial point");
  run.initial_objective = q;

  Vector trial(x.size());
  for (int t = 0; t < config.t_max; ++t) {
    Vector d = estimator_direction(kind, x, p, config);
    band.apply(d);
    if (!d.allFinite()) throw NonFinite("search direction is not finite");
    const LineSearchResult ls = backtracking_line_search(
        q,
        [&](double alpha) {
          trial = x + alpha * d;
          return objective(trial);
        },
        config);
    if (ls.alpha == 0.0) {
      // No decrease at any trial step: a stationary point if the proposed move is small.
      run.converged = config.alpha0 * d.norm() < config.delta;
      run.reason = run.converged ? Termination::Converged : Termination::Stalled;
      break;
    }
    x += ls.alpha * d;
    q = ls.objective;
    if (!std::isfinite(q)) throw NonFinite("objective is not finite");
    IterationRecord rec;
    rec.objective = q;
    rec.alpha = ls.alpha;
    rec.line_search_trials = ls.trials;
    rec.change_norm = ls.alpha * d.norm();
    if (config.record_iterates) rec.iterate_freq = vertex ? Vector(v.transpose() * x) : x;
    run.trace.push_back(std::move(rec));
    if (run.trace.back().change_norm < config.delta) {
      run.converged = true;
      run.reason = Termination::Converged;
      break;
    }
  }
  if (!run.converged && run.reason != Termination::Stalled) run.reason = Termination::MaxIterations;

  run.iterations = static_cast<int>(run.trace.size());
  if (vertex) {
    run.estimate = x;
    run.estimate_freq = v.transpose() * x;
  } else {
    run.estimate_freq = x;
    run.estimate = v * x;
  }
  run.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

}  // namespace gspmap
