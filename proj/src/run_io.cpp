#include "gspmap/estimators.hpp"

#include <json.hpp>

#include <ostream>

namespace gspmap {

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

void write_run_json(std::ostream& out, const EstimationRun& run) {
  nlohmann::json j;
  j["estimator"] = to_string(run.kind);
  j["iterations"] = run.iterations;
  j["converged"] = run.converged;
  j["termination"] = to_string(run.reason);
  j["initial_objective"] = run.initial_objective;
  j["wall_time"] = run.wall_time;
  j["estimate"] = to_std(run.estimate);
  j["estimate_freq"] = to_std(run.estimate_freq);
  auto& trace = j["trace"] = nlohmann::json::array();
  for (const auto& rec : run.trace) {
    nlohmann::json r{{"objective", rec.objective},
                     {"alpha", rec.alpha},
                     {"line_search_trials", rec.line_search_trials},
                     {"change_norm", rec.change_norm}};
    if (rec.iterate_freq.size() > 0) r["iterate_freq"] = to_std(rec.iterate_freq);
    trace.push_back(std::move(r));
  }
  out << j.dump(2) << '\n';
}

}  // namespace gspmap
