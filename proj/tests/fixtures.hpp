#pragma once

#include "oracles.hpp"

#include "gspmap/harness.hpp"

#include <memory>
#include <string>

namespace fixture {

using namespace gspmap;

inline std::string data_path(const std::string& file) { return std::string(GSPMAP_DATA_DIR) + "/" + file; }

/// One Example A draw together with everything the Problem refers to.
struct ExampleADraw {
  ExampleAContext ctx;
  Vector x;
  Vector y;
  std::unique_ptr<Problem> problem;
};

inline ExampleADraw example_a(Index n, std::uint64_t graph_seed, std::uint64_t trial_seed) {
  ExampleADraw d;
  d.ctx = make_example_a(n, 0.5, 0.05, 5, 0.2, graph_seed);
  Rng rng(trial_seed);
  const TrialDraw t = draw_trial(*d.ctx.prior, *d.ctx.noise, *d.ctx.model, rng);
  d.x = t.x;
  d.y = t.y;
  d.problem = std::make_unique<Problem>(*d.ctx.prior, *d.ctx.noise, *d.ctx.model, d.y);
  return d;
}

/// Small network problem with dense (non-diagonal) covariances and the AC model.
struct DenseAcProblem {
  PowerCase pc;
  std::shared_ptr<const AcPowerFlowModel> model;
  std::unique_ptr<GaussianPrior> prior;
  std::unique_ptr<NoiseModel> noise;
  Vector y;
  std::unique_ptr<Problem> problem;
};

inline DenseAcProblem dense_ac(const std::string& case_file, std::uint64_t seed, double prior_scale = 0.05) {
  DenseAcProblem d;
  d.pc = load_case(data_path(case_file));
  d.model = make_power_flow_model(d.pc, Execution::Serial);
  const Index n = d.pc.n_buses();
  std::mt19937_64 rng(seed);
  d.prior = std::make_unique<GaussianPrior>(GaussianPrior::from_vertex(
      d.model->shared_basis(), oracle::random_vector(n, rng, 0.1), prior_scale * oracle::random_spd(n, rng)));
  d.noise = std::make_unique<NoiseModel>(NoiseModel::from_vertex(d.model->shared_basis(), 0.1 * oracle::random_spd(n, rng)));
  Rng draw(seed + 1);
  const TrialDraw t = draw_trial(*d.prior, *d.noise, *d.model, draw);
  d.y = t.y;
  d.problem = std::make_unique<Problem>(*d.prior, *d.noise, *d.model, d.y);
  return d;
}

}  // namespace fixture
