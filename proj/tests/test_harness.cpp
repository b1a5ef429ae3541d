#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace gspmap;

namespace {

Scenario small_example_a() {
  Scenario s;
  s.kind = ScenarioKind::ExampleANmse;
  s.grid = {20, 30};
  s.trials = 12;
  s.seed = 42;
  return s;
}

Scenario small_psse(ScenarioKind kind, std::vector<double> grid) {
  Scenario s;
  s.kind = kind;
  s.grid = std::move(grid);
  s.trials = 8;
  s.seed = 7;
  s.case_path = fixture::data_path("case57.m");
  s.training_size = 100;
  return s;
}

void strip_times(ResultTable& t) {
  for (auto& r : t.rows) r.time_mean = 0.0;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("scenario names") {
  for (auto k : {ScenarioKind::ExampleANmse, ScenarioKind::ExampleARuntime, ScenarioKind::PsseNoise,
                 ScenarioKind::PsseBeta, ScenarioKind::InitNoise, ScenarioKind::TopologyPerturbation}) {
    CHECK(parse_scenario_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_scenario_kind("fig9"), InvalidConfig);
}

TEST_CASE("scenario validation") {
  Scenario s = small_example_a();
  CHECK_NOTHROW(s.validate());
  s.grid = {};
  CHECK_THROWS_AS(s.validate(), InvalidConfig);
  s = small_example_a();
  s.estimators = {"kalman"};
  CHECK_THROWS_AS(s.validate(), InvalidConfig);
  s = small_example_a();
  s.grid = {3.5};
  CHECK_THROWS_AS(s.validate(), InvalidConfig);
  Scenario p = small_psse(ScenarioKind::PsseNoise, {0.1});
  p.case_path.clear();
  CHECK_THROWS_AS(p.validate(), InvalidConfig);
  p = small_psse(ScenarioKind::PsseBeta, {-1.0});
  CHECK_THROWS(p.validate());
}

TEST_CASE("example A table layout") {
  const ScenarioOutput out = run_scenario(small_example_a());
  CHECK(out.table.rows.size() == 2 * 6);
  for (const auto& r : out.table.rows) {
    CHECK(r.scenario == "example-a-nmse");
    CHECK(r.metric == "nmse");
    CHECK(std::isfinite(r.mean));
    CHECK(r.stderr_ >= 0.0);
  }
  REQUIRE(out.outcomes.size() == 2);
  CHECK(out.outcomes[0].size() == 6);
  CHECK(out.outcomes[0][0].size() == 12);
}

TEST_CASE("determinism and serial equals parallel") {
  Scenario s = small_example_a();
  ResultTable a = run_scenario(s).table;
  ResultTable b = run_scenario(s).table;
  s.execution = Execution::Serial;
  ResultTable c = run_scenario(s).table;
  strip_times(a);
  strip_times(b);
  strip_times(c);
  CHECK(a == b);
  CHECK(a == c);
  s.seed = 43;
  ResultTable d = run_scenario(s).table;
  strip_times(d);
  CHECK_FALSE(a == d);
}

TEST_CASE("power-system scenario is deterministic across thread counts") {
  Scenario s = small_psse(ScenarioKind::PsseNoise, {0.1});
  set_thread_count(1);
  ResultTable a = run_scenario(s).table;
  set_thread_count(3);
  ResultTable b = run_scenario(s).table;
  set_thread_count(0);
  strip_times(a);
  strip_times(b);
  CHECK(a == b);
  for (const auto& r : a.rows) CHECK(r.metric == "nmspe");
}

TEST_CASE("noise sweep is monotone") {
  Scenario s = small_psse(ScenarioKind::PsseNoise, {0.5, 0.05, 0.005});
  s.trials = 60;
  const ResultTable t = run_scenario(s).table;
  for (const auto& name : s.estimators) {
    std::vector<ResultRow> rows;
    for (const auto& r : t.rows)
      if (r.estimator == name) rows.push_back(r);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CAPTURE(name);
      CHECK(rows[i].mean <= rows[i - 1].mean + 2.0 * (rows[i].stderr_ + rows[i - 1].stderr_));
    }
  }
}

TEST_CASE("standard error shrinks with the trial count") {
  Scenario s = small_example_a();
  s.grid = {20};
  s.estimators = {"lmmse"};
  s.trials = 100;
  const double se100 = run_scenario(s).table.rows[0].stderr_;
  s.trials = 400;
  const double se400 = run_scenario(s).table.rows[0].stderr_;
  CHECK(se400 / se100 == doctest::Approx(0.5).epsilon(0.3));
}

TEST_CASE("init perturbation") {
  const SpectralBasis b = eigendecompose(build_laplacian(watts_strogatz(10, 4, 0.1, 1)));
  const Vector base = Vector::LinSpaced(10, 0, 1);
  Rng r1(3), r2(3);
  CHECK(perturb_init(base, b, 0.0, r1) == base);
  const Vector p = perturb_init(base, b, 4.0, r2);
  CHECK((p - base).norm() > 0.0);
  CHECK_THROWS_AS(perturb_init(base, b, -1.0, r1), InvalidConfig);
}

TEST_CASE("init-noise and topology scenarios run") {
  Scenario s = small_psse(ScenarioKind::InitNoise, {0.0, 1.0});
  s.estimators = {"map", "egfd", "sgsp", "gsp"};
  const ScenarioOutput out = run_scenario(s);
  CHECK(out.table.rows.size() == 8);
  Scenario t = small_psse(ScenarioKind::TopologyPerturbation, {0.0, 5.0});
  const ScenarioOutput tout = run_scenario(t);
  CHECK(tout.table.rows.size() == 12);
  for (const auto& r : tout.table.rows) CHECK(r.diverged <= t.trials);
}

TEST_CASE("perturbed case basis keeps the bus count") {
  const PowerCase pc = load_case(fixture::data_path("case57.m"));
  const SharedBasis b = perturbed_case_basis(pc, 5, 1);
  CHECK(b->size() == 57);
  CHECK(b->eigenvalues(1) > 0.0);
}

TEST_CASE("result csv and json round trip") {
  ResultTable t = run_scenario(small_example_a()).table;
  t.rows[0].diverged = 3;
  for (auto format : {ResultFormat::Csv, ResultFormat::Json}) {
    std::stringstream ss;
    write_results(ss, t, format);
    CHECK(read_results(ss, format) == t);
  }
  std::stringstream csv;
  write_results(csv, t, ResultFormat::Csv);
  std::string line;
  while (std::getline(csv, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
  }
  CHECK(parse_result_format("json") == ResultFormat::Json);
  CHECK_THROWS_AS(parse_result_format("xml"), InvalidConfig);
  std::istringstream bad("scenario,point\n");
  CHECK_THROWS_AS(read_results(bad, ResultFormat::Csv), IoError);
}

TEST_CASE("benchmark report") {
  const ScalingReport r = benchmark_update_steps({16, 32, 64}, 1, 3, {EstimatorKind::Egfd, EstimatorKind::MapFreq}, 0.001);
  CHECK(r.timings.size() == 6);
  CHECK(std::isfinite(r.slope("egfd")));
  CHECK(r.seconds("map", 64) > 0.0);
  CHECK_THROWS_AS(r.slope("gsp"), InvalidConfig);
  CHECK(predicted_step_flops(EstimatorKind::MapFreq, 100) > predicted_step_flops(EstimatorKind::Egfd, 100));
  CHECK_THROWS_AS(benchmark_update_steps({64, 32, 16}, 1, 3), InvalidConfig);
}

}
