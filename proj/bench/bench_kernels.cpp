// Serial reference versus OpenMP kernels: AC injections/Jacobian on synthetic
// networks, and the Monte Carlo trial loop of a small power-system sweep.

#include "gspmap/harness.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

using namespace gspmap;
using Clock = std::chrono::steady_clock;

namespace {

template <typename Fn>
double time_per_call(Fn&& fn, double min_seconds = 0.05) {
  fn();
  long calls = 0;
  const auto start = Clock::now();
  double elapsed = 0.0;
  do {
    fn();
    ++calls;
    elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  } while (elapsed < min_seconds);
  return elapsed / static_cast<double>(calls);
}

// Ring with chords: every bus joined to its next 1..3 neighbours.
kernels::AdmittanceGraph synthetic_network(Index n, std::uint64_t seed) {
  Matrix g = Matrix::Zero(n, n);
  Matrix b = Matrix::Zero(n, n);
  Rng rng(seed);
  std::uniform_real_distribution<double> x(0.01, 0.3);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 1; k <= 3; ++k) {
      const Index j = (i + k) % n;
      const double xl = x(rng);
      const double rl = 0.1 * xl;
      const double z2 = rl * rl + xl * xl;
      g(i, j) = g(j, i) = rl / z2;
      b(i, j) = b(j, i) = -xl / z2;
    }
  }
  return kernels::AdmittanceGraph::from_dense(g, b);
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  std::printf("threads %d\n", thread_count());
  std::printf("%-10s %8s %14s %14s %8s\n", "kernel", "n", "serial_s", "parallel_s", "speedup");

  for (Index n : {118, 512, 2048, 8192}) {
    const kernels::AdmittanceGraph y = synthetic_network(n, derive_seed(seed, static_cast<std::uint64_t>(n)));
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(n), 1));
    std::normal_distribution<double> phase(0.0, 0.3);
    Vector x(n);
    for (Index i = 0; i < n; ++i) x(i) = phase(rng);

    Vector out;
    const double ts = time_per_call([&] { kernels::ac_injection_serial(y, x, out); });
    const double tp = time_per_call([&] { kernels::ac_injection_parallel(y, x, out); });
    std::printf("%-10s %8ld %14.4e %14.4e %8.2f\n", "injection", static_cast<long>(n), ts, tp, ts / tp);

    if (n <= 2048) {
      Matrix j;
      const double js = time_per_call([&] { kernels::ac_jacobian_serial(y, x, j); });
      const double jp = time_per_call([&] { kernels::ac_jacobian_parallel(y, x, j); });
      std::printf("%-10s %8ld %14.4e %14.4e %8.2f\n", "jacobian", static_cast<long>(n), js, jp, js / jp);
    }
  }

  Scenario s;
  s.kind = ScenarioKind::PsseNoise;
  s.case_path = std::string(GSPMAP_DATA_DIR) + "/case57.m";
  s.grid = {0.05};
  s.trials = 64;
  s.seed = seed;
  s.training_size = 200;
  s.estimators = {"map", "egfd", "gsp"};
  s.execution = Execution::Serial;
  auto start = Clock::now();
  const ScenarioOutput serial = run_scenario(s);
  const double t_serial = std::chrono::duration<double>(Clock::now() - start).count();
  s.execution = Execution::Parallel;
  start = Clock::now();
  const ScenarioOutput parallel = run_scenario(s);
  const double t_parallel = std::chrono::duration<double>(Clock::now() - start).count();
  bool same = serial.table.rows.size() == parallel.table.rows.size();
  for (std::size_t i = 0; same && i < serial.table.rows.size(); ++i) {
    same = serial.table.rows[i].mean == parallel.table.rows[i].mean;
  }
  std::printf("%-10s %8d %14.4e %14.4e %8.2f  identical=%s\n", "trials", s.trials, t_serial, t_parallel,
              t_serial / t_parallel, same ? "yes" : "no");
  return same ? 0 : 1;
}
