#include "fixtures.hpp"

#include <doctest.h>

using namespace gspmap;

TEST_SUITE("kernels") {

TEST_CASE("admittance graph in compressed rows") {
  Matrix g = Matrix::Zero(3, 3), b = Matrix::Zero(3, 3);
  g(0, 2) = g(2, 0) = 0.5;
  b(0, 1) = b(1, 0) = -2.0;
  const auto y = kernels::AdmittanceGraph::from_dense(g, b);
  CHECK(y.n == 3);
  CHECK(y.row_start == std::vector<Index>{0, 2, 3, 4});
  CHECK(y.column == std::vector<Index>{1, 2, 0, 0});
  CHECK(y.susceptance[0] == -2.0);
  CHECK(y.conductance[1] == 0.5);
}

TEST_CASE("kernels agree with the dense formula") {
  const PowerCase pc = load_case(fixture::data_path("case57.m"));
  const auto y = kernels::AdmittanceGraph::from_dense(pc.conductance, pc.susceptance);
  std::mt19937_64 rng(1);
  const Vector x = oracle::random_vector(57, rng, 0.4);
  Vector inj;
  Matrix jac;
  kernels::ac_injection_serial(y, x, inj);
  kernels::ac_jacobian_serial(y, x, jac);
  for (Index n = 0; n < 57; ++n) {
    double expect = 0.0;
    double diag = 0.0;
    for (Index m = 0; m < 57; ++m) {
      const double d = x(n) - x(m);
      expect += pc.conductance(n, m) * std::cos(d) + pc.susceptance(n, m) * std::sin(d);
      if (m == n) continue;
      const double off = pc.conductance(n, m) * std::sin(d) - pc.susceptance(n, m) * std::cos(d);
      CHECK(jac(n, m) == doctest::Approx(off));
      diag -= off;
    }
    CHECK(inj(n) == doctest::Approx(expect));
    CHECK(jac(n, n) == doctest::Approx(diag));
  }
}

TEST_CASE("serial and parallel models give identical outputs") {
  const PowerCase pc = load_case(fixture::data_path("case118.m"));
  const auto serial = make_power_flow_model(pc, Execution::Serial);
  const auto parallel = make_power_flow_model(pc, Execution::Parallel);
  std::mt19937_64 rng(2);
  for (int threads : {1, 2, 4}) {
    set_thread_count(threads);
    const Vector x = oracle::random_vector(118, rng, 0.3);
    CHECK(serial->evaluate(x) == parallel->evaluate(x));
    CHECK(serial->jacobian(x) == parallel->jacobian(x));
  }
  set_thread_count(0);
}

TEST_CASE("thread count override") {
  set_thread_count(3);
  CHECK(thread_count() == 3);
  set_thread_count(0);
  CHECK(thread_count() == default_thread_count());
}

}
