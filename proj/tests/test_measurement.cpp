#include "oracles.hpp"

#include "gspmap/measurement.hpp"
#include "gspmap/psse.hpp"

#include <doctest.h>

#include <random>

using namespace gspmap;

namespace {

SharedBasis small_world_basis(Index n, std::uint64_t seed) {
  return make_basis(build_laplacian(watts_strogatz(n, 4, 0.2, seed)));
}

std::vector<Vector> test_points(Index n, int count, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vector> pts;
  for (int i = 0; i < count; ++i) pts.push_back(oracle::random_vector(n, rng, scale));
  return pts;
}

PowerCase toy_case() { return load_case(std::string(GSPMAP_DATA_DIR) + "/case3_toy.m"); }

}  // namespace

TEST_SUITE("measurement") {

TEST_CASE("cubic model in the frequency domain") {
  const auto basis = small_world_basis(12, 1);
  const CubicFrequencyModel m(basis);
  Vector xf(12);
  xf.setLinSpaced(-1.0, 1.5);
  const Vector g = m.evaluate_freq(xf);
  for (Index n = 0; n < 12; ++n) CHECK(g(n) == doctest::Approx(xf(n) * xf(n) * xf(n)));
  const Vector gd = m.jacobian_freq_diagonal(xf);
  for (Index n = 0; n < 12; ++n) CHECK(gd(n) == doctest::Approx(3.0 * xf(n) * xf(n)));
  CHECK(m.jacobian_freq(xf).isApprox(Matrix(gd.asDiagonal())));

  const Matrix& v = basis->eigenvectors;
  CHECK((m.evaluate(v * xf) - v * g).norm() < 1e-12);
}

TEST_CASE("cubic model into-variants match the allocating forms") {
  const CubicFrequencyModel m(small_world_basis(10, 2));
  const Vector xf = Vector::LinSpaced(10, -2.0, 2.0);
  Vector g, gd;
  m.evaluate_freq_into(xf, g);
  m.jacobian_freq_diagonal_into(xf, gd);
  CHECK(g == m.evaluate_freq(xf));
  CHECK(gd == m.jacobian_freq_diagonal(xf));
}

TEST_CASE("linear graph filter model") {
  const auto basis = small_world_basis(10, 3);
  const Vector h = Vector::LinSpaced(10, 0.2, 3.0);
  const LinearGraphFilterModel m(basis, h);
  const Matrix& v = basis->eigenvectors;
  const Matrix f = v * h.asDiagonal() * v.transpose();
  const Vector x = Vector::LinSpaced(10, 1.0, -1.0);
  CHECK((m.evaluate(x) - f * x).norm() < 1e-12);
  CHECK((m.jacobian(x) - f).norm() < 1e-12);
  CHECK(m.jacobian_freq_diagonal(v.transpose() * x).isApprox(h));
  CHECK_THROWS_AS(LinearGraphFilterModel(basis, Vector::Ones(3)), DomainMismatch);
}

TEST_CASE("size mismatches are reported") {
  const CubicFrequencyModel m(small_world_basis(8, 4));
  CHECK_THROWS_AS(m.evaluate(Vector::Ones(7)), DomainMismatch);
  CHECK_THROWS_AS(m.evaluate_freq(Vector::Ones(9)), DomainMismatch);
  CHECK_THROWS_AS(LinearModel(small_world_basis(8, 4), Matrix::Identity(3, 3)), DomainMismatch);
}

TEST_CASE("ac model on the three-bus case") {
  const PowerCase pc = toy_case();
  const auto model = make_power_flow_model(pc, Execution::Serial);
  // No phase differences: injections are the conductance row sums.
  const Vector g0 = model->evaluate(Vector::Zero(3));
  for (Index n = 0; n < 3; ++n) CHECK(g0(n) == doctest::Approx(pc.conductance.row(n).sum()));

  // Hand-computed injection at bus 0 for x = (0.1, 0, -0.2).
  Vector x(3);
  x << 0.1, 0.0, -0.2;
  const Vector g = model->evaluate(x);
  double expect = 0.0;
  for (Index m = 0; m < 3; ++m) {
    expect += pc.conductance(0, m) * std::cos(x(0) - x(m)) + pc.susceptance(0, m) * std::sin(x(0) - x(m));
  }
  CHECK(g(0) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("ac jacobian at zero is minus the laplacian") {
  const PowerCase pc = load_case(std::string(GSPMAP_DATA_DIR) + "/case57.m");
  const auto model = make_power_flow_model(pc, Execution::Serial);
  const Matrix l = laplacian_from_susceptance(pc);
  CHECK((model->jacobian(Vector::Zero(pc.n_buses())) + l).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ac jacobian sparsity follows the network") {
  const PowerCase pc = load_case(std::string(GSPMAP_DATA_DIR) + "/case57.m");
  const auto model = make_power_flow_model(pc, Execution::Serial);
  std::mt19937_64 rng(5);
  const Matrix j = model->jacobian(oracle::random_vector(pc.n_buses(), rng, 0.3));
  for (Index a = 0; a < j.rows(); ++a) {
    for (Index b = 0; b < j.cols(); ++b) {
      if (a == b) continue;
      const bool edge = pc.susceptance(a, b) != 0.0 || pc.conductance(a, b) != 0.0;
      CHECK((j(a, b) != 0.0) == edge);
    }
  }
}

TEST_CASE("ac model rejects malformed admittances") {
  const auto basis = small_world_basis(6, 1);
  Matrix g = Matrix::Zero(6, 6), b = Matrix::Zero(6, 6);
  b(0, 1) = -1.0;
  CHECK_THROWS_AS(AcPowerFlowModel(basis, g, b), InvalidGraph);
  b(1, 0) = -1.0;
  b(2, 2) = 1.0;
  CHECK_THROWS_AS(AcPowerFlowModel(basis, g, b), InvalidGraph);
}

TEST_CASE("small-angle limit of the frequency jacobian") {
  const PowerCase pc = load_case(std::string(GSPMAP_DATA_DIR) + "/case57.m");
  const auto model = make_power_flow_model(pc, Execution::Serial);
  const Matrix lambda = model->basis().eigenvalues.asDiagonal();
  std::mt19937_64 rng(8);
  const Vector dir = oracle::random_vector(pc.n_buses(), rng);
  double previous = 1e300;
  for (double scale : {1e-1, 1e-2, 1e-3}) {
    const double rel = (model->jacobian_freq(scale * dir) + lambda).norm() / lambda.norm();
    CHECK(rel < previous);
    previous = rel;
  }
  CHECK(previous < 1e-2);
}

TEST_CASE("frequency orthogonality check") {
  const auto basis = small_world_basis(10, 6);
  const auto pts = test_points(10, 5, 1.0, 2);
  CHECK(is_orthogonal_frequencies(CubicFrequencyModel(basis), pts, 1e-10));
  CHECK(is_orthogonal_frequencies(LinearGraphFilterModel(basis, Vector::LinSpaced(10, 1, 2)), pts, 1e-10));

  const PowerCase pc = load_case(std::string(GSPMAP_DATA_DIR) + "/case57.m");
  const auto ac = make_power_flow_model(pc, Execution::Serial);
  CHECK_FALSE(is_orthogonal_frequencies(*ac, test_points(pc.n_buses(), 3, 1.0, 4), 1e-6));
}

}
