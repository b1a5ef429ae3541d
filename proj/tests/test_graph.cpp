#include "oracles.hpp"

#include "gspmap/graph.hpp"

#include <doctest.h>

#include <sstream>

using namespace gspmap;

namespace {

Graph path3() { return Graph::from_edges(3, {{0, 1, 1.0}, {1, 2, 2.0}}); }

Graph cycle(Index n) {
  std::vector<Edge> e;
  for (Index i = 0; i < n; ++i) e.push_back({i, (i + 1) % n, 1.0});
  return Graph::from_edges(n, e);
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("laplacian of a weighted path") {
  const Matrix l = build_laplacian(path3());
  Matrix expected(3, 3);
  expected << 1, -1, 0, -1, 3, -2, 0, -2, 2;
  CHECK(l.isApprox(expected));
  CHECK(l.isApprox(oracle::laplacian_loop(path3().weights())));
  CHECK((l * Vector::Ones(3)).norm() < 1e-14);
}

TEST_CASE("two-vertex eigendecomposition") {
  const Graph g = Graph::from_edges(2, {{0, 1, 3.0}});
  const SpectralBasis b = eigendecompose(build_laplacian(g));
  CHECK(b.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(b.eigenvalues(1) == doctest::Approx(6.0));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(b.eigenvectors(0, 0) == doctest::Approx(s));
  CHECK(b.eigenvectors(1, 0) == doctest::Approx(s));
  CHECK(b.eigenvectors(0, 1) == doctest::Approx(s));
  CHECK(b.eigenvectors(1, 1) == doctest::Approx(-s));
}

TEST_CASE("invalid weight matrices are rejected") {
  Matrix w = Matrix::Zero(3, 3);
  w(0, 1) = 1.0;
  CHECK_THROWS_AS(Graph{w}, InvalidGraph);  // asymmetric
  w(1, 0) = 1.0;
  CHECK_THROWS_AS(Graph{w}, DisconnectedGraph);
  w(1, 2) = w(2, 1) = -1.0;
  CHECK_THROWS_AS(Graph{w}, InvalidGraph);
  Matrix loop = Matrix::Ones(2, 2);
  CHECK_THROWS_AS(Graph{loop}, InvalidGraph);
  CHECK_THROWS_AS(Graph::from_edges(2, {{0, 0, 1.0}}), InvalidGraph);
}

TEST_CASE("disconnected laplacian fails decomposition") {
  Matrix l = Matrix::Zero(4, 4);
  l << 1, -1, 0, 0, -1, 1, 0, 0, 0, 0, 1, -1, 0, 0, -1, 1;
  CHECK_THROWS_AS(eigendecompose(l), DisconnectedGraph);
}

TEST_CASE("eigenvectors are sign normalized and orthonormal") {
  const SpectralBasis b = eigendecompose(build_laplacian(watts_strogatz(30, 4, 0.3, 11)));
  const Matrix& v = b.eigenvectors;
  CHECK((v.transpose() * v - Matrix::Identity(30, 30)).norm() < 1e-10);
  for (Index k = 0; k < b.size(); ++k) {
    for (Index i = 0; i < b.size(); ++i) {
      if (std::abs(v(i, k)) > 1e-8) {
        CHECK(v(i, k) > 0.0);
        break;
      }
    }
  }
  for (Index k = 1; k < b.size(); ++k) CHECK(b.eigenvalues(k) >= b.eigenvalues(k - 1));
}

TEST_CASE("gft round trip and domain checks") {
  const SpectralBasis b = eigendecompose(build_laplacian(cycle(5)));
  const GraphSignal x{Vector::LinSpaced(5, -1.0, 3.0), Domain::Vertex};
  const GraphSignal xf = gft(x, b);
  CHECK(xf.domain == Domain::Frequency);
  CHECK((igft(xf, b).values - x.values).norm() < 1e-12);
  CHECK_THROWS_AS(gft(xf, b), DomainMismatch);
  CHECK_THROWS_AS(igft(x, b), DomainMismatch);
  CHECK_THROWS_AS(gft(GraphSignal{Vector::Ones(4), Domain::Vertex}, b), DomainMismatch);
}

TEST_CASE("constant signal lives at frequency zero") {
  const SpectralBasis b = eigendecompose(build_laplacian(cycle(6)));
  const GraphSignal xf = gft(GraphSignal{Vector::Ones(6), Domain::Vertex}, b);
  CHECK(xf.values(0) == doctest::Approx(std::sqrt(6.0)));
  CHECK(xf.values.tail(5).norm() < 1e-12);
}

TEST_CASE("filters act in either domain") {
  const SpectralBasis b = eigendecompose(build_laplacian(path3()));
  const Vector h(Vector::LinSpaced(3, 0.5, 2.0));
  const GraphSignal x{Vector(Vector::LinSpaced(3, 1.0, -2.0)), Domain::Vertex};
  const Matrix f = b.eigenvectors * h.asDiagonal() * b.eigenvectors.transpose();
  const GraphSignal out = apply_graph_filter(h, x, b);
  CHECK(out.domain == Domain::Vertex);
  CHECK((out.values - f * x.values).norm() < 1e-12);
  const GraphSignal outf = apply_graph_filter(h, gft(x, b), b);
  CHECK((igft(outf, b).values - out.values).norm() < 1e-12);
  // the identity response leaves the signal alone; the eigenvalues give L x
  CHECK((apply_graph_filter(Vector::Ones(3), x, b).values - x.values).norm() < 1e-12);
  CHECK((apply_graph_filter(b.eigenvalues, x, b).values - build_laplacian(path3()) * x.values).norm() < 1e-12);
}

TEST_CASE("watts-strogatz ring lattice without rewiring") {
  const Graph g = watts_strogatz(20, 4, 0.0, 3);
  for (Index i = 0; i < 20; ++i) CHECK(g.weights().row(i).sum() == 4.0);
  CHECK(g.weights()(0, 1) == 1.0);
  CHECK(g.weights()(0, 2) == 1.0);
  CHECK(g.weights()(0, 18) == 1.0);
  CHECK(g.weights()(0, 3) == 0.0);
}

TEST_CASE("watts-strogatz is deterministic per seed") {
  const Graph a = watts_strogatz(50, 5, 0.2, 7);
  const Graph b = watts_strogatz(50, 5, 0.2, 7);
  CHECK(a == b);
  CHECK_FALSE(a == watts_strogatz(50, 5, 0.2, 8));
  CHECK(is_connected(a.weights()));
  const double mean_degree = a.weights().sum() / 50.0;
  CHECK(mean_degree > 4.5);
  CHECK(mean_degree < 5.5);
}

TEST_CASE("remove_edges") {
  const Graph c4 = cycle(4);
  CHECK(remove_edges(c4, 0, 1) == c4);
  const Graph path = remove_edges(c4, 1, 1);
  CHECK(path.edge_count() == 3);
  CHECK(is_connected(path.weights()));
  CHECK_THROWS_AS(remove_edges(c4, 2, 1), PerturbationFailure);

  const Graph g = watts_strogatz(40, 6, 0.1, 5);
  const Graph h = remove_edges(g, 10, 9);
  CHECK(h.edge_count() == g.edge_count() - 10);
  CHECK(h == remove_edges(g, 10, 9));
  for (const auto& e : h.edges()) CHECK(g.weights()(e.from, e.to) == e.weight);
}

TEST_CASE("graph text format round trip") {
  const Graph g = watts_strogatz(12, 4, 0.3, 2);
  std::stringstream ss;
  write_graph(ss, g);
  CHECK(read_graph(ss) == g);

  std::istringstream bad("gspmap-graph 1\nvertices 3\nedges 2\n0 1 1\n");
  CHECK_THROWS(read_graph(bad));
  std::istringstream wrong_header("graph 1\n");
  CHECK_THROWS(read_graph(wrong_header));
}

}
