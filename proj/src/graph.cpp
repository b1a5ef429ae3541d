#include "gspmap/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>

namespace gspmap {

namespace {

constexpr int kGenerationRetries = 200;
constexpr int kPerturbationRetries = 2000;

}  // namespace

Graph::Graph(Matrix weights) : weights_(std::move(weights)) {
  const Index n = weights_.rows();
  if (n < 1 || weights_.cols() != n) {
    throw InvalidGraph("weight matrix must be square and non-empty");
  }
  for (Index i = 0; i < n; ++i) {
    if (weights_(i, i) != 0.0) {
      throw InvalidGraph("weight matrix must have a zero diagonal");
    }
    for (Index j = 0; j < n; ++j) {
      const double w = weights_(i, j);
      if (!std::isfinite(w) || w < 0.0) {
        throw InvalidGraph("edge weights must be finite and nonnegative");
      }
      if (w != weights_(j, i)) {
        throw InvalidGraph("weight matrix must be symmetric");
      }
    }
  }
  if (!is_connected(weights_)) {
    throw DisconnectedGraph("graph is not connected");
  }
}

Graph Graph::from_edges(Index n_vertices, const std::vector<Edge>& edges) {
  Matrix w = Matrix::Zero(n_vertices, n_vertices);
  for (const auto& e : edges) {
    if (e.from < 0 || e.to < 0 || e.from >= n_vertices || e.to >= n_vertices || e.from == e.to) {
      throw InvalidGraph("edge endpoint out of range or self-loop");
    }
    w(e.from, e.to) += e.weight;
    w(e.to, e.from) += e.weight;
  }
  return Graph(std::move(w));
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  const Index n = n_vertices();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (weights_(i, j) > 0.0) out.push_back({i, j, weights_(i, j)});
    }
  }
  return out;
}

Index Graph::edge_count() const {
  Index count = 0;
  const Index n = n_vertices();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) count += weights_(i, j) > 0.0 ? 1 : 0;
  }
  return count;
}

bool is_connected(const Matrix& weights) {
  const Index n = weights.rows();
  if (n == 0) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::queue<Index> frontier;
  frontier.push(0);
  seen[0] = 1;
  Index reached = 1;
  while (!frontier.empty()) {
    const Index v = frontier.front();
    frontier.pop();
    for (Index u = 0; u < n; ++u) {
      if (!seen[u] && weights(v, u) != 0.0) {
        seen[u] = 1;
        ++reached;
        frontier.push(u);
      }
    }
  }
  return reached == n;
}

Matrix build_laplacian(const Graph& graph) {
  const Matrix& w = graph.weights();
  Matrix l = -w;
  l.diagonal() = w.rowwise().sum();
  return l;
}

SpectralBasis eigendecompose(const Matrix& laplacian) {
  if (laplacian.rows() != laplacian.cols() || laplacian.rows() == 0) {
    throw DecompositionFailure("Laplacian must be square and non-empty");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(laplacian);
  if (solver.info() != Eigen::Success) {
    throw DecompositionFailure("symmetric eigensolver did not converge");
  }
  SpectralBasis basis{solver.eigenvalues(), solver.eigenvectors()};
  const Index n = basis.size();

  // The smallest eigenvalue of a Laplacian is zero; clamp round-off.
  const double lambda_max = basis.eigenvalues(n - 1);
  const double tol = 1e-10 * std::max(lambda_max, 1e-300);
  if (std::abs(basis.eigenvalues(0)) <= tol) basis.eigenvalues(0) = 0.0;
  if (n > 1 && basis.eigenvalues(1) <= tol) {
    throw DisconnectedGraph("Laplacian has more than one zero eigenvalue");
  }

  for (Index k = 0; k < n; ++k) {
    auto col = basis.eigenvectors.col(k);
    for (Index i = 0; i < n; ++i) {
      if (std::abs(col(i)) > 1e-8) {
        if (col(i) < 0.0) col = -col;
        break;
      }
    }
  }
  return basis;
}

GraphSignal gft(const GraphSignal& signal, const SpectralBasis& basis) {
  if (signal.domain != Domain::Vertex) throw DomainMismatch("gft expects a vertex-domain signal");
  if (signal.values.size() != basis.size()) throw DomainMismatch("signal length differs from graph size");
  return {basis.eigenvectors.transpose() * signal.values, Domain::Frequency};
}

GraphSignal igft(const GraphSignal& signal, const SpectralBasis& basis) {
  if (signal.domain != Domain::Frequency) throw DomainMismatch("igft expects a frequency-domain signal");
  if (signal.values.size() != basis.size()) throw DomainMismatch("signal length differs from graph size");
  return {basis.eigenvectors * signal.values, Domain::Vertex};
}

GraphSignal apply_graph_filter(const Vector& response, const GraphSignal& signal,
                               const SpectralBasis& basis) {
  if (response.size() != basis.size() || signal.values.size() != basis.size()) {
    throw DomainMismatch("filter response and signal must have length N");
  }
  if (signal.domain == Domain::Frequency) {
    return {response.cwiseProduct(signal.values), Domain::Frequency};
  }
  const Matrix& v = basis.eigenvectors;
  return {v * response.cwiseProduct(v.transpose() * signal.values), Domain::Vertex};
}

namespace {

Matrix watts_strogatz_once(Index n, Index mean_degree, double rewire_prob, std::mt19937_64& rng) {
  Matrix w = Matrix::Zero(n, n);
  const Index half = mean_degree / 2;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 1; j <= half; ++j) {
      const Index k = (i + j) % n;
      w(i, k) = w(k, i) = 1.0;
    }
  }

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  for (Index j = 1; j <= half; ++j) {
    for (Index i = 0; i < n; ++i) {
      const Index k = (i + j) % n;
      if (coin(rng) >= rewire_prob) continue;
      // A vertex adjacent to everyone cannot be rewired.
      if (w.row(i).sum() >= static_cast<double>(n - 1)) continue;
      Index target = pick(rng);
      while (target == i || w(i, target) != 0.0) target = pick(rng);
      w(i, k) = w(k, i) = 0.0;
      w(i, target) = w(target, i) = 1.0;
    }
  }

  if (mean_degree % 2 == 1) {
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t p = 0; p + 1 < order.size(); p += 2) {
      Index a = order[p];
      Index b = order[p + 1];
      if (w(a, b) != 0.0) {
        if (w.row(a).sum() >= static_cast<double>(n - 1)) continue;
        b = pick(rng);
        while (b == a || w(a, b) != 0.0) b = pick(rng);
      }
      w(a, b) = w(b, a) = 1.0;
    }
  }
  return w;
}

}  // namespace

Graph watts_strogatz(Index n, Index mean_degree, double rewire_prob, std::uint64_t seed) {
  if (mean_degree < 2 || n <= mean_degree) {
    throw InvalidGraph("watts_strogatz requires n > mean_degree >= 2");
  }
  if (!(rewire_prob >= 0.0 && rewire_prob <= 1.0)) {
    throw InvalidGraph("rewire probability must lie in [0, 1]");
  }
  std::mt19937_64 rng(mix_seed(seed));
  for (int attempt = 0; attempt < kGenerationRetries; ++attempt) {
    Matrix w = watts_strogatz_once(n, mean_degree, rewire_prob, rng);
    if (is_connected(w)) return Graph(std::move(w));
  }
  throw GenerationFailure("no connected Watts-Strogatz graph within the retry budget");
}

Graph remove_edges(const Graph& graph, Index count, std::uint64_t seed) {
  auto edges = graph.edges();
  const auto total = static_cast<Index>(edges.size());
  if (count < 0 || count >= total) {
    throw PerturbationFailure("edge removal count must be in [0, edge_count)");
  }
  if (count == 0) return graph;

  std::mt19937_64 rng(mix_seed(seed));
  for (int attempt = 0; attempt < kPerturbationRetries; ++attempt) {
    std::shuffle(edges.begin(), edges.end(), rng);
    Matrix w = graph.weights();
    for (Index k = 0; k < count; ++k) {
      const auto& e = edges[static_cast<std::size_t>(k)];
      w(e.from, e.to) = w(e.to, e.from) = 0.0;
    }
    if (is_connected(w)) return Graph(std::move(w));
  }
  throw PerturbationFailure("no connected edge removal found within the retry budget");
}

}  // namespace gspmap
