#pragma once

#include "gspmap/common.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace gspmap {

struct Edge {
  Index from;
  Index to;
  double weight;
};

/// Undirected, connected, nonnegatively weighted graph stored as a dense
/// adjacency matrix. Construction validates every invariant.
class Graph {
 public:
  explicit Graph(Matrix weights);

  static Graph from_edges(Index n_vertices, const std::vector<Edge>& edges);

  Index n_vertices() const { return weights_.rows(); }
  const Matrix& weights() const { return weights_; }

  /// Edges with i < j, in row-major order.
  std::vector<Edge> edges() const;
  Index edge_count() const;

  friend bool operator==(const Graph& a, const Graph& b) { return a.weights_ == b.weights_; }

 private:
  Matrix weights_;
};

/// True when the support of `weights` forms a single connected component.
bool is_connected(const Matrix& weights);

/// L = diag(W 1) - W.
Matrix build_laplacian(const Graph& graph);

/// Eigen-decomposition of a graph Laplacian, L = V diag(lambda) V^T.
///
/// Eigenvalues ascend; each eigenvector is sign-normalized so its first entry
/// with magnitude above 1e-8 is positive. Repeated eigenvalues keep whatever
/// orthonormal basis the solver returns.
struct SpectralBasis {
  Vector eigenvalues;
  Matrix eigenvectors;

  Index size() const { return eigenvalues.size(); }
};

/// Throws DecompositionFailure if the solver does not converge and
/// DisconnectedGraph if lambda_2 <= 1e-10 * lambda_N.
SpectralBasis eigendecompose(const Matrix& laplacian);

using SharedBasis = std::shared_ptr<const SpectralBasis>;

inline SharedBasis make_basis(const Matrix& laplacian) {
  return std::make_shared<const SpectralBasis>(eigendecompose(laplacian));
}

enum class Domain { Vertex, Frequency };

struct GraphSignal {
  Vector values;
  Domain domain = Domain::Vertex;
};

GraphSignal gft(const GraphSignal& signal, const SpectralBasis& basis);
GraphSignal igft(const GraphSignal& signal, const SpectralBasis& basis);

/// Applies the filter with frequency response `response` to `signal`, in the
/// signal's own domain.
GraphSignal apply_graph_filter(const Vector& response, const GraphSignal& signal,
                               const SpectralBasis& basis);

/// Small-world graph with unit weights.
///
/// Each vertex is joined to floor(K/2) neighbours on each side of a ring and
/// every lattice edge is rewired with probability `rewire_prob`. For odd K a
/// random pairing of the vertices adds about n/2 extra edges, bringing the mean
/// degree to roughly K. Disconnected draws are regenerated up to a fixed budget.
Graph watts_strogatz(Index n, Index mean_degree, double rewire_prob, std::uint64_t seed);

/// Removes `count` uniformly chosen edges while keeping the graph connected.
Graph remove_edges(const Graph& graph, Index count, std::uint64_t seed);

// Text format:
//   gspmap-graph 1
//   vertices <N>
//   edges <M>
//   <i> <j> <weight>      (M lines, 0-based, i < j)
void write_graph(std::ostream& out, const Graph& graph);
Graph read_graph(std::istream& in);
void save_graph(const std::string& path, const Graph& graph);
Graph load_graph(const std::string& path);

}  // namespace gspmap
