#include "gspmap/graph.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace gspmap {

namespace {

constexpr const char* kMagic = "gspmap-graph";

template <typename T>
T expect_field(std::istream& in, const char* label) {
  std::string key;
  T value{};
  if (!(in >> key) || key != label || !(in >> value)) {
    throw IoError(std::string("graph file: expected '") + label + " <value>'");
  }
  return value;
}

}  // namespace

void write_graph(std::ostream& out, const Graph& graph) {
  const auto edges = graph.edges();
  out << kMagic << " 1\n";
  out << "vertices " << graph.n_vertices() << "\n";
  out << "edges " << edges.size() << "\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& e : edges) out << e.from << ' ' << e.to << ' ' << e.weight << '\n';
}

Graph read_graph(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic || version != 1) {
    throw IoError("graph file: bad header");
  }
  const auto n = expect_field<Index>(in, "vertices");
  const auto m = expect_field<Index>(in, "edges");
  if (n < 1 || m < 0) throw IoError("graph file: invalid sizes");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (Index k = 0; k < m; ++k) {
    Edge e{};
    if (!(in >> e.from >> e.to >> e.weight)) {
      throw IoError("graph file: truncated edge list at edge " + std::to_string(k));
    }
    edges.push_back(e);
  }
  return Graph::from_edges(n, edges);
}

void save_graph(const std::string& path, const Graph& graph) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_graph(out, graph);
  if (!out) throw IoError("failed writing " + path);
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_graph(in);
}

}  // namespace gspmap
