#include "gspmap/psse.hpp"

#include "gspmap/statistics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace gspmap {

namespace {

struct Row {
  std::vector<double> values;
  int line;
};

std::string strip_comment(const std::string& s) {
  const auto pos = s.find('%');
  return pos == std::string::npos ? s : s.substr(0, pos);
}

// Collects the numeric rows of every "mpc.<name> = [ ... ];" block.
std::map<std::string, std::vector<Row>> read_tables(std::istream& in, const std::string& name) {
  std::map<std::string, std::vector<Row>> tables;
  std::string raw;
  std::string current;
  std::vector<double> pending;
  int pending_line = 0;
  int line_no = 0;

  auto flush = [&](int line) {
    if (!pending.empty()) tables[current].push_back({pending, pending_line ? pending_line : line});
    pending.clear();
    pending_line = 0;
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string s = strip_comment(raw);
    if (current.empty()) {
      const auto key = s.find("mpc.");
      const auto open = s.find('[');
      if (key == std::string::npos || open == std::string::npos) continue;
      const auto eq = s.find('=', key);
      if (eq == std::string::npos || eq > open) continue;
      std::string table = s.substr(key + 4, eq - key - 4);
      table.erase(table.find_last_not_of(" \t") + 1);
      current = table;
      tables[current];
      s = s.substr(open + 1);
    }
    std::size_t i = 0;
    while (i < s.size()) {
      const char c = s[i];
      if (c == ']') {
        flush(line_no);
        current.clear();
        break;
      }
      if (c == ';') {
        flush(line_no);
        ++i;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
        ++i;
        continue;
      }
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(s.substr(i), &used);
      } catch (const std::exception&) {
        throw ParseError(name + ":" + std::to_string(line_no) + ": bad number in mpc." + current +
                         " near '" + s.substr(i, 12) + "'");
      }
      if (pending.empty()) pending_line = line_no;
      pending.push_back(value);
      i += used;
    }
    if (!current.empty()) flush(line_no);  // rows may end at the line break
  }
  if (!current.empty()) throw ParseError(name + ": unterminated table mpc." + current);
  return tables;
}

}  // namespace

PowerCase parse_case(std::istream& in, const std::string& name) {
  const auto tables = read_tables(in, name);
  const auto bus_it = tables.find("bus");
  const auto branch_it = tables.find("branch");
  if (bus_it == tables.end() || bus_it->second.empty()) throw ParseError(name + ": missing mpc.bus table");
  if (branch_it == tables.end()) throw ParseError(name + ": missing mpc.branch table");

  PowerCase pc;
  pc.name = name;
  std::map<long, Index> index_of;
  for (const auto& row : bus_it->second) {
    if (row.values.size() < 2) {
      throw ParseError(name + ":" + std::to_string(row.line) + ": bus row needs at least 2 fields");
    }
    const long id = std::lround(row.values[0]);
    if (index_of.count(id)) {
      throw ParseError(name + ":" + std::to_string(row.line) + ": duplicate bus " + std::to_string(id));
    }
    index_of[id] = pc.n_buses();
    pc.bus_ids.push_back(id);
    pc.voltage_magnitude.push_back(row.values.size() > 7 ? row.values[7] : 1.0);
  }

  const Index n = pc.n_buses();
  pc.conductance = Matrix::Zero(n, n);
  pc.susceptance = Matrix::Zero(n, n);
  for (const auto& row : branch_it->second) {
    const std::string where = name + ":" + std::to_string(row.line) + ": ";
    if (row.values.size() < 4) throw ParseError(where + "branch row needs fbus, tbus, r, x");
    if (row.values.size() > 10 && row.values[10] == 0.0) continue;  // out of service
    const long f = std::lround(row.values[0]);
    const long t = std::lround(row.values[1]);
    const auto fi = index_of.find(f);
    const auto ti = index_of.find(t);
    if (fi == index_of.end() || ti == index_of.end()) throw ParseError(where + "branch refers to an unknown bus");
    if (fi->second == ti->second) throw ParseError(where + "branch connects a bus to itself");
    const double r = row.values[2];
    const double x = row.values[3];
    const double z2 = r * r + x * x;
    if (!(z2 > 0.0) || !std::isfinite(z2)) throw ParseError(where + "branch has zero or invalid impedance");
    const double g = r / z2;
    const double b = -x / z2;
    const Index a = fi->second;
    const Index c = ti->second;
    pc.conductance(a, c) += g;
    pc.conductance(c, a) += g;
    pc.susceptance(a, c) += b;
    pc.susceptance(c, a) += b;
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (pc.conductance(i, j) != 0.0 || pc.susceptance(i, j) != 0.0) {
        pc.lines.push_back({i, j, pc.conductance(i, j), pc.susceptance(i, j)});
      }
    }
  }
  if (!is_connected(pc.susceptance.cwiseAbs() + pc.conductance.cwiseAbs())) {
    throw DisconnectedNetwork(name + ": network is not connected");
  }
  return pc;
}

PowerCase load_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open case file " + path);
  std::string name = path;
  const auto slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  return parse_case(in, name);
}

Matrix laplacian_from_susceptance(const Matrix& b) {
  const Index n = b.rows();
  if (b.cols() != n) throw DomainMismatch("susceptance matrix must be square");
  Matrix l(n, n);
  for (Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      l(i, j) = -b(i, j);
      row += b(i, j);
    }
    l(i, i) = row;
  }
  l = 0.5 * (l + l.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(l, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw DecompositionFailure("eigensolver failed on the Laplacian");
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  if (es.eigenvalues()(0) < -1e-8 * lmax) {
    throw InvalidSusceptanceSign("Laplacian has a negative eigenvalue; check the susceptance sign");
  }
  return l;
}

Matrix laplacian_from_susceptance(const PowerCase& pc) {
  return laplacian_from_susceptance(Matrix(-pc.susceptance));
}

std::shared_ptr<const AcPowerFlowModel> make_power_flow_model(const PowerCase& pc, Execution execution) {
  auto basis = make_basis(laplacian_from_susceptance(pc));
  return std::make_shared<const AcPowerFlowModel>(std::move(basis), pc.conductance, pc.susceptance,
                                                  execution);
}

double wrap_phase(double d) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(d + std::numbers::pi, two_pi);
  if (w < 0.0) w += two_pi;
  w -= std::numbers::pi;
  return w >= std::numbers::pi ? -std::numbers::pi : w;
}

double nmspe(const Vector& truth, const Vector& estimate) {
  if (truth.size() != estimate.size()) throw DomainMismatch("phase vectors differ in length");
  double acc = 0.0;
  for (Index i = 0; i < truth.size(); ++i) {
    const double w = wrap_phase(truth(i) - estimate(i));
    acc += w * w;
  }
  return acc / static_cast<double>(truth.size());
}

double calibrate_beta(const SpectralBasis& basis, double level, BetaRule rule) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidConfig("tail level must lie in (0, 1)");
  const Vector unit = smooth_prior_vertex_variance(basis, 1.0);
  auto tail = [&](double beta) {
    double worst = 0.0;
    double total = 0.0;
    for (Index i = 0; i < unit.size(); ++i) {
      const double p = std::erfc(std::numbers::pi / std::sqrt(2.0 * beta * unit(i)));
      worst = std::max(worst, p);
      total += p;
    }
    return rule == BetaRule::PerElement ? worst : total;
  };
  double lo = 1e-12;
  double hi = 1.0;
  while (tail(hi) <= level) {
    hi *= 2.0;
    if (hi > 1e12) throw InvalidBeta("tail rule is satisfied for every beta");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) <= level ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace gspmap
