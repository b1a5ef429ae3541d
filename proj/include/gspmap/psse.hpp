#pragma once

#include "gspmap/common.hpp"
#include "gspmap/graph.hpp"
#include "gspmap/measurement.hpp"

#include <istream>
#include <memory>
#include <string>
#include <vector>

namespace gspmap {

struct Line {
  Index from;
  Index to;
  double conductance;  // g = r / (r^2 + x^2)
  double susceptance;  // b = -x / (r^2 + x^2)
};

/// Bus/branch data of a power network with buses renumbered 0..N-1 in file order.
struct PowerCase {
  std::string name;
  std::vector<long> bus_ids;         // original bus numbers
  std::vector<double> voltage_magnitude;
  std::vector<Line> lines;           // parallel branches already merged
  Matrix conductance;                // line conductances, zero diagonal
  Matrix susceptance;                // line susceptances (negative for inductive lines)

  Index n_buses() const { return static_cast<Index>(bus_ids.size()); }
};

/// Parses a MATPOWER case file (mpc.bus and mpc.branch tables). Out-of-service
/// branches are skipped; tap ratios, shunts and charging are ignored.
PowerCase load_case(const std::string& path);
PowerCase parse_case(std::istream& in, const std::string& name = "case");

/// Laplacian of a bus susceptance matrix: off-diagonals -B_nk, diagonal the
/// sum of the row's off-diagonal B_nm. Throws InvalidSusceptanceSign when the
/// result is not positive semidefinite.
Matrix laplacian_from_susceptance(const Matrix& bus_susceptance);
/// Uses the bus-admittance susceptances (the negated line susceptances) of the case.
Matrix laplacian_from_susceptance(const PowerCase& power_case);

/// Active-power model of the case over the basis of its susceptance Laplacian.
std::shared_ptr<const AcPowerFlowModel> make_power_flow_model(const PowerCase& power_case,
                                                              Execution execution = Execution::Parallel);

/// Wraps a phase difference into [-pi, pi).
double wrap_phase(double d);

/// (1/N) sum_n wrap(x_n - x^_n)^2 for one trial.
double nmspe(const Vector& truth, const Vector& estimate);

enum class BetaRule {
  PerElement,  // every vertex separately: P(|x_i| > pi) <= level
  UnionBound,  // sum over vertices of P(|x_i| > pi) <= level
};

/// Largest beta of the smooth prior meeting the tail rule, found by bisection.
double calibrate_beta(const SpectralBasis& basis, double level = 0.01,
                      BetaRule rule = BetaRule::UnionBound);

}  // namespace gspmap
