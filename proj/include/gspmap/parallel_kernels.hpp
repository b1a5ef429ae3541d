#pragma once

// OpenMP kernels for the data-parallel loops of the library, each paired with
// a serial reference implementation. The serial versions are the ground truth
// in tests; both must produce bit-identical output.

#include "gspmap/common.hpp"

#include <cstdlib>
#include <vector>

namespace gspmap {

enum class Execution { Serial, Parallel };

/// Worker count used by Execution::Parallel. Defaults to the GSPMAP_THREADS
/// environment variable when set, else the OpenMP runtime default.
int default_thread_count();
void set_thread_count(int threads);
int thread_count();

namespace kernels {

/// Symmetric admittance pattern in compressed-row form (off-diagonal entries only).
struct AdmittanceGraph {
  Index n = 0;
  std::vector<Index> row_start;  // size n + 1
  std::vector<Index> column;
  std::vector<double> conductance;
  std::vector<double> susceptance;

  static AdmittanceGraph from_dense(const Matrix& conductance, const Matrix& susceptance);
};

// [g]_n = sum_m G_nm cos(x_n - x_m) + B_nm sin(x_n - x_m)
void ac_injection_serial(const AdmittanceGraph& y, const Vector& x, Vector& out);
void ac_injection_parallel(const AdmittanceGraph& y, const Vector& x, Vector& out);

// Off-diagonal: G_nk sin(x_n - x_k) - B_nk cos(x_n - x_k); diagonal: minus the row sum.
void ac_jacobian_serial(const AdmittanceGraph& y, const Vector& x, Matrix& out);
void ac_jacobian_parallel(const AdmittanceGraph& y, const Vector& x, Matrix& out);

}  // namespace kernels
}  // namespace gspmap
