#include "gspmap/parallel_kernels.hpp"

#include <omp.h>

#include <atomic>
#include <cmath>
#include <string>

namespace gspmap {

namespace {

std::atomic<int> g_threads{0};

}  // namespace

int default_thread_count() {
  if (const char* env = std::getenv("GSPMAP_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
      // fall through to the runtime default
    }
  }
  return omp_get_max_threads();
}

void set_thread_count(int threads) { g_threads.store(threads > 0 ? threads : 0); }

int thread_count() {
  const int t = g_threads.load();
  return t > 0 ? t : default_thread_count();
}

namespace kernels {

AdmittanceGraph AdmittanceGraph::from_dense(const Matrix& conductance, const Matrix& susceptance) {
  AdmittanceGraph y;
  y.n = conductance.rows();
  y.row_start.assign(static_cast<std::size_t>(y.n) + 1, 0);
  for (Index i = 0; i < y.n; ++i) {
    for (Index j = 0; j < y.n; ++j) {
      if (i == j) continue;
      if (conductance(i, j) != 0.0 || susceptance(i, j) != 0.0) {
        y.column.push_back(j);
        y.conductance.push_back(conductance(i, j));
        y.susceptance.push_back(susceptance(i, j));
      }
    }
    y.row_start[static_cast<std::size_t>(i) + 1] = static_cast<Index>(y.column.size());
  }
  return y;
}

namespace {

inline double injection_row(const AdmittanceGraph& y, const Vector& x, Index n) {
  double acc = 0.0;
  for (Index k = y.row_start[n]; k < y.row_start[n + 1]; ++k) {
    const double d = x(n) - x(y.column[k]);
    acc += y.conductance[k] * std::cos(d) + y.susceptance[k] * std::sin(d);
  }
  return acc;
}

inline void jacobian_row(const AdmittanceGraph& y, const Vector& x, Index n, Matrix& out) {
  double diag = 0.0;
  for (Index k = y.row_start[n]; k < y.row_start[n + 1]; ++k) {
    const Index m = y.column[k];
    const double d = x(n) - x(m);
    const double off = y.conductance[k] * std::sin(d) - y.susceptance[k] * std::cos(d);
    out(n, m) = off;
    diag -= off;
  }
  out(n, n) = diag;
}

}  // namespace

void ac_injection_serial(const AdmittanceGraph& y, const Vector& x, Vector& out) {
  out.resize(y.n);
  for (Index n = 0; n < y.n; ++n) out(n) = injection_row(y, x, n);
}

void ac_injection_parallel(const AdmittanceGraph& y, const Vector& x, Vector& out) {
  out.resize(y.n);
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (y.n >= 256)
  for (Index n = 0; n < y.n; ++n) out(n) = injection_row(y, x, n);
}

void ac_jacobian_serial(const AdmittanceGraph& y, const Vector& x, Matrix& out) {
  out.setZero(y.n, y.n);
  for (Index n = 0; n < y.n; ++n) jacobian_row(y, x, n, out);
}

void ac_jacobian_parallel(const AdmittanceGraph& y, const Vector& x, Matrix& out) {
  out.setZero(y.n, y.n);
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (y.n >= 256)
  for (Index n = 0; n < y.n; ++n) jacobian_row(y, x, n, out);
}

}  // namespace kernels
}  // namespace gspmap
