#pragma once

// Reference computations written independently of the library code paths:
// plain loops, finite differences and brute-force quadratic fits.

#include "gspmap/estimators.hpp"
#include "gspmap/graph.hpp"
#include "gspmap/statistics.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace oracle {

using gspmap::Index;
using gspmap::Matrix;
using gspmap::Vector;

inline Matrix random_spd(Index n, std::mt19937_64& rng, double floor = 0.5) {
  std::normal_distribution<double> z;
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = z(rng);
  Matrix s = a * a.transpose() / static_cast<double>(n);
  s.diagonal().array() += floor;
  return s;
}

inline Vector random_vector(Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = z(rng);
  return v;
}

/// Laplacian by the definition, one edge at a time.
inline Matrix laplacian_loop(const Matrix& w) {
  const Index n = w.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      l(i, j) -= w(i, j);
      l(i, i) += w(i, j);
    }
  }
  return l;
}

inline Matrix central_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x,
                               double h = 1e-6) {
  const Index n = x.size();
  const Index m = f(x).size();
  Matrix j(m, n);
  for (Index k = 0; k < n; ++k) {
    Vector xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    j.col(k) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return j;
}

/// Minimizer of a quadratic q over R^m, recovered only from function values:
/// the gradient at 0 from symmetric unit steps and the Hessian from the
/// four-point mixed difference (both exact for a quadratic).
inline Vector quadratic_minimizer(const std::function<double(const Vector&)>& q, Index m) {
  const Vector zero = Vector::Zero(m);
  const double q0 = q(zero);
  Vector grad(m);
  Vector qe(m);
  for (Index i = 0; i < m; ++i) {
    Vector e = zero;
    e(i) = 1.0;
    qe(i) = q(e);
    grad(i) = 0.5 * (qe(i) - q(-e));
  }
  Matrix h(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      Vector e = zero;
      e(i) += 1.0;
      e(j) += 1.0;
      h(i, j) = q(e) - qe(i) - qe(j) + q0;
    }
  }
  h = 0.5 * (h + h.transpose()).eval();
  return h.fullPivLu().solve(-grad);
}

/// Expected linearized objective of the graph-filter update for diagonal
/// responses F1, F2 (frequency domain, x~ - mu~ ~ N(0, Cx), w~ ~ N(0, Cw)):
///   1/2 tr(Cx^-1 [(I+F1) Cx (I+F1)^T + F2 Cw F2^T])
/// + 1/2 tr(Cw^-1 [(I-G F2) Cw (I-G F2)^T + G F1 Cx F1^T G^T])
inline double expected_filter_objective(const Vector& f1, const Vector& f2, const Matrix& cx,
                                        const Matrix& cw, const Matrix& g) {
  const Index n = f1.size();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix F1 = f1.asDiagonal();
  const Matrix F2 = f2.asDiagonal();
  const Matrix cxi = cx.inverse();
  const Matrix cwi = cw.inverse();
  const Matrix a = (id + F1) * cx * (id + F1).transpose() + F2 * cw * F2.transpose();
  const Matrix b = (id - g * F2) * cw * (id - g * F2).transpose() + g * F1 * cx * F1.transpose() * g.transpose();
  return 0.5 * (cxi * a).trace() + 0.5 * (cwi * b).trace();
}

/// Single-sample linearized objective of the update x~ + f1 o a + f2 o r, with
/// a = x~ - mu~ and r = y~ - g~, as a quadratic in theta = [f1; f2]. The
/// cross terms that carry both a and r (the S_wx blocks) are removed. Returns
/// the stationary point.
inline Vector sample_filter_oracle(const Vector& a, const Vector& r, const Matrix& cxi, const Matrix& cwi,
                                   const Matrix& g) {
  const Index n = a.size();
  Matrix b(n, 2 * n);
  b << Matrix(a.asDiagonal()), Matrix(r.asDiagonal());
  const Matrix m = cxi + g.transpose() * cwi * g;
  Matrix h = b.transpose() * m * b;
  h.topRightCorner(n, n).setZero();
  h.bottomLeftCorner(n, n).setZero();
  Vector grad(2 * n);
  grad.head(n) = a.cwiseProduct(cxi * a);
  grad.tail(n) = -r.cwiseProduct(g.transpose() * cwi * r);
  return h.fullPivLu().solve(-grad);
}

/// eGFD direction written out entry by entry.
inline Vector egfd_direction_loop(const Vector& xf, const Vector& mu, const Vector& yf, const Vector& gf,
                                  const Vector& gdiag, const Vector& dx, const Vector& dw) {
  Vector d(xf.size());
  for (Index n = 0; n < xf.size(); ++n) {
    const double num = dx(n) * (xf(n) - mu(n)) - dw(n) * gdiag(n) * (yf(n) - gf(n));
    d(n) = -num / (dx(n) + dw(n) * gdiag(n) * gdiag(n));
  }
  return d;
}

/// Closed-form LMMSE for a linear model y = A x + w with Gaussian x, w.
inline Vector lmmse_closed_form(const Matrix& a, const Vector& mu, const Matrix& cx, const Matrix& cw,
                                const Vector& y) {
  const Matrix cyy = a * cx * a.transpose() + cw;
  return mu + cx * a.transpose() * cyy.ldlt().solve(y - a * mu);
}

}  // namespace oracle
