#include "gspmap/measurement.hpp"

#include <cmath>

namespace gspmap {

MeasurementModel::MeasurementModel(SharedBasis basis) : basis_(std::move(basis)) {
  if (!basis_) throw InvalidGraph("measurement model requires a spectral basis");
}

void MeasurementModel::check_size(const Vector& x) const {
  if (x.size() != size()) throw DomainMismatch("measurement model input has the wrong length");
}

Vector MeasurementModel::evaluate_freq(const Vector& x_freq) const {
  const Matrix& v = basis().eigenvectors;
  return v.transpose() * evaluate(v * x_freq);
}

Matrix MeasurementModel::jacobian_freq(const Vector& x_freq) const {
  const Matrix& v = basis().eigenvectors;
  return v.transpose() * jacobian(v * x_freq) * v;
}

Vector MeasurementModel::jacobian_freq_diagonal(const Vector& x_freq) const {
  const Matrix& v = basis().eigenvectors;
  const Matrix jv = jacobian(v * x_freq) * v;
  return v.cwiseProduct(jv).colwise().sum().transpose();
}

void MeasurementModel::evaluate_freq_into(const Vector& x_freq, Vector& out) const {
  out = evaluate_freq(x_freq);
}

void MeasurementModel::jacobian_freq_diagonal_into(const Vector& x_freq, Vector& out) const {
  out = jacobian_freq_diagonal(x_freq);
}

// --- CubicFrequencyModel ----------------------------------------------------

Vector CubicFrequencyModel::evaluate(const Vector& x) const {
  check_size(x);
  const Matrix& v = basis().eigenvectors;
  return v * evaluate_freq(v.transpose() * x);
}

Matrix CubicFrequencyModel::jacobian(const Vector& x) const {
  check_size(x);
  const Matrix& v = basis().eigenvectors;
  const Vector d = jacobian_freq_diagonal(v.transpose() * x);
  return v * d.asDiagonal() * v.transpose();
}

Vector CubicFrequencyModel::evaluate_freq(const Vector& x_freq) const {
  check_size(x_freq);
  return x_freq.array().cube().matrix();
}

Matrix CubicFrequencyModel::jacobian_freq(const Vector& x_freq) const {
  return jacobian_freq_diagonal(x_freq).asDiagonal();
}

Vector CubicFrequencyModel::jacobian_freq_diagonal(const Vector& x_freq) const {
  check_size(x_freq);
  return (3.0 * x_freq.array().square()).matrix();
}

void CubicFrequencyModel::evaluate_freq_into(const Vector& x_freq, Vector& out) const {
  out.resize(x_freq.size());
  for (Index n = 0; n < x_freq.size(); ++n) out(n) = x_freq(n) * x_freq(n) * x_freq(n);
}

void CubicFrequencyModel::jacobian_freq_diagonal_into(const Vector& x_freq, Vector& out) const {
  out.resize(x_freq.size());
  for (Index n = 0; n < x_freq.size(); ++n) out(n) = 3.0 * (x_freq(n) * x_freq(n));
}

// --- LinearGraphFilterModel -------------------------------------------------

LinearGraphFilterModel::LinearGraphFilterModel(SharedBasis basis, Vector response)
    : MeasurementModel(std::move(basis)), response_(std::move(response)) {
  if (response_.size() != size()) throw DomainMismatch("filter response must have length N");
}

Vector LinearGraphFilterModel::evaluate(const Vector& x) const {
  check_size(x);
  const Matrix& v = basis().eigenvectors;
  return v * response_.cwiseProduct(v.transpose() * x);
}

Matrix LinearGraphFilterModel::jacobian(const Vector& x) const {
  check_size(x);
  const Matrix& v = basis().eigenvectors;
  return v * response_.asDiagonal() * v.transpose();
}

Vector LinearGraphFilterModel::evaluate_freq(const Vector& x_freq) const {
  check_size(x_freq);
  return response_.cwiseProduct(x_freq);
}

Matrix LinearGraphFilterModel::jacobian_freq(const Vector& x_freq) const {
  check_size(x_freq);
  return response_.asDiagonal();
}

Vector LinearGraphFilterModel::jacobian_freq_diagonal(const Vector& x_freq) const {
  check_size(x_freq);
  return response_;
}

// --- LinearModel ------------------------------------------------------------

LinearModel::LinearModel(SharedBasis basis, Matrix a)
    : MeasurementModel(std::move(basis)), a_(std::move(a)) {
  if (a_.rows() != size() || a_.cols() != size()) throw DomainMismatch("linear model must be N x N");
}

Vector LinearModel::evaluate(const Vector& x) const {
  check_size(x);
  return a_ * x;
}

Matrix LinearModel::jacobian(const Vector& x) const {
  check_size(x);
  return a_;
}

// --- AcPowerFlowModel -------------------------------------------------------

AcPowerFlowModel::AcPowerFlowModel(SharedBasis basis, const Matrix& conductance,
                                   const Matrix& susceptance, Execution execution)
    : MeasurementModel(std::move(basis)), execution_(execution) {
  const Index n = size();
  if (conductance.rows() != n || conductance.cols() != n || susceptance.rows() != n ||
      susceptance.cols() != n) {
    throw DomainMismatch("admittance matrices must be N x N");
  }
  for (Index i = 0; i < n; ++i) {
    if (conductance(i, i) != 0.0 || susceptance(i, i) != 0.0) {
      throw InvalidGraph("line-admittance matrices must have a zero diagonal");
    }
    for (Index j = i + 1; j < n; ++j) {
      if (conductance(i, j) != conductance(j, i) || susceptance(i, j) != susceptance(j, i)) {
        throw InvalidGraph("admittance matrices must be symmetric");
      }
    }
  }
  admittance_ = kernels::AdmittanceGraph::from_dense(conductance, susceptance);
}

Vector AcPowerFlowModel::evaluate(const Vector& x) const {
  check_size(x);
  Vector out;
  if (execution_ == Execution::Parallel) {
    kernels::ac_injection_parallel(admittance_, x, out);
  } else {
    kernels::ac_injection_serial(admittance_, x, out);
  }
  return out;
}

Matrix AcPowerFlowModel::jacobian(const Vector& x) const {
  check_size(x);
  Matrix out;
  if (execution_ == Execution::Parallel) {
    kernels::ac_jacobian_parallel(admittance_, x, out);
  } else {
    kernels::ac_jacobian_serial(admittance_, x, out);
  }
  return out;
}

// --- free functions ---------------------------------------------------------

Matrix jacobian_finite_difference(const MeasurementModel& model, const Vector& x, double step) {
  if (!(step > 0.0)) throw InvalidConfig("finite-difference step must be positive");
  const Index n = x.size();
  Matrix j(model.evaluate(x).size(), n);
  Vector probe = x;
  for (Index k = 0; k < n; ++k) {
    probe(k) = x(k) + step;
    const Vector plus = model.evaluate(probe);
    probe(k) = x(k) - step;
    const Vector minus = model.evaluate(probe);
    probe(k) = x(k);
    j.col(k) = (plus - minus) / (2.0 * step);
  }
  return j;
}

bool is_orthogonal_frequencies(const MeasurementModel& model,
                               const std::vector<Vector>& test_points, double tol) {
  if (test_points.empty()) throw InvalidConfig("orthogonality check needs at least one test point");
  const Index n = model.size();
  for (const auto& point : test_points) {
    const Vector full = model.evaluate_freq(point);
    Vector single = Vector::Zero(n);
    for (Index k = 0; k < n; ++k) {
      single(k) = point(k);
      const double isolated = model.evaluate_freq(single)(k);
      single(k) = 0.0;
      if (std::abs(full(k) - isolated) > tol) return false;
    }
  }
  return true;
}

}  // namespace gspmap
