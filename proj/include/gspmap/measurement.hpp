#pragma once

#include "gspmap/common.hpp"
#include "gspmap/graph.hpp"
#include "gspmap/parallel_kernels.hpp"

#include <vector>

namespace gspmap {

/// Nonlinear measurement function g(L, x) : R^N -> R^N with an analytic
/// Jacobian, usable in the vertex domain or in the graph-frequency domain
/// defined by the model's spectral basis.
///
/// The frequency-domain forms default to conjugation with V:
///   g~(x~) = V^T g(V x~),   G~(x~) = V^T G(V x~) V.
/// Models that are natively spectral override them.
class MeasurementModel {
 public:
  explicit MeasurementModel(SharedBasis basis);
  virtual ~MeasurementModel() = default;

  Index size() const { return basis_->size(); }
  const SpectralBasis& basis() const { return *basis_; }
  const SharedBasis& shared_basis() const { return basis_; }

  virtual Vector evaluate(const Vector& x) const = 0;
  virtual Matrix jacobian(const Vector& x) const = 0;

  virtual Vector evaluate_freq(const Vector& x_freq) const;
  virtual Matrix jacobian_freq(const Vector& x_freq) const;
  /// diag(G~(x~)); the only Jacobian information the eGFD-MAP update needs.
  virtual Vector jacobian_freq_diagonal(const Vector& x_freq) const;

  // Variants writing into caller-owned storage (resized if needed).
  virtual void evaluate_freq_into(const Vector& x_freq, Vector& out) const;
  virtual void jacobian_freq_diagonal_into(const Vector& x_freq, Vector& out) const;

 protected:
  void check_size(const Vector& x) const;

 private:
  SharedBasis basis_;
};

/// Separable cubic model [g~]_n = x~_n^3, natively defined in the frequency domain.
class CubicFrequencyModel final : public MeasurementModel {
 public:
  using MeasurementModel::MeasurementModel;

  Vector evaluate(const Vector& x) const override;
  Matrix jacobian(const Vector& x) const override;
  Vector evaluate_freq(const Vector& x_freq) const override;
  Matrix jacobian_freq(const Vector& x_freq) const override;
  Vector jacobian_freq_diagonal(const Vector& x_freq) const override;
  void evaluate_freq_into(const Vector& x_freq, Vector& out) const override;
  void jacobian_freq_diagonal_into(const Vector& x_freq, Vector& out) const override;
};

/// Output of a linear graph filter, g(L, x) = V diag(response) V^T x.
class LinearGraphFilterModel final : public MeasurementModel {
 public:
  LinearGraphFilterModel(SharedBasis basis, Vector response);

  const Vector& response() const { return response_; }

  Vector evaluate(const Vector& x) const override;
  Matrix jacobian(const Vector& x) const override;
  Vector evaluate_freq(const Vector& x_freq) const override;
  Matrix jacobian_freq(const Vector& x_freq) const override;
  Vector jacobian_freq_diagonal(const Vector& x_freq) const override;

 private:
  Vector response_;
};

/// General dense linear map g(x) = A x.
class LinearModel final : public MeasurementModel {
 public:
  LinearModel(SharedBasis basis, Matrix a);

  const Matrix& matrix() const { return a_; }

  Vector evaluate(const Vector& x) const override;
  Matrix jacobian(const Vector& x) const override;

 private:
  Matrix a_;
};

/// Active-power injections of an AC network with unit voltage magnitudes:
///   [g(x)]_n = sum_m G_nm cos(x_n - x_m) + B_nm sin(x_n - x_m).
///
/// `conductance` and `susceptance` are symmetric line-admittance matrices with
/// zero diagonal and zero entries off the network's edges. The Jacobian at
/// x = 0 equals -L, where L is the Laplacian with weights -B_nm.
class AcPowerFlowModel final : public MeasurementModel {
 public:
  AcPowerFlowModel(SharedBasis basis, const Matrix& conductance, const Matrix& susceptance,
                   Execution execution = Execution::Parallel);

  const kernels::AdmittanceGraph& admittance() const { return admittance_; }

  Vector evaluate(const Vector& x) const override;
  Matrix jacobian(const Vector& x) const override;

 private:
  kernels::AdmittanceGraph admittance_;
  Execution execution_;
};

/// Column-by-column central differences of model.evaluate.
Matrix jacobian_finite_difference(const MeasurementModel& model, const Vector& x,
                                  double step = 1e-6);

/// Sampled check of frequency separability: for every test point x~ and every
/// n, [g~(x~)]_n must equal [g~(x~_n e_n)]_n within `tol`. A pragmatic
/// surrogate for the pointwise definition; a true result is not a proof.
bool is_orthogonal_frequencies(const MeasurementModel& model,
                               const std::vector<Vector>& test_points, double tol);

}  // namespace gspmap
