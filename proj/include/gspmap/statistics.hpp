#pragma once

#include "gspmap/common.hpp"
#include "gspmap/graph.hpp"
#include "gspmap/measurement.hpp"

#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace gspmap {

using Rng = std::mt19937_64;

/// Multivariate Gaussian stored in both domains of a spectral basis, with the
/// inverse covariances and the diagonal of the frequency-domain inverse cached.
class Gaussian {
 public:
  static Gaussian from_vertex(SharedBasis basis, Vector mean, const Matrix& covariance);
  static Gaussian from_frequency(SharedBasis basis, Vector mean_freq, Matrix covariance_freq);

  Index size() const { return mean_.size(); }
  const SpectralBasis& basis() const { return *basis_; }
  const SharedBasis& shared_basis() const { return basis_; }

  const Vector& mean() const { return mean_; }
  const Vector& mean_freq() const { return mean_freq_; }
  const Matrix& covariance() const { return cov_; }
  const Matrix& covariance_freq() const { return cov_freq_; }
  const Matrix& inverse() const { return inv_; }
  const Matrix& inverse_freq() const { return inv_freq_; }
  /// Diagonal of inverse_freq(), i.e. the entries of ddiag(C~^{-1}).
  const Vector& inverse_freq_diagonal() const { return inv_freq_diag_; }
  /// True when the frequency-domain covariance has no off-diagonal entries.
  bool diagonal_in_frequency() const { return diagonal_freq_; }

  /// Frequencies whose component is deterministic when sampling.
  const std::vector<bool>& pinned() const { return pinned_; }

  /// One draw, returned in the vertex domain.
  Vector sample(Rng& rng) const;
  Vector sample_freq(Rng& rng) const;

 protected:
  Gaussian() = default;
  void finish();

  SharedBasis basis_;
  Vector mean_;
  Vector mean_freq_;
  Matrix cov_;
  Matrix cov_freq_;
  Matrix inv_;
  Matrix inv_freq_;
  Vector inv_freq_diag_;
  Matrix sampling_factor_;  // frequency domain, lower triangular
  std::vector<bool> pinned_;
  bool diagonal_freq_ = false;

  friend Gaussian smooth_prior(SharedBasis basis, double beta, double eps_ref);
};

using GaussianPrior = Gaussian;

/// Zero-mean measurement noise.
class NoiseModel : public Gaussian {
 public:
  static NoiseModel white(SharedBasis basis, double variance);
  static NoiseModel from_vertex(SharedBasis basis, const Matrix& covariance);
  static NoiseModel from_frequency(SharedBasis basis, const Matrix& covariance_freq);

 private:
  explicit NoiseModel(Gaussian g) : Gaussian(std::move(g)) {}
};

/// Zero-mean prior with frequency covariance beta * pinv(Lambda). The first
/// frequency is deterministic zero; its stored variance is the ridge eps_ref so
/// that the cached inverses exist.
GaussianPrior smooth_prior(SharedBasis basis, double beta, double eps_ref = 1e-12);

/// beta * sum_{j >= 2} V_ij^2 / lambda_j for every vertex i.
Vector smooth_prior_vertex_variance(const SpectralBasis& basis, double beta);

Vector sample_prior(const GaussianPrior& prior, Rng& rng);
Vector sample_noise(const NoiseModel& noise, Rng& rng);

/// Single-sample outer products around the current frequency-domain iterate.
struct SampleCovariances {
  Matrix xx;  // (x~ - mu~)(x~ - mu~)^T
  Matrix ww;  // (y~ - g~)(y~ - g~)^T
  Matrix wx;  // (y~ - g~)(x~ - mu~)^T
};

SampleCovariances sample_covariances(const Vector& iterate_freq, const Vector& y_freq,
                                     const Vector& g_freq, const Vector& prior_mean_freq);

// --- training data and linear estimators -----------------------------------

/// P pairs (x_p, y_p) stored column-wise, vertex domain.
struct TrainingSet {
  Matrix x;  // N x P
  Matrix y;  // N x P

  Index size() const { return x.cols(); }
};

TrainingSet generate_training(const GaussianPrior& prior, const NoiseModel& noise,
                              const MeasurementModel& model, Index count, Rng& rng);

// Columnar CSV: header x0..x{N-1},y0..y{N-1}; one sample per row.
void write_training(std::ostream& out, const TrainingSet& set);
TrainingSet read_training(std::istream& in);

/// First and second moments consumed by the linear estimators (vertex domain).
struct LinearMoments {
  Vector mean_x;
  Vector mean_y;
  Matrix cov_xy;
  Matrix cov_yy;
};

/// Sample moments with (P - 1) normalization; requires P >= 2.
LinearMoments sample_moments(const TrainingSet& set);

/// Moments of the separable cubic model with x~ ~ N(0, var_x I), white noise:
/// C_xy = 3 var_x^2 I and C_yy = (var_w + 15 var_x^3) I.
LinearMoments cubic_model_moments(Index n, double var_x, double var_w);

constexpr double kDefaultLoading = 1e-6;

/// x = mu_x + C_xy C_yy^{-1} (y - mu_y), with the gain precomputed.
class LmmseEstimator {
 public:
  /// `loading` scales the ridge loading * trace(C_yy) / N added to C_yy.
  explicit LmmseEstimator(const LinearMoments& moments, double loading = 0.0);

  Vector estimate(const Vector& y) const;
  const Matrix& gain() const { return gain_; }

 private:
  Vector mean_x_;
  Vector mean_y_;
  Matrix gain_;
};

/// Graph-filter restricted LMMSE: x = mu_x + V diag(h) (y~ - mu~_y) with
/// h_n = [C_x~y~]_nn / [C_y~y~]_nn.
class GspLmmseEstimator {
 public:
  GspLmmseEstimator(const LinearMoments& moments, SharedBasis basis, double loading = 0.0);
  /// Frequency-domain sample moments computed directly from training pairs.
  GspLmmseEstimator(const TrainingSet& set, SharedBasis basis, double loading = kDefaultLoading);

  Vector estimate(const Vector& y) const;
  const Vector& response() const { return response_; }

 private:
  void build(const Vector& cross, Vector auto_diag, double loading);

  SharedBasis basis_;
  Vector mean_x_;
  Vector mean_y_freq_;
  Vector response_;
};

}  // namespace gspmap
