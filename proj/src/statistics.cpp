#include "gspmap/statistics.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace gspmap {

namespace {

bool is_diagonal(const Matrix& m, double rel_tol) {
  const double scale = m.diagonal().cwiseAbs().maxCoeff();
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (i != j && std::abs(m(i, j)) > rel_tol * scale) return false;
    }
  }
  return true;
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Vector standard_normal(Index n, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector z(n);
  for (Index i = 0; i < n; ++i) z(i) = dist(rng);
  return z;
}

}  // namespace

Gaussian Gaussian::from_vertex(SharedBasis basis, Vector mean, const Matrix& covariance) {
  if (!basis) throw InvalidGraph("gaussian requires a spectral basis");
  const Index n = basis->size();
  if (mean.size() != n || covariance.rows() != n || covariance.cols() != n) {
    throw DomainMismatch("mean/covariance do not match the basis dimension");
  }
  const Matrix& v = basis->eigenvectors;
  Gaussian g;
  g.basis_ = std::move(basis);
  g.mean_freq_ = v.transpose() * mean;
  g.mean_ = std::move(mean);
  g.cov_freq_ = symmetrized(v.transpose() * covariance * v);
  g.cov_ = symmetrized(covariance);
  g.finish();
  return g;
}

Gaussian Gaussian::from_frequency(SharedBasis basis, Vector mean_freq, Matrix covariance_freq) {
  if (!basis) throw InvalidGraph("gaussian requires a spectral basis");
  const Index n = basis->size();
  if (mean_freq.size() != n || covariance_freq.rows() != n || covariance_freq.cols() != n) {
    throw DomainMismatch("mean/covariance do not match the basis dimension");
  }
  const Matrix& v = basis->eigenvectors;
  Gaussian g;
  g.basis_ = std::move(basis);
  g.mean_ = v * mean_freq;
  g.mean_freq_ = std::move(mean_freq);
  g.cov_freq_ = symmetrized(covariance_freq);
  g.cov_ = symmetrized(v * g.cov_freq_ * v.transpose());
  g.finish();
  return g;
}

void Gaussian::finish() {
  const Index n = size();
  const Matrix& v = basis_->eigenvectors;
  if (!cov_freq_.allFinite() || !mean_freq_.allFinite()) {
    throw SingularCovariance("covariance or mean has non-finite entries");
  }
  if (pinned_.empty()) pinned_.assign(static_cast<std::size_t>(n), false);

  diagonal_freq_ = is_diagonal(cov_freq_, 1e-12);
  if (diagonal_freq_) {
    const Vector d = cov_freq_.diagonal();
    if ((d.array() <= 0.0).any()) throw SingularCovariance("covariance is not positive definite");
    cov_freq_ = d.asDiagonal();
    inv_freq_ = d.cwiseInverse().asDiagonal();
    Vector scale = d.cwiseSqrt();
    for (Index i = 0; i < n; ++i) {
      if (pinned_[static_cast<std::size_t>(i)]) scale(i) = 0.0;
    }
    sampling_factor_ = scale.asDiagonal();
  } else {
    Eigen::LLT<Matrix> llt(cov_freq_);
    if (llt.info() != Eigen::Success) throw SingularCovariance("covariance is not positive definite");
    inv_freq_ = symmetrized(llt.solve(Matrix::Identity(n, n)));
    sampling_factor_ = llt.matrixL();
  }
  inv_ = symmetrized(v * inv_freq_ * v.transpose());
  inv_freq_diag_ = inv_freq_.diagonal();
  if (!inv_.allFinite()) throw SingularCovariance("covariance inverse is not finite");
}

Vector Gaussian::sample_freq(Rng& rng) const {
  return mean_freq_ + sampling_factor_ * standard_normal(size(), rng);
}

Vector Gaussian::sample(Rng& rng) const { return basis_->eigenvectors * sample_freq(rng); }

NoiseModel NoiseModel::white(SharedBasis basis, double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw SingularCovariance("noise variance must be positive");
  }
  const Index n = basis ? basis->size() : 0;
  return NoiseModel(Gaussian::from_frequency(std::move(basis), Vector::Zero(n),
                                             Matrix::Identity(n, n) * variance));
}

NoiseModel NoiseModel::from_vertex(SharedBasis basis, const Matrix& covariance) {
  const Index n = basis ? basis->size() : 0;
  return NoiseModel(Gaussian::from_vertex(std::move(basis), Vector::Zero(n), covariance));
}

NoiseModel NoiseModel::from_frequency(SharedBasis basis, const Matrix& covariance_freq) {
  const Index n = basis ? basis->size() : 0;
  return NoiseModel(Gaussian::from_frequency(std::move(basis), Vector::Zero(n), covariance_freq));
}

GaussianPrior smooth_prior(SharedBasis basis, double beta, double eps_ref) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidBeta("beta must be positive and finite");
  if (!basis) throw InvalidGraph("smooth prior requires a spectral basis");
  if (!(eps_ref > 0.0)) throw InvalidConfig("reference ridge must be positive");
  const Index n = basis->size();
  const Vector& lambda = basis->eigenvalues;
  Vector d(n);
  d(0) = eps_ref;
  for (Index j = 1; j < n; ++j) d(j) = beta / lambda(j);

  const Matrix& v = basis->eigenvectors;
  Gaussian g;
  g.basis_ = std::move(basis);
  g.mean_ = Vector::Zero(n);
  g.mean_freq_ = Vector::Zero(n);
  g.cov_freq_ = d.asDiagonal();
  g.cov_ = symmetrized(v * g.cov_freq_ * v.transpose());
  g.pinned_.assign(static_cast<std::size_t>(n), false);
  g.pinned_[0] = true;
  g.finish();
  return g;
}

Vector smooth_prior_vertex_variance(const SpectralBasis& basis, double beta) {
  if (!(beta > 0.0)) throw InvalidBeta("beta must be positive");
  const Index n = basis.size();
  Vector var = Vector::Zero(n);
  for (Index j = 1; j < n; ++j) {
    var += basis.eigenvectors.col(j).cwiseAbs2() / basis.eigenvalues(j);
  }
  return beta * var;
}

Vector sample_prior(const GaussianPrior& prior, Rng& rng) { return prior.sample(rng); }

Vector sample_noise(const NoiseModel& noise, Rng& rng) { return noise.sample(rng); }

SampleCovariances sample_covariances(const Vector& iterate_freq, const Vector& y_freq,
                                     const Vector& g_freq, const Vector& prior_mean_freq) {
  const Index n = iterate_freq.size();
  if (y_freq.size() != n || g_freq.size() != n || prior_mean_freq.size() != n) {
    throw DomainMismatch("sample covariance inputs differ in length");
  }
  const Vector a = iterate_freq - prior_mean_freq;
  const Vector r = y_freq - g_freq;
  return {a * a.transpose(), r * r.transpose(), r * a.transpose()};
}

// --- training data ----------------------------------------------------------

TrainingSet generate_training(const GaussianPrior& prior, const NoiseModel& noise,
                              const MeasurementModel& model, Index count, Rng& rng) {
  if (count < 1) throw InvalidConfig("training set must contain at least one sample");
  const Index n = model.size();
  TrainingSet set{Matrix(n, count), Matrix(n, count)};
  for (Index p = 0; p < count; ++p) {
    const Vector x = prior.sample(rng);
    set.x.col(p) = x;
    set.y.col(p) = model.evaluate(x) + noise.sample(rng);
  }
  return set;
}

void write_training(std::ostream& out, const TrainingSet& set) {
  const Index n = set.x.rows();
  for (Index i = 0; i < n; ++i) out << (i ? "," : "") << 'x' << i;
  for (Index i = 0; i < n; ++i) out << ",y" << i;
  out << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index p = 0; p < set.size(); ++p) {
    for (Index i = 0; i < n; ++i) out << (i ? "," : "") << set.x(i, p);
    for (Index i = 0; i < n; ++i) out << ',' << set.y(i, p);
    out << '\n';
  }
}

TrainingSet read_training(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("training file: missing header");
  Index columns = 1;
  for (char c : line) columns += (c == ',');
  if (columns % 2 != 0 || columns < 2) throw IoError("training file: odd column count");
  const Index n = columns / 2;

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IoError("training file: bad number '" + cell + "' on data row " +
                      std::to_string(rows.size() + 1));
      }
    }
    if (static_cast<Index>(row.size()) != columns) {
      throw IoError("training file: wrong field count on data row " + std::to_string(rows.size() + 1));
    }
    rows.push_back(std::move(row));
  }
  const Index count = static_cast<Index>(rows.size());
  TrainingSet set{Matrix(n, count), Matrix(n, count)};
  for (Index p = 0; p < count; ++p) {
    for (Index i = 0; i < n; ++i) {
      set.x(i, p) = rows[p][i];
      set.y(i, p) = rows[p][n + i];
    }
  }
  return set;
}

// --- linear estimators ------------------------------------------------------

LinearMoments sample_moments(const TrainingSet& set) {
  const Index p = set.size();
  if (p < 2) throw InvalidConfig("sample moments need at least two training pairs");
  LinearMoments m;
  m.mean_x = set.x.rowwise().mean();
  m.mean_y = set.y.rowwise().mean();
  const Matrix xc = set.x.colwise() - m.mean_x;
  const Matrix yc = set.y.colwise() - m.mean_y;
  m.cov_xy = xc * yc.transpose() / static_cast<double>(p - 1);
  m.cov_yy = yc * yc.transpose() / static_cast<double>(p - 1);
  return m;
}

LinearMoments cubic_model_moments(Index n, double var_x, double var_w) {
  LinearMoments m;
  m.mean_x = Vector::Zero(n);
  m.mean_y = Vector::Zero(n);
  m.cov_xy = Matrix::Identity(n, n) * (3.0 * var_x * var_x);
  m.cov_yy = Matrix::Identity(n, n) * (var_w + 15.0 * var_x * var_x * var_x);
  return m;
}

LmmseEstimator::LmmseEstimator(const LinearMoments& moments, double loading)
    : mean_x_(moments.mean_x), mean_y_(moments.mean_y) {
  const Index n = moments.cov_yy.rows();
  Matrix cyy = symmetrized(moments.cov_yy);
  if (loading > 0.0) cyy.diagonal().array() += loading * cyy.trace() / static_cast<double>(n);
  Eigen::LLT<Matrix> llt(cyy);
  if (llt.info() != Eigen::Success) throw SingularCovariance("C_yy is not invertible");
  // gain = C_xy C_yy^{-1}  =>  gain^T = C_yy^{-1} C_xy^T
  gain_ = llt.solve(moments.cov_xy.transpose()).transpose();
  if (!gain_.allFinite()) throw SingularCovariance("C_yy is not invertible");
}

Vector LmmseEstimator::estimate(const Vector& y) const {
  if (y.size() != mean_y_.size()) throw DomainMismatch("measurement has the wrong length");
  return mean_x_ + gain_ * (y - mean_y_);
}

GspLmmseEstimator::GspLmmseEstimator(const LinearMoments& moments, SharedBasis basis,
                                     double loading)
    : basis_(std::move(basis)) {
  const Matrix& v = basis_->eigenvectors;
  mean_x_ = moments.mean_x;
  mean_y_freq_ = v.transpose() * moments.mean_y;
  const Vector cross = (v.cwiseProduct(moments.cov_xy * v)).colwise().sum().transpose();
  Vector auto_diag = (v.cwiseProduct(moments.cov_yy * v)).colwise().sum().transpose();
  build(cross, std::move(auto_diag), loading);
}

GspLmmseEstimator::GspLmmseEstimator(const TrainingSet& set, SharedBasis basis, double loading)
    : basis_(std::move(basis)) {
  const Index p = set.size();
  if (p < 2) throw InvalidConfig("sample moments need at least two training pairs");
  const Matrix& v = basis_->eigenvectors;
  const Matrix xf = v.transpose() * set.x;
  const Matrix yf = v.transpose() * set.y;
  mean_x_ = set.x.rowwise().mean();
  const Vector mean_xf = xf.rowwise().mean();
  mean_y_freq_ = yf.rowwise().mean();
  const Matrix xc = xf.colwise() - mean_xf;
  const Matrix yc = yf.colwise() - mean_y_freq_;
  const double norm = 1.0 / static_cast<double>(p - 1);
  const Vector cross = xc.cwiseProduct(yc).rowwise().sum() * norm;
  Vector auto_diag = yc.cwiseAbs2().rowwise().sum() * norm;
  build(cross, std::move(auto_diag), loading);
}

void GspLmmseEstimator::build(const Vector& cross, Vector auto_diag, double loading) {
  const Index n = auto_diag.size();
  if (loading > 0.0) auto_diag.array() += loading * auto_diag.sum() / static_cast<double>(n);
  if ((auto_diag.array() <= 0.0).any()) throw SingularCovariance("C_y~y~ has a zero diagonal entry");
  response_ = cross.cwiseQuotient(auto_diag);
}

Vector GspLmmseEstimator::estimate(const Vector& y) const {
  if (y.size() != mean_x_.size()) throw DomainMismatch("measurement has the wrong length");
  const Matrix& v = basis_->eigenvectors;
  return mean_x_ + v * response_.cwiseProduct(v.transpose() * y - mean_y_freq_);
}

}  // namespace gspmap
