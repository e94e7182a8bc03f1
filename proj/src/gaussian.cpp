#include "opm/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace opm {

void require_spd(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw std::domain_error(std::string(what) + ": matrix is not square");
  if (!m.allFinite()) throw std::domain_error(std::string(what) + ": matrix has non-finite entries");
  if (m.size() == 0) return;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::domain_error(std::string(what) + ": matrix is not symmetric");
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::domain_error(std::string(what) + ": matrix is not positive definite");
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double log_det_spd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw std::domain_error("log_det_spd: matrix is not positive definite");
  const Matrix& l = llt.matrixLLT();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) sum += std::log(l(i, i));
  return 2.0 * sum;
}

GaussianPossibility::GaussianPossibility(Vector mean, Matrix spread)
    : mean_(std::move(mean)), spread_(std::move(spread)) {
  if (spread_.rows() != mean_.size()) throw std::invalid_argument("spread does not match the mean dimension");
  require_spd(spread_, "Gaussian possibility spread");
  llt_.compute(spread_);
}

double GaussianPossibility::mahalanobis_sq(const Vector& x) const {
  if (x.size() != mean_.size()) throw std::invalid_argument("dimension mismatch in Gaussian possibility");
  const Vector d = x - mean_;
  return d.dot(llt_.solve(d));
}

double GaussianPossibility::operator()(const Vector& x) const {
  const double q = mahalanobis_sq(x);
  if (x == mean_) return 1.0;
  return std::exp(-0.5 * q);
}

GaussianDensity::GaussianDensity(Vector mean, Matrix covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  if (covariance_.rows() != mean_.size()) throw std::invalid_argument("covariance does not match the mean dimension");
  require_spd(covariance_, "Gaussian density covariance");
  llt_.compute(covariance_);
}

double GaussianDensity::log_density(const Vector& x) const {
  if (x.size() != mean_.size()) throw std::invalid_argument("dimension mismatch in Gaussian density");
  const Vector d = x - mean_;
  const double k = static_cast<double>(mean_.size());
  return -0.5 * (d.dot(llt_.solve(d)) + log_det_spd(covariance_) + k * std::log(2.0 * std::numbers::pi));
}

double GaussianDensity::operator()(const Vector& x) const { return std::exp(log_density(x)); }

GaussianPossibility linear_transform(const GaussianPossibility& g, const Matrix& A, const Vector& b) {
  if (A.cols() != g.dim() || A.rows() != b.size())
    throw std::invalid_argument("linear_transform: dimension mismatch");
  if (A.rows() > A.cols() || Eigen::FullPivLU<Matrix>(A).rank() < A.rows())
    throw std::domain_error("linear_transform: matrix must have full row rank");
  return GaussianPossibility(A * g.mean() + b, symmetrized(A * g.spread() * A.transpose()));
}

GaussianPossibility sum_independent(const GaussianPossibility& g1, const GaussianPossibility& g2) {
  if (g1.dim() != g2.dim()) throw std::invalid_argument("sum_independent: dimension mismatch");
  return GaussianPossibility(g1.mean() + g2.mean(), g1.spread() + g2.spread());
}

ConditionalDecomposition conditional_decompose(const Vector& joint_mean, const Matrix& joint_cov,
                                               Eigen::Index x_dim) {
  const Eigen::Index n = joint_mean.size();
  if (joint_cov.rows() != n || joint_cov.cols() != n || x_dim < 0 || x_dim > n)
    throw std::invalid_argument("conditional_decompose: dimension mismatch");
  const Eigen::Index t_dim = n - x_dim;
  const Matrix q_xx = joint_cov.topLeftCorner(x_dim, x_dim);
  const Matrix q_xt = joint_cov.topRightCorner(x_dim, t_dim);
  const Matrix q_tt = joint_cov.bottomRightCorner(t_dim, t_dim);

  Eigen::LLT<Matrix> llt(q_tt);
  if (t_dim > 0 && llt.info() != Eigen::Success)
    throw std::domain_error("conditional_decompose: parameter block is singular");
  const Matrix slope = t_dim > 0 ? Matrix(llt.solve(q_xt.transpose()).transpose()) : Matrix(x_dim, 0);
  const Matrix schur = symmetrized(q_xx - slope * q_xt.transpose());
  require_spd(schur, "conditional_decompose: Schur complement");

  return ConditionalDecomposition{
      GaussianPossibility(joint_mean.tail(t_dim), symmetrized(q_tt)),
      joint_mean.head(x_dim),
      slope,
      schur,
  };
}

}  // namespace opm
