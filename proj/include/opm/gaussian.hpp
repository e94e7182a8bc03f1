#pragma once

#include <Eigen/Dense>

namespace opm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Throws std::domain_error unless `m` is square, symmetric within 1e-12
/// (relative to its largest entry) and positive definite.
void require_spd(const Matrix& m, const char* what);

/// (m + m^t) / 2
Matrix symmetrized(const Matrix& m);

/// Normal possibility function exp(-1/2 (x-mu)^t S^{-1} (x-mu)). No
/// normalizing constant: the value at the mean is exactly 1.
class GaussianPossibility {
 public:
  GaussianPossibility(Vector mean, Matrix spread);

  const Vector& mean() const { return mean_; }
  const Matrix& spread() const { return spread_; }
  Eigen::Index dim() const { return mean_.size(); }

  double operator()(const Vector& x) const;
  /// Squared Mahalanobis distance of x to the mean under the spread.
  double mahalanobis_sq(const Vector& x) const;

 private:
  Vector mean_;
  Matrix spread_;
  Eigen::LLT<Matrix> llt_;
};

class GaussianDensity {
 public:
  GaussianDensity(Vector mean, Matrix covariance);

  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return covariance_; }
  Eigen::Index dim() const { return mean_.size(); }

  double operator()(const Vector& x) const;
  double log_density(const Vector& x) const;

 private:
  Vector mean_;
  Matrix covariance_;
  Eigen::LLT<Matrix> llt_;
};

/// Closed-form pushforward through x -> A x + b. A must have full row rank.
GaussianPossibility linear_transform(const GaussianPossibility& g, const Matrix& A, const Vector& b);

/// Possibility function of the sum of two independently described variables.
GaussianPossibility sum_independent(const GaussianPossibility& g1, const GaussianPossibility& g2);

/// Joint normal over (x, theta), x first, split into the marginal of theta
/// and the affine conditional of x given theta.
struct ConditionalDecomposition {
  GaussianPossibility theta_marginal;
  Vector x_mean;          // conditional mean at theta = theta_marginal.mean()
  Matrix slope;           // Q_xtheta Q_thetatheta^{-1}
  Matrix conditional_cov;  // Schur complement Q_xx - Q_xtheta Q_thetatheta^{-1} Q_thetax

  Vector conditional_mean(const Vector& theta) const {
    return x_mean + slope * (theta - theta_marginal.mean());
  }
};

ConditionalDecomposition conditional_decompose(const Vector& joint_mean, const Matrix& joint_cov,
                                               Eigen::Index x_dim);

/// log |m| for a symmetric positive-definite matrix.
double log_det_spd(const Matrix& m);

}  // namespace opm
