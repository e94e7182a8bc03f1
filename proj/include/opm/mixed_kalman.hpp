#pragma once

// Kalman-style recursion for a state (x, theta) where theta is a
// deterministic uncertain variable described by a normal possibility
// function and x | theta is Gaussian-random. The posterior keeps the form
//
//   sup_theta  Nbar(theta; m_theta, P_theta) * N(x; m_x + C (theta - m_theta), P_x)
//
// through prediction and update.

#include <utility>

#include "opm/gaussian.hpp"

namespace opm {

struct ConditionalGaussianOPM {
  Vector m_theta;
  Matrix P_theta;
  Matrix C_xtheta;  // x_dim x theta_dim
  Vector m_x;
  Matrix P_x;

  Eigen::Index x_dim() const { return m_x.size(); }
  Eigen::Index theta_dim() const { return m_theta.size(); }

  /// Throws std::domain_error / std::invalid_argument on a malformed state.
  void validate() const;

  /// m_theta = 0, P_theta = theta_var * I, C = 0, m_x = 0, P_x = x_var * I.
  static ConditionalGaussianOPM weakly_informative(Eigen::Index x_dim, Eigen::Index theta_dim,
                                                   double x_var = 1.0, double theta_var = 1.0);
};

/// Plain linear-Gaussian model x_n = F x_{n-1} + noise(Q), y_n = H x_n + noise(R).
struct LinearGaussianModel {
  Matrix F;
  Matrix Q;
  Matrix H;
  Matrix R;
};

/// Block form of the mixed model. F is block upper-triangular
/// [[F_x, F_xtheta], [0, F_theta]], Q = G G^t, H acts on x only.
struct ModelMatrices {
  Matrix F_x, F_xtheta, F_theta;
  Matrix Q_xx, Q_xtheta, Q_thetatheta;
  Matrix H;
  Matrix R;

  /// Splits full (x, theta) matrices. The lower-left block of F and the
  /// theta columns of H must be zero.
  static ModelMatrices from_joint(const Matrix& F, const Matrix& G, const Matrix& H, const Matrix& R,
                                  Eigen::Index x_dim);

  Eigen::Index x_dim() const { return F_x.rows(); }
  Eigen::Index theta_dim() const { return F_theta.rows(); }

  Matrix joint_F() const;
  Matrix joint_Q() const;
  /// H padded with zero columns for theta.
  Matrix joint_H() const;
  LinearGaussianModel joint() const { return {joint_F(), joint_Q(), joint_H(), R}; }

  void validate() const;
};

struct GainSet {
  Matrix K_theta_pred;    // K^theta_{n|n-1}
  Matrix F_tilde_xtheta;  // F~_xtheta
  Matrix H_tilde;
  Matrix K_theta;
  Matrix K_x;
  Matrix S_x;
  double likelihood = 0.0;  // L_n in [0, 1]
};

struct JointGaussian {
  Vector mean;  // (m_x; m_theta)
  Matrix cov;
};

/// Prediction; when `gains` is non-null its K_theta_pred and F_tilde_xtheta
/// are filled in.
ConditionalGaussianOPM predict(const ConditionalGaussianOPM& state, const ModelMatrices& model,
                               GainSet* gains = nullptr);

std::pair<ConditionalGaussianOPM, GainSet> update(const ConditionalGaussianOPM& predicted,
                                                  const Vector& y, const ModelMatrices& model);

/// Marginal likelihood L_n(y) of an observation under a predicted state,
/// without performing the update.
double marginal_likelihood(const ConditionalGaussianOPM& predicted, const Vector& y,
                           const ModelMatrices& model);

JointGaussian recover_joint(const ConditionalGaussianOPM& state);

/// Inverse of recover_joint via the block conditional decomposition.
ConditionalGaussianOPM from_joint(const JointGaussian& joint, Eigen::Index x_dim);

/// Textbook Kalman filter on a Gaussian density.
GaussianDensity kalman_predict(const GaussianDensity& state, const LinearGaussianModel& model);

struct KalmanUpdate {
  GaussianDensity posterior;
  Vector predicted_observation;
  Matrix innovation_cov;
};

KalmanUpdate kalman_update(const GaussianDensity& predicted, const Vector& y,
                           const LinearGaussianModel& model);

/// Integral of Nbar(y; H x, R) against N(x; m, P): sqrt(|R|/|S|) Nbar(y; Hm, S).
double possibility_marginal_likelihood(const GaussianDensity& predicted, const Vector& y,
                                       const LinearGaussianModel& model);

}  // namespace opm
