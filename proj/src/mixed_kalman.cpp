#include "opm/mixed_kalman.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opm {

namespace {

// A M^{-1} for symmetric positive-definite M.
Matrix right_solve(const Eigen::LLT<Matrix>& m, const Matrix& a) {
  return m.solve(a.transpose()).transpose();
}

Eigen::LLT<Matrix> factor(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (m.size() > 0 && llt.info() != Eigen::Success) throw std::domain_error(what);
  return llt;
}

}  // namespace

void ConditionalGaussianOPM::validate() const {
  const auto nx = x_dim();
  const auto nt = theta_dim();
  if (P_theta.rows() != nt || P_theta.cols() != nt || C_xtheta.rows() != nx || C_xtheta.cols() != nt ||
      P_x.rows() != nx || P_x.cols() != nx)
    throw std::invalid_argument("conditional Gaussian o.p.m.: inconsistent dimensions");
  require_spd(P_theta, "P_theta");
  require_spd(P_x, "P_x");
}

ConditionalGaussianOPM ConditionalGaussianOPM::weakly_informative(Eigen::Index x_dim, Eigen::Index theta_dim,
                                                                  double x_var, double theta_var) {
  return ConditionalGaussianOPM{
      Vector::Zero(theta_dim),
      theta_var * Matrix::Identity(theta_dim, theta_dim),
      Matrix::Zero(x_dim, theta_dim),
      Vector::Zero(x_dim),
      x_var * Matrix::Identity(x_dim, x_dim),
  };
}

ModelMatrices ModelMatrices::from_joint(const Matrix& F, const Matrix& G, const Matrix& H, const Matrix& R,
                                        Eigen::Index x_dim) {
  const Eigen::Index n = F.rows();
  if (F.cols() != n || G.rows() != n || H.cols() != n || R.rows() != H.rows() || x_dim < 0 || x_dim > n)
    throw std::invalid_argument("ModelMatrices::from_joint: dimension mismatch");
  const Eigen::Index t = n - x_dim;
  if (t > 0 && x_dim > 0 && F.bottomLeftCorner(t, x_dim).cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("ModelMatrices::from_joint: F must be block upper-triangular");
  if (t > 0 && H.rows() > 0 && H.rightCols(t).cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("ModelMatrices::from_joint: H must not observe theta directly");
  const Matrix Q = G * G.transpose();
  ModelMatrices m{
      F.topLeftCorner(x_dim, x_dim), F.topRightCorner(x_dim, t), F.bottomRightCorner(t, t),
      Q.topLeftCorner(x_dim, x_dim), Q.topRightCorner(x_dim, t), Q.bottomRightCorner(t, t),
      H.leftCols(x_dim),             R,
  };
  m.validate();
  return m;
}

Matrix ModelMatrices::joint_F() const {
  const auto nx = x_dim(), nt = theta_dim();
  Matrix F = Matrix::Zero(nx + nt, nx + nt);
  F.topLeftCorner(nx, nx) = F_x;
  F.topRightCorner(nx, nt) = F_xtheta;
  F.bottomRightCorner(nt, nt) = F_theta;
  return F;
}

Matrix ModelMatrices::joint_Q() const {
  const auto nx = x_dim(), nt = theta_dim();
  Matrix Q(nx + nt, nx + nt);
  Q.topLeftCorner(nx, nx) = Q_xx;
  Q.topRightCorner(nx, nt) = Q_xtheta;
  Q.bottomLeftCorner(nt, nx) = Q_xtheta.transpose();
  Q.bottomRightCorner(nt, nt) = Q_thetatheta;
  return Q;
}

Matrix ModelMatrices::joint_H() const {
  Matrix Hj = Matrix::Zero(H.rows(), x_dim() + theta_dim());
  Hj.leftCols(x_dim()) = H;
  return Hj;
}

void ModelMatrices::validate() const {
  const auto nx = x_dim(), nt = theta_dim();
  if (F_x.cols() != nx || F_xtheta.rows() != nx || F_xtheta.cols() != nt || F_theta.cols() != nt ||
      Q_xx.rows() != nx || Q_xx.cols() != nx || Q_xtheta.rows() != nx || Q_xtheta.cols() != nt ||
      Q_thetatheta.rows() != nt || Q_thetatheta.cols() != nt || H.cols() != nx || R.rows() != H.rows())
    throw std::invalid_argument("model matrices: inconsistent dimensions");
  require_spd(Q_thetatheta, "Q_thetatheta");
  require_spd(R, "R");
}

ConditionalGaussianOPM predict(const ConditionalGaussianOPM& s, const ModelMatrices& md, GainSet* gains) {
  const auto nt = s.theta_dim();
  const Matrix I_t = Matrix::Identity(nt, nt);

  const auto q_tt = factor(md.Q_thetatheta, "predict: Q_thetatheta is singular");
  const Matrix q_ratio = right_solve(q_tt, md.Q_xtheta);  // Q_xtheta Q_thetatheta^{-1}

  ConditionalGaussianOPM out;
  out.m_theta = md.F_theta * s.m_theta;
  out.P_theta = symmetrized(md.F_theta * s.P_theta * md.F_theta.transpose() + md.Q_thetatheta);
  const auto p_pred = factor(out.P_theta, "predict: predicted P_theta is singular");

  const Matrix K_pred = right_solve(p_pred, s.P_theta * md.F_theta.transpose());
  const Matrix coupling = md.F_x * s.C_xtheta + md.F_xtheta;
  const Matrix F_tilde = coupling - q_ratio * md.F_theta;

  out.C_xtheta = coupling * K_pred + q_ratio * (I_t - md.F_theta * K_pred);
  out.m_x = md.F_xtheta * s.m_theta + md.F_x * s.m_x;
  // The middle term propagates the conditional covariance through F_x.
  out.P_x = symmetrized(F_tilde * ((I_t - K_pred * md.F_theta) * s.P_theta) * F_tilde.transpose() +
                        md.F_x * s.P_x * md.F_x.transpose() + md.Q_xx - q_ratio * md.Q_xtheta.transpose());

  if (gains) {
    gains->K_theta_pred = K_pred;
    gains->F_tilde_xtheta = F_tilde;
  }
  return out;
}

std::pair<ConditionalGaussianOPM, GainSet> update(const ConditionalGaussianOPM& p, const Vector& y,
                                                  const ModelMatrices& md) {
  if (y.size() != md.H.rows()) throw std::invalid_argument("update: observation dimension mismatch");
  const auto nx = p.x_dim(), nt = p.theta_dim();
  const Matrix I_x = Matrix::Identity(nx, nx);
  const Matrix I_t = Matrix::Identity(nt, nt);

  GainSet g;
  g.H_tilde = md.H * p.C_xtheta;
  g.S_x = symmetrized(md.H * p.P_x * md.H.transpose() + md.R);
  const auto s_llt = factor(g.S_x, "update: innovation covariance is not positive definite");
  const Matrix total = symmetrized(g.H_tilde * p.P_theta * g.H_tilde.transpose() + g.S_x);
  const auto t_llt = factor(total, "update: total innovation covariance is not positive definite");

  g.K_theta = right_solve(t_llt, p.P_theta * g.H_tilde.transpose());
  g.K_x = right_solve(s_llt, p.P_x * md.H.transpose());

  const Vector innovation = y - md.H * p.m_x;

  ConditionalGaussianOPM out;
  out.m_theta = p.m_theta + g.K_theta * innovation;
  out.P_theta = symmetrized((I_t - g.K_theta * g.H_tilde) * p.P_theta);
  out.C_xtheta = (I_x - g.K_x * md.H) * p.C_xtheta;
  out.m_x = p.m_x + (g.K_x + out.C_xtheta * g.K_theta) * innovation;
  out.P_x = symmetrized((I_x - g.K_x * md.H) * p.P_x);

  // |S| >= |R| since S - R is PSD; clamp rounding noise.
  const double log_ratio = std::min(0.0, log_det_spd(md.R) - log_det_spd(g.S_x));
  const double mahalanobis = innovation.dot(t_llt.solve(innovation));
  g.likelihood = std::exp(0.5 * log_ratio - 0.5 * mahalanobis);
  return {std::move(out), std::move(g)};
}

double marginal_likelihood(const ConditionalGaussianOPM& p, const Vector& y, const ModelMatrices& md) {
  if (y.size() != md.H.rows()) throw std::invalid_argument("marginal_likelihood: observation dimension mismatch");
  const Matrix H_tilde = md.H * p.C_xtheta;
  const Matrix S = symmetrized(md.H * p.P_x * md.H.transpose() + md.R);
  const Matrix total = symmetrized(H_tilde * p.P_theta * H_tilde.transpose() + S);
  const auto t_llt = factor(total, "marginal_likelihood: innovation covariance is not positive definite");
  const Vector innovation = y - md.H * p.m_x;
  const double log_ratio = std::min(0.0, log_det_spd(md.R) - log_det_spd(S));
  return std::exp(0.5 * log_ratio - 0.5 * innovation.dot(t_llt.solve(innovation)));
}

JointGaussian recover_joint(const ConditionalGaussianOPM& s) {
  const auto nx = s.x_dim(), nt = s.theta_dim();
  const Matrix P_xt = s.C_xtheta * s.P_theta;
  JointGaussian j{Vector(nx + nt), Matrix(nx + nt, nx + nt)};
  j.mean.head(nx) = s.m_x;
  j.mean.tail(nt) = s.m_theta;
  j.cov.topLeftCorner(nx, nx) = s.P_x + s.C_xtheta * P_xt.transpose();
  j.cov.topRightCorner(nx, nt) = P_xt;
  j.cov.bottomLeftCorner(nt, nx) = P_xt.transpose();
  j.cov.bottomRightCorner(nt, nt) = s.P_theta;
  j.cov = symmetrized(j.cov);
  return j;
}

ConditionalGaussianOPM from_joint(const JointGaussian& joint, Eigen::Index x_dim) {
  const auto d = conditional_decompose(joint.mean, joint.cov, x_dim);
  return ConditionalGaussianOPM{d.theta_marginal.mean(), d.theta_marginal.spread(), d.slope, d.x_mean,
                                d.conditional_cov};
}

GaussianDensity kalman_predict(const GaussianDensity& s, const LinearGaussianModel& m) {
  return GaussianDensity(m.F * s.mean(), symmetrized(m.F * s.covariance() * m.F.transpose() + m.Q));
}

KalmanUpdate kalman_update(const GaussianDensity& p, const Vector& y, const LinearGaussianModel& m) {
  if (y.size() != m.H.rows()) throw std::invalid_argument("kalman_update: observation dimension mismatch");
  const Vector y_pred = m.H * p.mean();
  const Matrix S = symmetrized(m.H * p.covariance() * m.H.transpose() + m.R);
  const auto s_llt = factor(S, "kalman_update: innovation covariance is not positive definite");
  const Matrix K = right_solve(s_llt, p.covariance() * m.H.transpose());
  const Matrix I = Matrix::Identity(p.dim(), p.dim());
  return KalmanUpdate{
      GaussianDensity(p.mean() + K * (y - y_pred), symmetrized((I - K * m.H) * p.covariance())),
      y_pred,
      S,
  };
}

double possibility_marginal_likelihood(const GaussianDensity& p, const Vector& y, const LinearGaussianModel& m) {
  const Matrix S = symmetrized(m.H * p.covariance() * m.H.transpose() + m.R);
  const auto s_llt = factor(S, "marginal likelihood: innovation covariance is not positive definite");
  const Vector r = y - m.H * p.mean();
  const double log_ratio = std::min(0.0, log_det_spd(m.R) - log_det_spd(S));
  return std::exp(0.5 * log_ratio - 0.5 * r.dot(s_llt.solve(r)));
}

}  // namespace opm
