#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "opm/mixed_kalman.hpp"
#include "opm/validation.hpp"

using namespace opm;
using namespace opm::validation;

namespace {

double max_abs(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

ModelMatrices scenario_model() {
  const double d = 0.1;
  Matrix F(2, 2), G(2, 1), H(1, 2);
  F << 1, d, 0, 1;
  G << d * d / 2, d;
  H << 1, 0;
  return ModelMatrices::from_joint(F, G, H, Matrix::Constant(1, 1, 0.5), 1);
}

}  // namespace

TEST_CASE("identity dynamics") {
  const double eps = 1e-2;
  Matrix G = std::sqrt(eps) * Matrix::Identity(3, 3);
  Matrix H = Matrix::Zero(1, 3);
  H(0, 0) = 1.0;
  const auto md = ModelMatrices::from_joint(Matrix::Identity(3, 3), G, H, Matrix::Identity(1, 1), 2);
  ConditionalGaussianOPM s{Vector::Constant(1, 0.3), Matrix::Constant(1, 1, 2.0), Matrix::Zero(2, 1),
                           Vector::Constant(2, -1.0), Matrix::Identity(2, 2)};
  const auto p = predict(s, md);
  CHECK(p.m_theta == s.m_theta);
  CHECK(p.m_x == s.m_x);
  CHECK(p.P_theta(0, 0) == doctest::Approx(2.0 + eps));
  CHECK(max_abs(p.P_x, (1.0 + eps) * Matrix::Identity(2, 2)) < 1e-15);
  CHECK(p.C_xtheta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scenario model against the joint Kalman oracle") {
  const auto md = scenario_model();
  const auto s = ConditionalGaussianOPM::weakly_informative(1, 1);
  const auto p = predict(s, md);
  const auto oracle = oracle_predict(recover_joint(s), md.joint_F(), md.joint_Q());
  CHECK(max_abs(recover_joint(p).cov, oracle.cov) < 1e-9);
  CHECK(max_abs(recover_joint(p).mean, oracle.mean) < 1e-9);
  const auto back = from_joint(oracle, 1);
  CHECK(max_abs(back.P_x, p.P_x) < 1e-9);
  CHECK(max_abs(back.C_xtheta, p.C_xtheta) < 1e-9);

  const Vector y = Vector::Constant(1, 0.3);
  const auto [u, gains] = update(p, y, md);
  const auto ou = oracle_update(oracle, y, md.joint_H(), md.R);
  CHECK(max_abs(recover_joint(u).cov, ou.cov) < 1e-9);
  CHECK(max_abs(recover_joint(u).mean, ou.mean) < 1e-9);
  CHECK(gains.likelihood >= 0.0);
  CHECK(gains.likelihood <= 1.0);
}

TEST_CASE("literal middle term F_xtheta P^x F_xtheta^t fails the oracle") {
  // With one position and one velocity both readings are dimensionally valid,
  // so only the joint oracle can tell them apart.
  const auto md = scenario_model();
  ConditionalGaussianOPM s{Vector::Constant(1, 0.0), Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 0.2),
                           Vector::Constant(1, 0.0), Matrix::Constant(1, 1, 1.0)};
  const auto p = predict(s, md);
  const Matrix literal = p.P_x - md.F_x * s.P_x * md.F_x.transpose() + md.F_xtheta * s.P_x * md.F_xtheta.transpose();
  const auto oracle = from_joint(oracle_predict(recover_joint(s), md.joint_F(), md.joint_Q()), 1);
  CHECK(max_abs(p.P_x, oracle.P_x) < 1e-12);
  CHECK(max_abs(literal, oracle.P_x) > 0.5);
}

TEST_CASE("joint propagation identity") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 10; ++t) {
    const auto md = random_model(rng, 2, 2, 1);
    const auto s = from_joint(random_prior(rng, 4), 2);
    const auto j = recover_joint(s);
    const Matrix F = md.joint_F();
    CHECK(max_abs(recover_joint(predict(s, md)).cov, F * j.cov * F.transpose() + md.joint_Q()) < 1e-9);
  }
}

TEST_CASE("zero innovation and likelihood prefactor") {
  const auto md = scenario_model();
  const auto p = predict(ConditionalGaussianOPM::weakly_informative(1, 1), md);
  const Vector y = md.H * p.m_x;
  const auto [u, g] = update(p, y, md);
  CHECK(max_abs(u.m_x, p.m_x) == 0.0);
  CHECK(max_abs(u.m_theta, p.m_theta) == 0.0);
  CHECK(g.likelihood == doctest::Approx(std::sqrt(md.R.determinant() / g.S_x.determinant())).epsilon(1e-14));
  CHECK(g.likelihood <= 1.0);
  CHECK(marginal_likelihood(p, y, md) == doctest::Approx(g.likelihood).epsilon(1e-14));

  // P^x -> 0 and C -> 0: unit prefactor
  ConditionalGaussianOPM tight{Vector::Zero(1), Matrix::Identity(1, 1), Matrix::Zero(1, 1), Vector::Zero(1),
                               Matrix::Constant(1, 1, 1e-14)};
  const Vector y2 = Vector::Constant(1, 0.8);
  const double L = update(tight, y2, md).second.likelihood;
  CHECK(L == doctest::Approx(std::exp(-0.5 * 0.64 / 0.5)).epsilon(1e-10));
}

TEST_CASE("recover_joint") {
  ConditionalGaussianOPM s{Vector::Constant(1, 1.0), Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 0.5),
                           Vector::Constant(1, -1.0), Matrix::Constant(1, 1, 1.0)};
  const auto j = recover_joint(s);
  CHECK(j.cov(0, 1) == 1.0);
  CHECK(j.cov(1, 0) == 1.0);
  CHECK(j.cov(0, 0) == 1.5);
  CHECK(j.mean(0) == -1.0);
  CHECK(j.mean(1) == 1.0);
  const auto back = from_joint(j, 1);
  CHECK(std::abs(back.P_x(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(back.C_xtheta(0, 0) - 0.5) < 1e-12);
  CHECK(std::abs(back.P_theta(0, 0) - 2.0) < 1e-12);

  s.C_xtheta.setZero();
  const auto jd = recover_joint(s);
  CHECK(jd.cov(0, 1) == 0.0);
}

TEST_CASE("no theta component reduces to the textbook filter") {
  std::mt19937_64 rng(23);
  Matrix F(2, 2), G(2, 2), H(1, 2);
  F << 0.9, 0.2, 0.0, 0.8;
  G << 0.3, 0.1, 0.0, 0.4;
  H << 1.0, 0.5;
  const auto md = ModelMatrices::from_joint(F, G, H, Matrix::Constant(1, 1, 0.4), 2);
  ConditionalGaussianOPM s{Vector(0), Matrix(0, 0), Matrix(2, 0), Vector::Zero(2), Matrix::Identity(2, 2)};
  GaussianDensity k(Vector::Zero(2), Matrix::Identity(2, 2));
  const LinearGaussianModel lg{F, G * G.transpose(), H, md.R};
  std::normal_distribution<double> n;
  for (int step = 0; step < 50; ++step) {
    s = predict(s, md);
    k = kalman_predict(k, lg);
    const Vector y = Vector::Constant(1, n(rng));
    s = update(s, y, md).first;
    k = kalman_update(k, y, lg).posterior;
    CHECK(max_abs(s.m_x, k.mean()) < 1e-12);
    CHECK(max_abs(s.P_x, k.covariance()) < 1e-12);
  }
}

TEST_CASE("covariances stay symmetric") {
  std::mt19937_64 rng(29);
  const auto md = random_model(rng, 3, 2, 2);
  auto s = from_joint(random_prior(rng, 5), 3);
  std::normal_distribution<double> n;
  for (int step = 0; step < 100; ++step) {
    s = predict(s, md);
    Vector y(2);
    y << n(rng), n(rng);
    s = update(s, y, md).first;
    CHECK(max_abs(s.P_x, s.P_x.transpose()) <= 1e-12);
    CHECK(max_abs(s.P_theta, s.P_theta.transpose()) <= 1e-12);
    CHECK(max_abs(recover_joint(s).cov, recover_joint(s).cov.transpose()) <= 1e-12);
    CHECK_NOTHROW(s.validate());
  }
}

TEST_CASE("oracle equivalence and likelihood bound") {
  const auto eq = kalman_equivalence(5, 100, 99);
  INFO(eq.detail);
  CHECK(eq.passed);
  const auto lb = likelihood_bound(5000, 3);
  INFO(lb.detail);
  CHECK(lb.passed);
}

TEST_CASE("model validation") {
  Matrix F = Matrix::Identity(2, 2);
  F(1, 0) = 0.3;
  Matrix H(1, 2);
  H << 1, 0;
  CHECK_THROWS_AS(ModelMatrices::from_joint(F, Matrix::Identity(2, 2), H, Matrix::Identity(1, 1), 1),
                  std::invalid_argument);
  Matrix Ht(1, 2);
  Ht << 1, 1;
  CHECK_THROWS_AS(ModelMatrices::from_joint(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Ht,
                                            Matrix::Identity(1, 1), 1),
                  std::invalid_argument);
  Matrix G(2, 1);
  G << 1.0, 0.0;  // Q_thetatheta = 0
  CHECK_THROWS_AS(ModelMatrices::from_joint(Matrix::Identity(2, 2), G, H, Matrix::Identity(1, 1), 1),
                  std::domain_error);
}
