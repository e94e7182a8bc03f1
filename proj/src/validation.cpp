#include "opm/validation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opm/possibility.hpp"

namespace opm::validation {

namespace {

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

Matrix random_spd(std::mt19937_64& rng, Eigen::Index dim, double floor) {
  const Matrix a = random_matrix(rng, dim, dim);
  return symmetrized(a * a.transpose() / static_cast<double>(dim) + floor * Matrix::Identity(dim, dim));
}

Matrix contraction(std::mt19937_64& rng, Eigen::Index dim) {
  Matrix a = random_matrix(rng, dim, dim);
  const double norm = Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
  std::uniform_real_distribution<double> scale(0.5, 1.0);
  return a * (scale(rng) / norm);
}

Vector sample(std::mt19937_64& rng, const Vector& mean, const Matrix& cov) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector z(mean.size());
  for (auto& v : z) v = n(rng);
  return mean + Eigen::LLT<Matrix>(cov).matrixL() * z;
}

double max_abs(const JointGaussian& a, const JointGaussian& b) {
  return std::max((a.mean - b.mean).cwiseAbs().maxCoeff(), (a.cov - b.cov).cwiseAbs().maxCoeff());
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ModelMatrices random_model(std::mt19937_64& rng, Eigen::Index nx, Eigen::Index nt, Eigen::Index ny) {
  const Eigen::Index n = nx + nt;
  Matrix F = Matrix::Zero(n, n);
  F.topLeftCorner(nx, nx) = contraction(rng, nx);
  F.topRightCorner(nx, nt) = 0.5 * random_matrix(rng, nx, nt);
  F.bottomRightCorner(nt, nt) = contraction(rng, nt);
  Matrix G = random_matrix(rng, n, n) * 0.5 + Matrix::Identity(n, n);
  while (std::abs(G.determinant()) < 1e-2) G = random_matrix(rng, n, n) * 0.5 + Matrix::Identity(n, n);
  Matrix H = Matrix::Zero(ny, n);
  H.leftCols(nx) = random_matrix(rng, ny, nx);
  return ModelMatrices::from_joint(F, G, H, random_spd(rng, ny, 0.2), nx);
}

JointGaussian random_prior(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector mean(dim);
  for (auto& v : mean) v = n(rng);
  return {mean, random_spd(rng, dim, 0.1)};
}

JointGaussian oracle_predict(const JointGaussian& s, const Matrix& F, const Matrix& Q) {
  return {F * s.mean, F * s.cov * F.transpose() + Q};
}

JointGaussian oracle_update(const JointGaussian& s, const Vector& y, const Matrix& H, const Matrix& R) {
  const Matrix S = H * s.cov * H.transpose() + R;
  const Matrix K = s.cov * H.transpose() * S.inverse();
  const Matrix I = Matrix::Identity(s.cov.rows(), s.cov.cols());
  const Matrix A = I - K * H;
  // Joseph form
  return {s.mean + K * (y - H * s.mean), A * s.cov * A.transpose() + K * R * K.transpose()};
}

CheckResult kalman_equivalence(std::size_t instances, std::size_t steps, std::uint64_t seed, double tolerance) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> xd(1, 3), td(1, 2);
  double worst = 0.0;
  for (std::size_t inst = 0; inst < instances; ++inst) {
    const Eigen::Index nx = xd(rng), nt = td(rng);
    const Eigen::Index ny = std::uniform_int_distribution<Eigen::Index>(1, nx)(rng);
    const ModelMatrices model = random_model(rng, nx, nt, ny);
    const Matrix F = model.joint_F(), Q = model.joint_Q(), H = model.joint_H();

    JointGaussian oracle = random_prior(rng, nx + nt);
    auto state = from_joint(oracle, nx);
    worst = std::max(worst, max_abs(recover_joint(state), oracle));

    Vector truth = sample(rng, oracle.mean, oracle.cov);
    for (std::size_t k = 0; k < steps; ++k) {
      truth = sample(rng, F * truth, Q);
      const Vector y = sample(rng, H * truth, model.R);
      oracle = oracle_predict(oracle, F, Q);
      state = predict(state, model);
      worst = std::max(worst, max_abs(recover_joint(state), oracle));
      oracle = oracle_update(oracle, y, H, model.R);
      state = update(state, y, model).first;
      worst = std::max(worst, max_abs(recover_joint(state), oracle));
    }
  }
  return {"kalman-equivalence", worst < tolerance, worst,
          std::to_string(instances) + " models x " + std::to_string(steps) + " steps, max abs error " + fmt(worst)};
}

CheckResult likelihood_bound(std::size_t calls, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> xd(1, 3), td(1, 2);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> spread(-3.0, 3.0);
  std::size_t violations = 0;
  double lo = 1.0, hi = 0.0;
  std::size_t done = 0;
  while (done < calls) {
    const Eigen::Index nx = xd(rng), nt = td(rng);
    const Eigen::Index ny = std::uniform_int_distribution<Eigen::Index>(1, nx)(rng);
    const ModelMatrices model = random_model(rng, nx, nt, ny);
    JointGaussian prior = random_prior(rng, nx + nt);
    prior.cov *= std::pow(10.0, spread(rng));
    const auto predicted = predict(from_joint(prior, nx), model);
    for (int rep = 0; rep < 100 && done < calls; ++rep, ++done) {
      Vector y(ny);
      const double scale = std::pow(10.0, spread(rng));
      for (auto& v : y) v = scale * n(rng);
      const double L = update(predicted, y, model).second.likelihood;
      lo = std::min(lo, L);
      hi = std::max(hi, L);
      if (!(L >= 0.0 && L <= 1.0)) ++violations;
    }
  }
  return {"likelihood-bound", violations == 0, static_cast<double>(violations),
          std::to_string(calls) + " updates, " + std::to_string(violations) + " violations, range [" + fmt(lo) +
              ", " + fmt(hi) + "]"};
}

CheckResult gaussian_algebra(double tolerance) {
  double worst = 0.0;
  const double h = 1e-4;

  // Projection R^2 -> R: sup of g along each preimage line.
  {
    Vector mu(2);
    mu << 0.3, -0.7;
    Matrix S(2, 2);
    S << 1.5, 0.4, 0.4, 0.8;
    const GaussianPossibility g(mu, S);
    Matrix A(1, 2);
    A << 1.0, 2.0;
    Vector b(1);
    b << 0.5;
    const auto image = linear_transform(g, A, b);
    Vector dir(2);
    dir << -2.0, 1.0;
    dir.normalize();
    for (double z = -6.0; z <= 6.0; z += 0.25) {
      const Vector x0 = A.transpose() * ((z - b(0)) / (A * A.transpose())(0, 0));
      double best = 0.0;
      for (double t = -10.0; t <= 10.0; t += h) best = std::max(best, g(x0 + t * dir));
      Vector zv(1);
      zv << z;
      worst = std::max(worst, std::abs(best - image(zv)));
    }
  }
  // Invertible map: pushforward is composition with the inverse.
  {
    Vector mu(2);
    mu << 1.0, 2.0;
    Matrix S(2, 2);
    S << 0.5, -0.1, -0.1, 0.3;
    const GaussianPossibility g(mu, S);
    Matrix A(2, 2);
    A << 2.0, 1.0, -1.0, 1.0;
    Vector b(2);
    b << -1.0, 0.5;
    const auto image = linear_transform(g, A, b);
    const Matrix Ainv = A.inverse();
    for (double u = -3.0; u <= 6.0; u += 0.5)
      for (double v = -3.0; v <= 3.0; v += 0.5) {
        Vector z(2);
        z << u, v;
        worst = std::max(worst, std::abs(g(Ainv * (z - b)) - image(z)));
      }
  }
  // Sum of independent variables: sup-convolution on a lattice.
  {
    const GaussianPossibility g1(Vector::Constant(1, 1.0), Matrix::Constant(1, 1, 0.7));
    const GaussianPossibility g2(Vector::Constant(1, -2.0), Matrix::Constant(1, 1, 1.9));
    const auto s = sum_independent(g1, g2);
    Vector a(1), c(1), zv(1);
    for (double z = -7.0; z <= 5.0; z += 0.25) {
      double best = 0.0;
      for (double x = -10.0; x <= 10.0; x += h) {
        a(0) = x;
        c(0) = z - x;
        best = std::max(best, g1(a) * g2(c));
      }
      zv(0) = z;
      worst = std::max(worst, std::abs(best - s(zv)));
    }
    if (std::abs(s.mean()(0) + 1.0) > 1e-15 || std::abs(s.spread()(0, 0) - 2.6) > 1e-15) worst = 1.0;
  }
  return {"gaussian-algebra", worst < tolerance, worst, "max deviation from lattice oracles " + fmt(worst)};
}

CheckResult die_example(double tolerance) {
  const DiscreteOPM opm(PossibilityGrid::vacuous({Axis::range(6)}), Eigen::MatrixXd::Constant(6, 6, 1.0 / 6.0));
  double worst = 0.0;
  for (int s = 2; s <= 12; ++s) {
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(6, 6);
    for (int t = 1; t <= 6; ++t)
      for (int x = 1; x <= 6; ++x)
        if (t + x == s) phi(t - 1, x - 1) = 1.0;
    const double ur = upper_expectation(opm, phi, Ordering::UncertainThenRandom);
    const double ru = upper_expectation(opm, phi, Ordering::RandomThenUncertain);
    const double expected_ru = std::min((s - 1) / 6.0, (13 - s) / 6.0);
    worst = std::max({worst, std::abs(ur - 1.0 / 6.0), std::abs(ru - expected_ru)});
  }
  return {"die-example", worst <= tolerance, worst, "max deviation over sums 2..12 " + fmt(worst)};
}

std::vector<CheckResult> run_all() {
  return {kalman_equivalence(), likelihood_bound(), gaussian_algebra(), die_example()};
}

}  // namespace opm::validation
