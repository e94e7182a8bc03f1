#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "opm/possibility.hpp"
#include "properties.hpp"

using namespace opm;

namespace {

PossibilityGrid grid2(std::vector<double> v, std::size_t rows, std::size_t cols) {
  return PossibilityGrid({Axis::range(rows), Axis::range(cols)}, std::move(v));
}

const PossibilityGrid kJoint = grid2({1.0, 0.4, 0.7, 0.2}, 2, 2);

}  // namespace

TEST_CASE("grid invariants are enforced") {
  CHECK_THROWS_AS(PossibilityGrid({Axis::range(2)}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(PossibilityGrid({Axis::range(2)}, {1.0, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(PossibilityGrid({Axis::range(2)}, {1.0, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(PossibilityGrid({Axis::range(3)}, {1.0, 0.1}), std::invalid_argument);
  CHECK_THROWS(PossibilityGrid::from_unnormalized({Axis::range(2)}, {0.0, 0.0}));
  const auto g = normalize(std::vector<double>{1.0, 4.0, 2.0});
  CHECK(g.values() == std::vector<double>{0.25, 1.0, 0.5});
}

TEST_CASE("marginal") {
  const auto ft = PossibilityGrid({Axis::range(2)}, {1.0, 0.3});
  const auto fp = PossibilityGrid({Axis::range(2)}, {0.6, 1.0});
  CHECK(marginal(product(ft, fp), 1).values() == fp.values());
  CHECK(marginal(kJoint, 1).values() == std::vector<double>{1.0, 0.4});
  CHECK(marginal(grid2({1, 1, 1, 1}, 2, 2), 0).values() == std::vector<double>{1.0, 1.0});
}

TEST_CASE("condition") {
  const auto c = condition(kJoint, 1, 1);
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(0.5));
  const auto ft = PossibilityGrid({Axis::range(3)}, {0.2, 1.0, 0.7});
  const auto fp = PossibilityGrid({Axis::range(2)}, {0.6, 1.0});
  CHECK(condition(product(ft, fp), 1, 0).values() == ft.values());
  CHECK_THROWS_AS(condition(grid2({1.0, 0.0, 0.5, 0.0}, 2, 2), 1, 1), std::domain_error);
}

TEST_CASE("bayes_update on a simplex lattice") {
  const auto lattice = simplex_lattice(3, 30);
  const auto prior = PossibilityGrid::vacuous({Axis::range(lattice.size())});
  std::vector<double> l1(lattice.size()), l2(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    l1[i] = lattice[i][0];
    l2[i] = lattice[i][2];
  }
  const auto post1 = bayes_update(prior, l1);
  const auto post2 = bayes_update(post1, l2);
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    CHECK(post1[i] == doctest::Approx(lattice[i][0]).epsilon(1e-12));
    CHECK(post2[i] == doctest::Approx(4.0 * lattice[i][0] * lattice[i][2]).epsilon(1e-12));
  }
  std::vector<double> ones(kJoint.size(), 1.0);
  CHECK(bayes_update(kJoint, ones).values() == kJoint.values());
  std::vector<double> zeros(kJoint.size(), 0.0);
  CHECK_THROWS_AS(bayes_update(kJoint, zeros), std::domain_error);
}

TEST_CASE("pushforward") {
  const auto f = PossibilityGrid({Axis::range(3)}, {0.3, 1.0, 0.6});
  std::vector<std::size_t> id{0, 1, 2};
  CHECK(pushforward(f, id, {Axis::range(3)}).values() == f.values());

  // discretized normal on {-3..3}, theta -> theta^2 on {0,1,4,9}
  std::vector<double> v;
  for (int t = -3; t <= 3; ++t) v.push_back(std::exp(-0.5 * t * t));
  const auto g = PossibilityGrid({Axis::real({-3, -2, -1, 0, 1, 2, 3})}, v);
  std::vector<std::size_t> sq{3, 2, 1, 0, 1, 2, 3};
  const auto p = pushforward(g, sq, {Axis::real({0, 1, 4, 9})});
  CHECK(p[2] == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));

  std::vector<std::size_t> collapse{1, 1, 1};
  CHECK(pushforward(f, collapse, {Axis::range(3)}).values() == std::vector<double>{0.0, 1.0, 0.0});
}

TEST_CASE("pullback") {
  const auto f = PossibilityGrid({Axis::range(3)}, {0.3, 1.0, 0.6});
  std::vector<std::size_t> perm{2, 0, 1};
  CHECK(pullback(f, perm, {Axis::range(3)}).values() == std::vector<double>{0.6, 0.3, 1.0});
  const auto half = PossibilityGrid({Axis::range(2)}, {1.0, 0.5});
  std::vector<std::size_t> constant{1, 1, 1};
  CHECK(pullback(half, constant, {Axis::range(3)}).values() == std::vector<double>{1.0, 1.0, 1.0});
  const auto ab = PossibilityGrid({Axis::labelled({"a", "b"})}, {1.0, 0.2});
  std::vector<std::size_t> to_b{1, 1};
  CHECK(pullback(ab, to_b, {Axis::range(2)}).values() == std::vector<double>{1.0, 1.0});
  const auto zero_b = PossibilityGrid({Axis::range(2)}, {1.0, 0.0});
  CHECK_THROWS_AS(pullback(zero_b, to_b, {Axis::range(2)}), std::domain_error);
}

TEST_CASE("expect_star") {
  const auto f = PossibilityGrid({Axis::real({1, 2, 3})}, {0.5, 1.0, 0.5});
  const auto e = expect_star(f);
  CHECK(e.is_singleton);
  CHECK(e.argmax_set == std::vector<std::size_t>{1});

  const auto flat = PossibilityGrid::vacuous({Axis::real({1, 2, 3})});
  const auto ef = expect_star(flat);
  CHECK_FALSE(ef.is_singleton);
  CHECK(ef.argmax_set.size() == 3);
  REQUIRE(ef.variance.has_value());
  CHECK(std::isinf(*ef.variance));

  // counts (2,1,1) -> proportions (1/2, 1/4, 1/4) on a lattice containing it
  const auto lattice = simplex_lattice(3, 8);
  std::vector<double> v(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i)
    v[i] = std::pow(lattice[i][0], 2) * lattice[i][1] * lattice[i][2];
  const auto post = PossibilityGrid::from_unnormalized({Axis::range(lattice.size())}, v);
  const auto ep = expect_star(post);
  REQUIRE(ep.is_singleton);
  CHECK(lattice[ep.argmax_set[0]] == std::vector<double>{0.5, 0.25, 0.25});
}

TEST_CASE("variance_star") {
  const double mu = 0.4, sigma2 = 0.7, h = 0.01;
  std::vector<double> pts, v, logs;
  for (int i = -300; i <= 300; ++i) {
    const double x = mu + h * i;
    pts.push_back(x);
    v.push_back(std::exp(-0.5 * (x - mu) * (x - mu) / sigma2));
  }
  const auto g = PossibilityGrid({Axis::real(pts)}, v);
  const double vs = variance_star(g);
  CHECK(std::abs(vs - sigma2) < 2 * h * h);
  // Fisher form: second difference of log f at the mode
  const std::size_t m = 300;
  const double d2log = (std::log(v[m + 1]) - 2 * std::log(v[m]) + std::log(v[m - 1])) / (h * h);
  CHECK(std::abs(vs + 1.0 / d2log) < 2 * h * h);
  REQUIRE(expect_star(g).variance.has_value());
  CHECK(*expect_star(g).variance == doctest::Approx(vs));

  CHECK(std::isinf(variance_star(PossibilityGrid::vacuous({uniform_axis(-1, 1, 5)}))));

  const auto tri_axis = uniform_axis(-1, 1, 21);
  std::vector<double> tri;
  for (double x : tri_axis.points) tri.push_back(std::max(0.0, 1.0 - std::abs(x)));
  const double th = 0.1;
  const double d2 = (tri[9] - 2 * tri[10] + tri[11]) / (th * th);
  CHECK(variance_star(PossibilityGrid({tri_axis}, tri)) == doctest::Approx(-1.0 / d2));

  CHECK_THROWS_AS(variance_star(PossibilityGrid({uniform_axis(0, 1, 3)}, {1.0, 0.5, 0.2})), std::domain_error);
}

TEST_CASE("upper_expectation on the die example") {
  const DiscreteOPM opm(PossibilityGrid::vacuous({Axis::range(6)}), Eigen::MatrixXd::Constant(6, 6, 1.0 / 6.0));
  for (int s = 2; s <= 12; ++s) {
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(6, 6);
    for (int t = 1; t <= 6; ++t)
      for (int x = 1; x <= 6; ++x) phi(t - 1, x - 1) = t + x == s;
    CHECK(std::abs(upper_expectation(opm, phi, Ordering::UncertainThenRandom) - 1.0 / 6.0) <= 1e-15);
    CHECK(std::abs(upper_expectation(opm, phi, Ordering::RandomThenUncertain) -
                   std::min((s - 1) / 6.0, (13 - s) / 6.0)) <= 1e-15);
  }
  const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(6, 6);
  CHECK(upper_expectation(opm, one, Ordering::UncertainThenRandom) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(upper_expectation(opm, one, Ordering::RandomThenUncertain) == doctest::Approx(1.0).epsilon(1e-15));

  Eigen::MatrixXd laws(2, 2);
  laws << 0.5, 0.5, 0.9, 0.1;
  const DiscreteOPM dependent(PossibilityGrid::vacuous({Axis::range(2)}), laws);
  CHECK_THROWS_AS(upper_expectation(dependent, Eigen::MatrixXd::Ones(2, 2), Ordering::RandomThenUncertain),
                  std::invalid_argument);
  CHECK_THROWS_AS(DiscreteOPM(PossibilityGrid::vacuous({Axis::range(2)}), Eigen::MatrixXd::Ones(2, 2)),
                  std::invalid_argument);
}

TEST_CASE("upper/lower probability sandwich") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t nt = 4, nx = 5;
    auto fv = props::random_values(rng, nt);
    const auto f = PossibilityGrid::from_unnormalized({Axis::range(nt)}, fv);
    Eigen::MatrixXd laws(nt, nx);
    for (Eigen::Index i = 0; i < laws.size(); ++i) laws(i) = u(rng) + 1e-3;
    for (Eigen::Index r = 0; r < laws.rows(); ++r) laws.row(r) /= laws.row(r).sum();
    const DiscreteOPM opm(f, laws);
    const std::size_t mode = expect_star(f).argmax_set.front();
    for (int b = 0; b < 10; ++b) {
      Eigen::MatrixXd B(nt, nx), Bc(nt, nx);
      Eigen::RowVectorXd ind(nx);
      for (auto& x : ind) x = u(rng) < 0.5;
      B = ind.replicate(nt, 1);
      Bc = (1.0 - ind.array()).matrix().replicate(nt, 1);
      const double q = laws.row(static_cast<Eigen::Index>(mode)).dot(ind);
      const double upper = credibility(opm, B, Ordering::UncertainThenRandom);
      const double lower = 1.0 - credibility(opm, Bc, Ordering::UncertainThenRandom);
      CHECK(lower <= q + 1e-12);
      CHECK(q <= upper + 1e-12);
    }
  }
}

TEST_CASE("independence envelope") {
  const auto env = independence_envelope(kJoint);
  CHECK(env.at(0, 0) == doctest::Approx(1.0));
  CHECK(env.at(0, 1) == doctest::Approx(std::sqrt(1.0 * 0.4)));
  CHECK(env.at(1, 0) == doctest::Approx(std::sqrt(0.7 * 1.0)));
  CHECK(env.at(1, 1) == doctest::Approx(std::sqrt(0.7 * 0.4)));
  const auto ind = grid2({1, 0, 1, 0}, 2, 2);
  CHECK(independence_envelope(ind).values() == ind.values());
  CHECK(is_independent(env, 1e-12));
  CHECK(is_independent(product(PossibilityGrid({Axis::range(2)}, {1.0, 0.3}),
                               PossibilityGrid({Axis::range(3)}, {0.2, 1.0, 0.9})),
                       1e-15));
  CHECK_FALSE(is_independent(grid2({1, 0, 0, 1}, 2, 2), 1e-6));
}

TEST_CASE("simplex lattice") {
  const auto pts = simplex_lattice(3, 4);
  CHECK(pts.size() == 15);
  for (const auto& p : pts) CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0));
}

TEST_CASE("property suites") {
  CHECK(props::normalization(200, 1) == 0);
  CHECK(props::marginal_condition(200, 2) == 0);
  CHECK(props::injective_round_trip(200, 3) == 0);
  CHECK(props::envelope_dominance(200, 4) == 0);
  CHECK(props::ordering_bound(200, 5) == 0);
}
