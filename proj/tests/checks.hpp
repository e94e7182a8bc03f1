#pragma once

// Scenario-level checks shared by the unit tests and the acceptance binary.

#include <cmath>
#include <random>
#include <vector>

#include "opm/hypothesis.hpp"

namespace opm::checks {

struct ClutterInvariance {
  double max_weight_change = 0.0;
  bool same_map_labels = true;
  double min_sigma_distance = 0.0;
};

/// Data-association pipeline on a constant-velocity target with two in-range
/// clutter points per scan, run once as is and once with an extra far
/// observation appended to every scan.
inline ClutterInvariance clutter_invariance(std::size_t runs, std::size_t steps, std::uint64_t seed,
                                            double sigmas = 30.0) {
  const double d = 0.1;
  Matrix F(2, 2), G(2, 1), H(1, 2);
  F << 1, d, 0, 1;
  G << d * d / 2, d;
  H << 1, 0;
  const LinearGaussianModel model{F, G * G.transpose(), H, Matrix::Constant(1, 1, 0.5)};
  ReductionConfig reduction;
  reduction.enable_merge = false;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> clutter(-5.0, 5.0);
  ClutterInvariance result;
  result.min_sigma_distance = INFINITY;
  for (std::size_t r = 0; r < runs; ++r) {
    const GaussianDensity prior(Vector::Zero(2), Matrix::Identity(2, 2));
    auto plain = AssociationMixture::single(prior);
    auto injected = AssociationMixture::single(prior);
    Vector x = Vector::Zero(2);
    for (std::size_t k = 0; k < steps; ++k) {
      x = F * x + G * n(rng);
      std::vector<Vector> scan{Vector::Constant(1, x(0) + std::sqrt(0.5) * n(rng)), Vector::Constant(1, clutter(rng)),
                               Vector::Constant(1, clutter(rng))};
      std::shuffle(scan.begin(), scan.end(), rng);

      injected = da_predict(injected, model);
      // far point: beyond `sigmas` innovation standard deviations of every branch
      double far = 0.0;
      for (const auto& h : injected.components()) {
        const double s = std::sqrt((H * h.state.covariance() * H.transpose())(0, 0) + 0.5);
        far = std::max(far, std::abs(h.state.mean()(0)) + sigmas * s);
      }
      for (const auto& h : injected.components()) {
        const double s = std::sqrt((H * h.state.covariance() * H.transpose())(0, 0) + 0.5);
        result.min_sigma_distance = std::min(result.min_sigma_distance, std::abs(far + 1.0 - h.state.mean()(0)) / s);
      }
      auto extended = scan;
      extended.push_back(Vector::Constant(1, far + 1.0));

      plain = reduce(da_update(da_predict(plain, model), scan, model), reduction);
      injected = reduce(da_update(injected, extended, model), reduction);

      const auto a = map_extract(plain), b = map_extract(injected);
      result.same_map_labels = result.same_map_labels && a.labels == b.labels;
      result.max_weight_change =
          std::max(result.max_weight_change, std::abs(plain[a.index].weight - injected[b.index].weight));
      // the same branch in both mixtures carries the same weight
      for (const auto& h : plain.components())
        for (const auto& g : injected.components())
          if (h.labels == g.labels) result.max_weight_change = std::max(result.max_weight_change, std::abs(h.weight - g.weight));
    }
  }
  return result;
}

}  // namespace opm::checks

#include "opm/bandit.hpp"
#include "opm/possibility.hpp"

namespace opm::checks {

/// Brute-force sup of posterior * (coefficients . theta) over a simplex lattice.
inline double lattice_sup(const BanditPosterior& p, const std::vector<double>& coef, std::size_t resolution) {
  double best = 0.0;
  for (const auto& theta : simplex_lattice(p.outcomes(), resolution)) {
    double lin = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) lin += coef[i] * theta[i];
    if (lin > 0.0) best = std::max(best, posterior_eval(p, theta) * lin);
  }
  return best;
}

/// Closed form of the maximum credible reward after one play of outcome y:
/// sup over t of t (r_y t + r_N (1 - t)).
inline double reward_after_one_play(double ry, double rN) {
  if (ry == rN) return rN;
  return rN >= 2 * ry ? rN * rN / (4 * (rN - ry)) : ry;
}

inline double printed_reward_after_one_play(double ry, double rN) { return rN / (4 * (rN - ry)); }

}  // namespace opm::checks
