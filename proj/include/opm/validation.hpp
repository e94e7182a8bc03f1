#pragma once

// Oracle checks shared by the CLI `validate` subcommand and the test suite.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "opm/mixed_kalman.hpp"

namespace opm::validation {

/// Random mixed model: block upper-triangular F with diagonal blocks of
/// spectral norm <= 1, full-rank square G, H on x only, SPD R.
ModelMatrices random_model(std::mt19937_64& rng, Eigen::Index x_dim, Eigen::Index theta_dim, Eigen::Index y_dim);

/// Random SPD joint prior over (x, theta).
JointGaussian random_prior(std::mt19937_64& rng, Eigen::Index dim);

/// Joint Kalman filter written with explicit inverses, independent of the
/// library's recursion.
JointGaussian oracle_predict(const JointGaussian& s, const Matrix& F, const Matrix& Q);
JointGaussian oracle_update(const JointGaussian& s, const Vector& y, const Matrix& H, const Matrix& R);

struct CheckResult {
  std::string name;
  bool passed = false;
  double max_error = 0.0;
  std::string detail;
};

/// Runs predict/update through recover_joint against the joint oracle on
/// `instances` random models with `steps` simulated observations each.
CheckResult kalman_equivalence(std::size_t instances = 20, std::size_t steps = 100, std::uint64_t seed = 2024,
                               double tolerance = 1e-9);

/// L_n in [0,1] over `calls` random updates.
CheckResult likelihood_bound(std::size_t calls = 100000, std::uint64_t seed = 7);

/// Normal possibility pushforward and sum against grid oracles.
CheckResult gaussian_algebra(double tolerance = 1e-6);

/// Upper expectations of the two-dice example in both orderings.
CheckResult die_example(double tolerance = 1e-15);

std::vector<CheckResult> run_all();

}  // namespace opm::validation
