#pragma once

// Tracking scenario with a detection probability and uniform background
// noise, the o.p.m.-based outlier-robust filter, a fully informed
// probabilistic Gaussian-sum baseline, and Monte Carlo aggregation.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "opm/hypothesis.hpp"
#include "opm/mixed_kalman.hpp"

namespace opm {

struct ScenarioConfig {
  double delta = 0.1;
  std::size_t n_steps = 100;
  double p_d = 0.9;
  std::optional<double> alpha;  // defaults to 1 - p_d
  double R = 0.5;
  double obs_lo = -5.0;
  double obs_hi = 5.0;
  double init_std = 0.1;
  std::uint64_t seed = 1;
  ReductionConfig reduction;
  // Prior of the o.p.m. filter: position variance and velocity spread.
  double opm_position_var = 1.0;
  double opm_velocity_var = 1.0;

  double clutter_alpha() const { return alpha.value_or(1.0 - p_d); }
  double window_width() const { return obs_hi - obs_lo; }

  /// Throws std::invalid_argument on an invalid configuration.
  void validate() const;

  /// Constant-velocity model on (position, velocity).
  Matrix F() const;
  Matrix G() const;
  Matrix H() const;
  Matrix R_matrix() const;
  /// Position random, velocity deterministic.
  ModelMatrices mixed_model() const;
  /// Position and velocity both random.
  LinearGaussianModel joint_model() const;
};

struct ScenarioTrace {
  std::vector<Vector> truth;  // (position, velocity) at steps 1..N
  std::vector<Source> sources;
  std::vector<double> observations;
};

ScenarioTrace generate_scenario(const ScenarioConfig& cfg, std::mt19937_64& rng);
ScenarioTrace generate_scenario(const ScenarioConfig& cfg);  // seeded from cfg.seed

struct FilterOutput {
  std::vector<double> positions;
  std::vector<Source> sources;
};

FilterOutput run_opm_filter(const ScenarioTrace& trace, const ScenarioConfig& cfg);

/// Gaussian sum over (position, velocity) branches with probabilities.
using ProbabilisticMixture = std::vector<Hypothesis<GaussianDensity, Source>>;

/// Predict + update of every branch with one observation; weights
/// p_d N(y; Hm, S) for the signal child and (1 - p_d) / |window| for the
/// noise child, normalized to sum 1. No reduction.
ProbabilisticMixture baseline_step(const ProbabilisticMixture& mixture, double y, const ScenarioConfig& cfg,
                                   const LinearGaussianModel& model);

/// Prune, additive merge and cap, renormalizing to sum 1.
ProbabilisticMixture reduce_probabilistic(const ProbabilisticMixture& mixture, const ReductionConfig& cfg);

FilterOutput run_probabilistic_baseline(const ScenarioTrace& trace, const ScenarioConfig& cfg);

/// sqrt((1/M) sum_i sum_k (xhat^i_k - x^i_k)^2); the time sum is not normalized.
double rmse(std::span<const std::vector<double>> estimates, std::span<const std::vector<double>> truths);

/// Fraction of (run, step) pairs whose estimated source differs from the truth.
double association_error(std::span<const std::vector<Source>> estimates,
                         std::span<const std::vector<Source>> truths);

struct TableRow {
  std::string method;
  double p_d = 0.0;
  double rmse = 0.0;
  double assoc_error = 0.0;
  std::size_t runs = 0;
  std::uint64_t seed = 0;
};

struct MonteCarloConfig {
  std::vector<double> p_d_values{0.9, 0.8, 0.7};
  std::size_t runs = 200;
  std::uint64_t master_seed = 1;
  std::size_t threads = 0;  // 0: hardware concurrency
  ScenarioConfig base;      // p_d and seed are overwritten per run
};

/// Seed of run `run` at the `pd_index`-th detection probability.
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t pd_index, std::size_t run);

/// Per-run outputs for one detection probability, ordered by run index.
struct RunBatch {
  std::vector<std::vector<double>> truth_positions;
  std::vector<std::vector<Source>> truth_sources;
  std::vector<std::vector<double>> opm_positions, prob_positions;
  std::vector<std::vector<Source>> opm_sources, prob_sources;
};

RunBatch run_batch(const MonteCarloConfig& cfg, std::size_t pd_index);

/// Two rows per detection probability (o.p.m. first, then probabilistic).
std::vector<TableRow> monte_carlo(const MonteCarloConfig& cfg);

std::string format_csv(std::span<const TableRow> rows);
std::string format_json(std::span<const TableRow> rows);

}  // namespace opm
