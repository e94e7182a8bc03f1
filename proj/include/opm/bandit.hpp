#pragma once

// Multi-armed bandit with unknown outcome probabilities described by a
// possibility function on the simplex. Starting from the vacuous prior and
// observing outcome counts k_1..k_N, the posterior possibility is
//
//   f(theta) = k^k (theta_1/k_1)^{k_1} ... (theta_N/k_N)^{k_N}
//
// with 0^0 = 1.

#include <cstddef>
#include <span>
#include <vector>

namespace opm {

class BanditPosterior {
 public:
  /// `reward` must be nonnegative and strictly increasing; outcome i (0-based)
  /// pays reward[i].
  BanditPosterior(std::vector<std::size_t> counts, std::vector<double> reward);

  /// Vacuous posterior over `reward.size()` outcomes.
  static BanditPosterior unplayed(std::vector<double> reward);

  BanditPosterior observe(std::size_t outcome) const;

  const std::vector<std::size_t>& counts() const { return counts_; }
  const std::vector<double>& reward() const { return reward_; }
  std::size_t outcomes() const { return counts_.size(); }
  std::size_t total() const { return total_; }

 private:
  std::vector<std::size_t> counts_;
  std::vector<double> reward_;
  std::size_t total_ = 0;
};

/// Throws std::invalid_argument when theta is off the simplex (1e-12).
double posterior_eval(const BanditPosterior& p, std::span<const double> theta);

struct SimplexMode {
  bool whole_simplex = false;  // k = 0: every point is a mode
  std::vector<double> point;   // counts / k otherwise
};

SimplexMode posterior_mode(const BanditPosterior& p);

struct SimplexMaximum {
  double value = 0.0;
  std::vector<double> argmax;
};

/// sup over the simplex of posterior_eval(theta) * sum_i coefficients[i] theta_i
/// for nonnegative coefficients.
SimplexMaximum maximize_on_simplex(const BanditPosterior& p, std::span<const double> coefficients);

/// Upper probability of the next outcome falling in `event` (0-based indices).
double event_credibility(const BanditPosterior& p, std::span<const std::size_t> event);

/// Upper expectation of the next reward.
double max_credible_reward(const BanditPosterior& p);

struct RewardRange {
  double lo = 0.0;
  double hi = 0.0;
  bool is_point() const { return lo == hi; }
};

/// Reward expected under the posterior mode; the whole reward range when
/// the bandit has never been played.
RewardRange expected_reward_star(const BanditPosterior& p);

enum class BanditChoice { First, Second };

/// The bandit with strictly larger maximum credible reward; ties go to the first.
BanditChoice select_bandit(const BanditPosterior& first, const BanditPosterior& second);

}  // namespace opm
