#include "opm/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "opm/possibility.hpp"

namespace opm {

namespace {

constexpr std::size_t kStarts = 10;
constexpr std::size_t kLatticeResolution = 200;
constexpr std::size_t kLatticeMaxDim = 3;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Euclidean projection onto the probability simplex (sort-based).
std::vector<double> project_to_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) tau = t;
  }
  for (double& x : v) x = std::max(x - tau, 0.0);
  return v;
}

// Reduced problem over the observed outcomes plus the best unobserved one:
// any mass on unobserved outcomes is best placed on the largest coefficient.
struct Reduced {
  std::vector<std::size_t> index;  // positions in the full simplex
  std::vector<double> count;
  std::vector<double> coef;

  double log_objective(const std::vector<double>& z) const {
    double linear = 0.0;
    double log_value = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      linear += coef[j] * z[j];
      if (count[j] > 0.0) {
        if (z[j] <= 0.0) return kNegInf;
        log_value += count[j] * std::log(z[j]);
      }
    }
    if (linear <= 0.0) return kNegInf;
    return log_value + std::log(linear);
  }

  std::vector<double> gradient(const std::vector<double>& z) const {
    double linear = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) linear += coef[j] * z[j];
    std::vector<double> g(z.size());
    for (std::size_t j = 0; j < z.size(); ++j)
      g[j] = coef[j] / linear + (count[j] > 0.0 ? count[j] / z[j] : 0.0);
    return g;
  }
};

std::vector<double> ascend(const Reduced& r, std::vector<double> z) {
  double value = r.log_objective(z);
  double step = 1e-2;
  for (int iter = 0; iter < 20000 && std::isfinite(value); ++iter) {
    const auto g = r.gradient(z);
    bool moved = false;
    while (step > 1e-20) {
      std::vector<double> trial(z.size());
      for (std::size_t j = 0; j < z.size(); ++j) trial[j] = z[j] + step * g[j];
      trial = project_to_simplex(std::move(trial));
      double predicted = 0.0;
      double change = 0.0;
      for (std::size_t j = 0; j < z.size(); ++j) {
        predicted += g[j] * (trial[j] - z[j]);
        change = std::max(change, std::abs(trial[j] - z[j]));
      }
      const double trial_value = r.log_objective(trial);
      if (trial_value >= value + 1e-4 * predicted && trial_value >= value) {
        moved = change > 1e-16;
        z = std::move(trial);
        value = trial_value;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return z;
}

double full_objective(const BanditPosterior& p, std::span<const double> theta, std::span<const double> coef) {
  double linear = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) linear += coef[i] * theta[i];
  return posterior_eval(p, theta) * linear;
}

}  // namespace

BanditPosterior::BanditPosterior(std::vector<std::size_t> counts, std::vector<double> reward)
    : counts_(std::move(counts)), reward_(std::move(reward)) {
  if (counts_.empty()) throw std::invalid_argument("bandit needs at least one outcome");
  if (reward_.size() != counts_.size()) throw std::invalid_argument("one reward per outcome is required");
  for (std::size_t i = 0; i < reward_.size(); ++i) {
    if (!(reward_[i] >= 0.0) || !std::isfinite(reward_[i])) throw std::invalid_argument("rewards must be nonnegative");
    if (i > 0 && !(reward_[i] > reward_[i - 1])) throw std::invalid_argument("rewards must be strictly increasing");
  }
  total_ = std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

BanditPosterior BanditPosterior::unplayed(std::vector<double> reward) {
  std::vector<std::size_t> counts(reward.size(), 0);
  return BanditPosterior(std::move(counts), std::move(reward));
}

BanditPosterior BanditPosterior::observe(std::size_t outcome) const {
  if (outcome >= counts_.size()) throw std::out_of_range("bandit outcome out of range");
  auto counts = counts_;
  ++counts[outcome];
  return BanditPosterior(std::move(counts), reward_);
}

double posterior_eval(const BanditPosterior& p, std::span<const double> theta) {
  if (theta.size() != p.outcomes()) throw std::invalid_argument("simplex point has the wrong dimension");
  double sum = 0.0;
  for (double t : theta) {
    if (!(t >= -1e-12) || !std::isfinite(t)) throw std::invalid_argument("point is off the simplex");
    sum += t;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("point is off the simplex");
  if (p.total() == 0) return 1.0;

  const double k = static_cast<double>(p.total());
  double log_value = k * std::log(k);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const auto ki = p.counts()[i];
    if (ki == 0) continue;
    if (theta[i] <= 0.0) return 0.0;
    log_value += static_cast<double>(ki) * (std::log(theta[i]) - std::log(static_cast<double>(ki)));
  }
  return std::min(1.0, std::exp(log_value));
}

SimplexMode posterior_mode(const BanditPosterior& p) {
  if (p.total() == 0) return {true, {}};
  std::vector<double> point(p.outcomes());
  const double k = static_cast<double>(p.total());
  for (std::size_t i = 0; i < point.size(); ++i) point[i] = static_cast<double>(p.counts()[i]) / k;
  return {false, std::move(point)};
}

SimplexMaximum maximize_on_simplex(const BanditPosterior& p, std::span<const double> coefficients) {
  const std::size_t n = p.outcomes();
  if (coefficients.size() != n) throw std::invalid_argument("one coefficient per outcome is required");
  for (double c : coefficients)
    if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("coefficients must be nonnegative");

  Reduced r;
  std::size_t best_free = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (p.counts()[i] > 0) {
      r.index.push_back(i);
      r.count.push_back(static_cast<double>(p.counts()[i]));
      r.coef.push_back(coefficients[i]);
    } else if (best_free == n || coefficients[i] > coefficients[best_free]) {
      best_free = i;
    }
  }
  if (best_free < n) {
    r.index.push_back(best_free);
    r.count.push_back(0.0);
    r.coef.push_back(coefficients[best_free]);
  }
  const std::size_t d = r.index.size();

  auto expand = [&](const std::vector<double>& z) {
    std::vector<double> theta(n, 0.0);
    for (std::size_t j = 0; j < d; ++j) theta[r.index[j]] = z[j];
    return theta;
  };

  SimplexMaximum best{-1.0, {}};
  auto consider = [&](const std::vector<double>& z) {
    const auto theta = expand(z);
    const double v = full_objective(p, theta, coefficients);
    if (v > best.value) best = {v, theta};
  };

  if (d == 1) {
    consider({1.0});
    return best;
  }

  std::mt19937_64 rng(0x5eedULL);
  std::exponential_distribution<double> expo(1.0);
  for (std::size_t s = 0; s < kStarts; ++s) {
    std::vector<double> z(d, 1.0 / static_cast<double>(d));
    if (s > 0) {
      double total = 0.0;
      for (double& x : z) total += (x = expo(rng) + 1e-3);
      for (double& x : z) x /= total;
    }
    consider(ascend(r, std::move(z)));
  }

  if (d <= kLatticeMaxDim) {
    for (const auto& z : simplex_lattice(d, kLatticeResolution)) consider(z);
  }
  return best;
}

double event_credibility(const BanditPosterior& p, std::span<const std::size_t> event) {
  if (event.empty()) throw std::invalid_argument("event must be non-empty");
  std::vector<double> indicator(p.outcomes(), 0.0);
  for (auto i : event) {
    if (i >= p.outcomes()) throw std::out_of_range("event outcome out of range");
    indicator[i] = 1.0;
  }
  return maximize_on_simplex(p, indicator).value;
}

double max_credible_reward(const BanditPosterior& p) { return maximize_on_simplex(p, p.reward()).value; }

RewardRange expected_reward_star(const BanditPosterior& p) {
  if (p.total() == 0) return {p.reward().front(), p.reward().back()};
  const auto mode = posterior_mode(p);
  double mean = 0.0;
  for (std::size_t i = 0; i < p.outcomes(); ++i) mean += mode.point[i] * p.reward()[i];
  return {mean, mean};
}

BanditChoice select_bandit(const BanditPosterior& first, const BanditPosterior& second) {
  if (first.reward() != second.reward()) throw std::invalid_argument("bandits must share the reward map");
  return max_credible_reward(second) > max_credible_reward(first) ? BanditChoice::Second : BanditChoice::First;
}

}  // namespace opm
