#pragma once

// Hypothesis-indexed filters: max-mixtures whose components carry a label
// sequence, a possibility weight and a conditional state. Covers data
// association over observation indices and the outlier-robust filter over
// source labels {signal, noise}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "opm/gaussian.hpp"
#include "opm/mixed_kalman.hpp"

namespace opm {

enum class Source : char { Signal = 's', Noise = 'n' };

template <typename State, typename Label>
struct Hypothesis {
  std::vector<Label> labels;
  double weight = 1.0;
  State state;
};

/// Non-empty set of hypotheses whose largest weight is exactly 1.
template <typename State, typename Label>
class MaxMixture {
 public:
  using Component = Hypothesis<State, Label>;

  explicit MaxMixture(std::vector<Component> components) : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("max-mixture must not be empty");
    double top = 0.0;
    for (const auto& c : components_) {
      if (!(c.weight >= 0.0) || !std::isfinite(c.weight))
        throw std::invalid_argument("hypothesis weight must be finite and nonnegative");
      top = std::max(top, c.weight);
    }
    if (top <= 0.0) throw std::domain_error("max-mixture has no credible hypothesis");
    for (auto& c : components_) c.weight /= top;
  }

  static MaxMixture single(State state) { return MaxMixture({Component{{}, 1.0, std::move(state)}}); }

  const std::vector<Component>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  const Component& operator[](std::size_t i) const { return components_[i]; }

  std::vector<double> weights() const {
    std::vector<double> w;
    w.reserve(components_.size());
    for (const auto& c : components_) w.push_back(c.weight);
    return w;
  }

 private:
  std::vector<Component> components_;
};

using AssociationHypothesis = Hypothesis<GaussianDensity, std::size_t>;
using AssociationMixture = MaxMixture<GaussianDensity, std::size_t>;
using OutlierHypothesis = Hypothesis<ConditionalGaussianOPM, Source>;
using OutlierMixture = MaxMixture<ConditionalGaussianOPM, Source>;

/// Credibility alpha in [0,1] that an observation comes from background noise.
struct ClutterModel {
  double alpha;

  explicit ClutterModel(double a) : alpha(a) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("clutter credibility must lie in [0,1]");
  }
};

// Joint moments of a branch state, used for merging.
inline JointGaussian joint_moments(const GaussianDensity& s) { return {s.mean(), s.covariance()}; }
inline JointGaussian joint_moments(const ConditionalGaussianOPM& s) { return recover_joint(s); }
inline GaussianDensity from_moments(const JointGaussian& j, const GaussianDensity&) {
  return GaussianDensity(j.mean, symmetrized(j.cov));
}
inline ConditionalGaussianOPM from_moments(const JointGaussian& j, const ConditionalGaussianOPM& like) {
  return from_joint(j, like.x_dim());
}

// Data association with one true observation (index) per scan.
AssociationMixture da_predict(const AssociationMixture& mixture, const LinearGaussianModel& model);
AssociationMixture da_update(const AssociationMixture& mixture, std::span<const Vector> scan,
                             const LinearGaussianModel& model);

// Outlier-robust filter.
OutlierMixture outlier_predict(const OutlierMixture& mixture, const ModelMatrices& model);
/// Expects a predicted mixture. Each parent yields a signal child (updated
/// with y, weight * L_n(y)) followed by a noise child (unchanged state,
/// weight * alpha).
OutlierMixture outlier_update(const OutlierMixture& predicted, const Vector& y, const ClutterModel& clutter,
                              const ModelMatrices& model);

namespace detail {

/// Greedy highest-weight-first clustering: each unassigned component within
/// squared Mahalanobis distance `threshold` of the current absorber (under
/// the absorber's joint covariance) is moment-matched into it. `sum_weights`
/// selects additive (probabilistic) or max (possibilistic) merged weights.
template <typename Component>
std::vector<Component> merge_components(const std::vector<Component>& in, double threshold, bool sum_weights) {
  if (!(threshold > 0.0)) throw std::invalid_argument("merge threshold must be positive");
  std::vector<std::size_t> order(in.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return in[a].weight > in[b].weight; });

  std::vector<JointGaussian> moments;
  moments.reserve(in.size());
  for (const auto& c : in) moments.push_back(joint_moments(c.state));

  std::vector<bool> used(in.size(), false);
  std::vector<Component> out;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const std::size_t a = order[oi];
    if (used[a]) continue;
    used[a] = true;
    std::vector<std::size_t> cluster{a};
    Eigen::LLT<Matrix> llt(moments[a].cov);
    if (llt.info() != Eigen::Success) throw std::domain_error("merge: absorber covariance is not positive definite");
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const std::size_t b = order[oj];
      if (used[b]) continue;
      const Vector d = moments[b].mean - moments[a].mean;
      if (d.dot(llt.solve(d)) <= threshold) {
        used[b] = true;
        cluster.push_back(b);
      }
    }
    if (cluster.size() == 1) {
      out.push_back(in[a]);
      continue;
    }
    double total = 0.0;
    double merged_weight = 0.0;
    for (auto k : cluster) {
      total += in[k].weight;
      merged_weight = sum_weights ? merged_weight + in[k].weight : std::max(merged_weight, in[k].weight);
    }
    Vector mean = Vector::Zero(moments[a].mean.size());
    if (total > 0.0) {
      for (auto k : cluster) mean += (in[k].weight / total) * moments[k].mean;
    } else {
      mean = moments[a].mean;
    }
    Matrix cov = Matrix::Zero(moments[a].cov.rows(), moments[a].cov.cols());
    for (auto k : cluster) {
      const double rel = total > 0.0 ? in[k].weight / total : 1.0 / static_cast<double>(cluster.size());
      const Vector d = moments[k].mean - mean;
      cov += rel * (moments[k].cov + d * d.transpose());
    }
    Component merged = in[a];
    merged.weight = merged_weight;
    merged.state = from_moments(JointGaussian{mean, symmetrized(cov)}, in[a].state);
    out.push_back(std::move(merged));
  }
  return out;
}

}  // namespace detail

/// Drops hypotheses with weight strictly below `threshold`; the max-weight
/// hypothesis (weight 1) always survives.
template <typename State, typename Label>
MaxMixture<State, Label> prune(const MaxMixture<State, Label>& mixture, double threshold) {
  if (!(threshold >= 0.0 && threshold < 1.0)) throw std::invalid_argument("prune threshold must lie in [0,1)");
  std::vector<Hypothesis<State, Label>> kept;
  for (const auto& c : mixture.components())
    if (!(c.weight < threshold)) kept.push_back(c);
  return MaxMixture<State, Label>(std::move(kept));
}

/// Max-weight merging of hypotheses closer than `mahalanobis_sq_threshold`.
template <typename State, typename Label>
MaxMixture<State, Label> merge(const MaxMixture<State, Label>& mixture, double mahalanobis_sq_threshold) {
  return MaxMixture<State, Label>(
      detail::merge_components(mixture.components(), mahalanobis_sq_threshold, /*sum_weights=*/false));
}

/// Keeps the `max_count` largest weights (ties resolved by position).
template <typename State, typename Label>
MaxMixture<State, Label> cap(const MaxMixture<State, Label>& mixture, std::size_t max_count) {
  if (max_count == 0) throw std::invalid_argument("hypothesis cap must be at least 1");
  if (mixture.size() <= max_count) return mixture;
  const auto& in = mixture.components();
  std::vector<std::size_t> order(in.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return in[a].weight > in[b].weight; });
  order.resize(max_count);
  std::sort(order.begin(), order.end());
  std::vector<Hypothesis<State, Label>> kept;
  for (auto i : order) kept.push_back(in[i]);
  return MaxMixture<State, Label>(std::move(kept));
}

template <typename Label>
struct MapEstimate {
  std::vector<Label> labels;
  Vector mean;  // joint mean of the winning branch
  std::size_t index = 0;
};

/// Max-weight hypothesis; the earliest one wins ties.
template <typename State, typename Label>
MapEstimate<Label> map_extract(const MaxMixture<State, Label>& mixture) {
  const auto& cs = mixture.components();
  std::size_t best = 0;
  for (std::size_t i = 1; i < cs.size(); ++i)
    if (cs[i].weight > cs[best].weight) best = i;
  return MapEstimate<Label>{cs[best].labels, joint_moments(cs[best].state).mean, best};
}

struct ReductionConfig {
  double prune_threshold = 1e-3;
  double merge_threshold = 3.22;
  std::size_t max_hypotheses = 100;
  bool enable_prune = true;
  bool enable_merge = true;
};

template <typename State, typename Label>
MaxMixture<State, Label> reduce(const MaxMixture<State, Label>& mixture, const ReductionConfig& cfg) {
  auto out = mixture;
  if (cfg.enable_prune) out = prune(out, cfg.prune_threshold);
  if (cfg.enable_merge) out = merge(out, cfg.merge_threshold);
  return cap(out, cfg.max_hypotheses);
}

}  // namespace opm
