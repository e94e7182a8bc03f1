#include "opm/hypothesis.hpp"

namespace opm {

AssociationMixture da_predict(const AssociationMixture& mixture, const LinearGaussianModel& model) {
  std::vector<AssociationHypothesis> out;
  out.reserve(mixture.size());
  for (const auto& h : mixture.components())
    out.push_back(AssociationHypothesis{h.labels, h.weight, kalman_predict(h.state, model)});
  return AssociationMixture(std::move(out));
}

AssociationMixture da_update(const AssociationMixture& mixture, std::span<const Vector> scan,
                             const LinearGaussianModel& model) {
  if (scan.empty()) throw std::invalid_argument("da_update: empty scan");
  std::vector<AssociationHypothesis> out;
  out.reserve(mixture.size() * scan.size());
  for (const auto& parent : mixture.components()) {
    for (std::size_t i = 0; i < scan.size(); ++i) {
      const double evidence = possibility_marginal_likelihood(parent.state, scan[i], model);
      auto labels = parent.labels;
      labels.push_back(i);
      out.push_back(AssociationHypothesis{std::move(labels), parent.weight * evidence,
                                          kalman_update(parent.state, scan[i], model).posterior});
    }
  }
  return AssociationMixture(std::move(out));
}

OutlierMixture outlier_predict(const OutlierMixture& mixture, const ModelMatrices& model) {
  std::vector<OutlierHypothesis> out;
  out.reserve(mixture.size());
  for (const auto& h : mixture.components())
    out.push_back(OutlierHypothesis{h.labels, h.weight, predict(h.state, model)});
  return OutlierMixture(std::move(out));
}

OutlierMixture outlier_update(const OutlierMixture& predicted, const Vector& y, const ClutterModel& clutter,
                              const ModelMatrices& model) {
  std::vector<OutlierHypothesis> out;
  out.reserve(2 * predicted.size());
  for (const auto& parent : predicted.components()) {
    auto [posterior, gains] = update(parent.state, y, model);
    auto signal_labels = parent.labels;
    signal_labels.push_back(Source::Signal);
    out.push_back(OutlierHypothesis{std::move(signal_labels), parent.weight * gains.likelihood, std::move(posterior)});

    auto noise_labels = parent.labels;
    noise_labels.push_back(Source::Noise);
    out.push_back(OutlierHypothesis{std::move(noise_labels), parent.weight * clutter.alpha, parent.state});
  }
  return OutlierMixture(std::move(out));
}

}  // namespace opm
