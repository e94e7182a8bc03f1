#include "opm/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace opm {

void ScenarioConfig::validate() const {
  if (!(p_d > 0.0 && p_d <= 1.0)) throw std::invalid_argument("detection probability must lie in (0,1]");
  const double a = clutter_alpha();
  if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("clutter credibility must lie in [0,1)");
  if (!(delta > 0.0)) throw std::invalid_argument("time step must be positive");
  if (!(obs_hi > obs_lo)) throw std::invalid_argument("observation window is degenerate");
  if (!(R > 0.0)) throw std::invalid_argument("observation noise variance must be positive");
  if (!(init_std >= 0.0)) throw std::invalid_argument("initial standard deviation must be nonnegative");
  if (n_steps == 0) throw std::invalid_argument("scenario needs at least one step");
}

Matrix ScenarioConfig::F() const {
  Matrix f(2, 2);
  f << 1.0, delta, 0.0, 1.0;
  return f;
}

Matrix ScenarioConfig::G() const {
  Matrix g(2, 1);
  g << delta * delta / 2.0, delta;
  return g;
}

Matrix ScenarioConfig::H() const {
  Matrix h(1, 2);
  h << 1.0, 0.0;
  return h;
}

Matrix ScenarioConfig::R_matrix() const { return Matrix::Constant(1, 1, R); }

ModelMatrices ScenarioConfig::mixed_model() const { return ModelMatrices::from_joint(F(), G(), H(), R_matrix(), 1); }

LinearGaussianModel ScenarioConfig::joint_model() const {
  const Matrix g = G();
  return {F(), g * g.transpose(), H(), R_matrix()};
}

ScenarioTrace generate_scenario(const ScenarioConfig& cfg, std::mt19937_64& rng) {
  // p_d = 0 is a valid scenario even though no filter is defined for it.
  if (!(cfg.p_d >= 0.0 && cfg.p_d <= 1.0)) throw std::invalid_argument("detection probability must lie in [0,1]");
  if (!(cfg.delta > 0.0) || !(cfg.obs_hi > cfg.obs_lo) || !(cfg.R > 0.0) || !(cfg.init_std >= 0.0))
    throw std::invalid_argument("invalid scenario configuration");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> clutter(cfg.obs_lo, cfg.obs_hi);

  const Matrix F = cfg.F();
  const Matrix G = cfg.G();
  const double noise_std = std::sqrt(cfg.R);

  Vector x(2);
  x << cfg.init_std * normal(rng), cfg.init_std * normal(rng);

  ScenarioTrace trace;
  trace.truth.reserve(cfg.n_steps);
  trace.sources.reserve(cfg.n_steps);
  trace.observations.reserve(cfg.n_steps);
  for (std::size_t k = 0; k < cfg.n_steps; ++k) {
    x = F * x + G * normal(rng);
    trace.truth.push_back(x);
    if (unit(rng) < cfg.p_d) {
      trace.sources.push_back(Source::Signal);
      trace.observations.push_back(x(0) + noise_std * normal(rng));
    } else {
      trace.sources.push_back(Source::Noise);
      trace.observations.push_back(clutter(rng));
    }
  }
  return trace;
}

ScenarioTrace generate_scenario(const ScenarioConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  return generate_scenario(cfg, rng);
}

FilterOutput run_opm_filter(const ScenarioTrace& trace, const ScenarioConfig& cfg) {
  cfg.validate();
  const ModelMatrices model = cfg.mixed_model();
  const ClutterModel clutter(cfg.clutter_alpha());
  auto mixture = OutlierMixture::single(
      ConditionalGaussianOPM::weakly_informative(1, 1, cfg.opm_position_var, cfg.opm_velocity_var));

  FilterOutput out;
  out.positions.reserve(trace.observations.size());
  out.sources.reserve(trace.observations.size());
  Vector y(1);
  for (double obs : trace.observations) {
    y(0) = obs;
    mixture = reduce(outlier_update(outlier_predict(mixture, model), y, clutter, model), cfg.reduction);
    const auto estimate = map_extract(mixture);
    out.positions.push_back(estimate.mean(0));
    out.sources.push_back(estimate.labels.back());
  }
  return out;
}

namespace {

void normalize_sum(ProbabilisticMixture& mixture) {
  double total = 0.0;
  for (const auto& h : mixture) total += h.weight;
  if (!(total > 0.0) || !std::isfinite(total)) throw std::domain_error("probabilistic mixture has zero total weight");
  for (auto& h : mixture) h.weight /= total;
}

}  // namespace

ProbabilisticMixture baseline_step(const ProbabilisticMixture& mixture, double y, const ScenarioConfig& cfg,
                                   const LinearGaussianModel& model) {
  const double clutter_density = (1.0 - cfg.p_d) / cfg.window_width();
  Vector obs(1);
  obs(0) = y;
  ProbabilisticMixture out;
  out.reserve(2 * mixture.size());
  for (const auto& parent : mixture) {
    const auto predicted = kalman_predict(parent.state, model);
    auto upd = kalman_update(predicted, obs, model);
    const double likelihood = GaussianDensity(upd.predicted_observation, upd.innovation_cov)(obs);

    auto signal_labels = parent.labels;
    signal_labels.push_back(Source::Signal);
    out.push_back({std::move(signal_labels), parent.weight * cfg.p_d * likelihood, std::move(upd.posterior)});

    auto noise_labels = parent.labels;
    noise_labels.push_back(Source::Noise);
    out.push_back({std::move(noise_labels), parent.weight * clutter_density, predicted});
  }
  normalize_sum(out);
  return out;
}

ProbabilisticMixture reduce_probabilistic(const ProbabilisticMixture& mixture, const ReductionConfig& cfg) {
  ProbabilisticMixture out;
  if (cfg.enable_prune) {
    const double top = std::max_element(mixture.begin(), mixture.end(), [](const auto& a, const auto& b) {
                         return a.weight < b.weight;
                       })->weight;
    for (const auto& h : mixture)
      if (!(h.weight < cfg.prune_threshold) || h.weight == top) out.push_back(h);
    normalize_sum(out);
  } else {
    out = mixture;
  }
  if (cfg.enable_merge) out = detail::merge_components(out, cfg.merge_threshold, /*sum_weights=*/true);
  if (out.size() > cfg.max_hypotheses) {
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.weight > b.weight; });
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(cfg.max_hypotheses), out.end());
  }
  normalize_sum(out);
  return out;
}

FilterOutput run_probabilistic_baseline(const ScenarioTrace& trace, const ScenarioConfig& cfg) {
  cfg.validate();
  const LinearGaussianModel model = cfg.joint_model();
  const double var0 = std::max(cfg.init_std * cfg.init_std, 1e-12);
  ProbabilisticMixture mixture{{{}, 1.0, GaussianDensity(Vector::Zero(2), var0 * Matrix::Identity(2, 2))}};

  FilterOutput out;
  out.positions.reserve(trace.observations.size());
  out.sources.reserve(trace.observations.size());
  for (double obs : trace.observations) {
    mixture = reduce_probabilistic(baseline_step(mixture, obs, cfg, model), cfg.reduction);
    std::size_t best = 0;
    for (std::size_t i = 1; i < mixture.size(); ++i)
      if (mixture[i].weight > mixture[best].weight) best = i;
    out.positions.push_back(mixture[best].state.mean()(0));
    out.sources.push_back(mixture[best].labels.back());
  }
  return out;
}

double rmse(std::span<const std::vector<double>> estimates, std::span<const std::vector<double>> truths) {
  if (estimates.size() != truths.size() || estimates.empty())
    throw std::invalid_argument("rmse: run counts differ or are zero");
  double total = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (estimates[i].size() != truths[i].size()) throw std::invalid_argument("rmse: step counts differ");
    for (std::size_t k = 0; k < estimates[i].size(); ++k) {
      const double e = estimates[i][k] - truths[i][k];
      total += e * e;
    }
  }
  return std::sqrt(total / static_cast<double>(estimates.size()));
}

double association_error(std::span<const std::vector<Source>> estimates,
                         std::span<const std::vector<Source>> truths) {
  if (estimates.size() != truths.size() || estimates.empty())
    throw std::invalid_argument("association_error: run counts differ or are zero");
  std::size_t wrong = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (estimates[i].size() != truths[i].size()) throw std::invalid_argument("association_error: step counts differ");
    for (std::size_t k = 0; k < estimates[i].size(); ++k) wrong += estimates[i][k] != truths[i][k];
    total += estimates[i].size();
  }
  if (total == 0) throw std::invalid_argument("association_error: no steps");
  return static_cast<double>(wrong) / static_cast<double>(total);
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t pd_index, std::size_t run) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(pd_index), static_cast<std::uint32_t>(run),
                    static_cast<std::uint32_t>(run >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

RunBatch run_batch(const MonteCarloConfig& cfg, std::size_t pd_index) {
  if (cfg.runs == 0) throw std::invalid_argument("Monte Carlo needs at least one run");
  if (pd_index >= cfg.p_d_values.size()) throw std::out_of_range("detection probability index out of range");
  const std::size_t m = cfg.runs;
  RunBatch batch;
  batch.truth_positions.resize(m);
  batch.truth_sources.resize(m);
  batch.opm_positions.resize(m);
  batch.prob_positions.resize(m);
  batch.opm_sources.resize(m);
  batch.prob_sources.resize(m);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < m; i = next++) {
      try {
        ScenarioConfig run_cfg = cfg.base;
        run_cfg.p_d = cfg.p_d_values[pd_index];
        run_cfg.seed = run_seed(cfg.master_seed, pd_index, i);
        const auto trace = generate_scenario(run_cfg);
        auto opm_out = run_opm_filter(trace, run_cfg);
        auto prob_out = run_probabilistic_baseline(trace, run_cfg);
        batch.truth_positions[i].reserve(trace.truth.size());
        for (const auto& x : trace.truth) batch.truth_positions[i].push_back(x(0));
        batch.truth_sources[i] = trace.sources;
        batch.opm_positions[i] = std::move(opm_out.positions);
        batch.opm_sources[i] = std::move(opm_out.sources);
        batch.prob_positions[i] = std::move(prob_out.positions);
        batch.prob_sources[i] = std::move(prob_out.sources);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = m;
      }
    }
  };

  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, m);
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return batch;
}

std::vector<TableRow> monte_carlo(const MonteCarloConfig& cfg) {
  std::vector<TableRow> rows;
  for (std::size_t j = 0; j < cfg.p_d_values.size(); ++j) {
    const auto batch = run_batch(cfg, j);
    const double pd = cfg.p_d_values[j];
    rows.push_back({"opm", pd, rmse(batch.opm_positions, batch.truth_positions),
                    association_error(batch.opm_sources, batch.truth_sources), cfg.runs, cfg.master_seed});
    rows.push_back({"probabilistic", pd, rmse(batch.prob_positions, batch.truth_positions),
                    association_error(batch.prob_sources, batch.truth_sources), cfg.runs, cfg.master_seed});
  }
  return rows;
}

namespace {

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string format_csv(std::span<const TableRow> rows) {
  std::ostringstream os;
  os << "method,p_d,rmse,assoc_error,runs,seed\n";
  for (const auto& r : rows)
    os << r.method << ',' << number(r.p_d) << ',' << number(r.rmse) << ',' << number(r.assoc_error) << ','
       << r.runs << ',' << r.seed << '\n';
  return os.str();
}

std::string format_json(std::span<const TableRow> rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"method", r.method},
                   {"p_d", r.p_d},
                   {"rmse", r.rmse},
                   {"assoc_error", r.assoc_error},
                   {"runs", r.runs},
                   {"seed", r.seed}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace opm
