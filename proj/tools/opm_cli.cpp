#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "opm/bandit.hpp"
#include "opm/simulation.hpp"
#include "opm/validation.hpp"

namespace {

struct SimulateOptions {
  std::vector<double> pd{0.9, 0.8, 0.7};
  std::size_t runs = 200;
  std::size_t steps = 100;
  std::uint64_t seed = 1;
  std::string alpha = "auto";
  double prune = 1e-3;
  double merge = 3.22;
  double obs_var = 0.5;
  std::size_t threads = 0;
  std::string out;
  std::string format = "csv";
};

int simulate(const SimulateOptions& o) {
  opm::MonteCarloConfig mc;
  mc.p_d_values = o.pd;
  mc.runs = o.runs;
  mc.master_seed = o.seed;
  mc.threads = o.threads;
  mc.base.n_steps = o.steps;
  mc.base.reduction.prune_threshold = o.prune;
  mc.base.reduction.merge_threshold = o.merge;
  mc.base.R = o.obs_var;
  if (o.alpha != "auto") {
    try {
      mc.base.alpha = std::stod(o.alpha);
    } catch (const std::exception&) {
      throw std::invalid_argument("--alpha must be 'auto' or a number");
    }
  }
  for (double pd : o.pd) {
    auto cfg = mc.base;
    cfg.p_d = pd;
    cfg.validate();
  }

  const auto rows = opm::monte_carlo(mc);
  for (const auto& r : rows) {
    if (!std::isfinite(r.rmse) || r.rmse < 0.0 || !(r.assoc_error >= 0.0 && r.assoc_error <= 1.0)) {
      std::cerr << "invariant violated: metrics out of range for " << r.method << " at p_d=" << r.p_d << "\n";
      return 3;
    }
  }
  const std::string text = o.format == "json" ? opm::format_json(rows) : opm::format_csv(rows);
  if (o.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + o.out);
    f << text;
  }
  return 0;
}

struct BanditOptions {
  std::uint64_t seed = 1;
  std::size_t plays = 20;
  std::vector<double> reward{1.0, 2.0, 3.0};
  std::vector<double> probs_a{0.5, 0.3, 0.2};
  std::vector<double> probs_b{0.2, 0.3, 0.5};
};

std::string counts_str(const opm::BanditPosterior& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.outcomes(); ++i) s += (i ? "," : "") + std::to_string(p.counts()[i]);
  return s + ")";
}

int bandit_demo(const BanditOptions& o) {
  const std::size_t n = o.reward.size();
  if (o.probs_a.size() != n || o.probs_b.size() != n)
    throw std::invalid_argument("outcome probabilities must match the reward list");
  std::mt19937_64 rng(o.seed);
  std::discrete_distribution<std::size_t> draw_a(o.probs_a.begin(), o.probs_a.end());
  std::discrete_distribution<std::size_t> draw_b(o.probs_b.begin(), o.probs_b.end());
  auto a = opm::BanditPosterior::unplayed(o.reward);
  auto b = opm::BanditPosterior::unplayed(o.reward);
  const std::vector<std::size_t> top{n - 1};

  std::printf("play,choice,outcome,counts_a,counts_b,reward_bar_a,reward_bar_b,cred_top_a,cred_top_b\n");
  for (std::size_t k = 1; k <= o.plays; ++k) {
    const auto choice = opm::select_bandit(a, b);
    std::size_t outcome;
    if (choice == opm::BanditChoice::First) {
      outcome = draw_a(rng);
      a = a.observe(outcome);
    } else {
      outcome = draw_b(rng);
      b = b.observe(outcome);
    }
    std::printf("%zu,%c,%zu,%s,%s,%.6f,%.6f,%.6f,%.6f\n", k, choice == opm::BanditChoice::First ? 'A' : 'B',
                outcome + 1, counts_str(a).c_str(), counts_str(b).c_str(), opm::max_credible_reward(a),
                opm::max_credible_reward(b), opm::event_credibility(a, top), opm::event_credibility(b, top));
  }
  return 0;
}

int validate() {
  bool ok = true;
  for (const auto& r : opm::validation::run_all()) {
    std::printf("%s %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Possibilistic filtering toolkit"};
  app.set_config("--config", "", "TOML/INI configuration file; command-line flags take precedence");
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Monte Carlo comparison of the o.p.m. and probabilistic filters");
  s->add_option("--pd", sim.pd, "Detection probabilities")->delimiter(',')->capture_default_str();
  s->add_option("--runs", sim.runs, "Monte Carlo runs per detection probability")->capture_default_str();
  s->add_option("--steps", sim.steps, "Time steps per run")->capture_default_str();
  s->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  s->add_option("--alpha", sim.alpha, "Clutter credibility, or 'auto' for 1 - p_d")->capture_default_str();
  s->add_option("--prune", sim.prune, "Pruning threshold")->capture_default_str();
  s->add_option("--merge", sim.merge, "Squared Mahalanobis merging threshold")->capture_default_str();
  s->add_option("--obs-var", sim.obs_var, "Observation noise variance R")->capture_default_str();
  s->add_option("--threads", sim.threads, "Worker threads (0: all cores)")->capture_default_str();
  s->add_option("--out", sim.out, "Output file (stdout when empty)");
  s->add_option("--format", sim.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  BanditOptions bandit;
  auto* b = app.add_subcommand("bandit-demo", "Seeded two-bandit replay with credibilities per play");
  b->add_option("--seed", bandit.seed)->capture_default_str();
  b->add_option("--plays", bandit.plays)->capture_default_str();
  b->add_option("--reward", bandit.reward, "Increasing reward per outcome")->delimiter(',');
  b->add_option("--probs-a", bandit.probs_a, "True outcome probabilities of bandit A")->delimiter(',');
  b->add_option("--probs-b", bandit.probs_b, "True outcome probabilities of bandit B")->delimiter(',');

  auto* v = app.add_subcommand("validate", "Oracle-equivalence checks");

  CLI11_PARSE(app, argc, argv);
  try {
    if (s->parsed()) return simulate(sim);
    if (b->parsed()) return bandit_demo(bandit);
    if (v->parsed()) return validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
