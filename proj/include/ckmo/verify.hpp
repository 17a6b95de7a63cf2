#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ckmo/coreset.hpp"
#include "ckmo/model.hpp"

namespace ckmo {

// Planted-cluster instances whose tightest k capacities exceed the weight
// that must be served by a margin drawn from {0..capacity_margin_max}, so
// capacity constraints bind without breaking feasibility.
struct GeneratorParams {
  int n = 60;
  int num_facilities = 6;
  int k = 2;
  std::int64_t m = 2;
  double z = 1.0;
  int planted_clusters = 3;
  double cluster_spread = 0.08;
  int capacity_margin_max = 2;
  bool opening_costs = false;
  bool force_infeasible = false;  // every k-subset short on capacity
};

Instance random_instance(const GeneratorParams& params, std::uint64_t seed);

// Exhaustive assignment-with-outliers reference used by experiments;
// independent recursion, no flow machinery. nullopt when even dropping m
// units cannot fit the capacities.
std::optional<double> exhaustive_mcfo_cost(
    const std::vector<std::int64_t>& demands,
    const std::vector<std::int64_t>& capacities,
    const std::function<double(int, int)>& cost, std::int64_t m);

// One headline measurement per trial plus order statistics; rerunning
// with the same inputs reproduces the report bit for bit.
struct ExperimentReport {
  std::string id;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<double> measurements;
  double max = 0.0;
  double mean = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
  double q99 = 0.0;
  double per_trial_threshold = 0.0;  // a trial passes at or below this
  double pass_fraction = 0.0;
  double required_fraction = 1.0;
  bool passed = false;
  std::map<std::string, double> extra;
};

// Measurement: max over feasible k-subsets F of
// |wcost_m(W,F) - cost_m(C,F)| / cost_m(C,F). Trials pass at <= epsilon;
// the report passes when >= required_fraction of trials do.
// s_override: forced per-ring sample size; 0 uses the formula value;
// negative disables sampling entirely (passthrough weights).
ExperimentReport coreset_error_experiment(const GeneratorParams& gen,
                                          double epsilon,
                                          std::int64_t s_override,
                                          int trials, std::uint64_t seed,
                                          double required_fraction = 0.9);

// Single-instance primitive: random ring demand vectors v and single
// coordinate bumps delta; margin = |g(v + delta*1_c) - g(v)| - delta*rad.
struct LipschitzCheck {
  int pairs = 0;
  int violations = 0;
  double max_margin = -kInfiniteCost;
  std::vector<std::string> details;  // one line per violating (v, c, delta)
};

LipschitzCheck lipschitz_check(const Instance& inst,
                               const std::vector<int>& F, const Ring& ring,
                               int pairs, std::uint64_t seed);

// Measurement per instance: worst margin over sampled pairs on a random
// nonempty ring; passes only with zero violations anywhere.
ExperimentReport lipschitz_experiment(const GeneratorParams& gen,
                                      int instances,
                                      int pairs_per_instance,
                                      std::uint64_t seed);

// Measurement: |solve_mcfo - exhaustive reference| on random tiny
// assignment problems (0 when both infeasible); any nonzero fails.
// m = 0 trials are additionally checked against a plain b-flow build.
// extra["literal_agreement"]: fraction of feasible trials where the
// one-shot penalty construction happened to match the exact optimum.
ExperimentReport mcfo_consistency_experiment(int trials,
                                             std::uint64_t seed);

// Measurement: solve_ckmo(exact plugin) cost / brute-force optimum.
// Trials pass at <= (1+epsilon)/(1-epsilon); zero-optimum trials pass
// only when the pipeline also returns zero (ratio recorded as 1).
// s_override follows the coreset_error_experiment convention.
ExperimentReport ratio_experiment(const GeneratorParams& gen, double epsilon,
                                  std::int64_t s_override, int trials,
                                  std::uint64_t seed,
                                  double required_fraction = 0.9);

}  // namespace ckmo
