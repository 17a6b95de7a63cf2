// Acceptance gate: ten end-to-end checks over the full pipeline, printed one
// line each. Exit status 0 only when every check passes. All tolerances are
// pinned here as named constants; checks that compare independently computed
// dyadic sums use exact equality on purpose.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ckmo/fair.hpp"
#include "ckmo/flow.hpp"
#include "ckmo/io.hpp"
#include "ckmo/model.hpp"
#include "ckmo/rng.hpp"
#include "ckmo/solver.hpp"
#include "ckmo/verify.hpp"
#include "oracles.hpp"

namespace {

using namespace ckmo;

constexpr std::uint64_t kSuiteSeed = 0xACCE55ULL;
constexpr double kEpsilon = 0.5;             // coreset / ratio regime
constexpr double kRequiredFraction = 0.9;    // per-experiment pass bar
constexpr double kRatioBound = 3.0;          // (1 + eps) / (1 - eps) at 0.5
constexpr double kFlowBudgetSeconds = 10.0;
constexpr double kCoresetBudgetSeconds = 300.0;
constexpr double kBoundSlack = 1e-12;        // double binomial-sum roundoff

struct Ctx {
  std::vector<std::string> notes;
  bool ok = true;

  void fail(std::string msg) {
    ok = false;
    if (notes.size() < 12) notes.push_back(std::move(msg));
  }
  void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

template <typename Fn>
void for_each_subset(int n, int r, Fn fn) {
  std::vector<int> idx(r);
  std::iota(idx.begin(), idx.end(), 0);
  if (r > n) return;
  while (true) {
    fn(idx);
    int i = r - 1;
    while (i >= 0 && idx[i] == n - r + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

double binom(int n, int t) {
  if (t < 0 || t > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= t; ++i) r = r * (n - t + i) / i;
  return r;
}

// sum_{t <= m} C(support, t) * m^m, with m^0 read as 1.
double guess_count_bound(int support, std::int64_t m) {
  double subsets = 0.0;
  for (std::int64_t t = 0; t <= m; ++t)
    subsets += binom(support, static_cast<int>(t));
  double mm = 1.0;
  for (std::int64_t i = 0; i < m; ++i) mm *= static_cast<double>(m);
  return subsets * mm;
}

// ---- 1: exact min-cost flow vs exhaustive enumeration ---------------------

void check_mcf_exact(Ctx& c) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(derive_seed(kSuiteSeed, {1}));
  int feasible = 0;
  int infeasible = 0;
  for (int t = 0; t < 500; ++t) {
    const FlowNetwork net = oracle::random_flow_network(rng);
    const std::optional<double> expected = oracle::enumerate_min_cost_flow(net);
    std::optional<FlowResult> got;
    try {
      got = solve_mcf(net);
    } catch (const Infeasible&) {
    }
    if (expected.has_value() != got.has_value()) {
      c.fail("network " + std::to_string(t) + ": feasibility disagreement");
      continue;
    }
    if (!expected.has_value()) {
      ++infeasible;
      continue;
    }
    ++feasible;
    if (got->cost != *expected)
      c.fail("network " + std::to_string(t) + ": cost " + fmt(got->cost) +
             " vs enumerated " + fmt(*expected));
    if (residual_has_negative_cycle(net, *got))
      c.fail("network " + std::to_string(t) + ": negative residual cycle");
  }
  c.require(feasible >= 100 && infeasible >= 20,
            "network mix too one-sided: " + std::to_string(feasible) +
                " feasible / " + std::to_string(infeasible) + " infeasible");
  const double secs = seconds_since(t0);
  c.require(secs < kFlowBudgetSeconds,
            "runtime " + fmt(secs) + "s over the " + fmt(kFlowBudgetSeconds) +
                "s budget");
}

// ---- 2: assignment-with-outliers vs exhaustive reference ------------------

void check_mcfo_exact(Ctx& c) {
  ExperimentReport rep =
      mcfo_consistency_experiment(500, derive_seed(kSuiteSeed, {2}));
  c.require(rep.trials == 500, "experiment ran " + std::to_string(rep.trials) +
                                   " trials instead of 500");
  c.require(rep.max == 0.0,
            "worst |solver - reference| = " + fmt(rep.max) + ", want 0");
  c.require(rep.passed, "consistency experiment reported failure");
  c.require(rep.extra.at("m0_trials") >= 1.0,
            "no zero-budget trials were exercised");

  // Budget sweep: cost nonincreasing in m, zero at m = total demand, and the
  // m = 0 column equal to a plain b-flow build of the same bipartite network.
  Rng rng(derive_seed(kSuiteSeed, {2, 1}));
  for (int t = 0; t < 100; ++t) {
    const int nc = 1 + static_cast<int>(rng.uniform_below(4));
    const int nf = 1 + static_cast<int>(rng.uniform_below(3));
    std::vector<std::int64_t> demands(nc);
    std::vector<std::int64_t> caps(nf);
    for (auto& d : demands) d = 1 + static_cast<std::int64_t>(rng.uniform_below(2));
    for (auto& u : caps) u = static_cast<std::int64_t>(rng.uniform_below(4));
    std::vector<double> unit(static_cast<std::size_t>(nc) * nf);
    for (auto& x : unit) x = 0.25 * static_cast<double>(rng.uniform_below(17));
    const CostFn cost = [&](int j, int i) {
      return unit[static_cast<std::size_t>(j) * nf + i];
    };
    const std::int64_t total =
        std::accumulate(demands.begin(), demands.end(), std::int64_t{0});

    std::vector<double> sweep;
    for (std::int64_t m = 0; m <= total; ++m) {
      try {
        sweep.push_back(solve_mcfo(demands, caps, cost, m).cost);
      } catch (const Infeasible&) {
        sweep.push_back(kInfiniteCost);
      }
    }
    for (std::size_t i = 1; i < sweep.size(); ++i)
      if (sweep[i] > sweep[i - 1])
        c.fail("trial " + std::to_string(t) + ": cost rose from m=" +
               std::to_string(i - 1) + " (" + fmt(sweep[i - 1]) + ") to m=" +
               std::to_string(i) + " (" + fmt(sweep[i]) + ")");
    if (sweep.back() != 0.0)
      c.fail("trial " + std::to_string(t) +
             ": dropping all demand should cost 0, got " + fmt(sweep.back()));

    FlowNetwork net;
    for (std::int64_t d : demands) net.add_node(d);
    std::vector<int> fnode(nf);
    for (int i = 0; i < nf; ++i) fnode[i] = net.add_node(0);
    const int sink = net.add_node(-total);
    for (int j = 0; j < nc; ++j)
      for (int i = 0; i < nf; ++i)
        net.add_arc(j, fnode[i], demands[j], cost(j, i));
    for (int i = 0; i < nf; ++i) net.add_arc(fnode[i], sink, caps[i], 0.0);
    double direct = kInfiniteCost;
    try {
      direct = solve_mcf(net).cost;
    } catch (const Infeasible&) {
    }
    if (direct != sweep.front())
      c.fail("trial " + std::to_string(t) + ": m=0 cost " + fmt(sweep.front()) +
             " differs from the direct b-flow build " + fmt(direct));
  }
}

// ---- 3: passthrough coreset is exact for every facility subset ------------

void check_coreset_degenerate(Ctx& c) {
  constexpr std::int64_t kS = 32;  // >= n, so every ring keeps all members
  for (int i = 0; i < 60; ++i) {
    GeneratorParams gen;
    gen.n = 6 + (i % 15);
    gen.num_facilities = 2 + (i % 5);
    gen.k = 1 + (i % 2);
    gen.m = i % 3;
    gen.planted_clusters = 1 + (i % 3);
    const std::uint64_t seed = derive_seed(kSuiteSeed, {3, static_cast<std::uint64_t>(i)});
    const Instance inst = random_instance(gen, seed);

    CoresetConfig cfg;
    cfg.s_override = kS;
    const CoresetResult cs =
        build_coreset(inst, kEpsilon, derive_seed(seed, {1}), cfg);
    if (cs.meta.sampling_occurred) {
      c.fail("instance " + std::to_string(i) +
             ": a ring sampled even though s >= n");
      continue;
    }
    if (cs.weights.total_weight() != inst.num_clients())
      c.fail("instance " + std::to_string(i) + ": weights total " +
             std::to_string(cs.weights.total_weight()) + " != n");

    const int keff = std::min(inst.k, inst.num_facilities());
    for_each_subset(inst.num_facilities(), keff, [&](const std::vector<int>& F) {
      const double wc = wcost_m(inst, cs.weights, F, inst.m).cost;
      const double cc = cost_m(inst, F, inst.m).cost;
      if (wc != cc)
        c.fail("instance " + std::to_string(i) + ": weighted cost " + fmt(wc) +
               " != unweighted " + fmt(cc) + " on a facility subset");
    });
  }
}

// ---- 4: sampled-coreset error, 200 trials, shrinking with s ----------------

void check_coreset_quality(Ctx& c) {
  const auto t0 = std::chrono::steady_clock::now();
  GeneratorParams gen;
  gen.cluster_spread = 0.25;  // wide clusters: small s genuinely samples
  const std::uint64_t seed = derive_seed(kSuiteSeed, {4});

  std::vector<double> means;
  for (std::int64_t s : {std::int64_t{4}, std::int64_t{8}, std::int64_t{16},
                         std::int64_t{32}}) {
    const ExperimentReport rep =
        coreset_error_experiment(gen, kEpsilon, s, 200, seed,
                                 kRequiredFraction);
    means.push_back(rep.mean);
    if (s == 4 && rep.extra.at("sampling_fraction") < 0.5)
      c.fail("s=4 sampled in only " + fmt(rep.extra.at("sampling_fraction")) +
             " of trials; the regime is not exercising sampling");
    if (s == 16) {
      c.require(rep.trials == 200, "s=16 ran " + std::to_string(rep.trials) +
                                       " trials instead of 200");
      c.require(rep.per_trial_threshold == kEpsilon,
                "s=16 threshold " + fmt(rep.per_trial_threshold));
      c.require(rep.passed, "s=16 pass fraction " + fmt(rep.pass_fraction) +
                                " below " + fmt(kRequiredFraction));
    }
  }
  int inversions = 0;
  for (std::size_t i = 1; i < means.size(); ++i)
    if (means[i] > means[i - 1]) ++inversions;
  c.require(inversions <= 1,
            "mean error trend over s in {4,8,16,32} has " +
                std::to_string(inversions) + " inversions: " + fmt(means[0]) +
                ", " + fmt(means[1]) + ", " + fmt(means[2]) + ", " +
                fmt(means[3]));
  const double secs = seconds_since(t0);
  c.require(secs < kCoresetBudgetSeconds,
            "runtime " + fmt(secs) + "s over the " +
                fmt(kCoresetBudgetSeconds) + "s budget");
}

// ---- 5: ring-perturbation cost is radius-Lipschitz -------------------------

void check_lipschitz(Ctx& c) {
  GeneratorParams gen;
  gen.n = 12;
  gen.num_facilities = 4;
  gen.k = 2;
  gen.m = 1;
  gen.planted_clusters = 2;
  const ExperimentReport rep =
      lipschitz_experiment(gen, 20, 100, derive_seed(kSuiteSeed, {5}));
  c.require(rep.trials == 20, "ran " + std::to_string(rep.trials) +
                                  " instances instead of 20");
  c.require(rep.extra.at("violations") == 0.0,
            fmt(rep.extra.at("violations")) + " perturbation pairs broke the "
            "per-unit radius bound");
  c.require(rep.passed, "worst slack-adjusted margin " + fmt(rep.max));
}

// ---- 6: full pipeline equals brute force when sampling is off --------------

void check_pipeline_exact(Ctx& c) {
  for (int i = 0; i < 100; ++i) {
    GeneratorParams gen;
    gen.n = 5 + (i % 8);
    gen.num_facilities = 2 + (i % 4);
    gen.k = 1 + (i % 2);
    gen.m = i % 3;
    gen.planted_clusters = 1 + (i % 3);
    gen.opening_costs = (i % 5 == 4);
    const std::uint64_t seed = derive_seed(kSuiteSeed, {6, static_cast<std::uint64_t>(i)});
    const Instance inst = random_instance(gen, seed);

    SolveConfig cfg;
    cfg.epsilon = kEpsilon;
    cfg.coreset.disable_sampling = true;
    std::optional<SolveResult> got;
    std::optional<SolveResult> ref;
    try {
      got = solve_ckmo(inst, derive_seed(seed, {1}), cfg);
    } catch (const Infeasible&) {
    }
    try {
      ref = brute_force_ckmo(inst);
    } catch (const Infeasible&) {
    }
    if (got.has_value() != ref.has_value()) {
      c.fail("instance " + std::to_string(i) + ": feasibility disagreement");
      continue;
    }
    if (!got.has_value()) continue;
    if (got->solution.cost != ref->solution.cost)
      c.fail("instance " + std::to_string(i) + ": pipeline cost " +
             fmt(got->solution.cost) + " != brute force " +
             fmt(ref->solution.cost));
    if (got->solution.open_facilities != ref->solution.open_facilities)
      c.fail("instance " + std::to_string(i) +
             ": pipeline opened a different facility set");
    try {
      evaluate_cost(inst, got->solution);
    } catch (const InvalidSolution& e) {
      c.fail("instance " + std::to_string(i) + ": invalid solution: " +
             e.what());
    }
  }
}

// ---- 7: sampled pipeline stays within (1+eps)/(1-eps) of optimum -----------

void check_ratio(Ctx& c) {
  GeneratorParams gen;
  const ExperimentReport rep = ratio_experiment(
      gen, kEpsilon, 8, 50, derive_seed(kSuiteSeed, {7}), kRequiredFraction);
  c.require(rep.trials == 50, "ran " + std::to_string(rep.trials) +
                                  " trials instead of 50");
  c.require(rep.per_trial_threshold == kRatioBound,
            "ratio threshold " + fmt(rep.per_trial_threshold) + " != " +
                fmt(kRatioBound));
  c.require(rep.passed, "pass fraction " + fmt(rep.pass_fraction) +
                            " below " + fmt(kRequiredFraction) +
                            " (worst ratio " + fmt(rep.max) + ")");
  c.require(rep.extra.at("sampling_fraction") >= 0.9,
            "only " + fmt(rep.extra.at("sampling_fraction")) +
                " of trials actually sampled at s=8");

  const ExperimentReport exact = ratio_experiment(
      gen, kEpsilon, -1, 10, derive_seed(kSuiteSeed, {7, 1}),
      kRequiredFraction);
  for (std::size_t t = 0; t < exact.measurements.size(); ++t)
    if (exact.measurements[t] != 1.0)
      c.fail("sampling disabled but trial " + std::to_string(t) +
             " has ratio " + fmt(exact.measurements[t]));
  c.require(exact.extra.at("sampling_fraction") == 0.0,
            "sampling reported despite being disabled");
}

// ---- 8: enumerated guesses never exceed the combinatorial bound ------------

void check_guess_bound(Ctx& c) {
  for (int i = 0; i < 30; ++i) {
    GeneratorParams gen;
    gen.n = 10 + (i % 20);
    gen.num_facilities = 4;
    gen.k = 2;
    gen.m = i % 4;
    const std::uint64_t seed = derive_seed(kSuiteSeed, {8, static_cast<std::uint64_t>(i)});
    const Instance inst = random_instance(gen, seed);

    SolveConfig cfg;
    cfg.epsilon = kEpsilon;
    if (i % 3 == 2) {
      cfg.no_coreset = true;
    } else {
      cfg.coreset.s_override = 8;
    }
    SolveResult res;
    try {
      res = solve_ckmo(inst, derive_seed(seed, {1}), cfg);
    } catch (const Infeasible&) {
      continue;
    }
    const RunReport& rep = res.report;
    const int support = rep.coreset.has_value() ? rep.coreset->support_size
                                                : inst.num_clients();
    const double bound = guess_count_bound(support, inst.m);
    if (static_cast<double>(rep.guesses_enumerated) > rep.guess_bound)
      c.fail("run " + std::to_string(i) + ": report bound " +
             fmt(rep.guess_bound) + " below its own enumerated count " +
             std::to_string(rep.guesses_enumerated));
    if (rep.guess_bound > bound * (1.0 + kBoundSlack))
      c.fail("run " + std::to_string(i) + ": report bound " +
             fmt(rep.guess_bound) + " exceeds the recomputed bound " +
             fmt(bound));
    if (static_cast<double>(rep.guesses_enumerated) > bound)
      c.fail("run " + std::to_string(i) + ": enumerated " +
             std::to_string(rep.guesses_enumerated) +
             " guesses, recomputed bound " + fmt(bound));
  }

  // Group-fair runs carry the same report-level invariant.
  for (int i = 0; i < 5; ++i) {
    const std::uint64_t seed = derive_seed(kSuiteSeed, {8, 100, static_cast<std::uint64_t>(i)});
    GeneratorParams gen;
    gen.n = 10;
    gen.num_facilities = 3;
    gen.k = 2;
    gen.m = 2;
    Instance inst = random_instance(gen, seed);
    FairnessSpec spec;
    spec.num_groups = 2;
    spec.group_of.resize(inst.num_clients());
    for (int j = 0; j < inst.num_clients(); ++j) spec.group_of[j] = j % 2;
    spec.alpha = {Rational{1, 1}, Rational{1, 1}};
    spec.beta = {Rational{0, 1}, Rational{0, 1}};
    spec.outlier_budget = {1, 1};
    inst.fairness = spec;

    SolveResult res;
    try {
      res = solve_fair_ckmo(inst, derive_seed(seed, {1}));
    } catch (const Infeasible&) {
      continue;
    }
    if (static_cast<double>(res.report.guesses_enumerated) >
        res.report.guess_bound)
      c.fail("fair run " + std::to_string(i) + ": enumerated " +
             std::to_string(res.report.guesses_enumerated) +
             " guesses, report bound " + fmt(res.report.guess_bound));
  }
}

// ---- 9: fair assignment equals the exhaustive oracle -----------------------

// Distances are drawn as dyadic multiples of 1/256 inside [1, 2]: the
// triangle inequality holds automatically and every cost sum is exact in
// double, so equality below is bit-level.
Instance dyadic_fair_instance(Rng& rng, int nc, int nf, int groups) {
  const int total = nc + nf;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(total, total);
  for (int i = 0; i < total; ++i)
    for (int j = i + 1; j < total; ++j) {
      const double v = static_cast<double>(256 + rng.uniform_below(257)) / 256.0;
      d(i, j) = v;
      d(j, i) = v;
    }
  Instance inst;
  inst.metric = std::make_shared<MetricSpace>(MetricSpace::from_matrix(d));
  inst.clients.resize(nc);
  std::iota(inst.clients.begin(), inst.clients.end(), 0);
  inst.facilities.resize(nf);
  std::iota(inst.facilities.begin(), inst.facilities.end(), nc);
  inst.capacities.resize(nf);
  for (auto& u : inst.capacities)
    u = static_cast<std::int64_t>(rng.uniform_below(2 * nc + 1));
  inst.k = nf;

  FairnessSpec spec;
  spec.num_groups = groups;
  spec.group_of.resize(nc);
  for (int j = 0; j < nc; ++j)
    spec.group_of[j] = (j < groups) ? j
                                    : static_cast<int>(rng.uniform_below(groups));
  const Rational alphas[] = {{1, 1}, {3, 4}, {1, 2}};
  const Rational betas[] = {{0, 1}, {1, 4}};
  for (int g = 0; g < groups; ++g) {
    spec.alpha.push_back(groups == 1 ? Rational{1, 1}
                                     : alphas[rng.uniform_below(3)]);
    spec.beta.push_back(groups == 1 ? Rational{0, 1}
                                    : betas[rng.uniform_below(2)]);
    spec.outlier_budget.push_back(
        static_cast<std::int64_t>(rng.uniform_below(3)));
  }
  inst.m = spec.total_outlier_budget();
  inst.fairness = spec;
  return inst;
}

void check_wfao(Ctx& c) {
  Rng rng(derive_seed(kSuiteSeed, {9}));
  int feasible = 0;
  int infeasible = 0;
  for (int t = 0; t < 200; ++t) {
    const int nc = 2 + (t % 7);
    const int nf = 1 + (t % 2);
    const Instance inst = dyadic_fair_instance(rng, nc, nf, 2);
    WeightedClientSet weights;
    for (int j = 0; j < nc; ++j)
      weights.add(j, 1 + static_cast<std::int64_t>(rng.uniform_below(2)));
    std::vector<int> F(nf);
    std::iota(F.begin(), F.end(), 0);

    const std::optional<double> expected = oracle::enumerate_fair_assignment(
        inst, weights, F, *inst.fairness);
    std::optional<WfaoResult> got;
    try {
      got = solve_wfao(inst, weights, F, *inst.fairness);
    } catch (const Infeasible&) {
    }
    if (expected.has_value() != got.has_value()) {
      c.fail("instance " + std::to_string(t) + ": feasibility disagreement");
      continue;
    }
    if (!expected.has_value()) {
      ++infeasible;
      continue;
    }
    ++feasible;
    if (got->solution.assignment_cost != *expected)
      c.fail("instance " + std::to_string(t) + ": cost " +
             fmt(got->solution.assignment_cost) + " != oracle " +
             fmt(*expected));
    const auto violations =
        validate_fair_solution(inst, got->solution, weights);
    if (!violations.empty())
      c.fail("instance " + std::to_string(t) + ": " + violations.front());
    for (const Assignment& a : got->solution.assignment)
      if (a.amount < 1)
        c.fail("instance " + std::to_string(t) +
               ": non-positive assignment amount");
  }
  c.require(feasible >= 60 && infeasible >= 20,
            "fair mix too one-sided: " + std::to_string(feasible) +
                " feasible / " + std::to_string(infeasible) + " infeasible");

  // One group with vacuous bounds and the full budget degenerates to the
  // plain weighted assignment problem.
  for (int t = 0; t < 30; ++t) {
    const int nc = 2 + (t % 6);
    const int nf = 1 + (t % 2);
    Instance inst = dyadic_fair_instance(rng, nc, nf, 1);
    inst.fairness->outlier_budget[0] = t % 3;
    inst.m = inst.fairness->outlier_budget[0];
    WeightedClientSet weights;
    for (int j = 0; j < nc; ++j)
      weights.add(j, 1 + static_cast<std::int64_t>(rng.uniform_below(2)));
    std::vector<int> F(nf);
    std::iota(F.begin(), F.end(), 0);

    std::optional<WfaoResult> got;
    try {
      got = solve_wfao(inst, weights, F, *inst.fairness);
    } catch (const Infeasible&) {
    }
    const CostmResult plain = wcost_m(inst, weights, F, inst.m);
    const bool plain_feasible = plain.cost != kInfiniteCost;
    if (got.has_value() != plain_feasible) {
      c.fail("degenerate instance " + std::to_string(t) +
             ": feasibility disagreement with the plain assignment");
      continue;
    }
    if (got.has_value() && got->solution.assignment_cost != plain.cost)
      c.fail("degenerate instance " + std::to_string(t) + ": cost " +
             fmt(got->solution.assignment_cost) + " != plain " +
             fmt(plain.cost));
  }
}

// ---- 10: every subcommand is byte-reproducible ------------------------------

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(CKMO_CLI_PATH) + " " + args + " >/dev/null 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  if (WIFEXITED(rc)) return WEXITSTATUS(rc);
  return -2;
}

void check_determinism(Ctx& c) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ckmo_acceptance";
  std::error_code ec;
  fs::remove_all(dir, ec);
  fs::create_directories(dir);
  const auto p = [&](const std::string& name) {
    return (dir / name).string();
  };

  GeneratorParams gen;
  gen.n = 20;
  gen.num_facilities = 4;
  gen.k = 2;
  gen.m = 2;
  const Instance plain = random_instance(gen, derive_seed(kSuiteSeed, {10, 1}));
  write_text_file(p("plain.json"), dump_json(instance_to_json(plain)));

  Rng frng(derive_seed(kSuiteSeed, {10, 2}));
  Instance fair = dyadic_fair_instance(frng, 6, 2, 2);
  fair.fairness->alpha = {Rational{1, 1}, Rational{1, 1}};
  fair.fairness->beta = {Rational{0, 1}, Rational{0, 1}};
  fair.fairness->outlier_budget = {1, 1};
  fair.m = 2;
  fair.capacities = {4, 4};
  write_text_file(p("fair.json"), dump_json(instance_to_json(fair)));

  // Each row: a name and the flags; the subcommand runs twice into different
  // files which must come out byte-identical with exit status 0.
  struct Case {
    std::string name;
    std::string args;  // OUT placeholder swapped for the output path
  };
  const std::vector<Case> cases = {
      {"solve", "solve --input " + p("plain.json") +
                    " --seed 11 --epsilon 0.5 --coreset-s 8 --out OUT"},
      {"solve-threads", "solve --input " + p("plain.json") +
                            " --seed 11 --epsilon 0.5 --coreset-s 8"
                            " --threads 2 --out OUT"},
      {"solve-fair",
       "solve --fair --input " + p("fair.json") + " --seed 4 --out OUT"},
      {"coreset", "coreset --input " + p("plain.json") +
                      " --seed 5 --epsilon 0.5 --coreset-s 4 --out OUT"},
      {"coreset-fair", "coreset --fair --input " + p("fair.json") +
                           " --seed 5 --epsilon 0.5 --coreset-s 4 --out OUT"},
      {"oracle", "oracle --input " + p("plain.json") + " --out OUT"},
      {"bench", "bench --experiment mcfo-consistency --trials 60 --seed 3"
                " --out OUT"},
  };
  std::vector<std::string> first_output(cases.size());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const std::string a = p(cases[i].name + "_a.json");
    const std::string b = p(cases[i].name + "_b.json");
    for (const std::string& out : {a, b}) {
      std::string args = cases[i].args;
      args.replace(args.find("OUT"), 3, out);
      const int rc = run_cli(args);
      if (rc != 0) {
        c.fail(cases[i].name + ": exit status " + std::to_string(rc));
        break;
      }
    }
    if (!c.ok) continue;
    const std::string ta = read_text_file(a);
    const std::string tb = read_text_file(b);
    if (ta.empty()) c.fail(cases[i].name + ": empty output");
    if (ta != tb) c.fail(cases[i].name + ": two runs differ byte-wise");
    first_output[i] = ta;
  }

  // Thread count must not leak into the result.
  if (c.ok && first_output[0] != first_output[1])
    c.fail("solve output changes between --threads 1 and --threads 2");

  // verify consumes the solve output (solution wrapped in its report).
  if (c.ok) {
    for (const char* out : {"verify_a.json", "verify_b.json"}) {
      const int rc = run_cli("verify --input " + p("plain.json") +
                             " --solution " + p("solve_a.json") + " --out " +
                             p(out));
      if (rc != 0) c.fail("verify: exit status " + std::to_string(rc));
    }
    if (c.ok && read_text_file(p("verify_a.json")) !=
                    read_text_file(p("verify_b.json")))
      c.fail("verify: two runs differ byte-wise");
  }

  // Experiment CSVs follow the same rule.
  if (c.ok) {
    for (const char* tag : {"a", "b"}) {
      const int rc = run_cli(
          "bench --experiment coreset-error --trials 5 --seed 9 --coreset-s 4"
          " --gen-n 30 --out " +
          p(std::string("csvrun_") + tag + ".json") + " --csv " +
          p(std::string("run_") + tag + ".csv"));
      if (rc != 0) c.fail("bench csv: exit status " + std::to_string(rc));
    }
    if (c.ok) {
      if (read_text_file(p("csvrun_a.json")) != read_text_file(p("csvrun_b.json")))
        c.fail("bench csv: json outputs differ byte-wise");
      if (read_text_file(p("run_a.csv")) != read_text_file(p("run_b.csv")))
        c.fail("bench csv: csv outputs differ byte-wise");
    }
  }

  fs::remove_all(dir, ec);
}

struct Check {
  const char* description;
  void (*fn)(Ctx&);
};

const Check kChecks[] = {
    {"min-cost flow matches exhaustive enumeration on 500 networks",
     check_mcf_exact},
    {"outlier assignment matches the exhaustive reference, monotone in m",
     check_mcfo_exact},
    {"passthrough coreset is cost-exact on every facility subset",
     check_coreset_degenerate},
    {"sampled coreset error within eps, mean shrinking with s",
     check_coreset_quality},
    {"ring perturbation cost obeys the per-unit radius bound",
     check_lipschitz},
    {"pipeline equals brute force with sampling disabled", check_pipeline_exact},
    {"sampled pipeline cost within (1+eps)/(1-eps) of optimum", check_ratio},
    {"enumerated guesses stay under the combinatorial bound",
     check_guess_bound},
    {"fair assignment matches the exhaustive oracle exactly", check_wfao},
    {"every subcommand is byte-reproducible across reruns", check_determinism},
};

}  // namespace

int main() {
  int passed = 0;
  const int total = static_cast<int>(std::size(kChecks));
  for (int i = 0; i < total; ++i) {
    Ctx ctx;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      kChecks[i].fn(ctx);
    } catch (const std::exception& e) {
      ctx.fail(std::string("unexpected exception: ") + e.what());
    }
    const double secs = seconds_since(t0);
    std::printf("[%2d] %s  (%.1fs)  %s\n", i + 1, ctx.ok ? "PASS" : "FAIL",
                secs, kChecks[i].description);
    for (const std::string& note : ctx.notes)
      std::printf("      - %s\n", note.c_str());
    if (ctx.ok) ++passed;
  }
  std::printf("acceptance: %d/%d passed\n", passed, total);
  return passed == total ? 0 : 1;
}
