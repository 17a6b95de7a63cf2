#include "ckmo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ckmo/flow.hpp"
#include "ckmo/rng.hpp"
#include "ckmo/solver.hpp"

namespace ckmo {

namespace {

constexpr std::uint64_t kTrialStreamTag = 0x5452494cULL;

// Sub-paths under a trial seed, so each consumer gets its own stream.
constexpr std::uint64_t kInstanceSubstream = 1;
constexpr std::uint64_t kSolveSubstream = 2;
constexpr std::uint64_t kRingPickSubstream = 3;
constexpr std::uint64_t kCheckSubstream = 4;

// Lexicographic r-subsets of {0..n-1}; fn receives the sorted index vector.
template <typename Fn>
void for_each_subset(int n, int r, Fn&& fn) {
  if (r < 0 || r > n) return;
  std::vector<int> idx(r);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    int i = r - 1;
    while (i >= 0 && idx[i] == n - r + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

double quantile(const std::vector<double>& sorted, double p) {
  const int t = static_cast<int>(sorted.size());
  int idx = static_cast<int>(std::ceil(p * t)) - 1;
  idx = std::max(0, std::min(t - 1, idx));
  return sorted[idx];
}

void finalize(ExperimentReport& rep, double required_fraction) {
  rep.trials = static_cast<int>(rep.measurements.size());
  rep.required_fraction = required_fraction;
  if (rep.trials == 0) {
    rep.passed = false;
    return;
  }
  double sum = 0.0;
  rep.max = rep.measurements.front();
  int pass_count = 0;
  for (double v : rep.measurements) {
    sum += v;
    rep.max = std::max(rep.max, v);
    if (v <= rep.per_trial_threshold) ++pass_count;
  }
  rep.mean = sum / rep.trials;
  std::vector<double> sorted = rep.measurements;
  std::sort(sorted.begin(), sorted.end());
  rep.q50 = quantile(sorted, 0.5);
  rep.q90 = quantile(sorted, 0.9);
  rep.q99 = quantile(sorted, 0.99);
  rep.pass_fraction = static_cast<double>(pass_count) / rep.trials;
  rep.passed = rep.pass_fraction >= required_fraction;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_generator(const GeneratorParams& p) {
  require(p.n >= 1, "generator needs at least one client");
  require(p.num_facilities >= 1, "generator needs at least one facility");
  require(p.k >= 1, "generator needs k >= 1");
  require(p.m >= 0, "generator needs m >= 0");
  require(p.z > 0.0, "generator needs a positive cost exponent");
  require(p.planted_clusters >= 1, "generator needs at least one cluster");
  require(p.cluster_spread >= 0.0, "cluster spread must be nonnegative");
  require(p.capacity_margin_max >= 0, "capacity margin must be nonnegative");
}

std::map<std::string, double> generator_params(const GeneratorParams& p) {
  return {{"n", static_cast<double>(p.n)},
          {"num_facilities", static_cast<double>(p.num_facilities)},
          {"k", static_cast<double>(p.k)},
          {"m", static_cast<double>(p.m)},
          {"z", p.z},
          {"planted_clusters", static_cast<double>(p.planted_clusters)},
          {"cluster_spread", p.cluster_spread},
          {"capacity_margin_max", static_cast<double>(p.capacity_margin_max)},
          {"opening_costs", p.opening_costs ? 1.0 : 0.0},
          {"force_infeasible", p.force_infeasible ? 1.0 : 0.0}};
}

CoresetConfig coreset_config(std::int64_t s_override) {
  CoresetConfig cfg;
  if (s_override < 0) {
    cfg.disable_sampling = true;
  } else {
    cfg.s_override = s_override;
  }
  return cfg;
}

}  // namespace

Instance random_instance(const GeneratorParams& params, std::uint64_t seed) {
  check_generator(params);
  Rng rng(seed);
  const int n = params.n;
  const int nf = params.num_facilities;
  const int keff = std::min(params.k, nf);

  std::vector<std::pair<double, double>> centers(params.planted_clusters);
  for (auto& c : centers) c = {rng.uniform01(), rng.uniform01()};
  auto jitter = [&](const std::pair<double, double>& c) {
    return std::pair<double, double>{
        c.first + rng.uniform(-params.cluster_spread, params.cluster_spread),
        c.second + rng.uniform(-params.cluster_spread, params.cluster_spread)};
  };

  Eigen::MatrixXd points(n + nf, 2);
  for (int i = 0; i < n; ++i) {
    const auto cluster =
        centers[rng.uniform_below(static_cast<std::uint64_t>(centers.size()))];
    const auto p = jitter(cluster);
    points(i, 0) = p.first;
    points(i, 1) = p.second;
  }
  for (int i = 0; i < nf; ++i) {
    const auto p = jitter(centers[i % centers.size()]);
    points(n + i, 0) = p.first;
    points(n + i, 1) = p.second;
  }

  Instance inst;
  inst.metric = std::make_shared<MetricSpace>(
      MetricSpace::from_points(std::move(points)));
  inst.clients.resize(n);
  std::iota(inst.clients.begin(), inst.clients.end(), 0);
  inst.facilities.resize(nf);
  std::iota(inst.facilities.begin(), inst.facilities.end(), n);
  inst.k = params.k;
  inst.m = params.m;
  inst.z = params.z;

  const std::int64_t served = std::max<std::int64_t>(
      0, static_cast<std::int64_t>(n) - std::min<std::int64_t>(params.m, n));
  inst.capacities.assign(nf, 0);
  if (params.force_infeasible) {
    require(served > 0,
            "cannot make every facility subset short when all demand may be "
            "dropped");
    // keff equal capacities summing below `served` leave every subset short.
    std::fill(inst.capacities.begin(), inst.capacities.end(),
              (served - 1) / keff);
  } else {
    const std::int64_t margin =
        params.capacity_margin_max == 0
            ? 0
            : static_cast<std::int64_t>(rng.uniform_below(
                  static_cast<std::uint64_t>(params.capacity_margin_max) + 1));
    // The first keff facilities share served + margin; everyone else stays
    // at or below the smallest of them, so the best k-subset capacity is
    // exactly served + margin and the constraint binds.
    std::int64_t rest = served + margin;
    if (rest >= keff) {
      for (int i = 0; i < keff; ++i) inst.capacities[i] = 1;
      rest -= keff;
    }
    for (std::int64_t unit = 0; unit < rest; ++unit) {
      inst.capacities[rng.uniform_below(static_cast<std::uint64_t>(keff))] +=
          1;
    }
    const std::int64_t min_primary = *std::min_element(
        inst.capacities.begin(), inst.capacities.begin() + keff);
    for (int i = keff; i < nf; ++i) {
      inst.capacities[i] = static_cast<std::int64_t>(
          rng.uniform_below(static_cast<std::uint64_t>(min_primary) + 1));
    }
  }

  if (params.opening_costs) {
    inst.opening_costs.resize(nf);
    for (double& c : inst.opening_costs) c = rng.uniform01();
  }
  return inst;
}

std::optional<double> exhaustive_mcfo_cost(
    const std::vector<std::int64_t>& demands,
    const std::vector<std::int64_t>& capacities,
    const std::function<double(int, int)>& cost, std::int64_t m) {
  require(m >= 0, "outlier budget must be nonnegative");
  for (std::int64_t d : demands)
    require(d >= 0, "demands must be nonnegative");
  for (std::int64_t u : capacities)
    require(u >= 0, "capacities must be nonnegative");

  const int nc = static_cast<int>(demands.size());
  const int nf = static_cast<int>(capacities.size());
  std::vector<std::int64_t> rem = capacities;
  std::optional<double> best;

  // Per client, split its demand across facilities and the outlier pool;
  // recursion depth nc * nf keeps this to tiny inputs by construction.
  std::function<void(int, std::int64_t, double)> client;
  std::function<void(int, int, std::int64_t, std::int64_t, double)> split;
  client = [&](int j, std::int64_t budget, double acc) {
    if (best && acc >= *best) return;
    if (j == nc) {
      best = acc;
      return;
    }
    split(j, 0, demands[j], budget, acc);
  };
  split = [&](int j, int i, std::int64_t left, std::int64_t budget,
              double acc) {
    if (best && acc >= *best) return;
    if (i == nf) {
      if (left <= budget) client(j + 1, budget - left, acc);
      return;
    }
    const std::int64_t cap = std::min(left, rem[i]);
    for (std::int64_t x = 0; x <= cap; ++x) {
      rem[i] -= x;
      split(j, i + 1, left - x, budget,
            acc + static_cast<double>(x) * cost(j, i));
      rem[i] += x;
    }
  };
  client(0, m, 0.0);
  return best;
}

ExperimentReport coreset_error_experiment(const GeneratorParams& gen,
                                          double epsilon,
                                          std::int64_t s_override, int trials,
                                          std::uint64_t seed,
                                          double required_fraction) {
  require(trials >= 1, "experiment needs at least one trial");
  require(epsilon > 0.0, "epsilon must be positive");
  ExperimentReport rep;
  rep.id = "coreset_error";
  rep.params = generator_params(gen);
  rep.params["epsilon"] = epsilon;
  rep.params["s_override"] = static_cast<double>(s_override);
  rep.params["trials"] = static_cast<double>(trials);
  rep.seed = seed;
  rep.per_trial_threshold = epsilon;

  int sampled_trials = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t ts = derive_seed(seed, {kTrialStreamTag,
                                                static_cast<std::uint64_t>(t)});
    const Instance inst =
        random_instance(gen, derive_seed(ts, {kInstanceSubstream}));
    const CoresetResult cs =
        build_coreset(inst, epsilon, derive_seed(ts, {kSolveSubstream}),
                      coreset_config(s_override));
    if (cs.meta.sampling_occurred) ++sampled_trials;

    const int nf = inst.num_facilities();
    const int keff = std::min(inst.k, nf);
    double worst = 0.0;
    for_each_subset(nf, keff, [&](const std::vector<int>& F) {
      const CostmResult ref = cost_m(inst, F, inst.m);
      const CostmResult approx = wcost_m(inst, cs.weights, F, inst.m);
      const bool ref_ok = ref.cost < kInfiniteCost;
      const bool approx_ok = approx.cost < kInfiniteCost;
      if (!ref_ok && !approx_ok) return;  // max ranges over feasible F
      if (ref_ok != approx_ok) {
        worst = kInfiniteCost;
        return;
      }
      double rel;
      if (ref.cost == 0.0) {
        rel = approx.cost == 0.0 ? 0.0 : kInfiniteCost;
      } else {
        rel = std::abs(approx.cost - ref.cost) / ref.cost;
      }
      worst = std::max(worst, rel);
    });
    rep.measurements.push_back(worst);
  }
  finalize(rep, required_fraction);
  rep.extra["sampling_fraction"] =
      static_cast<double>(sampled_trials) / trials;
  return rep;
}

LipschitzCheck lipschitz_check(const Instance& inst,
                               const std::vector<int>& F, const Ring& ring,
                               int pairs, std::uint64_t seed) {
  require(pairs >= 1, "lipschitz check needs at least one pair");
  require(!ring.members.empty(), "lipschitz check needs a nonempty ring");
  // Rerouting one unit between a member and the ring center costs at most
  // radius^z per unit (exact for z = 1, valid for any z <= 1 because such
  // powers are subadditive).
  const double ell = inst.power_cost(ring.radius);
  const int nmem = static_cast<int>(ring.members.size());
  Rng rng(seed);
  LipschitzCheck out;
  out.pairs = pairs;

  for (int p = 0; p < pairs; ++p) {
    std::vector<std::int64_t> v(nmem);
    for (auto& x : v) x = static_cast<std::int64_t>(rng.uniform_below(3));
    const int c = static_cast<int>(rng.uniform_below(nmem));
    const std::int64_t delta = 1 + static_cast<std::int64_t>(
                                       rng.uniform_below(2));
    std::vector<std::int64_t> v2 = v;
    v2[c] += delta;

    bool ok0 = true, ok1 = true;
    double g0 = 0.0, g1 = 0.0;
    try {
      g0 = evaluate_g(inst, ring.center_point, ring.members, v, F, inst.m);
    } catch (const Infeasible&) {
      ok0 = false;
    }
    try {
      g1 = evaluate_g(inst, ring.center_point, ring.members, v2, F, inst.m);
    } catch (const Infeasible&) {
      ok1 = false;
    }

    double margin;
    if (!ok0 && !ok1) {
      margin = 0.0;  // bump kept the instance infeasible: difference is 0
    } else if (ok0 != ok1) {
      margin = kInfiniteCost;  // feasibility must not depend on the bump
    } else {
      margin = std::abs(g1 - g0) - static_cast<double>(delta) * ell;
    }
    out.max_margin = std::max(out.max_margin, margin);
    if (margin > 1e-9) {
      ++out.violations;
      std::ostringstream line;
      line << "pair " << p << ": member index " << c << " (client "
           << ring.members[c] << "), delta " << delta;
      if (ok0 != ok1) {
        line << ", feasibility changed";
      } else {
        line << ", |dg| = " << std::abs(g1 - g0)
             << " exceeds bound " << static_cast<double>(delta) * ell;
      }
      out.details.push_back(line.str());
    }
  }
  return out;
}

ExperimentReport lipschitz_experiment(const GeneratorParams& gen,
                                      int instances, int pairs_per_instance,
                                      std::uint64_t seed) {
  require(instances >= 1, "experiment needs at least one instance");
  require(pairs_per_instance >= 1, "experiment needs at least one pair");
  ExperimentReport rep;
  rep.id = "lipschitz";
  rep.params = generator_params(gen);
  rep.params["instances"] = static_cast<double>(instances);
  rep.params["pairs_per_instance"] = static_cast<double>(pairs_per_instance);
  rep.seed = seed;
  rep.per_trial_threshold = 1e-9;

  int violations = 0;
  for (int t = 0; t < instances; ++t) {
    const std::uint64_t ts = derive_seed(seed, {kTrialStreamTag,
                                                static_cast<std::uint64_t>(t)});
    const Instance inst =
        random_instance(gen, derive_seed(ts, {kInstanceSubstream}));
    const SeedSolution centers = seed_solution(inst);
    const RingSystem rings =
        build_rings(inst, centers, CoresetConfig{}.zeta);

    Rng pick(derive_seed(ts, {kRingPickSubstream}));
    const Ring& ring =
        rings.rings[pick.uniform_below(rings.rings.size())];

    const int nf = inst.num_facilities();
    const int keff = std::min(inst.k, nf);
    std::vector<int> pool(nf);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < keff; ++i) {
      const int j = i + static_cast<int>(pick.uniform_below(
                            static_cast<std::uint64_t>(nf - i)));
      std::swap(pool[i], pool[j]);
    }
    std::vector<int> F(pool.begin(), pool.begin() + keff);
    std::sort(F.begin(), F.end());

    const LipschitzCheck chk =
        lipschitz_check(inst, F, ring, pairs_per_instance,
                        derive_seed(ts, {kCheckSubstream}));
    violations += chk.violations;
    rep.measurements.push_back(chk.max_margin);
  }
  finalize(rep, 1.0);
  rep.extra["violations"] = static_cast<double>(violations);
  return rep;
}

ExperimentReport mcfo_consistency_experiment(int trials, std::uint64_t seed) {
  require(trials >= 1, "experiment needs at least one trial");
  ExperimentReport rep;
  rep.id = "mcfo_consistency";
  rep.params["trials"] = static_cast<double>(trials);
  rep.seed = seed;
  rep.per_trial_threshold = 0.0;

  int infeasible_trials = 0;
  int m0_trials = 0;
  int m_ge_total_trials = 0;
  int literal_checked = 0;
  int literal_agree = 0;

  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, {kTrialStreamTag,
                               static_cast<std::uint64_t>(t)}));
    const int nc = 1 + static_cast<int>(rng.uniform_below(4));
    const int nf = 1 + static_cast<int>(rng.uniform_below(3));
    std::vector<std::int64_t> demands(nc), capacities(nf);
    std::int64_t total = 0;
    for (auto& d : demands) {
      d = 1 + static_cast<std::int64_t>(rng.uniform_below(2));
      total += d;
    }
    for (auto& u : capacities)
      u = static_cast<std::int64_t>(rng.uniform_below(4));
    const std::int64_t m = static_cast<std::int64_t>(
        rng.uniform_below(static_cast<std::uint64_t>(total) + 2));
    // Dyadic costs (multiples of 1/256) keep every partial sum exact, so
    // independently ordered summations must agree bit for bit.
    std::vector<std::vector<double>> c(nc, std::vector<double>(nf));
    for (auto& row : c)
      for (auto& x : row) x = static_cast<double>(rng.uniform_below(1024)) / 256.0;
    const CostFn cost = [&](int j, int i) { return c[j][i]; };

    const std::optional<double> oracle =
        exhaustive_mcfo_cost(demands, capacities, cost, m);
    bool solved = true;
    double value = 0.0;
    try {
      value = solve_mcfo(demands, capacities, cost, m).cost;
    } catch (const Infeasible&) {
      solved = false;
    }

    double measurement;
    if (!oracle && !solved) {
      measurement = 0.0;
      ++infeasible_trials;
    } else if (oracle.has_value() != solved) {
      measurement = kInfiniteCost;
    } else {
      measurement = std::abs(value - *oracle);
    }

    if (m >= total) ++m_ge_total_trials;
    if (m == 0) {
      ++m0_trials;
      FlowNetwork net;
      for (int j = 0; j < nc; ++j) net.add_node(demands[j]);
      for (int i = 0; i < nf; ++i) net.add_node(0);
      const int sink = net.add_node(-total);
      for (int j = 0; j < nc; ++j)
        for (int i = 0; i < nf; ++i)
          net.add_arc(j, nc + i, demands[j], c[j][i]);
      for (int i = 0; i < nf; ++i)
        net.add_arc(nc + i, sink, capacities[i], 0.0);
      bool direct_ok = true;
      double direct = 0.0;
      try {
        direct = solve_mcf(net).cost;
      } catch (const Infeasible&) {
        direct_ok = false;
      }
      if (direct_ok != solved) {
        measurement = kInfiniteCost;
      } else if (solved) {
        measurement = std::max(measurement, std::abs(direct - value));
      }
    }

    if (solved) {
      ++literal_checked;
      const PenaltyLiteralResult lit =
          solve_mcfo_penalty_literal(demands, capacities, cost, m);
      if (lit.cost == value) ++literal_agree;
    }
    rep.measurements.push_back(measurement);
  }
  finalize(rep, 1.0);
  rep.extra["infeasible_trials"] = static_cast<double>(infeasible_trials);
  rep.extra["m0_trials"] = static_cast<double>(m0_trials);
  rep.extra["m_ge_total_trials"] = static_cast<double>(m_ge_total_trials);
  rep.extra["literal_agreement"] =
      literal_checked == 0
          ? 0.0
          : static_cast<double>(literal_agree) / literal_checked;
  return rep;
}

ExperimentReport ratio_experiment(const GeneratorParams& gen, double epsilon,
                                  std::int64_t s_override, int trials,
                                  std::uint64_t seed,
                                  double required_fraction) {
  require(trials >= 1, "experiment needs at least one trial");
  require(epsilon > 0.0 && epsilon < 1.0,
          "ratio bound (1+eps)/(1-eps) needs epsilon in (0, 1)");
  ExperimentReport rep;
  rep.id = "ratio";
  rep.params = generator_params(gen);
  rep.params["epsilon"] = epsilon;
  rep.params["s_override"] = static_cast<double>(s_override);
  rep.params["trials"] = static_cast<double>(trials);
  rep.seed = seed;
  rep.per_trial_threshold = (1.0 + epsilon) / (1.0 - epsilon);

  int sampled_trials = 0;
  int zero_opt_trials = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t ts = derive_seed(seed, {kTrialStreamTag,
                                                static_cast<std::uint64_t>(t)});
    const Instance inst =
        random_instance(gen, derive_seed(ts, {kInstanceSubstream}));

    bool ref_ok = true;
    double ref_cost = 0.0;
    try {
      ref_cost = brute_force_ckmo(inst).solution.cost;
    } catch (const Infeasible&) {
      ref_ok = false;
    }

    SolveConfig cfg;
    cfg.epsilon = epsilon;
    cfg.coreset = coreset_config(s_override);
    bool pipe_ok = true;
    double pipe_cost = 0.0;
    bool sampled = false;
    try {
      const SolveResult res =
          solve_ckmo(inst, derive_seed(ts, {kSolveSubstream}), cfg);
      pipe_cost = res.solution.cost;
      sampled = res.report.coreset && res.report.coreset->sampling_occurred;
    } catch (const Infeasible&) {
      pipe_ok = false;
    }
    if (sampled) ++sampled_trials;

    double ratio;
    if (!ref_ok && !pipe_ok) {
      ratio = 1.0;
    } else if (ref_ok != pipe_ok) {
      ratio = kInfiniteCost;
    } else if (ref_cost == 0.0) {
      ++zero_opt_trials;
      ratio = pipe_cost == 0.0 ? 1.0 : kInfiniteCost;
    } else {
      ratio = pipe_cost / ref_cost;
    }
    rep.measurements.push_back(ratio);
  }
  finalize(rep, required_fraction);
  rep.extra["sampling_fraction"] =
      static_cast<double>(sampled_trials) / trials;
  rep.extra["zero_opt_trials"] = static_cast<double>(zero_opt_trials);
  return rep;
}

}  // namespace ckmo
