#include "ckmo/fair.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <tuple>

#include "ckmo/flow.hpp"
#include "ckmo/rng.hpp"

namespace ckmo {

namespace {

constexpr std::uint64_t kFairRingStreamTag = 0x46524e47ULL;
// Same stream as the plain pipeline so a one-group instance sees identical
// coreset draws through either entry point.
constexpr std::uint64_t kRetryStreamTag = 0x52545259ULL;

double n_choose(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  double v = 1.0;
  for (int i = 0; i < r; ++i) v = v * (n - i) / (i + 1);
  return v;
}

template <typename Fn>
void for_each_combination(int n, int r, Fn&& fn) {
  if (r > n) return;
  std::vector<int> c(r);
  std::iota(c.begin(), c.end(), 0);
  while (true) {
    fn(c);
    int i = r - 1;
    while (i >= 0 && c[i] == n - r + i) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < r; ++j) c[j] = c[j - 1] + 1;
  }
}

// Per group: indices into weights.entries() and the group weight totals.
struct GroupIndex {
  std::vector<std::vector<int>> members;
  std::vector<std::int64_t> weight;
};

GroupIndex index_groups(const WeightedClientSet& weights,
                        const FairnessSpec& spec) {
  GroupIndex gi;
  gi.members.resize(spec.num_groups);
  gi.weight.assign(spec.num_groups, 0);
  const auto& entries = weights.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const int g = spec.group_of[entries[i].first];
    gi.members[g].push_back(static_cast<int>(i));
    gi.weight[g] += entries[i].second;
  }
  return gi;
}

struct Transport {
  double cost = 0.0;
  // (entry index, row into F, amount); filled only when realizing.
  std::vector<std::tuple<int, int, std::int64_t>> shipments;
};

// Cheapest shipment of exactly demand[j] units from one group's clients to
// row j's facility, the surplus absorbed free. Feasible by construction
// whenever sum(demand) <= group weight.
Transport group_transport(const Instance& inst,
                          const WeightedClientSet& weights,
                          const std::vector<int>& members,
                          const std::vector<int>& F,
                          const std::vector<std::int64_t>& demand,
                          bool realize) {
  Transport out;
  std::int64_t shipped = 0;
  for (std::int64_t d : demand) shipped += d;
  if (members.empty() || (shipped == 0 && !realize)) return out;

  const auto& entries = weights.entries();
  FlowNetwork net;
  std::vector<int> member_node(members.size());
  std::int64_t group_weight = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    member_node[i] = net.add_node(entries[members[i]].second);
    group_weight += entries[members[i]].second;
  }
  std::vector<int> row_node(demand.size(), -1);
  for (std::size_t j = 0; j < demand.size(); ++j)
    if (demand[j] > 0) row_node[j] = net.add_node(-demand[j]);
  const int slack = net.add_node(-(group_weight - shipped));

  std::vector<std::tuple<int, int, int>> arc_of;  // (arc, entry, row)
  for (std::size_t i = 0; i < members.size(); ++i) {
    const int entry = members[i];
    const std::int64_t w = entries[entry].second;
    for (std::size_t j = 0; j < demand.size(); ++j) {
      if (row_node[j] < 0) continue;
      const int arc =
          net.add_arc(member_node[i], row_node[j], std::min(w, demand[j]),
                      inst.assign_cost(entries[entry].first,
                                       F[j]));
      arc_of.emplace_back(arc, entry, static_cast<int>(j));
    }
    net.add_arc(member_node[i], slack, w, 0.0);
  }

  FlowResult fr = solve_mcf(net);
  out.cost = fr.cost;
  if (realize)
    for (auto [arc, entry, row] : arc_of)
      if (fr.arc_flow[arc] > 0)
        out.shipments.emplace_back(entry, row, fr.arc_flow[arc]);
  return out;
}

// Depth-first search over load matrices, row (facility) major. Cells are
// tried in ascending value so the first matrix reaching a cost keeps the
// search deterministic; partial transportation cost is a valid lower
// bound because dropping a row's demand only frees flow.
struct WfaoSearch {
  const Instance& inst;
  const WeightedClientSet& weights;
  const std::vector<int>& F;
  const FairnessSpec& spec;
  const GroupIndex& gi;
  int nf;
  int ell;
  std::vector<std::int64_t> cap;
  std::vector<std::int64_t> suffix_cap;  // size nf + 1
  std::vector<std::int64_t> need;        // max(0, W_g - m_g)
  GroupLoadMatrix y;
  std::vector<std::int64_t> served;
  double best = kInfiniteCost;
  GroupLoadMatrix best_y;
  bool found = false;

  double partial_cost(int rows) {
    double total = 0.0;
    std::vector<std::int64_t> demand(rows);
    for (int g = 0; g < ell; ++g) {
      for (int f = 0; f < rows; ++f) demand[f] = y[f][g];
      total += group_transport(inst, weights, gi.members[g], F, demand,
                               false)
                   .cost;
    }
    return total;
  }

  void row_done(int f) {
    std::int64_t load = 0;
    for (int g = 0; g < ell; ++g) load += y[f][g];
    for (int g = 0; g < ell; ++g) {
      if (!rational_mul_le(spec.beta[g], load, y[f][g])) return;
      if (!rational_mul_ge(spec.alpha[g], load, y[f][g])) return;
    }
    std::int64_t deficit = 0;
    for (int g = 0; g < ell; ++g)
      deficit += std::max<std::int64_t>(0, need[g] - served[g]);
    if (deficit > suffix_cap[f + 1]) return;

    const double lb = partial_cost(f + 1);
    if (lb >= best) return;
    if (f + 1 == nf) {
      best = lb;
      best_y = y;
      found = true;
      return;
    }
    cell(f + 1, 0);
  }

  void cell(int f, int g) {
    std::int64_t used = 0;
    for (int h = 0; h < g; ++h) used += y[f][h];
    const std::int64_t hi =
        std::min(cap[f] - used, gi.weight[g] - served[g]);
    for (std::int64_t v = 0; v <= hi; ++v) {
      y[f][g] = v;
      served[g] += v;
      if (g + 1 == ell)
        row_done(f);
      else
        cell(f, g + 1);
      served[g] -= v;
    }
    y[f][g] = 0;
  }
};

void check_spec(const Instance& inst, const FairnessSpec& spec) {
  auto v = spec.validate(inst.num_clients());
  if (!v.empty()) throw std::invalid_argument(v.front());
}

}  // namespace

WfaoResult solve_wfao(const Instance& inst, const WeightedClientSet& weights,
                      const std::vector<int>& F, const FairnessSpec& spec) {
  check_spec(inst, spec);
  if (!std::is_sorted(F.begin(), F.end()) ||
      std::adjacent_find(F.begin(), F.end()) != F.end())
    throw std::invalid_argument("facility subset must be strictly ascending");
  for (int f : F)
    if (f < 0 || f >= inst.num_facilities())
      throw std::invalid_argument("facility position out of range");

  const int nf = static_cast<int>(F.size());
  const int ell = spec.num_groups;
  GroupIndex gi = index_groups(weights, spec);

  WfaoSearch search{inst,
                    weights,
                    F,
                    spec,
                    gi,
                    nf,
                    ell,
                    std::vector<std::int64_t>(nf),
                    std::vector<std::int64_t>(nf + 1, 0),
                    std::vector<std::int64_t>(ell),
                    GroupLoadMatrix(nf, std::vector<std::int64_t>(ell, 0)),
                    std::vector<std::int64_t>(ell, 0),
                    kInfiniteCost,
                    {},
                    false};
  for (int j = 0; j < nf; ++j) search.cap[j] = inst.capacities[F[j]];
  for (int j = nf - 1; j >= 0; --j)
    search.suffix_cap[j] = search.suffix_cap[j + 1] + search.cap[j];
  for (int g = 0; g < ell; ++g)
    search.need[g] = std::max<std::int64_t>(
        0, gi.weight[g] - spec.outlier_budget[g]);

  if (nf == 0) {
    bool ok = true;
    for (int g = 0; g < ell; ++g) ok = ok && search.need[g] == 0;
    if (!ok)
      throw Infeasible("opening no facility leaves a group under-served");
    search.best = 0.0;
    search.found = true;
  } else {
    search.cell(0, 0);
  }
  if (!search.found)
    throw Infeasible("no group load matrix satisfies the fairness bounds");

  WfaoResult out;
  out.loads = search.best_y;
  Solution& sol = out.solution;
  sol.open_facilities = F;
  sol.outlier_amounts.assign(inst.num_clients(), 0);

  const auto& entries = weights.entries();
  std::vector<std::int64_t> entry_shipped(entries.size(), 0);
  std::vector<std::int64_t> demand(nf);
  for (int g = 0; g < ell; ++g) {
    for (int f = 0; f < nf; ++f) demand[f] = search.best_y[f][g];
    Transport t = group_transport(inst, weights, gi.members[g], F, demand,
                                  true);
    for (auto [entry, row, amount] : t.shipments) {
      sol.assignment.push_back(
          {entries[entry].first, F[row], amount});
      entry_shipped[entry] += amount;
    }
  }
  for (std::size_t i = 0; i < entries.size(); ++i)
    sol.outlier_amounts[entries[i].first] =
        entries[i].second - entry_shipped[i];
  std::sort(sol.assignment.begin(), sol.assignment.end(),
            [](const Assignment& a, const Assignment& b) {
              return std::tie(a.client, a.facility) <
                     std::tie(b.client, b.facility);
            });

  CompensatedSum acc;
  for (const Assignment& a : sol.assignment)
    acc.add(static_cast<double>(a.amount) *
            inst.assign_cost(a.client, a.facility));
  sol.assignment_cost = acc.value();
  sol.cost = sol.assignment_cost;
  for (int f : F) sol.cost += inst.opening_cost(f);
  return out;
}

WfaoResult solve_wfao(const Instance& inst, const WeightedClientSet& weights,
                      const std::vector<int>& F) {
  if (!inst.fairness)
    throw std::invalid_argument("instance has no fairness spec");
  return solve_wfao(inst, weights, F, *inst.fairness);
}

CoresetResult build_fair_coreset(const Instance& inst, double epsilon,
                                 std::uint64_t seed,
                                 const CoresetConfig& cfg) {
  if (!inst.fairness)
    throw std::invalid_argument("instance has no fairness spec");
  const FairnessSpec& spec = *inst.fairness;
  check_spec(inst, spec);
  if (spec.num_groups == 1) return build_coreset(inst, epsilon, seed, cfg);

  if (!(epsilon > 0.0) || epsilon >= 1.0)
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(cfg.a > 0.0)) throw std::invalid_argument("a must be positive");
  const int n = inst.num_clients();

  SeedSolution sd = seed_solution(inst, cfg.seed_cfg);
  RingSystem rings = build_rings(inst, sd, cfg.zeta);

  const double s_real = cfg.a * cfg.zeta * cfg.zeta /
                        (epsilon * epsilon * epsilon) *
                        (static_cast<double>(inst.m) +
                         inst.k * std::log(static_cast<double>(n)));
  std::int64_t s_formula =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(s_real)));
  std::int64_t s = cfg.s_override > 0 ? cfg.s_override : s_formula;
  if (cfg.disable_sampling) s = n;

  CoresetResult out;
  out.meta.epsilon = epsilon;
  out.meta.zeta = cfg.zeta;
  out.meta.a = cfg.a;
  out.meta.s_formula = s_formula;
  out.meta.s = s;
  out.meta.R = rings.R;
  out.meta.psi = rings.psi;
  out.meta.psi_formula = rings.psi_formula;
  out.meta.seed_cost = rings.seed_cost;
  out.meta.seed_centers = sd.centers;
  out.meta.seed = seed;

  for (std::size_t i = 0; i < rings.rings.size(); ++i) {
    const Ring& ring = rings.rings[i];
    std::vector<std::vector<int>> cell(spec.num_groups);
    for (int c : ring.members) cell[spec.group_of[c]].push_back(c);
    for (int g = 0; g < spec.num_groups; ++g) {
      if (cell[g].empty()) continue;
      Ring sub = ring;
      sub.members = cell[g];
      Rng rng(derive_seed(
          seed, {kFairRingStreamTag, static_cast<std::uint64_t>(ring.center),
                 static_cast<std::uint64_t>(ring.level),
                 static_cast<std::uint64_t>(g)}));
      RingSample sample = sample_ring(sub, static_cast<int>(i), s, rng);
      for (const auto& [client, w] : integralize(sample))
        out.weights.add(client, w);
      out.meta.rings.push_back({ring.center_point, ring.level, ring.radius,
                                sample.ring_size, sample.sample_size,
                                sample.passthrough, g});
      if (!sample.passthrough) out.meta.sampling_occurred = true;
    }
  }

  out.meta.total_weight = out.weights.total_weight();
  out.meta.support_size = out.weights.support_size();
  if (out.meta.total_weight != n)
    throw std::logic_error("coreset weight must match the client count");
  return out;
}

namespace {

struct FairSweepOutcome {
  double best_cost = kInfiniteCost;
  std::vector<int> best_facilities;
  std::uint64_t enumerated = 0;
  std::uint64_t infeasible = 0;
  std::uint64_t feasible_evaluated = 0;
  std::uint64_t distinct_sets = 0;
  bool partial = false;
  bool limit_breached = false;
};

// Best facility subset for one residual by zero-budget fair assignment.
std::optional<std::pair<double, std::vector<int>>> fair_plugin_exact(
    const Instance& inst, const FairnessSpec& zero,
    const WeightedClientSet& residual, const CkmConfig& plug) {
  const int nf = inst.num_facilities();
  const int keff = std::min(inst.k, nf);
  const bool opening = inst.has_opening_costs();
  const int lo = opening ? 0 : keff;

  double planned = 0.0;
  for (int r = lo; r <= keff; ++r) planned += n_choose(nf, r);
  if (planned > static_cast<double>(plug.exact_subset_limit)) {
    std::ostringstream os;
    os << "facility subset enumeration needs about " << planned
       << " sets, limit is " << plug.exact_subset_limit;
    throw LimitExceeded(os.str());
  }

  double best = kInfiniteCost;
  std::vector<int> best_f;
  bool found = false;
  for (int r = lo; r <= keff; ++r) {
    for_each_combination(nf, r, [&](const std::vector<int>& F) {
      try {
        WfaoResult w = solve_wfao(inst, residual, F, zero);
        const double total = w.solution.cost;
        if (!found || total < best || (total == best && F < best_f)) {
          best = total;
          best_f = F;
          found = true;
        }
      } catch (const Infeasible&) {
      }
    });
  }
  if (!found) return std::nullopt;
  return std::make_pair(best, best_f);
}

FairSweepOutcome fair_sweep(const Instance& inst, const FairnessSpec& spec,
                            const WeightedClientSet& weights,
                            const SolveConfig& cfg) {
  FairSweepOutcome out;
  const int ell = spec.num_groups;

  std::vector<WeightedClientSet> group_sets(ell);
  for (const auto& [c, w] : weights.entries())
    group_sets[spec.group_of[c]].set(c, w);

  // Unlike the plain pipeline, removing more weight than the optimum does
  // can break the proportion bounds, so every removal total up to the
  // group budget is its own guess.
  std::vector<std::vector<OutlierGuess>> lists(ell);
  for (int g = 0; g < ell; ++g) {
    const std::int64_t top =
        std::min(spec.outlier_budget[g], group_sets[g].total_weight());
    for (std::int64_t b = 0; b <= top; ++b) {
      GuessEnumerator e(group_sets[g], b);
      while (auto gu = e.next()) {
        lists[g].push_back(std::move(*gu));
        if (lists[g].size() > cfg.max_guesses) {
          out.limit_breached = true;
          out.enumerated = lists[g].size();
          return out;
        }
      }
    }
  }

  FairnessSpec zero = spec;
  zero.outlier_budget.assign(ell, 0);
  const WeightedClientSet full_units =
      WeightedClientSet::all_ones(inst.num_clients());
  std::map<std::vector<int>, double> cache;
  const auto start = std::chrono::steady_clock::now();

  std::vector<std::size_t> idx(ell, 0);
  while (true) {
    if (out.enumerated >= cfg.max_guesses) {
      out.limit_breached = true;
      break;
    }
    if (cfg.timeout_seconds > 0.0) {
      const double elapsed = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
      if (elapsed > cfg.timeout_seconds) {
        out.partial = true;
        break;
      }
    }
    ++out.enumerated;

    WeightedClientSet residual = weights;
    for (int g = 0; g < ell; ++g)
      residual = residual_weights(residual, lists[g][idx[g]]);

    auto cand = fair_plugin_exact(inst, zero, residual, cfg.plugin);
    if (!cand) {
      ++out.infeasible;
    } else {
      ++out.feasible_evaluated;
      const std::vector<int>& F = cand->second;
      double total;
      auto it = cache.find(F);
      if (it != cache.end()) {
        total = it->second;
      } else {
        try {
          total = solve_wfao(inst, full_units, F, spec).solution.cost;
        } catch (const Infeasible&) {
          total = kInfiniteCost;
        }
        cache.emplace(F, total);
      }
      if (total < out.best_cost ||
          (total == out.best_cost && total < kInfiniteCost &&
           F < out.best_facilities)) {
        out.best_cost = total;
        out.best_facilities = F;
      }
    }

    int g = ell - 1;
    while (g >= 0) {
      if (++idx[g] < lists[g].size()) break;
      idx[g] = 0;
      --g;
    }
    if (g < 0) break;
  }
  out.distinct_sets = cache.size();
  return out;
}

}  // namespace

SolveResult solve_fair_ckmo(const Instance& inst, std::uint64_t seed,
                            const SolveConfig& cfg) {
  if (!inst.fairness)
    throw std::invalid_argument("instance has no fairness spec");
  const FairnessSpec& spec = *inst.fairness;
  check_spec(inst, spec);
  if (spec.total_outlier_budget() != inst.m)
    throw std::invalid_argument(
        "per-group outlier budgets must sum to the instance's m");

  RunReport report;
  report.seed = seed;

  double best_cost = kInfiniteCost;
  std::vector<int> best_f;

  for (int retry = 0; retry <= std::max(0, cfg.retries); ++retry) {
    const std::uint64_t pass_seed =
        derive_seed(seed, {kRetryStreamTag,
                           static_cast<std::uint64_t>(retry)});
    WeightedClientSet weights;
    std::optional<CoresetMetadata> meta;
    if (cfg.no_coreset) {
      weights = WeightedClientSet::all_ones(inst.num_clients());
    } else {
      CoresetResult cs =
          build_fair_coreset(inst, cfg.epsilon, pass_seed, cfg.coreset);
      weights = std::move(cs.weights);
      meta = std::move(cs.meta);
    }

    double bound = 1.0;
    {
      std::vector<int> support_of(spec.num_groups, 0);
      std::vector<std::int64_t> weight_of(spec.num_groups, 0);
      for (const auto& [c, w] : weights.entries()) {
        ++support_of[spec.group_of[c]];
        weight_of[spec.group_of[c]] += w;
      }
      for (int g = 0; g < spec.num_groups; ++g) {
        const std::int64_t top =
            std::min(spec.outlier_budget[g], weight_of[g]);
        double per_group = 0.0;
        for (std::int64_t b = 0; b <= top; ++b)
          per_group += GuessEnumerator::count_bound(support_of[g], b);
        bound *= per_group;
      }
    }

    FairSweepOutcome sweep = fair_sweep(inst, spec, weights, cfg);
    if (sweep.limit_breached) {
      std::ostringstream os;
      os << "guess budget " << cfg.max_guesses << " exhausted after "
         << sweep.enumerated << " guesses";
      throw LimitExceeded(os.str());
    }
    if (static_cast<double>(sweep.enumerated) > bound)
      throw std::logic_error("guess enumeration exceeded its proven bound");

    report.guesses_enumerated += sweep.enumerated;
    report.guesses_infeasible += sweep.infeasible;
    report.guess_bound += bound;
    report.distinct_facility_sets += sweep.distinct_sets;
    report.evaluation_cache_hits +=
        sweep.feasible_evaluated - sweep.distinct_sets;
    report.partial = report.partial || sweep.partial;

    if (sweep.best_cost < best_cost ||
        (sweep.best_cost == best_cost && sweep.best_cost < kInfiniteCost &&
         sweep.best_facilities < best_f)) {
      best_cost = sweep.best_cost;
      best_f = sweep.best_facilities;
      report.winning_retry = retry;
      report.coreset = meta;
    }
  }

  if (best_cost == kInfiniteCost) {
    if (report.partial)
      throw LimitExceeded("timed out before any candidate was evaluated");
    throw Infeasible(
        "no facility set produced by any guess admits a fair assignment");
  }

  report.best_cost = best_cost;
  report.best_facilities = best_f;

  SolveResult res;
  res.report = std::move(report);
  res.solution =
      solve_wfao(inst, WeightedClientSet::all_ones(inst.num_clients()),
                 best_f, spec)
          .solution;
  return res;
}

SolveResult brute_force_fair_ckmo(const Instance& inst,
                                  const BruteForceConfig& cfg) {
  if (!inst.fairness)
    throw std::invalid_argument("instance has no fairness spec");
  const FairnessSpec& spec = *inst.fairness;
  check_spec(inst, spec);
  if (spec.total_outlier_budget() != inst.m)
    throw std::invalid_argument(
        "per-group outlier budgets must sum to the instance's m");

  const int nf = inst.num_facilities();
  const int keff = std::min(inst.k, nf);
  const bool opening = inst.has_opening_costs();
  const int lo = opening ? 0 : keff;

  double planned = 0.0;
  for (int r = lo; r <= keff; ++r) planned += n_choose(nf, r);
  if (planned > static_cast<double>(cfg.subset_limit)) {
    std::ostringstream os;
    os << "facility subset enumeration needs about " << planned
       << " sets, limit is " << cfg.subset_limit;
    throw LimitExceeded(os.str());
  }

  const WeightedClientSet units =
      WeightedClientSet::all_ones(inst.num_clients());
  double best = kInfiniteCost;
  std::vector<int> best_f;
  bool found = false;
  std::uint64_t tried = 0;
  for (int r = lo; r <= keff; ++r) {
    for_each_combination(nf, r, [&](const std::vector<int>& F) {
      ++tried;
      try {
        WfaoResult w = solve_wfao(inst, units, F, spec);
        const double total = w.solution.cost;
        if (!found || total < best || (total == best && F < best_f)) {
          best = total;
          best_f = F;
          found = true;
        }
      } catch (const Infeasible&) {
      }
    });
  }
  if (!found)
    throw Infeasible("no facility subset admits a fair assignment");

  SolveResult res;
  res.report.distinct_facility_sets = tried;
  res.report.best_cost = best;
  res.report.best_facilities = best_f;
  res.solution = solve_wfao(inst, units, best_f, spec).solution;
  return res;
}

std::vector<std::string> validate_fair_solution(
    const Instance& inst, const Solution& sol,
    const WeightedClientSet& weights) {
  std::vector<std::string> out = validate_solution(inst, sol, weights);
  if (!inst.fairness) {
    out.push_back("fairness: instance has no fairness spec");
    return out;
  }
  const FairnessSpec& spec = *inst.fairness;
  auto sv = spec.validate(inst.num_clients());
  if (!sv.empty()) {
    out.insert(out.end(), sv.begin(), sv.end());
    return out;
  }

  std::map<int, std::vector<std::int64_t>> loads;
  for (const Assignment& a : sol.assignment) {
    auto& row = loads[a.facility];
    if (row.empty()) row.assign(spec.num_groups, 0);
    row[spec.group_of[a.client]] += a.amount;
  }
  for (const auto& [f, row] : loads) {
    std::int64_t load = 0;
    for (std::int64_t v : row) load += v;
    for (int g = 0; g < spec.num_groups; ++g) {
      if (!rational_mul_le(spec.beta[g], load, row[g])) {
        std::ostringstream os;
        os << "fairness: facility " << f << " group " << g << " load "
           << row[g] << " below beta share of " << load;
        out.push_back(os.str());
      }
      if (!rational_mul_ge(spec.alpha[g], load, row[g])) {
        std::ostringstream os;
        os << "fairness: facility " << f << " group " << g << " load "
           << row[g] << " above alpha share of " << load;
        out.push_back(os.str());
      }
    }
  }

  std::vector<std::int64_t> dropped(spec.num_groups, 0);
  for (std::size_t c = 0; c < sol.outlier_amounts.size(); ++c)
    dropped[spec.group_of[c]] += sol.outlier_amounts[c];
  for (int g = 0; g < spec.num_groups; ++g)
    if (dropped[g] > spec.outlier_budget[g]) {
      std::ostringstream os;
      os << "fairness: group " << g << " drops " << dropped[g]
         << " units, budget " << spec.outlier_budget[g];
      out.push_back(os.str());
    }
  return out;
}

}  // namespace ckmo
