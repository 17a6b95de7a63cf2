#include "ckmo/coreset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace ckmo {

namespace {

constexpr std::uint64_t kRingStreamTag = 0x52494e47ULL;  // per-ring draws

struct CandidateTable {
  std::vector<int> points;                 // candidate point ids, sorted
  std::vector<std::vector<double>> cost;   // [client][candidate] d^z
};

CandidateTable build_candidates(const Instance& inst) {
  std::set<int> uniq(inst.facilities.begin(), inst.facilities.end());
  uniq.insert(inst.clients.begin(), inst.clients.end());
  CandidateTable t;
  t.points.assign(uniq.begin(), uniq.end());
  t.cost.assign(inst.num_clients(),
                std::vector<double>(t.points.size(), 0.0));
  for (int c = 0; c < inst.num_clients(); ++c)
    for (std::size_t j = 0; j < t.points.size(); ++j)
      t.cost[c][j] = inst.power_cost(
          inst.metric->distance(inst.clients[c], t.points[j]));
  return t;
}

double eval_centers(const CandidateTable& t, const std::vector<int>& chosen,
                    std::vector<int>* assign_out) {
  CompensatedSum total;
  const int n = static_cast<int>(t.cost.size());
  for (int c = 0; c < n; ++c) {
    double best = kInfiniteCost;
    int arg = -1;
    for (int j : chosen)
      if (t.cost[c][j] < best) {
        best = t.cost[c][j];
        arg = j;
      }
    total.add(best);
    if (assign_out) (*assign_out)[c] = arg;
  }
  return total.value();
}

}  // namespace

SeedSolution seed_solution(const Instance& inst, const SeedConfig& cfg) {
  CandidateTable t = build_candidates(inst);
  const int n = inst.num_clients();
  const int num_cand = static_cast<int>(t.points.size());
  const int p = static_cast<int>(
      std::min<std::int64_t>(static_cast<std::int64_t>(inst.k) + inst.m,
                             num_cand));

  // Greedy: repeatedly add the candidate that lowers total cost the most.
  std::vector<int> chosen;
  std::vector<char> in_use(num_cand, 0);
  std::vector<double> best_dist(n, kInfiniteCost);
  for (int step = 0; step < p; ++step) {
    int pick = -1;
    double pick_cost = kInfiniteCost;
    for (int j = 0; j < num_cand; ++j) {
      if (in_use[j]) continue;
      CompensatedSum s;
      for (int c = 0; c < n; ++c)
        s.add(std::min(best_dist[c], t.cost[c][j]));
      double v = s.value();
      if (v < pick_cost) {
        pick_cost = v;
        pick = j;
      }
    }
    chosen.push_back(pick);
    in_use[pick] = 1;
    for (int c = 0; c < n; ++c)
      best_dist[c] = std::min(best_dist[c], t.cost[c][pick]);
  }

  // Single-swap local search; swaps must clear a relative threshold so the
  // loop terminates in polynomially many improving steps.
  double current = eval_centers(t, chosen, nullptr);
  const double threshold = cfg.improvement_factor / (10.0 * p);
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    int best_out = -1, best_in = -1;
    double best_cost = current;
    for (std::size_t oi = 0; oi < chosen.size(); ++oi) {
      int saved = chosen[oi];
      for (int j = 0; j < num_cand; ++j) {
        if (in_use[j]) continue;
        chosen[oi] = j;
        double v = eval_centers(t, chosen, nullptr);
        if (v < best_cost - threshold * std::max(1.0, current)) {
          best_cost = v;
          best_out = static_cast<int>(oi);
          best_in = j;
        }
      }
      chosen[oi] = saved;
    }
    if (best_in < 0) break;
    in_use[chosen[best_out]] = 0;
    in_use[best_in] = 1;
    chosen[best_out] = best_in;
    current = best_cost;
  }

  SeedSolution seed;
  std::vector<int> chosen_sorted = chosen;
  std::sort(chosen_sorted.begin(), chosen_sorted.end());
  seed.centers.reserve(chosen_sorted.size());
  for (int j : chosen_sorted) seed.centers.push_back(t.points[j]);
  std::vector<int> assign(n, -1);
  seed.cost = eval_centers(t, chosen_sorted, &assign);
  seed.assign.resize(n);
  for (int c = 0; c < n; ++c) {
    // map candidate index back to position within seed.centers
    auto it = std::lower_bound(chosen_sorted.begin(), chosen_sorted.end(),
                               assign[c]);
    seed.assign[c] = static_cast<int>(it - chosen_sorted.begin());
  }
  return seed;
}

RingSystem build_rings(const Instance& inst, const SeedSolution& seed,
                       double zeta) {
  if (zeta < 1.0) throw std::invalid_argument("zeta must be >= 1");
  const int n = inst.num_clients();
  RingSystem sys;
  sys.seed_cost = seed.cost;
  sys.R = seed.cost / (zeta * n);
  sys.psi_formula = static_cast<int>(
      std::ceil(std::log2(std::max(2.0, zeta * n))));
  sys.psi = sys.psi_formula;

  std::vector<double> center_dist(n);
  double max_dist = 0.0;
  for (int c = 0; c < n; ++c) {
    center_dist[c] = inst.metric->distance(inst.clients[c],
                                           seed.centers[seed.assign[c]]);
    max_dist = std::max(max_dist, center_dist[c]);
  }

  if (sys.R == 0.0) {
    // Degenerate: every client sits on its center; one radius-0 ring each.
    std::vector<std::vector<int>> members(seed.centers.size());
    for (int c = 0; c < n; ++c) members[seed.assign[c]].push_back(c);
    for (std::size_t f = 0; f < seed.centers.size(); ++f)
      if (!members[f].empty())
        sys.rings.push_back({static_cast<int>(f), seed.centers[f], 0, 0.0,
                             members[f]});
    return sys;
  }

  while (std::ldexp(sys.R, sys.psi) < max_dist) ++sys.psi;

  std::vector<std::vector<std::vector<int>>> members(
      seed.centers.size(), std::vector<std::vector<int>>(sys.psi + 1));
  for (int c = 0; c < n; ++c) {
    int level = 0;
    while (center_dist[c] > std::ldexp(sys.R, level)) ++level;
    members[seed.assign[c]][level].push_back(c);
  }
  for (std::size_t f = 0; f < seed.centers.size(); ++f)
    for (int j = 0; j <= sys.psi; ++j)
      if (!members[f][j].empty())
        sys.rings.push_back({static_cast<int>(f), seed.centers[f], j,
                             std::ldexp(sys.R, j), members[f][j]});
  return sys;
}

RingSample sample_ring(const Ring& ring, int ring_index, std::int64_t s,
                       Rng& rng) {
  RingSample out;
  out.ring_index = ring_index;
  out.ring_size = static_cast<std::int64_t>(ring.members.size());
  if (s <= 0) throw std::invalid_argument("sample size must be positive");
  if (out.ring_size <= s) {
    out.passthrough = true;
    out.sample_size = out.ring_size;
    out.sampled = ring.members;  // already ascending
    return out;
  }
  out.sample_size = s;
  std::vector<int> pool = ring.members;
  std::sort(pool.begin(), pool.end());
  for (std::int64_t i = 0; i < s; ++i) {
    std::int64_t j =
        i + static_cast<std::int64_t>(rng.uniform_below(
                static_cast<std::uint64_t>(pool.size() - i)));
    std::swap(pool[i], pool[j]);
  }
  out.sampled.assign(pool.begin(), pool.begin() + s);
  return out;
}

std::vector<std::pair<int, std::int64_t>> integralize(
    const RingSample& sample) {
  std::vector<std::pair<int, std::int64_t>> out;
  out.reserve(sample.sampled.size());
  if (sample.passthrough) {
    for (int c : sample.sampled) out.push_back({c, 1});
    return out;
  }
  const std::int64_t base = sample.ring_size / sample.sample_size;
  const std::int64_t extra = sample.ring_size % sample.sample_size;
  for (std::int64_t i = 0; i < sample.sample_size; ++i)
    out.push_back({sample.sampled[i], base + (i < extra ? 1 : 0)});
  return out;
}

CoresetResult build_coreset(const Instance& inst, double epsilon,
                            std::uint64_t seed, const CoresetConfig& cfg) {
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
    Rng rng(derive_seed(
        seed, {kRingStreamTag, static_cast<std::uint64_t>(ring.center),
               static_cast<std::uint64_t>(ring.level)}));
    RingSample sample = sample_ring(ring, static_cast<int>(i), s, rng);
    for (const auto& [client, w] : integralize(sample))
      out.weights.add(client, w);
    out.meta.rings.push_back({ring.center_point, ring.level, ring.radius,
                              sample.ring_size, sample.sample_size,
                              sample.passthrough});
    if (!sample.passthrough) out.meta.sampling_occurred = true;
  }

  out.meta.total_weight = out.weights.total_weight();
  out.meta.support_size = out.weights.support_size();
  if (out.meta.total_weight != n)
    throw std::logic_error("coreset weight must match the client count");
  return out;
}

}  // namespace ckmo
