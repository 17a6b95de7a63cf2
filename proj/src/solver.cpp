#include "ckmo/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace ckmo {

namespace {

constexpr std::uint64_t kRetryStreamTag = 0x52545259ULL;

std::vector<int> first_combination(int r) {
  std::vector<int> idx(r);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

bool next_combination(std::vector<int>& idx, int n) {
  const int r = static_cast<int>(idx.size());
  int i = r - 1;
  while (i >= 0 && idx[i] == n - r + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

double combinations_upto(int n, std::int64_t r) {
  double total = 0.0, c = 1.0;
  for (std::int64_t t = 0; t <= std::min<std::int64_t>(r, n); ++t) {
    total += c;
    c = c * (n - t) / (t + 1);
  }
  return total;
}

}  // namespace

GuessEnumerator::GuessEnumerator(const WeightedClientSet& weights,
                                 std::int64_t m) {
  m_ = std::min(m, weights.total_weight());
  if (m_ < 0) m_ = 0;
  support_.reserve(weights.entries().size());
  weight_.reserve(weights.entries().size());
  for (const auto& [c, w] : weights.entries()) {
    support_.push_back(c);
    weight_.push_back(w);
  }
}

double GuessEnumerator::count_bound(int support_size, std::int64_t m) {
  const double subsets = combinations_upto(support_size, m);
  const double comps =
      m <= 0 ? 1.0
             : std::pow(static_cast<double>(m), static_cast<double>(m));
  return subsets * comps;
}

bool GuessEnumerator::advance_subset() {
  const int s = static_cast<int>(support_.size());
  const int max_size = static_cast<int>(
      std::min<std::int64_t>(m_, static_cast<std::int64_t>(s)));
  while (true) {
    if (size_ == 0) {
      size_ = 1;
      if (size_ > max_size) return false;
      subset_ = first_combination(size_);
    } else if (!next_combination(subset_, s)) {
      ++size_;
      if (size_ > max_size) return false;
      subset_ = first_combination(size_);
    }
    std::int64_t w = 0;
    for (int i : subset_) w += weight_[i];
    if (w >= m_) return true;
  }
}

bool GuessEnumerator::first_composition() {
  const int t = static_cast<int>(subset_.size());
  comp_.assign(t, 0);
  std::vector<std::int64_t> cap(t), suffix_cap(t + 1, 0);
  for (int i = 0; i < t; ++i) cap[i] = std::min(m_, weight_[subset_[i]]);
  for (int i = t - 1; i >= 0; --i) suffix_cap[i] = suffix_cap[i + 1] + cap[i];
  std::int64_t rem = m_;
  for (int i = 0; i < t; ++i) {
    // smallest value that leaves the suffix coverable
    std::int64_t lo = std::max<std::int64_t>(1, rem - suffix_cap[i + 1]);
    if (lo > cap[i] || rem - lo < t - 1 - i) return false;
    comp_[i] = lo;
    rem -= lo;
  }
  return rem == 0;
}

bool GuessEnumerator::next_composition() {
  const int t = static_cast<int>(subset_.size());
  std::vector<std::int64_t> cap(t), suffix_cap(t + 1, 0);
  for (int i = 0; i < t; ++i) cap[i] = std::min(m_, weight_[subset_[i]]);
  for (int i = t - 1; i >= 0; --i) suffix_cap[i] = suffix_cap[i + 1] + cap[i];

  std::int64_t suffix_sum = 0;
  for (int i = t - 2; i >= 0; --i) {
    suffix_sum += comp_[i + 1];
    const std::int64_t budget = suffix_sum - 1;  // one unit moves to slot i
    if (comp_[i] + 1 > cap[i]) continue;
    if (budget < t - 1 - i || budget > suffix_cap[i + 1]) continue;
    comp_[i] += 1;
    std::int64_t rem = budget;
    for (int j = i + 1; j < t; ++j) {
      std::int64_t lo = std::max<std::int64_t>(1, rem - suffix_cap[j + 1]);
      comp_[j] = lo;
      rem -= lo;
    }
    return true;
  }
  return false;
}

std::optional<OutlierGuess> GuessEnumerator::next() {
  if (done_) return std::nullopt;
  if (m_ == 0) {
    done_ = true;
    ++emitted_;
    return OutlierGuess{};
  }
  while (true) {
    if (fresh_subset_) {
      if (!advance_subset()) {
        done_ = true;
        return std::nullopt;
      }
      if (!first_composition()) continue;
      fresh_subset_ = false;
      break;
    }
    if (next_composition()) break;
    fresh_subset_ = true;
  }
  ++emitted_;
  OutlierGuess g;
  g.clients.reserve(subset_.size());
  g.removed = comp_;
  for (int i : subset_) g.clients.push_back(support_[i]);
  return g;
}

WeightedClientSet residual_weights(const WeightedClientSet& weights,
                                   const OutlierGuess& guess) {
  WeightedClientSet out = weights;
  for (std::size_t i = 0; i < guess.clients.size(); ++i) {
    const std::int64_t have = out.weight(guess.clients[i]);
    if (guess.removed[i] > have)
      throw InvalidSolution("guess removes more weight than present");
    out.set(guess.clients[i], have - guess.removed[i]);
  }
  return out;
}

namespace {

double subset_total_cost(const Instance& inst,
                         const WeightedClientSet& weights,
                         const std::vector<int>& F) {
  CostmResult r = wcost_m(inst, weights, F, 0);
  if (r.cost == kInfiniteCost) return kInfiniteCost;
  double total = r.cost;
  for (int f : F) total += inst.opening_cost(f);
  return total;
}

WckmResult solve_wckm_exact(const Instance& inst,
                            const WeightedClientSet& weights,
                            const CkmConfig& cfg) {
  const int nf = inst.num_facilities();
  const int keff = std::min(inst.k, nf);
  const bool opening = inst.has_opening_costs();
  const int lo = opening ? 0 : keff;

  double planned = 0.0;
  for (int r = lo; r <= keff; ++r) {
    double c = 1.0;
    for (int i = 0; i < r; ++i) c = c * (nf - i) / (i + 1);
    planned += c;
  }
  if (planned > static_cast<double>(cfg.exact_subset_limit)) {
    std::ostringstream os;
    os << "facility subset enumeration needs about " << planned
       << " sets, limit is " << cfg.exact_subset_limit;
    throw LimitExceeded(os.str());
  }

  WckmResult best;
  for (int r = lo; r <= keff; ++r) {
    if (r == 0) {
      if (weights.total_weight() == 0) {
        best.cost = 0.0;
        best.facilities = {};
      }
      continue;
    }
    std::vector<int> idx = first_combination(r);
    while (true) {
      double total = subset_total_cost(inst, weights, idx);
      if (total < best.cost ||
          (total == best.cost && total < kInfiniteCost &&
           idx < best.facilities)) {
        best.cost = total;
        best.facilities = idx;
      }
      if (!next_combination(idx, nf)) break;
    }
  }
  if (best.cost == kInfiniteCost)
    throw Infeasible(
        "no facility subset within k can absorb the residual weight");
  return best;
}

WckmResult solve_wckm_local_search(const Instance& inst,
                                   const WeightedClientSet& weights,
                                   const CkmConfig& cfg) {
  const int nf = inst.num_facilities();
  const int keff = std::min(inst.k, nf);
  const std::int64_t need = weights.total_weight();

  // Start from the largest-capacity subset: feasible if anything is.
  std::vector<int> order(nf);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::make_pair(-inst.capacities[a], a) <
           std::make_pair(-inst.capacities[b], b);
  });
  std::vector<int> F(order.begin(), order.begin() + keff);
  std::sort(F.begin(), F.end());
  std::int64_t cap = 0;
  for (int f : F) cap += inst.capacities[f];
  if (cap < need)
    throw Infeasible(
        "no facility subset within k can absorb the residual weight");

  double current = subset_total_cost(inst, weights, F);
  const bool opening = inst.has_opening_costs();

  for (int iter = 0; iter < cfg.ls_max_iterations; ++iter) {
    std::vector<int> best_set;
    double best_cost = current;
    auto consider = [&](std::vector<int> cand) {
      std::sort(cand.begin(), cand.end());
      double v = subset_total_cost(inst, weights, cand);
      if (v >= best_cost * (1.0 - 1e-9) || v >= best_cost) return;
      best_cost = v;
      best_set = std::move(cand);
    };
    std::vector<char> in_f(nf, 0);
    for (int f : F) in_f[f] = 1;
    for (std::size_t oi = 0; oi < F.size(); ++oi)
      for (int j = 0; j < nf; ++j) {
        if (in_f[j]) continue;
        std::vector<int> cand = F;
        cand[oi] = j;
        consider(std::move(cand));
      }
    if (static_cast<int>(F.size()) < keff)
      for (int j = 0; j < nf; ++j) {
        if (in_f[j]) continue;
        std::vector<int> cand = F;
        cand.push_back(j);
        consider(std::move(cand));
      }
    if (opening && F.size() > 1)
      for (std::size_t oi = 0; oi < F.size(); ++oi) {
        std::vector<int> cand;
        for (std::size_t i = 0; i < F.size(); ++i)
          if (i != oi) cand.push_back(F[i]);
        consider(std::move(cand));
      }
    if (best_set.empty()) break;
    F = std::move(best_set);
    current = best_cost;
  }
  if (current == kInfiniteCost)
    throw Infeasible(
        "no facility subset within k can absorb the residual weight");
  return {F, current};
}

}  // namespace

WckmResult solve_wckm(const Instance& inst, const WeightedClientSet& weights,
                      const CkmConfig& cfg) {
  if (cfg.mode == CkmMode::exact)
    return solve_wckm_exact(inst, weights, cfg);
  return solve_wckm_local_search(inst, weights, cfg);
}

namespace {

struct SweepOutcome {
  double best_cost = kInfiniteCost;
  std::vector<int> best_facilities;
  std::uint64_t enumerated = 0;
  std::uint64_t infeasible = 0;
  std::uint64_t feasible_evaluated = 0;
  std::uint64_t distinct_sets = 0;
  bool partial = false;
  bool limit_breached = false;
};

SweepOutcome sweep_guesses(const Instance& inst,
                           const WeightedClientSet& weights,
                           const SolveConfig& cfg) {
  SweepOutcome out;
  GuessEnumerator guesses(weights, inst.m);
  std::map<std::vector<int>, double> cache;
  std::mutex mx;
  std::exception_ptr failure;
  const auto start = std::chrono::steady_clock::now();
  const double limit_s = cfg.timeout_seconds;

  struct Local {
    double best_cost = kInfiniteCost;
    std::vector<int> best_facilities;
  };
  const int nthreads = std::max(1, cfg.threads);
  std::vector<Local> locals(nthreads);

  auto worker = [&](int tid) {
    Local& local = locals[tid];
    while (true) {
      OutlierGuess guess;
      {
        std::lock_guard<std::mutex> lk(mx);
        if (failure || out.partial || out.limit_breached) return;
        if (guesses.emitted() >= cfg.max_guesses) {
          if (auto peek = guesses.next()) {
            out.limit_breached = true;
            return;
          }
          return;
        }
        if (limit_s > 0.0) {
          const double elapsed =
              std::chrono::duration<double>(
                  std::chrono::steady_clock::now() - start)
                  .count();
          if (elapsed > limit_s) {
            out.partial = true;
            return;
          }
        }
        auto g = guesses.next();
        if (!g) return;
        guess = std::move(*g);
      }
      try {
        WeightedClientSet residual = residual_weights(weights, guess);
        WckmResult cand;
        try {
          cand = solve_wckm(inst, residual, cfg.plugin);
        } catch (const Infeasible&) {
          std::lock_guard<std::mutex> lk(mx);
          ++out.infeasible;
          continue;
        }
        bool have = false;
        double total = 0.0;
        {
          std::lock_guard<std::mutex> lk(mx);
          ++out.feasible_evaluated;
          auto it = cache.find(cand.facilities);
          if (it != cache.end()) {
            have = true;
            total = it->second;
          }
        }
        if (!have) {
          CostmResult ev = cost_m(inst, cand.facilities, inst.m);
          total = ev.cost;
          if (total < kInfiniteCost)
            for (int f : cand.facilities) total += inst.opening_cost(f);
          std::lock_guard<std::mutex> lk(mx);
          cache.emplace(cand.facilities, total);
        }
        if (total < local.best_cost ||
            (total == local.best_cost && total < kInfiniteCost &&
             cand.facilities < local.best_facilities)) {
          local.best_cost = total;
          local.best_facilities = cand.facilities;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lk(mx);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  if (nthreads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (const Local& l : locals) {
    if (l.best_cost < out.best_cost ||
        (l.best_cost == out.best_cost && l.best_cost < kInfiniteCost &&
         l.best_facilities < out.best_facilities)) {
      out.best_cost = l.best_cost;
      out.best_facilities = l.best_facilities;
    }
  }
  out.enumerated = guesses.emitted();
  out.distinct_sets = cache.size();
  return out;
}

Solution solution_for(const Instance& inst, const std::vector<int>& F) {
  CostmResult r = cost_m(inst, F, inst.m);
  if (r.cost == kInfiniteCost)
    throw std::logic_error("winning facility set stopped being feasible");
  return r.solution;
}

}  // namespace

SolveResult solve_ckmo(const Instance& inst, std::uint64_t seed,
                       const SolveConfig& cfg) {
  RunReport report;
  report.seed = seed;
  report.guess_bound = 0.0;

  double best_cost = kInfiniteCost;
  std::vector<int> best_f;
  bool any_sweep = false;

  for (int retry = 0; retry <= std::max(0, cfg.retries); ++retry) {
    const std::uint64_t pass_seed =
        derive_seed(seed, {kRetryStreamTag,
                           static_cast<std::uint64_t>(retry)});
    WeightedClientSet weights;
    std::optional<CoresetMetadata> meta;
    if (cfg.no_coreset) {
      weights = WeightedClientSet::all_ones(inst.num_clients());
    } else {
      CoresetResult cs = build_coreset(inst, cfg.epsilon, pass_seed,
                                       cfg.coreset);
      weights = std::move(cs.weights);
      meta = std::move(cs.meta);
    }

    const double bound =
        GuessEnumerator::count_bound(weights.support_size(), inst.m);
    SweepOutcome sweep = sweep_guesses(inst, weights, cfg);
    if (sweep.limit_breached) {
      std::ostringstream os;
      os << "guess budget " << cfg.max_guesses << " exhausted after "
         << sweep.enumerated << " guesses";
      throw LimitExceeded(os.str());
    }
    if (sweep.enumerated > bound)
      throw std::logic_error("guess enumeration exceeded its proven bound");

    report.guesses_enumerated += sweep.enumerated;
    report.guesses_infeasible += sweep.infeasible;
    report.guess_bound += bound;
    report.distinct_facility_sets += sweep.distinct_sets;
    report.evaluation_cache_hits +=
        sweep.feasible_evaluated - sweep.distinct_sets;
    report.partial = report.partial || sweep.partial;
    any_sweep = true;

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
        "no facility set produced by any guess can serve the clients");
  }
  (void)any_sweep;

  report.best_cost = best_cost;
  report.best_facilities = best_f;

  SolveResult res;
  res.report = std::move(report);
  res.solution = solution_for(inst, best_f);
  return res;
}

SolveResult brute_force_ckmo(const Instance& inst,
                             const BruteForceConfig& cfg) {
  const int nf = inst.num_facilities();
  const int keff = std::min(inst.k, nf);
  const bool opening = inst.has_opening_costs();
  const int lo = opening ? 0 : keff;

  double planned = 0.0;
  for (int r = lo; r <= keff; ++r) {
    double c = 1.0;
    for (int i = 0; i < r; ++i) c = c * (nf - i) / (i + 1);
    planned += c;
  }
  if (planned > static_cast<double>(cfg.subset_limit)) {
    std::ostringstream os;
    os << "brute force needs about " << planned << " subsets, limit is "
       << cfg.subset_limit;
    throw LimitExceeded(os.str());
  }

  double best_cost = kInfiniteCost;
  std::vector<int> best_f;
  std::uint64_t tried = 0;
  for (int r = lo; r <= keff; ++r) {
    if (r == 0) {
      ++tried;
      if (static_cast<std::int64_t>(inst.num_clients()) <= inst.m) {
        best_cost = 0.0;
        best_f = {};
      }
      continue;
    }
    std::vector<int> idx = first_combination(r);
    while (true) {
      ++tried;
      CostmResult ev = cost_m(inst, idx, inst.m);
      double total = ev.cost;
      if (total < kInfiniteCost)
        for (int f : idx) total += inst.opening_cost(f);
      if (total < best_cost ||
          (total == best_cost && total < kInfiniteCost && idx < best_f)) {
        best_cost = total;
        best_f = idx;
      }
      if (!next_combination(idx, nf)) break;
    }
  }
  if (best_cost == kInfiniteCost)
    throw Infeasible("no facility subset within k can serve the clients");

  SolveResult res;
  res.report.best_cost = best_cost;
  res.report.best_facilities = best_f;
  res.report.distinct_facility_sets = tried;
  res.solution = solution_for(inst, best_f);
  return res;
}

}  // namespace ckmo
