#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ckmo/coreset.hpp"
#include "ckmo/flow.hpp"
#include "ckmo/model.hpp"

namespace ckmo {

// One removal pattern (T, r): take r[i] >= 1 units off clients[i]'s weight,
// summing to min(m, total weight).
struct OutlierGuess {
  std::vector<int> clients;           // ascending client positions
  std::vector<std::int64_t> removed;  // aligned with clients
};

// Streams every guess exactly once: subsets of the support by size then
// lexicographic order, and for each subset all bounded compositions of the
// budget in lexicographic order. Subsets whose weight cannot cover the
// budget are skipped.
class GuessEnumerator {
 public:
  GuessEnumerator(const WeightedClientSet& weights, std::int64_t m);

  std::optional<OutlierGuess> next();
  std::uint64_t emitted() const { return emitted_; }
  std::int64_t effective_budget() const { return m_; }

  // Upper bound sum_{t<=m} C(support, t) * m^m (m^0 read as 1), in double
  // because it overflows integers quickly.
  static double count_bound(int support_size, std::int64_t m);

 private:
  bool open_subset();       // position subset_ at the first valid size-t set
  bool advance_subset();
  bool first_composition();
  bool next_composition();

  std::vector<int> support_;
  std::vector<std::int64_t> weight_;
  std::int64_t m_ = 0;
  int size_ = 0;                 // current subset size
  std::vector<int> subset_;      // indices into support_
  std::vector<std::int64_t> comp_;
  bool done_ = false;
  bool fresh_subset_ = true;
  std::uint64_t emitted_ = 0;
};

// Removes the guess from the weights; throws InvalidSolution if a removal
// exceeds the client's weight.
WeightedClientSet residual_weights(const WeightedClientSet& weights,
                                   const OutlierGuess& guess);

enum class CkmMode { exact, local_search };

struct CkmConfig {
  CkmMode mode = CkmMode::exact;
  // exact: LimitExceeded when the subset count would pass this.
  std::uint64_t exact_subset_limit = 2'000'000;
  int ls_max_iterations = 200;
};

struct WckmResult {
  std::vector<int> facilities;  // sorted positions
  double cost = kInfiniteCost;  // assignment (m = 0) + opening costs
};

// Capacitated weighted k-median without outliers over at most k facilities.
// exact mode enumerates subsets (exactly min(k, |facilities|) of them when
// no opening costs exist, all sizes <= min(k, |facilities|) otherwise);
// local_search starts from the largest-capacity subset and swaps. Throws
// Infeasible when no allowed subset can absorb the total weight.
WckmResult solve_wckm(const Instance& inst, const WeightedClientSet& weights,
                      const CkmConfig& cfg = {});

struct SolveConfig {
  CkmConfig plugin;
  CoresetConfig coreset;
  double epsilon = 0.5;
  std::uint64_t max_guesses = 10'000'000;  // LimitExceeded beyond
  int threads = 1;
  double timeout_seconds = 0.0;  // 0: unlimited; breach flags `partial`
  int retries = 0;               // extra full passes with derived seeds
  bool no_coreset = false;       // skip sampling, use the clients directly
};

struct RunReport {
  std::uint64_t guesses_enumerated = 0;
  std::uint64_t guesses_infeasible = 0;  // plugin found no facility set
  double guess_bound = 0.0;              // enumerated <= bound always holds
  std::uint64_t distinct_facility_sets = 0;
  std::uint64_t evaluation_cache_hits = 0;
  bool partial = false;  // timeout interrupted the sweep
  std::optional<CoresetMetadata> coreset;
  double best_cost = kInfiniteCost;
  std::vector<int> best_facilities;
  int winning_retry = 0;
  std::uint64_t seed = 0;
};

struct SolveResult {
  Solution solution;
  RunReport report;
};

// Full pipeline: coreset -> outlier guesses -> plugin k-median on residual
// weights -> evaluate candidates on the real clients, keep the best.
// Throws Infeasible when no candidate facility set can serve the clients,
// LimitExceeded when max_guesses is breached.
SolveResult solve_ckmo(const Instance& inst, std::uint64_t seed,
                       const SolveConfig& cfg = {});

struct BruteForceConfig {
  std::uint64_t subset_limit = 2'000'000;
};

// Reference optimum by facility-subset enumeration with an exact
// assignment per subset. Exponential in k; guards with LimitExceeded.
SolveResult brute_force_ckmo(const Instance& inst,
                             const BruteForceConfig& cfg = {});

}  // namespace ckmo
