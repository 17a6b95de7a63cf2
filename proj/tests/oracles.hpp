#pragma once

// Reference implementations used only by tests. Everything here works by
// exhaustive enumeration and shares no algorithmic code with the library
// solvers it checks.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ckmo/flow.hpp"
#include "ckmo/model.hpp"
#include "ckmo/rng.hpp"

namespace ckmo::oracle {

// Minimum-cost integral b-flow by brute force: DFS over arcs assigning
// every flow value in [0, cap], pruning on node balances as soon as a
// node's incident arcs are all fixed. Returns nullopt when no feasible
// flow exists. Only usable on tiny networks.
std::optional<double> enumerate_min_cost_flow(const FlowNetwork& net);

// Minimum assignment-with-outliers cost by recursing over clients and
// splitting each client's demand across facilities and the outlier pool.
// Returns nullopt when infeasible (even dropping m units exceeds caps).
std::optional<double> enumerate_mcfo_cost(
    const std::vector<std::int64_t>& demands,
    const std::vector<std::int64_t>& capacities,
    const std::function<double(int, int)>& cost, std::int64_t m);

// Best uncapacitated p-median over explicit candidate point ids: minimum
// over all size-<=p candidate subsets of sum of min distances^z.
double enumerate_best_median_cost(const Instance& inst,
                                  const std::vector<int>& candidate_points,
                                  int p);

struct CkmoOracleResult {
  double cost = kInfiniteCost;        // assignment + opening costs
  std::vector<int> facilities;        // sorted positions
};

// Doubly exhaustive: every facility subset (sizes per the opening-cost
// rule), and for each one every way of assigning clients (unit demands)
// to the subset or the outlier pool, respecting capacities and m.
CkmoOracleResult enumerate_ckmo(const Instance& inst);

// Exhaustive weighted fair assignment: for fixed open facilities F, try
// every split of every client's weight across F and the outlier pool,
// check capacities, per-group outlier budgets and per-facility group
// proportion bounds, and return the minimum assignment cost. nullopt when
// no fair assignment exists.
std::optional<double> enumerate_fair_assignment(
    const Instance& inst, const WeightedClientSet& weights,
    const std::vector<int>& F, const FairnessSpec& spec);

// Small random network for solver-vs-enumeration comparisons: <= max_nodes
// nodes with balanced integer demands (a slice is left imbalanced on
// purpose so infeasibility agreement is exercised), <= 9 arcs with
// capacities in [0, 3] and costs on a 0.25 grid.
struct RandomNetworkParams {
  int max_nodes = 8;
  int max_arcs = 9;
  std::int64_t max_capacity = 3;
  double imbalanced_fraction = 0.1;
};
FlowNetwork random_flow_network(Rng& rng,
                                const RandomNetworkParams& params = {});

}  // namespace ckmo::oracle
