#pragma once

#include <cstdint>
#include <vector>

#include "ckmo/coreset.hpp"
#include "ckmo/model.hpp"
#include "ckmo/solver.hpp"

namespace ckmo {

// loads[f][g]: weight of group g served by the f-th open facility.
using GroupLoadMatrix = std::vector<std::vector<std::int64_t>>;

struct WfaoResult {
  Solution solution;     // open set = F; cost includes opening costs of F
  GroupLoadMatrix loads; // winning matrix, rows aligned with F
};

// Minimum-cost integral group-fair assignment to the fixed open set F:
// depth-first search over integral load matrices, pruning rows by exact
// rational proportion bounds and partial transportation costs, then one
// min-cost flow per group realizes the winning matrix integrally. Exact
// but exponential in |F| * number of groups; meant for small F. Throws
// Infeasible when no load matrix satisfies every constraint and
// std::invalid_argument when no fairness spec is available.
WfaoResult solve_wfao(const Instance& inst, const WeightedClientSet& weights,
                      const std::vector<int>& F, const FairnessSpec& spec);
WfaoResult solve_wfao(const Instance& inst, const WeightedClientSet& weights,
                      const std::vector<int>& F);  // spec from the instance

// As build_coreset but sampling runs independently per (ring, group) cell
// with the same per-cell target s, so every group keeps its exact weight
// inside every ring. Census entries carry the group. Single-group
// instances delegate to build_coreset unchanged.
CoresetResult build_fair_coreset(const Instance& inst, double epsilon,
                                 std::uint64_t seed,
                                 const CoresetConfig& cfg = {});

// Group-fair pipeline: fair coreset -> per-group outlier guesses combined
// across groups -> exact facility-subset plugin judged by zero-budget
// solve_wfao on the residual weights -> candidates re-evaluated on the
// full client set with full budgets; best (cost, lexicographic F) wins.
// The plugin is always the exact one and the sweep runs single-threaded.
SolveResult solve_fair_ckmo(const Instance& inst, std::uint64_t seed,
                            const SolveConfig& cfg = {});

// Reference optimum: every allowed facility subset evaluated by
// solve_wfao on unit weights with full budgets.
SolveResult brute_force_fair_ckmo(const Instance& inst,
                                  const BruteForceConfig& cfg = {});

// validate_solution plus the group constraints: per open facility and
// group, beta_g * load <= group load <= alpha_g * load in exact rational
// arithmetic, and per-group outlier totals within budget.
std::vector<std::string> validate_fair_solution(
    const Instance& inst, const Solution& sol,
    const WeightedClientSet& weights);

}  // namespace ckmo
