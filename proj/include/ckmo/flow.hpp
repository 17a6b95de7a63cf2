#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ckmo/model.hpp"

namespace ckmo {

struct FlowArc {
  int from = 0;
  int to = 0;
  std::int64_t capacity = 0;  // < 0 means unbounded
  double cost = 0.0;          // must be finite and >= 0
};

// Node-demand flow network: demand > 0 means the node must emit that much
// net flow, demand < 0 means it must absorb |demand|.
struct FlowNetwork {
  std::vector<std::int64_t> node_demand;
  std::vector<FlowArc> arcs;

  int add_node(std::int64_t demand = 0) {
    node_demand.push_back(demand);
    return static_cast<int>(node_demand.size()) - 1;
  }
  int add_arc(int from, int to, std::int64_t capacity, double cost) {
    arcs.push_back({from, to, capacity, cost});
    return static_cast<int>(arcs.size()) - 1;
  }
  int node_count() const { return static_cast<int>(node_demand.size()); }
  std::int64_t total_positive_demand() const;
  std::int64_t demand_imbalance() const;  // sum over all nodes
};

struct FlowResult {
  std::vector<std::int64_t> arc_flow;  // aligned with FlowNetwork::arcs
  double cost = 0.0;
};

// Exact minimum-cost b-flow via successive shortest paths with node
// potentials. Flows are integral because capacities and demands are.
// Throws Infeasible when demands do not balance or capacities cannot
// route them; throws std::invalid_argument on negative-cost or
// out-of-range arcs.
FlowResult solve_mcf(const FlowNetwork& net);

// True iff the residual graph of (net, result) contains a cycle whose total
// cost is below -tol * max(1, max |arc cost|). Optimal flows have none.
bool residual_has_negative_cycle(const FlowNetwork& net,
                                 const FlowResult& result, double tol = 1e-9);

// ---- assignment with outliers ------------------------------------------

struct McfoTriple {
  int client;
  int facility;
  std::int64_t amount;
};

struct McfoResult {
  double cost = 0.0;                    // real assignment cost only
  std::vector<McfoTriple> assigned;     // sorted by (client, facility)
  std::vector<std::int64_t> outliers;   // per client, sums to min(m, total)
  std::int64_t served = 0;
};

using CostFn = std::function<double(int client, int facility)>;

// Minimum-cost assignment of integral client demands to capacitated
// facilities with up to m units left unserved. A dummy facility absorbs
// exactly min(m, total demand) units through arcs costing
// D = (max finite unit cost) + 1; because that absorption is a fixed
// min(m, total)*D, excluding the dummy arcs from the reported cost
// recovers the exact optimum (with nonnegative costs, serving more than
// total - m units never helps). Throws Infeasible when
// sum(capacities) < total demand - m.
McfoResult solve_mcfo(const std::vector<std::int64_t>& demands,
                      const std::vector<std::int64_t>& capacities,
                      const CostFn& cost, std::int64_t m);

// The same network but with the dummy free to absorb anything up to m, so
// it only takes forced units (capacity shortfall), followed by a greedy
// pass discarding the most expensive served units until m are outliers.
// Greedy discard is not optimal in general; this exists so experiments can
// report how often it agrees with solve_mcfo. Fields: cost after discard,
// forced dummy units max(0, total - sum(capacities)), greedy-discarded
// units.
struct PenaltyLiteralResult {
  double cost = 0.0;
  std::int64_t forced_outliers = 0;
  std::int64_t discarded = 0;
};
PenaltyLiteralResult solve_mcfo_penalty_literal(
    const std::vector<std::int64_t>& demands,
    const std::vector<std::int64_t>& capacities, const CostFn& cost,
    std::int64_t m);

// ---- problem-level wrappers ---------------------------------------------

struct CostmResult {
  double cost = kInfiniteCost;  // assignment cost only (no opening costs)
  Solution solution;            // meaningful only when cost is finite
};

// Optimal capacity-respecting assignment of `weights` to the facility
// positions in F (sorted, distinct) with up to m outlier units. Returns
// the Infinity sentinel when sum of F's capacities < total weight - m.
// solution.cost additionally includes opening costs of every f in F.
CostmResult wcost_m(const Instance& inst, const WeightedClientSet& weights,
                    const std::vector<int>& F, std::int64_t m);

// wcost_m with unit weights on all clients.
CostmResult cost_m(const Instance& inst, const std::vector<int>& F,
                   std::int64_t m);

// ---- ring perturbation flow ----------------------------------------------

// Flow instance behind the sampling analysis: ring members emit v_c, other
// clients emit their weight, the ring center emits N - sum(v) (absorbing
// when negative), facilities absorb up to their capacity and a zero-cost
// escape absorbs exactly min(m, total). Node layout (layout is part of the
// contract; tests rely on it):
//   [0, n)      clients (client positions of `inst`)
//   n           ring center (metric point `center_point`)
//   n+1+i       facility node for F[i]
//   n+1+|F|     escape (dummy) node
//   n+2+|F|     sink absorbing what facilities serve
// Arcs, in order: client->facility (cost d^z), client->center,
// center->facility, client->escape (cost 0), center->escape (cost 0),
// facility->sink (capacity u_f, cost 0).
FlowNetwork build_fi(const Instance& inst, int center_point,
                     const std::vector<int>& ring_members,
                     const std::vector<std::int64_t>& v,
                     const std::vector<int>& F, std::int64_t m,
                     const WeightedClientSet* weights = nullptr);

// Optimal cost of build_fi's network. Throws Infeasible when capacities
// plus the outlier budget cannot cover total demand.
double evaluate_g(const Instance& inst, int center_point,
                  const std::vector<int>& ring_members,
                  const std::vector<std::int64_t>& v,
                  const std::vector<int>& F, std::int64_t m,
                  const WeightedClientSet* weights = nullptr);

}  // namespace ckmo
