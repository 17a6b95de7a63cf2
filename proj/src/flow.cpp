#include "ckmo/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace ckmo {

std::int64_t FlowNetwork::total_positive_demand() const {
  std::int64_t s = 0;
  for (std::int64_t d : node_demand)
    if (d > 0) s += d;
  return s;
}

std::int64_t FlowNetwork::demand_imbalance() const {
  std::int64_t s = 0;
  for (std::int64_t d : node_demand) s += d;
  return s;
}

namespace {

// Residual representation: arc 2i is the forward copy of input arc i,
// arc 2i^1 its reverse; residual capacity lives in cap[], flow on the
// original arc is flow on 2i.
struct Residual {
  int num_nodes = 0;
  std::vector<int> head;       // per residual arc
  std::vector<double> cost;    // per residual arc
  std::vector<std::int64_t> cap;
  std::vector<std::vector<int>> out;  // node -> residual arc ids

  int add(int from, int to, std::int64_t capacity, double c) {
    int id = static_cast<int>(head.size());
    head.push_back(to);
    cost.push_back(c);
    cap.push_back(capacity);
    out[from].push_back(id);
    head.push_back(from);
    cost.push_back(-c);
    cap.push_back(0);
    out[to].push_back(id + 1);
    return id;
  }
};

}  // namespace

FlowResult solve_mcf(const FlowNetwork& net) {
  const int n = net.node_count();
  for (const FlowArc& a : net.arcs) {
    if (a.from < 0 || a.from >= n || a.to < 0 || a.to >= n)
      throw std::invalid_argument("flow arc endpoint out of range");
    if (!(a.cost >= 0.0) || !std::isfinite(a.cost))
      throw std::invalid_argument("flow arc cost must be finite and >= 0");
  }
  if (net.demand_imbalance() != 0) {
    std::ostringstream os;
    os << "flow demands do not balance (net " << net.demand_imbalance()
       << ")";
    throw Infeasible(os.str());
  }

  const std::int64_t target = net.total_positive_demand();
  Residual g;
  g.num_nodes = n + 2;
  g.out.resize(g.num_nodes);
  const int src = n, snk = n + 1;

  // Unbounded arcs can never usefully carry more than the total supply:
  // integral b-flows decompose into source-to-sink paths of total value
  // `target` plus circulations, and SSP creates no circulations.
  for (const FlowArc& a : net.arcs)
    g.add(a.from, a.to, a.capacity < 0 ? target : a.capacity, a.cost);
  for (int v = 0; v < n; ++v) {
    if (net.node_demand[v] > 0) g.add(src, v, net.node_demand[v], 0.0);
    if (net.node_demand[v] < 0) g.add(v, snk, -net.node_demand[v], 0.0);
  }

  std::vector<double> pot(g.num_nodes, 0.0), dist(g.num_nodes);
  std::vector<int> parent_arc(g.num_nodes);
  const double inf = std::numeric_limits<double>::infinity();
  std::int64_t routed = 0;

  while (routed < target) {
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(parent_arc.begin(), parent_arc.end(), -1);
    dist[src] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    pq.push({0.0, src});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (int id : g.out[u]) {
        if (g.cap[id] <= 0) continue;
        int v = g.head[id];
        // Reduced costs are nonnegative up to roundoff; clamp the noise.
        double rc = std::max(0.0, g.cost[id] + pot[u] - pot[v]);
        double nd = d + rc;
        if (nd < dist[v]) {
          dist[v] = nd;
          parent_arc[v] = id;
          pq.push({nd, v});
        }
      }
    }
    if (dist[snk] == inf) {
      std::ostringstream os;
      os << "flow infeasible: capacities route only " << routed << " of "
         << target << " demand units";
      throw Infeasible(os.str());
    }
    for (int v = 0; v < g.num_nodes; ++v)
      pot[v] += std::min(dist[v], dist[snk]);
    std::int64_t push = std::numeric_limits<std::int64_t>::max();
    for (int v = snk; v != src;) {
      int id = parent_arc[v];
      push = std::min(push, g.cap[id]);
      v = g.head[id ^ 1];
    }
    for (int v = snk; v != src;) {
      int id = parent_arc[v];
      g.cap[id] -= push;
      g.cap[id ^ 1] += push;
      v = g.head[id ^ 1];
    }
    routed += push;
  }

  FlowResult res;
  res.arc_flow.resize(net.arcs.size());
  CompensatedSum total;
  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    res.arc_flow[i] = g.cap[2 * i + 1];  // reverse residual = pushed flow
    total.add(static_cast<double>(res.arc_flow[i]) * net.arcs[i].cost);
  }
  res.cost = total.value();

  // Conservation and capacity re-check; a failure here is a solver bug.
  std::vector<std::int64_t> balance(n, 0);
  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    const FlowArc& a = net.arcs[i];
    if (res.arc_flow[i] < 0 ||
        (a.capacity >= 0 && res.arc_flow[i] > a.capacity))
      throw std::logic_error("flow solver produced an illegal arc flow");
    balance[a.from] += res.arc_flow[i];
    balance[a.to] -= res.arc_flow[i];
  }
  for (int v = 0; v < n; ++v)
    if (balance[v] != net.node_demand[v])
      throw std::logic_error("flow solver violated node conservation");
  return res;
}

bool residual_has_negative_cycle(const FlowNetwork& net,
                                 const FlowResult& result, double tol) {
  const int n = net.node_count();
  struct RArc {
    int from, to;
    double cost;
  };
  std::vector<RArc> arcs;
  double max_cost = 1.0;
  const std::int64_t big = net.total_positive_demand();
  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    const FlowArc& a = net.arcs[i];
    max_cost = std::max(max_cost, std::abs(a.cost));
    std::int64_t cap = a.capacity < 0 ? big : a.capacity;
    if (result.arc_flow[i] < cap) arcs.push_back({a.from, a.to, a.cost});
    if (result.arc_flow[i] > 0) arcs.push_back({a.to, a.from, -a.cost});
  }
  const double eps = tol * max_cost;
  std::vector<double> dist(n, 0.0);
  for (int pass = 0; pass < n; ++pass) {
    bool any = false;
    for (const RArc& a : arcs)
      if (dist[a.from] + a.cost < dist[a.to] - eps) {
        dist[a.to] = dist[a.from] + a.cost;
        any = true;
      }
    if (!any) return false;
  }
  return true;
}

McfoResult solve_mcfo(const std::vector<std::int64_t>& demands,
                      const std::vector<std::int64_t>& capacities,
                      const CostFn& cost, std::int64_t m) {
  const int nc = static_cast<int>(demands.size());
  const int nf = static_cast<int>(capacities.size());
  if (m < 0) throw std::invalid_argument("negative outlier budget");
  std::int64_t total = 0, total_cap = 0;
  for (std::int64_t d : demands) {
    if (d < 0) throw std::invalid_argument("negative demand");
    total += d;
  }
  for (std::int64_t u : capacities) {
    if (u < 0) throw std::invalid_argument("negative capacity");
    total_cap += u;
  }
  const std::int64_t q = std::min(m, total);
  if (total - q > total_cap) {
    std::ostringstream os;
    os << "capacities " << total_cap << " cannot serve " << total - q
       << " demand units (total " << total << ", outlier budget " << m
       << ")";
    throw Infeasible(os.str());
  }

  double max_cost = 0.0;
  for (int c = 0; c < nc; ++c)
    for (int f = 0; f < nf; ++f)
      if (demands[c] > 0 && capacities[f] > 0)
        max_cost = std::max(max_cost, cost(c, f));
  const double penalty = max_cost + 1.0;

  FlowNetwork net;
  for (int c = 0; c < nc; ++c) net.add_node(demands[c]);
  for (int f = 0; f < nf; ++f) net.add_node(0);
  const int sink = net.add_node(-(total - q));
  const int dummy = net.add_node(-q);
  std::vector<std::vector<int>> assign_arc(nc, std::vector<int>(nf, -1));
  for (int c = 0; c < nc; ++c) {
    if (demands[c] == 0) continue;
    for (int f = 0; f < nf; ++f)
      if (capacities[f] > 0)
        assign_arc[c][f] = net.add_arc(
            c, nc + f, std::min(demands[c], capacities[f]), cost(c, f));
    net.add_arc(c, dummy, demands[c], penalty);
  }
  for (int f = 0; f < nf; ++f)
    if (capacities[f] > 0) net.add_arc(nc + f, sink, capacities[f], 0.0);

  FlowResult flow = solve_mcf(net);

  McfoResult out;
  out.outliers.assign(nc, 0);
  out.served = total - q;
  CompensatedSum real_cost;
  for (int c = 0; c < nc; ++c)
    for (int f = 0; f < nf; ++f) {
      int id = assign_arc[c][f];
      if (id < 0 || flow.arc_flow[id] == 0) continue;
      out.assigned.push_back({c, f, flow.arc_flow[id]});
      real_cost.add(static_cast<double>(flow.arc_flow[id]) * cost(c, f));
    }
  for (std::size_t i = 0; i < net.arcs.size(); ++i)
    if (net.arcs[i].to == dummy && flow.arc_flow[i] > 0)
      out.outliers[net.arcs[i].from] += flow.arc_flow[i];
  out.cost = real_cost.value();
  return out;
}

PenaltyLiteralResult solve_mcfo_penalty_literal(
    const std::vector<std::int64_t>& demands,
    const std::vector<std::int64_t>& capacities, const CostFn& cost,
    std::int64_t m) {
  const int nc = static_cast<int>(demands.size());
  const int nf = static_cast<int>(capacities.size());
  std::int64_t total = 0, total_cap = 0;
  for (std::int64_t d : demands) total += d;
  for (std::int64_t u : capacities) total_cap += u;
  const std::int64_t q = std::min(m, total);
  if (total - q > total_cap)
    throw Infeasible("capacities cannot serve demand minus outlier budget");

  double max_cost = 0.0;
  for (int c = 0; c < nc; ++c)
    for (int f = 0; f < nf; ++f)
      if (demands[c] > 0 && capacities[f] > 0)
        max_cost = std::max(max_cost, cost(c, f));
  const double penalty = max_cost + 1.0;

  // Dummy may absorb anything up to q; at cost above every real arc it
  // only takes what capacities force.
  FlowNetwork net;
  for (int c = 0; c < nc; ++c) net.add_node(demands[c]);
  for (int f = 0; f < nf; ++f) net.add_node(0);
  const int sink = net.add_node(-total);
  const int dummy = net.add_node(0);
  std::vector<std::vector<int>> assign_arc(nc, std::vector<int>(nf, -1));
  for (int c = 0; c < nc; ++c) {
    if (demands[c] == 0) continue;
    for (int f = 0; f < nf; ++f)
      if (capacities[f] > 0)
        assign_arc[c][f] = net.add_arc(
            c, nc + f, std::min(demands[c], capacities[f]), cost(c, f));
    net.add_arc(c, dummy, demands[c], penalty);
  }
  for (int f = 0; f < nf; ++f)
    if (capacities[f] > 0) net.add_arc(nc + f, sink, capacities[f], 0.0);
  net.add_arc(dummy, sink, q, 0.0);

  FlowResult flow = solve_mcf(net);

  PenaltyLiteralResult out;
  std::vector<std::pair<double, std::int64_t>> served_units;  // cost, amount
  std::int64_t dummy_units = 0;
  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    if (flow.arc_flow[i] == 0) continue;
    const FlowArc& a = net.arcs[i];
    if (a.to == dummy)
      dummy_units += flow.arc_flow[i];
    else if (a.from < nc && a.to >= nc && a.to < nc + nf)
      served_units.push_back({a.cost, flow.arc_flow[i]});
  }
  out.forced_outliers = dummy_units;
  std::sort(served_units.begin(), served_units.end(),
            [](const auto& x, const auto& y) { return x.first > y.first; });
  std::int64_t to_discard = q - dummy_units;
  CompensatedSum kept;
  for (auto& [unit_cost, amount] : served_units) {
    std::int64_t drop = std::min(amount, to_discard);
    to_discard -= drop;
    out.discarded += drop;
    kept.add(static_cast<double>(amount - drop) * unit_cost);
  }
  out.cost = kept.value();
  return out;
}

namespace {

CostmResult assignment_with_outliers(const Instance& inst,
                                     const WeightedClientSet& weights,
                                     const std::vector<int>& F,
                                     std::int64_t m) {
  CostmResult out;
  out.solution.open_facilities = F;
  std::sort(out.solution.open_facilities.begin(),
            out.solution.open_facilities.end());
  std::int64_t cap = 0;
  for (int f : F) cap += inst.capacities[f];
  if (cap < weights.total_weight() - m) return out;  // Infinity sentinel

  const auto& entries = weights.entries();
  std::vector<std::int64_t> demands(entries.size());
  std::vector<std::int64_t> caps(F.size());
  for (std::size_t i = 0; i < entries.size(); ++i)
    demands[i] = entries[i].second;
  for (std::size_t j = 0; j < F.size(); ++j) caps[j] = inst.capacities[F[j]];

  McfoResult mc = solve_mcfo(
      demands, caps,
      [&](int c, int f) {
        return inst.assign_cost(entries[c].first, F[f]);
      },
      m);

  out.cost = mc.cost;
  Solution& sol = out.solution;
  sol.assignment_cost = mc.cost;
  sol.cost = mc.cost;
  for (int f : sol.open_facilities) sol.cost += inst.opening_cost(f);
  sol.outlier_amounts.assign(inst.num_clients(), 0);
  for (std::size_t i = 0; i < entries.size(); ++i)
    sol.outlier_amounts[entries[i].first] = mc.outliers[i];
  for (const McfoTriple& t : mc.assigned)
    sol.assignment.push_back({entries[t.client].first, F[t.facility],
                              t.amount});
  std::sort(sol.assignment.begin(), sol.assignment.end(),
            [](const Assignment& a, const Assignment& b) {
              return std::tie(a.client, a.facility) <
                     std::tie(b.client, b.facility);
            });
  return out;
}

}  // namespace

CostmResult wcost_m(const Instance& inst, const WeightedClientSet& weights,
                    const std::vector<int>& F, std::int64_t m) {
  return assignment_with_outliers(inst, weights, F, m);
}

CostmResult cost_m(const Instance& inst, const std::vector<int>& F,
                   std::int64_t m) {
  return assignment_with_outliers(
      inst, WeightedClientSet::all_ones(inst.num_clients()), F, m);
}

FlowNetwork build_fi(const Instance& inst, int center_point,
                     const std::vector<int>& ring_members,
                     const std::vector<std::int64_t>& v,
                     const std::vector<int>& F, std::int64_t m,
                     const WeightedClientSet* weights) {
  const int n = inst.num_clients();
  const int nf = static_cast<int>(F.size());
  if (v.size() != ring_members.size())
    throw std::invalid_argument("v size differs from ring size");

  std::vector<std::int64_t> demand(n);
  std::vector<char> in_ring(n, 0);
  std::int64_t big_n = 0;  // ring weight the center balances against
  for (int c = 0; c < n; ++c)
    demand[c] = weights ? weights->weight(c) : 1;
  for (int c : ring_members) {
    big_n += demand[c];
    in_ring[c] = 1;
  }
  std::int64_t sum_v = 0;
  for (std::size_t i = 0; i < ring_members.size(); ++i) {
    if (v[i] < 0) throw std::invalid_argument("negative ring demand");
    demand[ring_members[i]] = v[i];
    sum_v += v[i];
  }

  // Total demand is independent of v: the center's big_n - sum_v cancels
  // the ring entries' sum_v.
  std::int64_t total = big_n;
  for (int c = 0; c < n; ++c)
    if (!in_ring[c]) total += demand[c];
  const std::int64_t q = std::min(m, total);

  FlowNetwork net;
  for (int c = 0; c < n; ++c) net.add_node(demand[c]);
  const int center = net.add_node(big_n - sum_v);
  std::vector<int> fac_node(nf);
  for (int j = 0; j < nf; ++j) fac_node[j] = net.add_node(0);
  const int escape = net.add_node(-q);
  const int sink = net.add_node(-(total - q));

  auto pc = [&](double d) { return inst.power_cost(d); };
  for (int c = 0; c < n; ++c) {
    if (demand[c] == 0) continue;
    for (int j = 0; j < nf; ++j)
      net.add_arc(c, fac_node[j], -1,
                  pc(inst.metric->distance(inst.clients[c],
                                           inst.facilities[F[j]])));
    net.add_arc(c, center, -1,
                pc(inst.metric->distance(inst.clients[c], center_point)));
  }
  for (int j = 0; j < nf; ++j)
    net.add_arc(center, fac_node[j], -1,
                pc(inst.metric->distance(center_point,
                                         inst.facilities[F[j]])));
  for (int c = 0; c < n; ++c)
    if (demand[c] > 0) net.add_arc(c, escape, -1, 0.0);
  net.add_arc(center, escape, -1, 0.0);
  for (int j = 0; j < nf; ++j)
    net.add_arc(fac_node[j], sink, inst.capacities[F[j]], 0.0);
  return net;
}

double evaluate_g(const Instance& inst, int center_point,
                  const std::vector<int>& ring_members,
                  const std::vector<std::int64_t>& v,
                  const std::vector<int>& F, std::int64_t m,
                  const WeightedClientSet* weights) {
  FlowNetwork net =
      build_fi(inst, center_point, ring_members, v, F, m, weights);
  try {
    return solve_mcf(net).cost;
  } catch (const Infeasible& e) {
    std::ostringstream os;
    os << "ring flow infeasible for the given facilities: " << e.what();
    throw Infeasible(os.str());
  }
}

}  // namespace ckmo
