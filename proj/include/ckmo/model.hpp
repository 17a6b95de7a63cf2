#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ckmo/metric.hpp"

namespace ckmo {

struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LimitExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidSolution : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

// Exact nonnegative rational, normalized, den > 0. Comparisons go through
// __int128 cross products so fairness bounds carry no float error.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d);
  // Exact: every finite double is a dyadic rational. Throws ParseError on
  // values outside [0, 2^62) or non-finite.
  static Rational from_double(double x);
  static Rational parse(const std::string& text);  // "p/q" or decimal

  double to_double() const { return static_cast<double>(num) / den; }
  std::string str() const;
};

bool operator==(const Rational& a, const Rational& b);
bool operator<(const Rational& a, const Rational& b);
inline bool operator<=(const Rational& a, const Rational& b) {
  return a < b || a == b;
}

// r * x <= y and r * x >= y with exact arithmetic.
bool rational_mul_le(const Rational& r, std::int64_t x, std::int64_t y);
bool rational_mul_ge(const Rational& r, std::int64_t x, std::int64_t y);

// Disjoint client groups with per-group proportion bounds and outlier
// budgets. `group_of[i]` is the group of the i-th client *position* (index
// into Instance::clients).
struct FairnessSpec {
  int num_groups = 0;
  std::vector<int> group_of;
  std::vector<Rational> alpha;  // upper proportion bound per group
  std::vector<Rational> beta;   // lower proportion bound per group
  std::vector<std::int64_t> outlier_budget;  // per group

  std::int64_t total_outlier_budget() const;
  std::vector<std::string> validate(int num_clients) const;
};

// Clients/facilities are positions into a shared MetricSpace. `capacities`
// and `opening_costs` align with `facilities`. Assignment costs are
// d(client, facility)^z.
struct Instance {
  MetricPtr metric;
  std::vector<int> clients;
  std::vector<int> facilities;
  std::vector<std::int64_t> capacities;
  std::vector<double> opening_costs;  // empty means all zero
  int k = 1;
  std::int64_t m = 0;
  double z = 1.0;
  std::optional<FairnessSpec> fairness;

  int num_clients() const { return static_cast<int>(clients.size()); }
  int num_facilities() const { return static_cast<int>(facilities.size()); }

  double distance(int client_pos, int facility_pos) const {
    return metric->distance(clients[client_pos], facilities[facility_pos]);
  }
  double assign_cost(int client_pos, int facility_pos) const {
    return power_cost(distance(client_pos, facility_pos));
  }
  double power_cost(double d) const;

  double opening_cost(int facility_pos) const {
    return opening_costs.empty() ? 0.0 : opening_costs[facility_pos];
  }
  bool has_opening_costs() const;
  std::int64_t total_capacity() const;
};

// Sparse nonnegative integer weights over client positions; entries kept
// sorted by client, zero weights dropped.
class WeightedClientSet {
 public:
  WeightedClientSet() = default;
  static WeightedClientSet all_ones(int num_clients);

  void set(int client, std::int64_t w);
  void add(int client, std::int64_t w);
  std::int64_t weight(int client) const;
  std::int64_t total_weight() const { return total_; }
  int support_size() const { return static_cast<int>(entries_.size()); }
  const std::vector<std::pair<int, std::int64_t>>& entries() const {
    return entries_;
  }
  std::vector<int> support() const;

  bool operator==(const WeightedClientSet& o) const {
    return entries_ == o.entries_;
  }

 private:
  std::vector<std::pair<int, std::int64_t>> entries_;
  std::int64_t total_ = 0;
};

struct Assignment {
  int client;    // client position
  int facility;  // facility position
  std::int64_t amount;
};

struct Solution {
  std::vector<int> open_facilities;        // sorted facility positions
  std::vector<Assignment> assignment;      // sorted by (client, facility)
  std::vector<std::int64_t> outlier_amounts;  // per client position
  double assignment_cost = 0.0;            // sum of amount * d^z
  double cost = 0.0;                       // assignment_cost + opening costs

  std::int64_t total_outliers() const;
};

// Violation list for a solution against `weights` (use all_ones for the
// unweighted problem): open set size vs k, assignment targets open, per
// client served + outliers == weight, per facility load <= capacity,
// outlier total <= m, cost fields recomputable within 1e-9 relative.
std::vector<std::string> validate_solution(const Instance& inst,
                                           const Solution& sol,
                                           const WeightedClientSet& weights);

// Recomputes both cost fields from the assignment. Throws InvalidSolution
// (message carries the first violated constraint) if validation fails.
double evaluate_cost(const Instance& inst, const Solution& sol,
                     const WeightedClientSet& weights);
double evaluate_cost(const Instance& inst, const Solution& sol);

// Instance-level structural violations (sizes, k/m ranges, capacities
// nonnegative, metric checks, fairness spec if present). Empty means valid.
std::vector<std::string> validate_instance(const Instance& inst);

// Kahan-Neumaier compensated accumulator for long cost sums.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace ckmo
