#include "ckmo/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ckmo {

namespace {

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  while (b != 0) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
  if (den == 0) throw ParseError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  if (num < 0) throw ParseError("negative rational not allowed");
  std::int64_t g = gcd64(num == 0 ? 1 : num, den);
  num /= g;
  den /= g;
}

Rational Rational::from_double(double x) {
  if (!std::isfinite(x) || x < 0)
    throw ParseError("rational bound must be finite and nonnegative");
  if (x == 0) return Rational(0, 1);
  int exp = 0;
  double mant = std::frexp(x, &exp);  // x = mant * 2^exp, mant in [0.5, 1)
  std::int64_t num = static_cast<std::int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  while (num % 2 == 0 && exp < 0) {
    num /= 2;
    ++exp;
  }
  if (exp > 9 || (exp < 0 && -exp > 62))
    throw ParseError("rational bound out of range");
  if (exp >= 0) {
    if (num > (std::int64_t{1} << 62) >> exp)
      throw ParseError("rational bound out of range");
    return Rational(num << exp, 1);
  }
  return Rational(num, std::int64_t{1} << -exp);
}

Rational Rational::parse(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      std::size_t p1 = 0, p2 = 0;
      std::int64_t n = std::stoll(text.substr(0, slash), &p1);
      std::int64_t d = std::stoll(text.substr(slash + 1), &p2);
      if (p1 != slash || p2 != text.size() - slash - 1)
        throw ParseError("bad rational literal: " + text);
      return Rational(n, d);
    }
    std::size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos != text.size()) throw ParseError("bad rational literal: " + text);
    return from_double(v);
  } catch (const std::invalid_argument&) {
    throw ParseError("bad rational literal: " + text);
  } catch (const std::out_of_range&) {
    throw ParseError("rational literal out of range: " + text);
  }
}

std::string Rational::str() const {
  std::ostringstream os;
  os << num << "/" << den;
  return os.str();
}

bool operator==(const Rational& a, const Rational& b) {
  return a.num == b.num && a.den == b.den;
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num) * b.den <
         static_cast<__int128>(b.num) * a.den;
}

bool rational_mul_le(const Rational& r, std::int64_t x, std::int64_t y) {
  return static_cast<__int128>(r.num) * x <= static_cast<__int128>(y) * r.den;
}

bool rational_mul_ge(const Rational& r, std::int64_t x, std::int64_t y) {
  return static_cast<__int128>(r.num) * x >= static_cast<__int128>(y) * r.den;
}

std::int64_t FairnessSpec::total_outlier_budget() const {
  return std::accumulate(outlier_budget.begin(), outlier_budget.end(),
                         std::int64_t{0});
}

std::vector<std::string> FairnessSpec::validate(int num_clients) const {
  std::vector<std::string> out;
  if (num_groups <= 0) out.push_back("fairness: num_groups must be positive");
  if (static_cast<int>(group_of.size()) != num_clients)
    out.push_back("fairness: group_of size != number of clients");
  for (std::size_t i = 0; i < group_of.size(); ++i)
    if (group_of[i] < 0 || group_of[i] >= num_groups) {
      std::ostringstream os;
      os << "fairness: client " << i << " has group " << group_of[i]
         << " outside [0," << num_groups << ")";
      out.push_back(os.str());
      break;
    }
  auto check_size = [&](const char* name, std::size_t got) {
    if (static_cast<int>(got) != num_groups) {
      std::ostringstream os;
      os << "fairness: " << name << " has " << got << " entries, expected "
         << num_groups;
      out.push_back(os.str());
    }
  };
  check_size("alpha", alpha.size());
  check_size("beta", beta.size());
  check_size("outlier_budget", outlier_budget.size());
  const int g_lim = std::min(
      num_groups, static_cast<int>(std::min(alpha.size(), beta.size())));
  for (int g = 0; g < g_lim; ++g) {
    if (alpha[g] < beta[g]) {
      std::ostringstream os;
      os << "fairness: group " << g << " has beta " << beta[g].str()
         << " > alpha " << alpha[g].str();
      out.push_back(os.str());
    }
    if (Rational(1, 1) < beta[g]) {
      std::ostringstream os;
      os << "fairness: group " << g << " has beta " << beta[g].str() << " > 1";
      out.push_back(os.str());
    }
  }
  for (std::size_t g = 0; g < outlier_budget.size(); ++g)
    if (outlier_budget[g] < 0) {
      std::ostringstream os;
      os << "fairness: group " << g << " has negative outlier budget";
      out.push_back(os.str());
    }
  return out;
}

double Instance::power_cost(double d) const {
  if (z == 1.0) return d;
  if (z == 2.0) return d * d;
  return std::pow(d, z);
}

bool Instance::has_opening_costs() const {
  return std::any_of(opening_costs.begin(), opening_costs.end(),
                     [](double o) { return o != 0.0; });
}

std::int64_t Instance::total_capacity() const {
  return std::accumulate(capacities.begin(), capacities.end(),
                         std::int64_t{0});
}

WeightedClientSet WeightedClientSet::all_ones(int num_clients) {
  WeightedClientSet w;
  w.entries_.reserve(num_clients);
  for (int c = 0; c < num_clients; ++c) w.entries_.emplace_back(c, 1);
  w.total_ = num_clients;
  return w;
}

void WeightedClientSet::set(int client, std::int64_t w) {
  if (w < 0) throw InvalidSolution("negative client weight");
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), client,
      [](const auto& e, int c) { return e.first < c; });
  if (it != entries_.end() && it->first == client) {
    total_ += w - it->second;
    if (w == 0)
      entries_.erase(it);
    else
      it->second = w;
  } else if (w > 0) {
    entries_.insert(it, {client, w});
    total_ += w;
  }
}

void WeightedClientSet::add(int client, std::int64_t w) {
  set(client, weight(client) + w);
}

std::int64_t WeightedClientSet::weight(int client) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), client,
      [](const auto& e, int c) { return e.first < c; });
  return (it != entries_.end() && it->first == client) ? it->second : 0;
}

std::vector<int> WeightedClientSet::support() const {
  std::vector<int> s;
  s.reserve(entries_.size());
  for (const auto& [c, w] : entries_) s.push_back(c);
  return s;
}

std::int64_t Solution::total_outliers() const {
  return std::accumulate(outlier_amounts.begin(), outlier_amounts.end(),
                         std::int64_t{0});
}

std::vector<std::string> validate_solution(const Instance& inst,
                                           const Solution& sol,
                                           const WeightedClientSet& weights) {
  std::vector<std::string> out;
  const int n = inst.num_clients();
  const int nf = inst.num_facilities();

  if (static_cast<int>(sol.open_facilities.size()) > inst.k) {
    std::ostringstream os;
    os << "opens " << sol.open_facilities.size() << " facilities, k = "
       << inst.k;
    out.push_back(os.str());
  }
  if (!std::is_sorted(sol.open_facilities.begin(), sol.open_facilities.end()))
    out.push_back("open_facilities not sorted");
  std::vector<char> open(nf, 0);
  for (int f : sol.open_facilities) {
    if (f < 0 || f >= nf) {
      out.push_back("open facility position out of range");
      return out;
    }
    if (open[f]) out.push_back("duplicate open facility");
    open[f] = 1;
  }
  if (static_cast<int>(sol.outlier_amounts.size()) != n) {
    out.push_back("outlier_amounts size != number of clients");
    return out;
  }

  std::vector<std::int64_t> served(n, 0), load(nf, 0);
  for (const auto& a : sol.assignment) {
    if (a.client < 0 || a.client >= n || a.facility < 0 || a.facility >= nf) {
      out.push_back("assignment index out of range");
      return out;
    }
    if (a.amount <= 0) out.push_back("assignment with nonpositive amount");
    if (!open[a.facility]) {
      std::ostringstream os;
      os << "client " << a.client << " assigned to closed facility "
         << a.facility;
      out.push_back(os.str());
    }
    served[a.client] += a.amount;
    load[a.facility] += a.amount;
  }
  for (int c = 0; c < n; ++c) {
    if (sol.outlier_amounts[c] < 0)
      out.push_back("negative outlier amount");
    if (served[c] + sol.outlier_amounts[c] != weights.weight(c)) {
      std::ostringstream os;
      os << "client " << c << " served " << served[c] << " + outlier "
         << sol.outlier_amounts[c] << " != weight " << weights.weight(c);
      out.push_back(os.str());
    }
  }
  for (int f = 0; f < nf; ++f)
    if (load[f] > inst.capacities[f]) {
      std::ostringstream os;
      os << "facility " << f << " load " << load[f] << " exceeds capacity "
         << inst.capacities[f];
      out.push_back(os.str());
    }
  if (sol.total_outliers() > inst.m) {
    std::ostringstream os;
    os << "total outliers " << sol.total_outliers() << " exceed budget "
       << inst.m;
    out.push_back(os.str());
  }

  CompensatedSum assign_sum;
  for (const auto& a : sol.assignment)
    assign_sum.add(static_cast<double>(a.amount) *
                   inst.assign_cost(a.client, a.facility));
  double open_sum = 0.0;
  for (int f : sol.open_facilities) open_sum += inst.opening_cost(f);
  const double want_assign = assign_sum.value();
  const double want_total = want_assign + open_sum;
  auto rel_off = [](double got, double want) {
    return std::abs(got - want) > 1e-9 * std::max({1.0, std::abs(got),
                                                   std::abs(want)});
  };
  if (rel_off(sol.assignment_cost, want_assign)) {
    std::ostringstream os;
    os << "assignment_cost " << sol.assignment_cost << " != recomputed "
       << want_assign;
    out.push_back(os.str());
  }
  if (rel_off(sol.cost, want_total)) {
    std::ostringstream os;
    os << "cost " << sol.cost << " != recomputed " << want_total;
    out.push_back(os.str());
  }
  return out;
}

double evaluate_cost(const Instance& inst, const Solution& sol,
                     const WeightedClientSet& weights) {
  auto violations = validate_solution(inst, sol, weights);
  if (!violations.empty()) throw InvalidSolution(violations.front());
  CompensatedSum s;
  for (const auto& a : sol.assignment)
    s.add(static_cast<double>(a.amount) *
          inst.assign_cost(a.client, a.facility));
  double total = s.value();
  for (int f : sol.open_facilities) total += inst.opening_cost(f);
  return total;
}

double evaluate_cost(const Instance& inst, const Solution& sol) {
  return evaluate_cost(inst, sol,
                       WeightedClientSet::all_ones(inst.num_clients()));
}

std::vector<std::string> validate_instance(const Instance& inst) {
  std::vector<std::string> out;
  if (!inst.metric) {
    out.push_back("missing metric");
    return out;
  }
  const int sz = inst.metric->size();
  auto in_range = [&](const std::vector<int>& v, const char* name) {
    for (int p : v)
      if (p < 0 || p >= sz) {
        std::ostringstream os;
        os << name << " references point " << p << " outside metric of size "
           << sz;
        out.push_back(os.str());
        return;
      }
  };
  in_range(inst.clients, "clients");
  in_range(inst.facilities, "facilities");
  if (inst.clients.empty()) out.push_back("no clients");
  if (inst.facilities.empty()) out.push_back("no facilities");
  if (inst.capacities.size() != inst.facilities.size())
    out.push_back("capacities size != facilities size");
  if (!inst.opening_costs.empty() &&
      inst.opening_costs.size() != inst.facilities.size())
    out.push_back("opening_costs size != facilities size");
  for (std::size_t f = 0; f < inst.capacities.size(); ++f)
    if (inst.capacities[f] < 0) {
      out.push_back("negative capacity");
      break;
    }
  for (double o : inst.opening_costs)
    if (o < 0 || !std::isfinite(o)) {
      out.push_back("opening cost must be finite and nonnegative");
      break;
    }
  if (inst.k < 1) out.push_back("k must be >= 1");
  if (inst.m < 0) out.push_back("m must be >= 0");
  if (inst.z < 1.0 || !std::isfinite(inst.z))
    out.push_back("z must be finite and >= 1");
  if (inst.fairness) {
    auto fv = inst.fairness->validate(inst.num_clients());
    out.insert(out.end(), fv.begin(), fv.end());
  }
  auto mv = inst.metric->validate();
  out.insert(out.end(), mv.begin(), mv.end());
  return out;
}

}  // namespace ckmo
