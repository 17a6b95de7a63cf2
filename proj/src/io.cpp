#include "ckmo/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace ckmo {

namespace {

[[noreturn]] void fail(const std::string& context, const std::string& msg) {
  throw ParseError(context + ": " + msg);
}

std::string field(const std::string& context, const std::string& name) {
  return context + "." + name;
}

const Json& need(const Json& j, const char* key, const std::string& context) {
  if (!j.is_object()) fail(context, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(context, std::string("missing field '") + key + "'");
  return *it;
}

std::int64_t as_i64(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<std::int64_t>();
}

int as_index(const Json& v, const std::string& where, int bound,
             const char* what) {
  const std::int64_t x = as_i64(v, where);
  if (x < 0 || x >= bound)
    fail(where, std::string(what) + " " + std::to_string(x) +
                    " out of range [0, " + std::to_string(bound) + ")");
  return static_cast<int>(x);
}

double as_double(const Json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

Eigen::MatrixXd parse_point_rows(const Json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty())
    fail(where, "expected a nonempty array of rows");
  const std::size_t dim = rows.front().is_array() ? rows.front().size() : 0;
  if (dim == 0) fail(where + "[0]", "expected a nonempty array of numbers");
  Eigen::MatrixXd out(rows.size(), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Json& row = rows[i];
    const std::string rw = where + "[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != dim)
      fail(rw, "expected " + std::to_string(dim) + " numbers");
    for (std::size_t d = 0; d < dim; ++d)
      out(i, d) = as_double(row[d], rw + "[" + std::to_string(d) + "]");
  }
  return out;
}

std::vector<int> parse_point_list(const Json& v, const std::string& where,
                                  int num_points) {
  if (!v.is_array() || v.empty())
    fail(where, "expected a nonempty array of point indices");
  std::vector<int> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_index(v[i], where + "[" + std::to_string(i) + "]",
                           num_points, "point index"));
  return out;
}

// Array form aligns with `facilities`; object form is keyed by the facility
// point index and must cover every facility and mention nothing else.
template <typename T, typename Parse>
std::vector<T> parse_per_facility(const Json& v, const std::string& where,
                                  const std::vector<int>& facilities,
                                  Parse&& parse) {
  std::vector<T> out(facilities.size());
  if (v.is_array()) {
    if (v.size() != facilities.size())
      fail(where, "expected " + std::to_string(facilities.size()) +
                      " entries to match `facilities`");
    for (std::size_t i = 0; i < v.size(); ++i)
      out[i] = parse(v[i], where + "[" + std::to_string(i) + "]");
    return out;
  }
  if (!v.is_object()) fail(where, "expected an array or an object");
  std::vector<bool> mentioned;
  for (const auto& [key, val] : v.items()) {
    int point = -1;
    try {
      std::size_t used = 0;
      point = std::stoi(key, &used);
      if (used != key.size()) point = -1;
    } catch (const std::exception&) {
      point = -1;
    }
    if (point < 0) fail(where, "key '" + key + "' is not a point index");
    bool found = false;
    for (std::size_t i = 0; i < facilities.size(); ++i) {
      if (facilities[i] == point) {
        out[i] = parse(val, where + "['" + key + "']");
        found = true;
      }
    }
    if (!found)
      fail(where, "key '" + key + "' does not name a facility point");
    mentioned.resize(std::max(mentioned.size(), std::size_t(point) + 1));
    mentioned[point] = true;
  }
  for (int f : facilities)
    if (static_cast<std::size_t>(f) >= mentioned.size() || !mentioned[f])
      fail(where, "no entry for facility point " + std::to_string(f));
  return out;
}

Rational parse_rational(const Json& v, const std::string& where) {
  try {
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number()) return Rational::from_double(v.get<double>());
  } catch (const ParseError& e) {
    fail(where, e.what());
  }
  fail(where, "expected a number or a 'p/q' string");
}

void parse_fairness(const Json& j, Instance& inst,
                    const std::string& context) {
  const bool any = j.contains("groups") || j.contains("alpha") ||
                   j.contains("beta") || j.contains("m_vec");
  if (!any) return;
  const Json& groups = need(j, "groups", context);
  const Json& alpha = need(j, "alpha", context);
  const Json& beta = need(j, "beta", context);
  const Json& m_vec = need(j, "m_vec", context);

  const std::string gw = field(context, "groups");
  if (!groups.is_object() || groups.empty())
    fail(gw, "expected a nonempty object of group id -> client positions");
  FairnessSpec spec;
  spec.num_groups = static_cast<int>(groups.size());
  spec.group_of.assign(inst.num_clients(), -1);
  for (const auto& [key, members] : groups.items()) {
    int gid = -1;
    try {
      std::size_t used = 0;
      gid = std::stoi(key, &used);
      if (used != key.size()) gid = -1;
    } catch (const std::exception&) {
      gid = -1;
    }
    if (gid < 0 || gid >= spec.num_groups)
      fail(gw, "group ids must be 0.." + std::to_string(spec.num_groups - 1) +
                   ", got '" + key + "'");
    const std::string mw = gw + "['" + key + "']";
    if (!members.is_array()) fail(mw, "expected an array of client positions");
    for (std::size_t i = 0; i < members.size(); ++i) {
      const int pos = as_index(members[i], mw + "[" + std::to_string(i) + "]",
                               inst.num_clients(), "client position");
      if (spec.group_of[pos] != -1)
        fail(mw, "client position " + std::to_string(pos) +
                     " appears in two groups");
      spec.group_of[pos] = gid;
    }
  }
  for (int c = 0; c < inst.num_clients(); ++c)
    if (spec.group_of[c] == -1)
      fail(gw, "client position " + std::to_string(c) + " is in no group");

  auto parse_bounds = [&](const Json& v, const char* name) {
    const std::string w = field(context, name);
    if (!v.is_array() || static_cast<int>(v.size()) != spec.num_groups)
      fail(w, "expected " + std::to_string(spec.num_groups) + " entries");
    std::vector<Rational> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(parse_rational(v[i], w + "[" + std::to_string(i) + "]"));
    return out;
  };
  spec.alpha = parse_bounds(alpha, "alpha");
  spec.beta = parse_bounds(beta, "beta");

  const std::string bw = field(context, "m_vec");
  if (!m_vec.is_array() || static_cast<int>(m_vec.size()) != spec.num_groups)
    fail(bw, "expected " + std::to_string(spec.num_groups) + " entries");
  for (std::size_t i = 0; i < m_vec.size(); ++i) {
    const std::int64_t b =
        as_i64(m_vec[i], bw + "[" + std::to_string(i) + "]");
    if (b < 0) fail(bw + "[" + std::to_string(i) + "]", "must be >= 0");
    spec.outlier_budget.push_back(b);
  }
  if (spec.total_outlier_budget() != inst.m)
    fail(context, "m (" + std::to_string(inst.m) +
                      ") must equal the m_vec sum (" +
                      std::to_string(spec.total_outlier_budget()) + ")");
  inst.fairness = std::move(spec);
}

Json double_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

Instance instance_from_json(const Json& j, const std::string& context) {
  if (!j.is_object()) fail(context, "expected a JSON object");
  const bool has_points = j.contains("points");
  const bool has_matrix = j.contains("matrix");
  if (has_points == has_matrix)
    fail(context, "expected exactly one of 'points' and 'matrix'");

  Instance inst;
  if (has_points) {
    inst.metric = std::make_shared<MetricSpace>(MetricSpace::from_points(
        parse_point_rows(j.at("points"), field(context, "points"))));
  } else {
    Eigen::MatrixXd d =
        parse_point_rows(j.at("matrix"), field(context, "matrix"));
    if (d.rows() != d.cols())
      fail(field(context, "matrix"), "expected a square matrix");
    inst.metric =
        std::make_shared<MetricSpace>(MetricSpace::from_matrix(std::move(d)));
  }
  const int num_points = inst.metric->size();

  inst.clients = parse_point_list(need(j, "clients", context),
                                  field(context, "clients"), num_points);
  inst.facilities = parse_point_list(need(j, "facilities", context),
                                     field(context, "facilities"), num_points);
  inst.capacities = parse_per_facility<std::int64_t>(
      need(j, "capacities", context), field(context, "capacities"),
      inst.facilities, [](const Json& v, const std::string& w) {
        const std::int64_t u = as_i64(v, w);
        if (u < 0) fail(w, "capacities must be >= 0");
        return u;
      });
  if (j.contains("opening_costs")) {
    inst.opening_costs = parse_per_facility<double>(
        j.at("opening_costs"), field(context, "opening_costs"),
        inst.facilities, [](const Json& v, const std::string& w) {
          const double o = as_double(v, w);
          if (!(o >= 0.0)) fail(w, "opening costs must be >= 0");
          return o;
        });
  }

  const std::int64_t k = as_i64(need(j, "k", context), field(context, "k"));
  if (k < 1) fail(field(context, "k"), "k must be >= 1");
  inst.k = static_cast<int>(k);
  inst.m = as_i64(need(j, "m", context), field(context, "m"));
  if (inst.m < 0) fail(field(context, "m"), "m must be >= 0");
  if (j.contains("z")) {
    inst.z = as_double(j.at("z"), field(context, "z"));
    if (!(inst.z > 0.0)) fail(field(context, "z"), "z must be > 0");
  }

  parse_fairness(j, inst, context);

  const std::vector<std::string> violations = validate_instance(inst);
  if (!violations.empty()) fail(context, violations.front());
  return inst;
}

Instance load_instance(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return instance_from_json(j, path);
}

Instance instance_from_csv_points(const std::string& path,
                                  const std::vector<int>& facility_rows,
                                  std::int64_t capacity, int k,
                                  std::int64_t m, double z) {
  const std::string text = read_text_file(path);
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        while (used < cell.size() &&
               std::isspace(static_cast<unsigned char>(cell[used])))
          ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        fail(path + ":" + std::to_string(lineno),
             "'" + cell + "' is not a number");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(path + ":" + std::to_string(lineno),
           "expected " + std::to_string(rows.front().size()) + " columns");
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) fail(path, "no points found");

  const int num_points = static_cast<int>(rows.size());
  std::vector<bool> is_facility(num_points, false);
  for (int r : facility_rows) {
    if (r < 0 || r >= num_points)
      fail(path, "facility row " + std::to_string(r) + " out of range [0, " +
                     std::to_string(num_points) + ")");
    if (is_facility[r])
      fail(path, "facility row " + std::to_string(r) + " listed twice");
    is_facility[r] = true;
  }
  if (facility_rows.empty()) fail(path, "no facility rows designated");
  if (capacity < 0) fail(path, "capacity must be >= 0");

  Eigen::MatrixXd points(num_points, rows.front().size());
  for (int i = 0; i < num_points; ++i)
    for (std::size_t d = 0; d < rows.front().size(); ++d)
      points(i, d) = rows[i][d];

  Instance inst;
  inst.metric =
      std::make_shared<MetricSpace>(MetricSpace::from_points(std::move(points)));
  for (int i = 0; i < num_points; ++i)
    if (!is_facility[i]) inst.clients.push_back(i);
  inst.facilities = facility_rows;
  inst.capacities.assign(facility_rows.size(), capacity);
  inst.k = k;
  inst.m = m;
  inst.z = z;

  const std::vector<std::string> violations = validate_instance(inst);
  if (!violations.empty()) fail(path, violations.front());
  return inst;
}

Solution solution_from_json(const Json& j, const Instance& inst,
                            const std::string& context) {
  const Json& s = j.is_object() && j.contains("solution") ? j.at("solution") : j;
  if (!s.is_object()) fail(context, "expected a solution object");

  auto index_or_invalid = [&](const Json& v, const std::string& where,
                              int bound, const char* what) {
    const std::int64_t x = as_i64(v, where);
    if (x < 0 || x >= bound)
      throw InvalidSolution(where + ": " + what + " " + std::to_string(x) +
                            " out of range [0, " + std::to_string(bound) +
                            ")");
    return static_cast<int>(x);
  };

  Solution sol;
  const Json& open = need(s, "open_facilities", context);
  const std::string ow = field(context, "open_facilities");
  if (!open.is_array()) fail(ow, "expected an array");
  for (std::size_t i = 0; i < open.size(); ++i)
    sol.open_facilities.push_back(
        index_or_invalid(open[i], ow + "[" + std::to_string(i) + "]",
                         inst.num_facilities(), "facility position"));

  const Json& asg = need(s, "assignment", context);
  const std::string aw = field(context, "assignment");
  if (!asg.is_array()) fail(aw, "expected an array of triples");
  for (std::size_t i = 0; i < asg.size(); ++i) {
    const Json& triple = asg[i];
    const std::string tw = aw + "[" + std::to_string(i) + "]";
    if (!triple.is_array() || triple.size() != 3)
      fail(tw, "expected [client, facility, amount]");
    Assignment a;
    a.client = index_or_invalid(triple[0], tw + "[0]", inst.num_clients(),
                                "client position");
    a.facility = index_or_invalid(triple[1], tw + "[1]",
                                  inst.num_facilities(), "facility position");
    a.amount = as_i64(triple[2], tw + "[2]");
    if (a.amount < 0) throw InvalidSolution(tw + ": amount must be >= 0");
    sol.assignment.push_back(a);
  }

  const Json& outliers = need(s, "outliers", context);
  const std::string uw = field(context, "outliers");
  if (!outliers.is_array() ||
      static_cast<int>(outliers.size()) != inst.num_clients())
    fail(uw, "expected one entry per client position (" +
                 std::to_string(inst.num_clients()) + ")");
  for (std::size_t i = 0; i < outliers.size(); ++i) {
    const std::int64_t x =
        as_i64(outliers[i], uw + "[" + std::to_string(i) + "]");
    if (x < 0)
      throw InvalidSolution(uw + "[" + std::to_string(i) +
                            "]: outlier amount must be >= 0");
    sol.outlier_amounts.push_back(x);
  }

  sol.assignment_cost = as_double(need(s, "assignment_cost", context),
                                  field(context, "assignment_cost"));
  sol.cost = as_double(need(s, "cost", context), field(context, "cost"));
  return sol;
}

Solution load_solution(const std::string& path, const Instance& inst) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return solution_from_json(j, inst, path);
}

Json instance_to_json(const Instance& inst) {
  Json j;
  const MetricSpace& ms = *inst.metric;
  if (ms.coordinate_mode()) {
    Json rows = Json::array();
    for (int i = 0; i < ms.size(); ++i) {
      Json row = Json::array();
      for (int d = 0; d < ms.points().cols(); ++d)
        row.push_back(ms.points()(i, d));
      rows.push_back(std::move(row));
    }
    j["points"] = std::move(rows);
  } else {
    Json rows = Json::array();
    for (int i = 0; i < ms.size(); ++i) {
      Json row = Json::array();
      for (int k2 = 0; k2 < ms.size(); ++k2) row.push_back(ms.distance(i, k2));
      rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
  }
  j["clients"] = inst.clients;
  j["facilities"] = inst.facilities;
  j["capacities"] = inst.capacities;
  if (!inst.opening_costs.empty()) j["opening_costs"] = inst.opening_costs;
  j["k"] = inst.k;
  j["m"] = inst.m;
  j["z"] = inst.z;
  if (inst.fairness) {
    const FairnessSpec& spec = *inst.fairness;
    Json groups = Json::object();
    for (int g = 0; g < spec.num_groups; ++g) {
      Json members = Json::array();
      for (int c = 0; c < static_cast<int>(spec.group_of.size()); ++c)
        if (spec.group_of[c] == g) members.push_back(c);
      groups[std::to_string(g)] = std::move(members);
    }
    j["groups"] = std::move(groups);
    Json alpha = Json::array(), beta = Json::array();
    for (const Rational& r : spec.alpha) alpha.push_back(r.str());
    for (const Rational& r : spec.beta) beta.push_back(r.str());
    j["alpha"] = std::move(alpha);
    j["beta"] = std::move(beta);
    j["m_vec"] = spec.outlier_budget;
  }
  return j;
}

Json solution_to_json(const Solution& sol) {
  Json j;
  j["open_facilities"] = sol.open_facilities;
  Json asg = Json::array();
  for (const Assignment& a : sol.assignment)
    asg.push_back(Json::array({a.client, a.facility, a.amount}));
  j["assignment"] = std::move(asg);
  j["outliers"] = sol.outlier_amounts;
  j["assignment_cost"] = double_or_null(sol.assignment_cost);
  j["cost"] = double_or_null(sol.cost);
  return j;
}

Json coreset_to_json(const CoresetResult& coreset) {
  Json j;
  Json entries = Json::array();
  for (const auto& [client, weight] : coreset.weights.entries())
    entries.push_back(Json::array({client, weight}));
  j["entries"] = std::move(entries);

  const CoresetMetadata& m = coreset.meta;
  Json meta;
  meta["epsilon"] = m.epsilon;
  meta["zeta"] = m.zeta;
  meta["a"] = m.a;
  meta["s_formula"] = m.s_formula;
  meta["s"] = m.s;
  meta["R"] = m.R;
  meta["psi"] = m.psi;
  meta["psi_formula"] = m.psi_formula;
  meta["seed_cost"] = m.seed_cost;
  meta["seed_centers"] = m.seed_centers;
  Json rings = Json::array();
  for (const RingCensus& r : m.rings) {
    Json ring;
    ring["center_point"] = r.center_point;
    ring["level"] = r.level;
    ring["radius"] = r.radius;
    ring["size"] = r.size;
    ring["sampled"] = r.sampled;
    ring["passthrough"] = r.passthrough;
    if (r.group >= 0) ring["group"] = r.group;
    rings.push_back(std::move(ring));
  }
  meta["rings"] = std::move(rings);
  meta["sampling_occurred"] = m.sampling_occurred;
  meta["total_weight"] = m.total_weight;
  meta["support_size"] = m.support_size;
  meta["seed"] = m.seed;
  j["metadata"] = std::move(meta);
  return j;
}

Json report_to_json(const RunReport& report) {
  Json j;
  j["guesses_enumerated"] = report.guesses_enumerated;
  j["guesses_infeasible"] = report.guesses_infeasible;
  j["guess_bound"] = double_or_null(report.guess_bound);
  j["distinct_facility_sets"] = report.distinct_facility_sets;
  j["evaluation_cache_hits"] = report.evaluation_cache_hits;
  j["partial"] = report.partial;
  if (report.coreset) {
    CoresetResult wrap;
    wrap.meta = *report.coreset;
    j["coreset"] = coreset_to_json(wrap)["metadata"];
  } else {
    j["coreset"] = nullptr;
  }
  j["best_cost"] = double_or_null(report.best_cost);
  j["best_facilities"] = report.best_facilities;
  j["winning_retry"] = report.winning_retry;
  j["seed"] = report.seed;
  return j;
}

Json experiment_to_json(const ExperimentReport& report) {
  Json j;
  j["id"] = report.id;
  j["params"] = report.params;
  j["seed"] = report.seed;
  j["trials"] = report.trials;
  Json meas = Json::array();
  for (double v : report.measurements) meas.push_back(double_or_null(v));
  j["measurements"] = std::move(meas);
  j["max"] = double_or_null(report.max);
  j["mean"] = double_or_null(report.mean);
  j["q50"] = double_or_null(report.q50);
  j["q90"] = double_or_null(report.q90);
  j["q99"] = double_or_null(report.q99);
  j["per_trial_threshold"] = double_or_null(report.per_trial_threshold);
  j["pass_fraction"] = report.pass_fraction;
  j["required_fraction"] = report.required_fraction;
  j["passed"] = report.passed;
  j["extra"] = report.extra;
  return j;
}

std::string experiment_csv(const ExperimentReport& report) {
  std::string out = "trial,measurement\n";
  for (std::size_t i = 0; i < report.measurements.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += Json(double_or_null(report.measurements[i])).dump();
    out += '\n';
  }
  return out;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw ParseError(path + ": read failed");
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  out << text;
  out.flush();
  if (!out) throw ParseError(path + ": write failed");
}

}  // namespace ckmo
