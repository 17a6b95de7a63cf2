#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "ckmo/coreset.hpp"
#include "ckmo/model.hpp"
#include "ckmo/solver.hpp"
#include "ckmo/verify.hpp"

namespace ckmo {

using Json = nlohmann::json;

// ---- loading --------------------------------------------------------------
// Malformed input (unreadable file, bad JSON, wrong shapes/types, invalid
// instance) throws ParseError carrying the offending field; a structurally
// broken solution (indices out of range) throws InvalidSolution.

// Accepted shape:
//   { "points": [[x,y,...],...] | "matrix": [[...],...],
//     "clients": [point idx...], "facilities": [point idx...],
//     "capacities": [u...] | {"<point idx>": u},
//     "opening_costs"?: [o...] | {"<point idx>": o},
//     "k": int, "m": int, "z"?: number,
//     "groups"?: {"<gid>": [client position...]},
//     "alpha"?: [...], "beta"?: [...], "m_vec"?: [...] }
// The four group fields come together or not at all; alpha/beta entries are
// numbers or "p/q" strings; m must equal the m_vec sum.
Instance instance_from_json(const Json& j,
                            const std::string& context = "instance");
Instance load_instance(const std::string& path);

// One point per row, comma-separated coordinates. Rows listed in
// facility_rows become the facilities (in listed order); every other row is
// a client, in file order. Every facility receives `capacity`.
Instance instance_from_csv_points(const std::string& path,
                                  const std::vector<int>& facility_rows,
                                  std::int64_t capacity, int k,
                                  std::int64_t m, double z = 1.0);

// Accepts a bare solution object or a wrapper holding one under "solution".
Solution solution_from_json(const Json& j, const Instance& inst,
                            const std::string& context = "solution");
Solution load_solution(const std::string& path, const Instance& inst);

// ---- serialization ---------------------------------------------------------
// Objects keep sorted keys and doubles print as shortest round-trip
// decimals, so equal values give byte-equal text; non-finite doubles
// serialize as null.

Json instance_to_json(const Instance& inst);
Json solution_to_json(const Solution& sol);
Json coreset_to_json(const CoresetResult& coreset);
Json report_to_json(const RunReport& report);
Json experiment_to_json(const ExperimentReport& report);

// "trial,measurement" rows for external plotting.
std::string experiment_csv(const ExperimentReport& report);

std::string dump_json(const Json& j);  // 2-space indent, trailing newline

std::string read_text_file(const std::string& path);  // ParseError if unread
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ckmo
