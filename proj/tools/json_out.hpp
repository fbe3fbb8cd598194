#pragma once

// JSON views of library results for the command-line tool.

#include <cmath>
#include <string>

#include "json.hpp"
#include "minkembed/alignment.hpp"
#include "minkembed/error.hpp"
#include "minkembed/grid.hpp"
#include "minkembed/lorentz.hpp"
#include "minkembed/pfaff.hpp"

namespace cli {

using nlohmann::json;

inline json number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

inline json to_json(const minkembed::Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline json to_json(const minkembed::Vector& v) {
  json out = json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

inline json to_json(const minkembed::ResidualReport& r) {
  json per = json::array();
  for (const auto& s : r.per_equation)
    per.push_back({{"label", s.label}, {"max_abs", number(s.max_abs)}, {"lp_norm", number(s.lp_norm)}});
  json samples = json::array();
  for (const auto& a : r.grid.axes()) samples.push_back(a.samples);
  return {{"max_abs", number(r.max_abs)}, {"lp_norm", number(r.lp_norm)}, {"p", number(r.p)},
          {"samples", samples}, {"per_equation", per}};
}

inline json to_json(const minkembed::AffineMap& m) { return {{"q", to_json(m.q)}, {"v", to_json(m.v)}}; }

inline json to_json(const minkembed::AlignmentResult& a) {
  json out{{"map", to_json(a.map)},
           {"first", to_json(a.first)},
           {"second", to_json(a.second)},
           {"isometry", a.isometry.has_value()},
           {"aligned_gap_w2p", number(a.aligned_gap_w2p)},
           {"aligned_gap_max", number(a.aligned_gap_max)},
           {"input_gap", number(a.input_gap)}};
  if (a.isometry) out["proper"] = a.isometry->proper;
  return out;
}

inline json to_json(const minkembed::Error& e) {
  json out{{"error", std::string(minkembed::to_string(e.code()))}, {"message", e.what()}};
  if (e.point()) out["point"] = *e.point();
  return out;
}

}  // namespace cli
