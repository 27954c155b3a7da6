#pragma once

// Report serialisation. JSON keys come out sorted (nlohmann::json stores
// objects in std::map) and every double is printed with %.17g, so equal
// reports are byte-identical. Non-finite doubles become null.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "horolab/core.hpp"
#include "horolab/horo.hpp"

namespace horolab {

using Json = nlohmann::json;

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void write_json(std::ostringstream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << Json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent, depth + 1);
      }
      os << "\n" << close_pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // flat numeric arrays stay on one line
      bool scalar = true;
      for (const auto& e : j)
        if (e.is_structured()) scalar = false;
      if (scalar) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_json(os, j[i], indent, depth + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_json(os, j[i], indent, depth + 1);
      }
      os << "\n" << close_pad << "]";
      return;
    }
    case Json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace detail

inline std::string to_json_text(const Json& j) {
  std::ostringstream os;
  detail::write_json(os, j, 2, 0);
  os << "\n";
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path);
}

inline Json to_json(const VerificationReport& r) {
  Json j;
  j["name"] = r.name;
  j["checked"] = r.checked;
  j["violation_count"] = r.violation_count;
  j["pass"] = r.pass();
  j["worst_slack"] = r.worst_slack;
  Json w = Json::array();
  for (const auto& v : r.violations)
    w.push_back({{"relation", v.relation},
                 {"inputs", v.inputs},
                 {"lhs", v.lhs},
                 {"rhs", v.rhs},
                 {"slack", v.slack}});
  j["witnesses"] = std::move(w);
  return j;
}

inline Json to_json(const CoarseParams& p) {
  return {{"lambda", p.lambda}, {"k", p.k}, {"E", p.E}, {"C", p.C}, {"theta", p.theta_desc}};
}

inline Json to_json(const DerivedConstants& c) {
  return {{"k1", c.k1}, {"D", c.D}, {"D1", c.D1}, {"D2", c.D2}};
}

/// Columns: index, base_distance, x0..x{m-1} (point coordinates), value.
template <MetricSpace S>
std::string window_function_csv(const S& space, const WindowFunction<typename S::Point>& f) {
  std::ostringstream os;
  const auto& w = *f.window;
  const std::size_t m = w.points.empty() ? 0 : space.coordinates(w.points.front()).size();
  os << "index,base_distance";
  for (std::size_t i = 0; i < m; ++i) os << ",x" << i;
  os << ",value\n";
  for (std::size_t i = 0; i < w.size(); ++i) {
    os << i << "," << format_double(w.base_distance[i]);
    for (double c : space.coordinates(w.points[i])) os << "," << format_double(c);
    os << "," << format_double(f.values[i]) << "\n";
  }
  return os.str();
}

}  // namespace horolab
