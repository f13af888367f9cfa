#pragma once

// Structured verification results and their CSV / JSON serialization.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pharmonic/error.hpp"

namespace pharmonic {

/// Decimal with 17 significant digits, enough to round-trip a double.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Metric {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string provenance;
};

struct Report {
  std::string suite;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<Metric> metrics;
  double wall_time_s = 0.0;

  void param(const std::string& key, const std::string& value) { params.emplace_back(key, value); }
  void param(const std::string& key, double value) { params.emplace_back(key, format_number(value)); }

  /// pass iff value <= tolerance
  Metric& at_most(const std::string& name, double value, double tol, const std::string& note = "") {
    metrics.push_back({name, value, tol, std::isfinite(value) && value <= tol, note});
    return metrics.back();
  }
  /// pass iff value >= tolerance
  Metric& at_least(const std::string& name, double value, double tol, const std::string& note = "") {
    metrics.push_back({name, value, tol, std::isfinite(value) && value >= tol, note});
    return metrics.back();
  }
  /// A boolean outcome recorded as 1/0 against tolerance 1.
  Metric& check(const std::string& name, bool ok, const std::string& note = "") {
    metrics.push_back({name, ok ? 1.0 : 0.0, 1.0, ok, note});
    return metrics.back();
  }
  /// Informational value: always passes as long as it is finite.
  Metric& info(const std::string& name, double value, const std::string& note = "") {
    metrics.push_back({name, value, 0.0, std::isfinite(value), note});
    return metrics.back();
  }

  bool all_pass() const {
    for (const auto& m : metrics)
      if (!m.pass) return false;
    return true;
  }

  /// Appends every metric of another report under a name prefix.
  void merge(const Report& other, const std::string& prefix) {
    for (auto m : other.metrics) {
      m.name = prefix + m.name;
      metrics.push_back(std::move(m));
    }
  }

  std::string params_string() const {
    std::string s;
    for (size_t i = 0; i < params.size(); ++i) {
      if (i) s += ';';
      s += params[i].first + '=' + params[i].second;
    }
    return s;
  }
};

namespace detail {
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}
}  // namespace detail

inline std::string to_csv(const Report& r) {
  std::ostringstream os;
  os << "suite,metric,value,tolerance,pass,params,provenance\n";
  const std::string params = detail::csv_field(r.params_string());
  for (const auto& m : r.metrics)
    os << detail::csv_field(r.suite) << ',' << detail::csv_field(m.name) << ',' << format_number(m.value) << ','
       << format_number(m.tolerance) << ',' << (m.pass ? "true" : "false") << ',' << params << ','
       << detail::csv_field(m.provenance) << '\n';
  return os.str();
}

/// Hand-assembled so that numbers keep the fixed 17-digit form; strings go
/// through the JSON library for escaping. Non-finite values become null.
inline std::string to_json(const Report& r) {
  auto str = [](const std::string& v) { return nlohmann::json(v).dump(); };
  auto num = [](double v) { return std::isfinite(v) ? format_number(v) : std::string("null"); };
  std::ostringstream os;
  os << "{\n  \"suite\": " << str(r.suite) << ",\n  \"params\": {";
  for (size_t i = 0; i < r.params.size(); ++i)
    os << (i ? ", " : "") << str(r.params[i].first) << ": " << str(r.params[i].second);
  os << "},\n  \"wall_time_s\": " << num(r.wall_time_s) << ",\n  \"metrics\": [";
  for (size_t i = 0; i < r.metrics.size(); ++i) {
    const auto& m = r.metrics[i];
    os << (i ? "," : "") << "\n    {\"name\": " << str(m.name) << ", \"value\": " << num(m.value)
       << ", \"tolerance\": " << num(m.tolerance) << ", \"pass\": " << (m.pass ? "true" : "false")
       << ", \"provenance\": " << str(m.provenance) << "}";
  }
  os << (r.metrics.empty() ? "]" : "\n  ]") << "\n}\n";
  return os.str();
}

enum class ReportFormat { csv, json };

inline void emit(const Report& r, ReportFormat fmt, const std::string& path) {
  const std::string text = fmt == ReportFormat::csv ? to_csv(r) : to_json(r);
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), Errc::io, "cannot open output file " + path);
  out << text;
  require(static_cast<bool>(out), Errc::io, "failed writing output file " + path);
}

}  // namespace pharmonic
