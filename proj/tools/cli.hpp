#pragma once

// Command-line front end: flags and an optional JSON config file (flags win),
// one suite per invocation. Exit status 0 when every metric passes, 1 when
// some metric fails or a suite hits an internal error, 2 on bad
// configuration.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "pharmonic/suites.hpp"

namespace pharmonic::cli {

enum ExitCode { kPass = 0, kMetricFailure = 1, kConfigError = 2 };

/// Applies a JSON object of config keys (the flag names without dashes).
inline void apply_json(SuiteConfig& c, const nlohmann::json& j) {
  require(j.is_object(), Errc::config_validation, "config file must hold a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "suite") c.suite = v.get<std::string>();
      else if (key == "d") c.d = v.get<int>();
      else if (key == "Nrho") c.N_rho = v.get<int>();
      else if (key == "Lrho") c.L_rho = v.get<double>();
      else if (key == "K") c.K = v.get<int>();
      else if (key == "M") c.M = v.get<int>();
      else if (key == "alpha") c.alpha = v.get<double>();
      else if (key == "p") c.p = v.get<double>();
      else if (key == "q") c.q = v.get<double>();
      else if (key == "tol") c.tol = v.get<double>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "family") c.family = v.get<int>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "format") c.format = parse_format(v.get<std::string>());
      else throw Error(Errc::config_validation, "unknown config key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::config_validation, "config key '" + key + "': " + e.what());
    }
  }
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), Errc::config_validation, "cannot read config file " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config_validation, "config file " + path + ": " + e.what());
  }
}

/// Runs the tool; `err` receives diagnostics and the one-line summary.
inline int run(int argc, const char* const* argv, std::ostream& err = std::cerr) {
  CLI::App app{"Verification suites for the partial harmonic oscillator"};
  std::string config_path, suite, out, format;
  int d = 0, nrho = 0, K = 0, M = 0, family = 0;
  double lrho = 0, alpha = 0, p = 0, q = 0, tol = 0;
  std::uint64_t seed = 1;
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.add_option("--suite", suite, "suite name")->check(CLI::IsMember(suite_names()));
  app.add_option("--d", d, "x-dimension");
  app.add_option("--Nrho", nrho, "rho grid points (power of two)");
  app.add_option("--Lrho", lrho, "rho half-period");
  app.add_option("--K", K, "Hermite degree cutoff (Mehler: partial-sum order)");
  app.add_option("--M", M, "Gauss-Hermite nodes per axis");
  app.add_option("--alpha", alpha, "order");
  app.add_option("--p", p, "exponent p");
  app.add_option("--q", q, "exponent q");
  app.add_option("--tol", tol, "main tolerance of the suite");
  app.add_option("--seed", seed, "seed of every random choice");
  app.add_option("--family", family, "base test-family size");
  app.add_option("--out", out, "output path, '-' for stdout");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    err << "config-validation: " << e.what() << "\n";
    return kConfigError;
  }

  SuiteConfig c;
  try {
    if (!config_path.empty()) apply_json(c, read_json_file(config_path));
    auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
    if (given("--suite")) c.suite = suite;
    if (given("--d")) c.d = d;
    if (given("--Nrho")) c.N_rho = nrho;
    if (given("--Lrho")) c.L_rho = lrho;
    if (given("--K")) c.K = K;
    if (given("--M")) c.M = M;
    if (given("--alpha")) c.alpha = alpha;
    if (given("--p")) c.p = p;
    if (given("--q")) c.q = q;
    if (given("--tol")) c.tol = tol;
    if (given("--seed")) c.seed = seed;
    if (given("--family")) c.family = family;
    if (given("--out")) c.out = out;
    if (given("--format")) c.format = parse_format(format);
    require(!c.suite.empty(), Errc::config_validation, "no suite given (--suite)");
    validate_config(c);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kConfigError;
  }

  Report r;
  try {
    r = run_suite(c);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kMetricFailure;
  }
  try {
    emit(r, c.format, c.out);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kConfigError;
  }
  size_t passed = 0;
  for (const auto& m : r.metrics) passed += m.pass;
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.2f", r.wall_time_s);
  err << "suite " << r.suite << ": " << passed << "/" << r.metrics.size() << " metrics pass (" << secs << " s)\n";
  for (const auto& m : r.metrics)
    if (!m.pass) err << "  FAIL " << m.name << " = " << format_number(m.value) << " (tolerance "
                     << format_number(m.tolerance) << ")\n";
  return r.all_pass() ? kPass : kMetricFailure;
}

}  // namespace pharmonic::cli
