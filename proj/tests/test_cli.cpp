#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../tools/cli.hpp"

using namespace pharmonic;

namespace {

std::string tmp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("pharmonic_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(std::vector<std::string> args, std::string* diag = nullptr) {
  args.insert(args.begin(), "pharmonic");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), err);
  if (diag) *diag = err.str();
  return code;
}

size_t count_lines(const std::string& s) { return static_cast<size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Cli, PassingSuiteWritesCsvWithOneRowPerMetric) {
  const auto out = tmp("commute.csv");
  ASSERT_EQ(run({"--suite", "commute", "--out", out}), 0);
  const std::string csv = slurp(out);
  EXPECT_EQ(csv.rfind("suite,metric,value,tolerance,pass,params,provenance\n", 0), 0u);
  EXPECT_EQ(count_lines(csv), 68u + 1u);
  EXPECT_EQ(csv.find("false"), std::string::npos);
}

TEST(Cli, DeterministicOutput) {
  const auto a = tmp("a.csv"), b = tmp("b.csv");
  ASSERT_EQ(run({"--suite", "duality", "--seed", "7", "--out", a}), 0);
  ASSERT_EQ(run({"--suite", "duality", "--seed", "7", "--out", b}), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  const auto c = tmp("c.csv");
  ASSERT_EQ(run({"--suite", "duality", "--seed", "8", "--out", c}), 0);
  EXPECT_NE(slurp(a), slurp(c));

  const auto ja = tmp("a.json"), jb = tmp("b.json");
  ASSERT_EQ(run({"--suite", "riesz", "--format", "json", "--out", ja}), 0);
  ASSERT_EQ(run({"--suite", "riesz", "--format", "json", "--out", jb}), 0);
  auto x = nlohmann::json::parse(slurp(ja)), y = nlohmann::json::parse(slurp(jb));
  x.erase("wall_time_s");
  y.erase("wall_time_s");
  EXPECT_EQ(x.dump(), y.dump());
}

TEST(Cli, JsonRoundTripIsBitExact) {
  SuiteConfig c;
  c.suite = "semigroup";
  const Report r = run_suite(c);
  const auto j = nlohmann::json::parse(to_json(r));
  EXPECT_EQ(j.at("suite"), "semigroup");
  ASSERT_EQ(j.at("metrics").size(), r.metrics.size());
  for (size_t i = 0; i < r.metrics.size(); ++i) {
    const auto& m = j.at("metrics")[i];
    EXPECT_EQ(m.at("name").get<std::string>(), r.metrics[i].name);
    EXPECT_EQ(m.at("value").get<double>(), r.metrics[i].value);
    EXPECT_EQ(m.at("tolerance").get<double>(), r.metrics[i].tolerance);
    EXPECT_EQ(m.at("pass").get<bool>(), r.metrics[i].pass);
  }
  EXPECT_EQ(j.at("wall_time_s").get<double>(), r.wall_time_s);
  EXPECT_EQ(j.at("params").at("seed"), "1");
}

TEST(Cli, EmptyReportIsHeaderOnly) {
  Report r;
  r.suite = "empty";
  EXPECT_EQ(to_csv(r), "suite,metric,value,tolerance,pass,params,provenance\n");
  const auto j = nlohmann::json::parse(to_json(r));
  EXPECT_TRUE(j.at("metrics").empty());
}

TEST(Cli, ExitCodes) {
  std::string diag;
  EXPECT_EQ(run({"--suite", "unknown"}, &diag), 2);
  EXPECT_EQ(run({}, &diag), 2);
  EXPECT_NE(diag.find("no suite"), std::string::npos);
  EXPECT_EQ(run({"--suite", "hls", "--alpha", "0.5", "--p", "2", "--q", "8"}, &diag), 2);
  EXPECT_NE(diag.find("1/p - alpha/(d+1) <= 1/q"), std::string::npos) << diag;
  EXPECT_EQ(run({"--suite", "gns", "--d", "1"}, &diag), 2);
  EXPECT_EQ(run({"--suite", "mehler", "--Nrho", "12"}, &diag), 2);
  EXPECT_EQ(run({"--suite", "mehler", "--format", "xml"}, &diag), 2);
  // criterion-level failure of the r = 0.9 Mehler sum is a metric failure
  EXPECT_EQ(run({"--suite", "mehler", "--out", tmp("mehler.csv")}, &diag), 1);
  EXPECT_NE(diag.find("FAIL r0.9_max_rel_err"), std::string::npos) << diag;
  EXPECT_EQ(run({"--suite", "mehler", "--out", "/nonexistent/dir/x.csv"}, &diag), 2);
}

TEST(Cli, ConfigFileAndFlagOverride) {
  const auto cfg = tmp("config.json");
  {
    std::ofstream f(cfg);
    f << R"({"suite": "duality", "d": 3, "seed": 5, "format": "json"})";
  }
  const auto a = tmp("cfg.json");
  ASSERT_EQ(run({"--config", cfg, "--out", a}), 0);
  auto j = nlohmann::json::parse(slurp(a));
  EXPECT_EQ(j.at("params").at("d"), "3");
  EXPECT_EQ(j.at("params").at("seed"), "5");
  ASSERT_EQ(run({"--config", cfg, "--d", "1", "--format", "csv", "--out", a}), 0);
  const std::string csv = slurp(a);
  EXPECT_NE(csv.find("d=1;"), std::string::npos);
  EXPECT_NE(csv.find("seed=5"), std::string::npos);
  {
    std::ofstream f(cfg);
    f << R"({"suite": "duality", "colour": 3})";
  }
  std::string diag;
  EXPECT_EQ(run({"--config", cfg}, &diag), 2);
  EXPECT_NE(diag.find("colour"), std::string::npos);
  EXPECT_EQ(run({"--config", tmp("missing.json")}, &diag), 2);
}

TEST(Suites, RegistryMatchesNamesAndValidatesFirst) {
  for (const auto& s : suite_names()) EXPECT_EQ(suitedetail::registry().count(s), 1u) << s;
  EXPECT_EQ(suitedetail::registry().size(), suite_names().size());
  SuiteConfig c;
  c.suite = "nope";
  try {
    run_suite(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unknown_suite);
  }
  c.suite = "hardy";
  c.alpha = 1.0;  // needs alpha < (d+1)/p = 1
  try {
    run_suite(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::config_validation);
  }
}
