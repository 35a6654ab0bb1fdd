#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "normal_approx/cli.hpp"
#include "normal_approx/io.hpp"

using namespace normal_approx;
using namespace normal_approx::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "normal-approx");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("na_cli_" + name); }

}  // namespace

TEST(ParseRange, Forms) {
  EXPECT_EQ(parse_range("8").lo, 8);
  EXPECT_EQ(parse_range("8").hi, 8);
  EXPECT_EQ(parse_range("2:12").lo, 2);
  EXPECT_EQ(parse_range("2:12").hi, 12);
  EXPECT_THROW(parse_range("12:2"), ParseError);
  EXPECT_THROW(parse_range("x"), ParseError);
  EXPECT_THROW(parse_range("3:"), ParseError);
  EXPECT_EQ(to_string(parse_range("2:12")), "2:12");
}

TEST(Config, FileFieldsApplied) {
  const auto j = nlohmann::json::parse(R"({"command": "fraas", "n": "2:5", "k": [1, 3], "trials": 4,
      "seed": 9, "format": "json", "tolerances": {"spread_grid": 256, "normality": 1e-6}})");
  const ExperimentConfig c = apply_config_json(j, {});
  EXPECT_EQ(c.command, Command::fraas);
  EXPECT_EQ(c.n.hi, 5);
  EXPECT_EQ(c.k.hi, 3);
  EXPECT_EQ(c.trials, 4);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.format, OutputFormat::json);
  EXPECT_EQ(c.tolerances.spread_grid, 256);
  EXPECT_EQ(c.tolerances.normality, 1e-6);
  EXPECT_THROW(apply_config_json(nlohmann::json::parse(R"({"bogus": 1})"), {}), ParseError);
  EXPECT_THROW(apply_config_json(nlohmann::json::parse(R"({"trials": "many"})"), {}), ParseError);
}

TEST(Config, FlagsOverrideFile) {
  const auto cfg = scratch("override.json");
  std::ofstream(cfg) << R"({"n": 3, "trials": 2, "seed": 1, "suppress_timestamp": true})";
  const auto out1 = scratch("override1.csv");
  const auto out2 = scratch("override2.csv");
  ASSERT_EQ(invoke({"certify", "--config", cfg.string(), "--out", out1.string()}).status, kExitOk);
  ASSERT_EQ(invoke({"certify", "--config", cfg.string(), "--trials", "3", "--out", out2.string()}).status, kExitOk);
  const std::string a = slurp(out1), b = slurp(out2);
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 3);
  EXPECT_EQ(std::count(b.begin(), b.end(), '\n'), 4);
  EXPECT_NE(a.find("\n0,3,1,"), std::string::npos);
  for (const auto& p : {cfg, out1, out2}) fs::remove(p);
  fs::remove(out1.string() + ".summary.json");
  fs::remove(out2.string() + ".summary.json");
}

TEST(WorkerCount, EnvCapsPool) {
  ExperimentConfig c;
  c.trials = 100;
  c.threads = 8;
  ::setenv("NORMAL_APPROX_THREADS", "3", 1);
  EXPECT_EQ(worker_count(c), 3u);
  ::unsetenv("NORMAL_APPROX_THREADS");
  EXPECT_EQ(worker_count(c), 8u);
  c.trials = 2;
  EXPECT_EQ(worker_count(c), 2u);
}

TEST(Run, CertifyCsvSchemaAndSummary) {
  const auto out = scratch("certify.csv");
  const Result r = invoke({"certify", "--gen", "poly_in_one", "--n", "2:6", "--k", "1:3", "--trials", "12",
                           "--seed", "7", "--out", out.string(), "--suppress-timestamp"});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  const std::string csv = slurp(out);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "trial,n,k,lhs,rhs,ratio,schur_residual,verdict,wall_ms");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);
  const auto summary = io::read_json_file(out.string() + ".summary.json");
  EXPECT_EQ(summary["trials"], 12);
  EXPECT_EQ(summary["failures"], 0);
  EXPECT_FALSE(summary.contains("timestamp"));
  EXPECT_LE(summary["ratio_min"].get<double>(), summary["ratio_median"].get<double>());
  EXPECT_LE(summary["ratio_median"].get<double>(), summary["ratio_max"].get<double>());
  EXPECT_EQ(nlohmann::json::parse(r.out), summary);
  fs::remove(out);
  fs::remove(out.string() + ".summary.json");
}

TEST(Run, OutputIndependentOfThreadCount) {
  const auto a = scratch("t1.csv"), b = scratch("t4.csv");
  const std::vector<std::string> base{"certify", "--n", "3:7", "--k", "1:4", "--trials", "16", "--seed", "3",
                                      "--suppress-timestamp"};
  auto args1 = base, args4 = base;
  args1.insert(args1.end(), {"--threads", "1", "--out", a.string()});
  args4.insert(args4.end(), {"--threads", "4", "--out", b.string()});
  ASSERT_EQ(invoke(args1).status, kExitOk);
  ASSERT_EQ(invoke(args4).status, kExitOk);
  EXPECT_EQ(slurp(a), slurp(b));
  for (const auto& p : {a, b}) {
    fs::remove(p);
    fs::remove(p.string() + ".summary.json");
  }
}

TEST(Run, JsonFormatHasRecordsAndSummary) {
  const Result r = invoke({"fraas", "--n", "3", "--k", "2", "--trials", "2", "--format", "json"});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["records"].size(), 2u);
  EXPECT_TRUE(j["records"][0]["verdict"].get<bool>());
  EXPECT_TRUE(j["summary"].contains("timestamp"));
}

TEST(Run, CounterexampleExitsZero) {
  const Result r = invoke({"counterexample", "--format", "json"});
  ASSERT_EQ(r.status, kExitOk);
  const auto d = nlohmann::json::parse(r.out)["records"][0]["detail"];
  EXPECT_TRUE(d["family_rejected"].get<bool>());
  EXPECT_LE(d["gram_identity_defect"].get<double>(), 1e-15);
}

TEST(Run, FailingCertificationGivesExitOne) {
  // The Jordan block is non-normal, so the Fraas verdict is false.
  const auto in = scratch("jordan.json");
  std::ofstream(in) << R"({"members": [{"rows": 2, "cols": 2, "data": [[0,0],[1,0],[0,0],[0,0]]}]})";
  EXPECT_EQ(invoke({"fraas", "--input", in.string()}).status, kExitCertificationFailure);
  EXPECT_EQ(invoke({"certify", "--input", in.string()}).status, kExitOk);
  fs::remove(in);
}

TEST(Run, ParseErrorsGiveExitTwo) {
  EXPECT_EQ(invoke({}).status, kExitParseError);
  EXPECT_EQ(invoke({"certify", "--trials", "0"}).status, kExitParseError);
  EXPECT_EQ(invoke({"certify", "--n", "abc"}).status, kExitParseError);
  EXPECT_EQ(invoke({"certify", "--gen", "unknown"}).status, kExitParseError);
  EXPECT_EQ(invoke({"certify", "--format", "xml"}).status, kExitParseError);
  EXPECT_EQ(invoke({"spread", "--input", "/nonexistent/m.json"}).status, kExitParseError);
  EXPECT_EQ(invoke({"certify", "--unknown-flag"}).status, kExitParseError);

  const auto bad = scratch("bad.json");
  std::ofstream(bad) << R"({"rows": 2, "cols": 2, "data": [[1,0]]})";
  const Result r = invoke({"spread", "--input", bad.string()});
  EXPECT_EQ(r.status, kExitParseError);
  EXPECT_NE(r.err.find("expected 4"), std::string::npos);
  fs::remove(bad);
}

TEST(Run, NonCommutingInputIsRejected) {
  const auto in = scratch("noncomm.json");
  std::ofstream(in) << R"({"members": [
      {"rows": 2, "cols": 2, "data": [[0,0],[1,0],[0,0],[0,0]]},
      {"rows": 2, "cols": 2, "data": [[0,0],[0,0],[1,0],[0,0]]}]})";
  const Result r = invoke({"certify", "--input", in.string()});
  EXPECT_EQ(r.status, kExitParseError);
  EXPECT_NE(r.err.find("commut"), std::string::npos);
  fs::remove(in);
}

TEST(Run, SpreadOfMatrixFile) {
  const auto in = scratch("m.json");
  std::ofstream(in) << R"({"rows": 2, "cols": 2, "data": [[0,0],[1,0],[0,0],[0,0]]})";
  const Result r = invoke({"spread", "--input", in.string(), "--grid", "1024", "--format", "json"});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  const auto d = nlohmann::json::parse(r.out)["records"][0]["detail"];
  EXPECT_NEAR(d["spread"].get<double>(), 1.0, 1e-10);
  EXPECT_EQ(d["grid_points"], 1024);
  fs::remove(in);
}

TEST(Run, GenerateFromSpec) {
  const auto spec = scratch("spec.json"), out = scratch("fam.json");
  std::ofstream(spec) << R"({"kind": "nilpotent_plus_normal", "n_qn": 3, "n_n": 2, "k": 2, "seed": 4})";
  ASSERT_EQ(invoke({"generate", "--spec", spec.string(), "--out", out.string()}).status, kExitOk);
  const auto fam = io::read_json_file(out);
  EXPECT_EQ(io::members_from_json(fam).size(), 2u);
  EXPECT_EQ(fam["split_dims"][0], 3);
  EXPECT_EQ(invoke({"split", "--input", out.string()}).status, kExitOk);
  const auto again = scratch("fam2.json");
  ASSERT_EQ(invoke({"generate", "--spec", spec.string(), "--out", again.string()}).status, kExitOk);
  EXPECT_EQ(slurp(out), slurp(again));
  for (const auto& p : {spec, out, again}) fs::remove(p);
}
