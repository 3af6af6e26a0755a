#include "cli.hpp"

#include "dynex/dsl.hpp"
#include "dynex/exploitation.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include <unistd.h>

using dynex::testing::model_path;
using dynex::testing::read_text;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "dynex");
  std::ostringstream out, err;
  const int code = dynex::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);)
    out.push_back(l);
  return out;
}

class TempFile {
public:
  explicit TempFile(const std::string& contents = {}, const std::string& ext = ".txt") {
    path_ = (std::filesystem::temp_directory_path() /
             ("dynex_cli_" + std::to_string(counter_++) + "_" + std::to_string(::getpid()) + ext))
                .string();
    if (!contents.empty()) {
      std::FILE* f = std::fopen(path_.c_str(), "wb");
      std::fwrite(contents.data(), 1, contents.size(), f);
      std::fclose(f);
    }
  }
  ~TempFile() { std::remove(path_.c_str()); }
  const std::string& path() const { return path_; }

private:
  static inline int counter_ = 0;
  std::string path_;
};

} // namespace

TEST(Cli, NoSubcommandIsUsage) { EXPECT_EQ(run({}).code, dynex::cli::kUsage); }
TEST(Cli, UnknownFlagIsUsage) { EXPECT_EQ(run({"simulate", "x.sd", "--bogus"}).code, dynex::cli::kUsage); }
TEST(Cli, HelpIsSuccess) { EXPECT_EQ(run({"--help"}).code, dynex::cli::kOk); }

TEST(Cli, ValidateGoodAndBad) {
  auto r = run({"validate", model_path("linear_labor.sd")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("0 error(s)"), std::string::npos);
  EXPECT_TRUE(r.out.empty());

  TempFile bad("model m\nstock s = 1 { inflow: ghost outflow: 0 }\n", ".sd");
  r = run({"validate", bad.path()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("ghost"), std::string::npos);
  EXPECT_NE(r.err.find("1 error(s)"), std::string::npos);

  TempFile syntax("model m\nstock s = { inflow: 1 outflow: 0 }\n", ".sd");
  r = run({"validate", syntax.path()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(":2:"), std::string::npos);

  EXPECT_EQ(run({"validate", "/nonexistent/model.sd"}).code, 2);
}

TEST(Cli, SimulateWritesCsv) {
  auto r = run({"simulate", model_path("lotka_volterra.sd"), "--t-end", "1", "--dt", "0.25"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 6u);
  EXPECT_EQ(ls[0], "time,prey,predator");
  EXPECT_EQ(ls[1].rfind("0,", 0), 0u);
  EXPECT_EQ(ls[5].rfind("1,", 0), 0u);

  r = run({"simulate", model_path("lotka_volterra.sd"), "--t-end", "1", "--dt", "0.25", "--vars", "predator",
           "--save-every", "2", "--integrator", "euler"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).size(), 4u);
  EXPECT_EQ(lines(r.out)[0], "time,predator");

  TempFile target;
  r = run({"simulate", model_path("lotka_volterra.sd"), "--t-end", "1", "--out", target.path()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(read_text(target.path()).rfind("time,prey,predator\n", 0), 0u);
}

TEST(Cli, SimulateUsageErrors) {
  const auto m = model_path("lotka_volterra.sd");
  EXPECT_EQ(run({"simulate", m}).code, 2);                                          // --t-end missing
  EXPECT_EQ(run({"simulate", m, "--t-end", "1", "--vars", "ghost"}).code, 2);      // unknown column
  EXPECT_EQ(run({"simulate", m, "--t-end", "1", "--integrator", "midpoint"}).code, 2);
  EXPECT_EQ(run({"simulate", m, "--t-end", "1", "--dt", "0"}).code, 2);
  EXPECT_EQ(run({"simulate", m, "--t-end", "-1"}).code, 2);                        // t_end < t_start
}

TEST(Cli, SimulateIsByteIdentical) {
  const std::vector<std::string> args{"simulate", model_path("exploitation.sd"), "--t-end", "50"};
  EXPECT_EQ(run(args).out, run(args).out);
}

TEST(Cli, LoopsListsAndMatches) {
  auto r = run({"loops", model_path("lotka_volterra.sd")});
  // The predator-prey model has no steady state reachable from its start.
  EXPECT_EQ(r.code, 1);
  r = run({"loops", model_path("lotka_volterra.sd"), "--at", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).front(), "loop,polarity,length,nodes");
  EXPECT_GT(lines(r.out).size(), 1u);

  r = run({"loops", model_path("exploitation.sd"), "--expect", "fig2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 7u);
  EXPECT_EQ(ls[0], "label,expected,status,nodes");
  for (std::size_t i = 1; i < ls.size(); ++i)
    EXPECT_NE(ls[i].find(",found,"), std::string::npos) << ls[i];

  EXPECT_EQ(run({"loops", model_path("exploitation.sd"), "--expect", "fig3"}).code, 2);
}

TEST(Cli, LoopsTruncationWarning) {
  const auto r = run({"loops", model_path("exploitation.sd"), "--max-len", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(Cli, Probes) {
  auto r = run({"probes", model_path("exploitation.sd"), "--probe", "B1_scarcity", "--probe", "R3_shortterm"});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_EQ(ls[1].rfind("B1_scarcity,pass", 0), 0u);
  EXPECT_EQ(run({"probes", model_path("exploitation.sd"), "--probe", "nonsense"}).code, 2);

  dynex::Calibration cal;
  cal.epsilon = 0;
  TempFile knocked(dynex::serialize_model(dynex::build_exploitation_model(cal)), ".sd");
  r = run({"probes", knocked.path(), "--probe", "B1_scarcity"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("B1_scarcity,fail,"), std::string::npos);
}

TEST(Cli, ScenarioOnTheLinearFixture) {
  const auto r = run({"scenario", model_path("linear_labor.sd"), model_path("linear_floor.scn"), "--t-end", "400"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  EXPECT_EQ(ls[0], "scenario,metric,baseline,value,abs_diff,pct_diff");
  ASSERT_EQ(ls.size(), 5u);
  bool saw_wage = false;
  for (const auto& l : ls)
    if (l.find(",wage,") != std::string::npos) {
      saw_wage = true;
      EXPECT_NE(l.find(",1.7142857142857142,"), std::string::npos) << l;
    }
  EXPECT_TRUE(saw_wage);
}

TEST(Cli, ScenarioFailures) {
  TempFile bad("scenario a\nwage_floor 1 at 3\n", ".scn");
  auto r = run({"scenario", model_path("linear_labor.sd"), bad.path()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(":2:"), std::string::npos);
  EXPECT_EQ(run({"scenario", model_path("linear_labor.sd"), "/nonexistent.scn"}).code, 2);
  // Too short to settle.
  EXPECT_EQ(run({"scenario", model_path("linear_labor.sd"), model_path("linear_floor.scn"), "--t-end", "20",
                 "--window", "10", "--cold"}).code,
            1);
}

TEST(Cli, SweepGrid) {
  TempFile plan("grid demand_slope = 150, 200\n", ".plan");
  auto r = run({"sweep", model_path("linear_labor.sd"), plan.path(), "--t-end", "400", "--threads", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_EQ(ls[0], "point,demand_slope,employment,output,wage,willing_unhired,status");
  EXPECT_EQ(ls[1].rfind("0,150,", 0), 0u);
  EXPECT_EQ(ls[2].substr(ls[2].size() - 3), ",ok");

  TempFile ghost("grid ghost = 1\n", ".plan");
  EXPECT_EQ(run({"sweep", model_path("linear_labor.sd"), ghost.path()}).code, 2);
  TempFile empty("seed 3\n", ".plan");
  EXPECT_EQ(run({"sweep", model_path("linear_labor.sd"), empty.path()}).code, 2);
}

TEST(Cli, SweepRecordsFailedPoints) {
  // A huge adjustment time keeps the wage moving past the end of the run.
  TempFile plan("grid t_adjust = 2, 1000000\n", ".plan");
  const auto r = run({"sweep", model_path("linear_labor.sd"), plan.path(), "--t-end", "400", "--cold"});
  EXPECT_EQ(r.code, 1);
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_EQ(ls[1].substr(ls[1].size() - 3), ",ok");
  EXPECT_EQ(ls[2].substr(ls[2].size() - 7), ",failed");
  EXPECT_NE(r.err.find("point 1"), std::string::npos);
}

TEST(Cli, Calibrate) {
  auto r = run({"calibrate", "--kind", "normal", "--anchor", "1,0.5", "--anchor", "1.5,0.9"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out)[0], "kind=normal");
  EXPECT_EQ(lines(r.out)[1].rfind("mu=", 0), 0u);
  EXPECT_NE(r.err.find("F(1.5) = 0.9"), std::string::npos) << r.err;

  r = run({"calibrate", "--kind", "piecewise", "--anchor", "0,0", "--anchor", "1,0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("point=1,0.5"), std::string::npos);

  EXPECT_EQ(run({"calibrate", "--kind", "normal", "--anchor", "oops"}).code, 2);
  EXPECT_EQ(run({"calibrate", "--kind", "cauchy", "--anchor", "1,0.5"}).code, 2);
  EXPECT_EQ(run({"calibrate", "--kind", "normal", "--anchor", "1,0.5", "--anchor", "2,0.4"}).code, 1);
}

TEST(Cli, FlagshipMatchesTheShippedModel) {
  const auto r = run({"flagship"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, read_text(model_path("exploitation.sd")));
}
