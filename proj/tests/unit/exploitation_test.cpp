#include "dynex/exploitation.hpp"
#include "dynex/graph.hpp"
#include "dynex/simulate.hpp"
#include "dynex/validate.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dynex;

namespace {

const ModelSpec& flagship() {
  static const ModelSpec m = build_exploitation_model();
  return m;
}

const ValueMap& baseline() {
  static const ValueMap v = baseline_operating_point(flagship());
  return v;
}

} // namespace

TEST(Exploitation, BuildsAValidModel) {
  const auto r = validate_model(flagship());
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(r.findings.empty());
  EXPECT_EQ(flagship().stocks.size(), 5u);
  for (const char* id : {"potential_exploitees", "exploitees", "capacity", "exhaustion", "offered_salary"})
    EXPECT_NE(flagship().find_stock(id), nullptr) << id;
}

TEST(Exploitation, CalibrationInvariants) {
  Calibration c;
  c.hire_time = 0;
  EXPECT_THROW(build_exploitation_model(c), CalibrationError);
  c = {};
  c.revenue_share = 1.5;
  EXPECT_THROW(build_exploitation_model(c), CalibrationError);
  c = {};
  c.pool_ref = 0;
  EXPECT_THROW(build_exploitation_model(c), CalibrationError);
  c = {};
  c.curve = AnchoredCurve{CurveKind::normal, 1.0, 0.8};
  EXPECT_THROW(build_exploitation_model(c), CalibrationError);
  c = {};
  c.curve = PointTable{{{0, 0}, {1, 0.5}, {2, 1}}};
  EXPECT_NO_THROW(build_exploitation_model(c));
}

// Balance relations every steady state of the model must satisfy, checked
// from the equations rather than from stored numbers.
TEST(Exploitation, SteadyStateSatisfiesTheBalanceRelations) {
  const auto& v = baseline();
  const double E = v.at("exploitees"), P = v.at("potential_exploitees"), X = v.at("exhaustion");
  const double L = v.at("load"), w = v.at("offered_salary"), K = v.at("capacity");
  EXPECT_NEAR(P + E, 10000.0, 1e-6);
  EXPECT_NEAR(v.at("hiring"), v.at("separations"), 1e-6 * E * 2);
  EXPECT_NEAR(w, v.at("indicated_salary"), 8 * 1e-6 * w * 2);
  EXPECT_NEAR(X, 100.0 * (L - 1.0) / 40.0, 1e-4);
  EXPECT_NEAR(0.3 * v.at("revenue"), v.at("wage_bill"), 1e-6 * K * 2);
  EXPECT_NEAR(v.at("demanded_salary"), std::sqrt(10000.0 / P), 1e-12);
  EXPECT_NEAR(L, std::sqrt(K / 5000.0), 1e-12);
  EXPECT_NEAR(v.at("outcomes"), E * std::pow(L, 0.3) * (1.0 - X), 1e-9);
  EXPECT_NEAR(v.at("ex_post_value"), w * (1.0 - 0.5 * X) / L, 1e-6);
  EXPECT_GT(v.at("vacancies"), 0.0);
  EXPECT_EQ(v.at("layoffs"), 0.0);
}

TEST(Exploitation, BaselineOperatingPoint) {
  const auto& v = baseline();
  EXPECT_NEAR(v.at("exploitees"), 1470.86, 0.05);
  EXPECT_NEAR(v.at("demanded_salary"), 1.0828, 1e-4);
  EXPECT_NEAR(v.at("exhaustion"), 0.1552, 1e-4);
  EXPECT_NEAR(v.at("load"), 1.0621, 1e-4);
  // Offer above demand, yet not everyone in the pool is willing.
  EXPECT_GT(v.at("relative_attractiveness"), 1.0);
  EXPECT_LT(v.at("fraction_willing"), 1.0);
}

TEST(Exploitation, AllNamedLoopsWithTheirPolarities) {
  const auto report = enumerate_cycles(signed_graph(flagship(), baseline()), 12);
  const auto named = fig2_loops();
  int balancing = 0, reinforcing = 0;
  for (const auto& n : named)
    (n.expected == Polarity::balancing ? balancing : reinforcing)++;
  EXPECT_EQ(balancing, 4);
  EXPECT_EQ(reinforcing, 2);
  const auto m = match_named_loops(report, named);
  for (const auto& x : m.matches)
    EXPECT_EQ(x.status, MatchStatus::found) << x.label;
  EXPECT_TRUE(m.all_found());
}

TEST(Exploitation, KeyLinkSigns) {
  const auto g = signed_graph(flagship(), baseline());
  EXPECT_EQ(g.sign("potential_exploitees", "demanded_salary"), -1);
  EXPECT_EQ(g.sign("demanded_salary", "relative_attractiveness"), -1);
  EXPECT_EQ(g.sign("offered_salary", "wage_bill"), 1);
  EXPECT_EQ(g.sign("wage_bill", "capacity"), -1);
  EXPECT_EQ(g.sign("load", "exhaustion"), 1);
  EXPECT_EQ(g.sign("exhaustion", "outcomes"), -1);
  EXPECT_EQ(g.sign("load", "ex_post_value"), -1);
}

TEST(Exploitation, ProbeNames) {
  for (Probe p : kAllProbes)
    EXPECT_EQ(probe_from_name(probe_name(p)), p);
  EXPECT_FALSE(probe_from_name("B9_nothing").has_value());
}

class ProbeTest : public ::testing::TestWithParam<Probe> {};

TEST_P(ProbeTest, PassesOnTheDefaultCalibration) {
  const auto r = loop_probe(flagship(), GetParam());
  EXPECT_EQ(r.probe, GetParam());
  EXPECT_FALSE(r.detail.empty());
}

INSTANTIATE_TEST_SUITE_P(AllProbes, ProbeTest, ::testing::ValuesIn(kAllProbes),
                         [](const auto& info) { return std::string(probe_name(info.param)); });

TEST(Probes, ScarcityLoopNeedsScarcityPricing) {
  Calibration c;
  c.epsilon = 0;
  try {
    loop_probe(build_exploitation_model(c), Probe::b1_scarcity);
    FAIL();
  } catch (const PatternViolation& v) {
    EXPECT_EQ(v.probe(), Probe::b1_scarcity);
    EXPECT_EQ(v.time(), 15.0);
  }
}

TEST(Probes, BurnoutLoopNeedsBurnout) {
  Calibration c;
  c.t_burnout = 1e12;
  EXPECT_THROW(loop_probe(build_exploitation_model(c), Probe::b3_burnout), PatternViolation);
}

TEST(Probes, NoRevenueDrainsCapacity) {
  Calibration c;
  c.revenue_share = 0;
  EXPECT_NO_THROW(loop_probe(build_exploitation_model(c), Probe::b2_drain));
}

TEST(Exploitation, ClosedPopulationIsConserved) {
  RunConfig cfg;
  cfg.t_end = 2000;
  cfg.dt = 0.125;
  const std::string group[] = {"potential_exploitees", "exploitees"};
  EXPECT_LT(conservation_probe(flagship(), cfg, group), 1e-9);

  Calibration open;
  open.closed_population = false;
  EXPECT_GT(conservation_probe(build_exploitation_model(open), cfg, group), 1.0);
}
