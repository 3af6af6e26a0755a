#include "dynex/dsl.hpp"
#include "dynex/validate.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace dynex;

namespace {

ValidationReport check(const std::string& body) { return validate_model(parse_model_unchecked("model m\n" + body)); }

bool has(const ValidationReport& r, Severity s, const std::string& where, const std::string& message) {
  return std::any_of(r.findings.begin(), r.findings.end(), [&](const Finding& f) {
    return f.severity == s && f.location == where && f.message == message;
  });
}

} // namespace

TEST(Validate, MinimalModelIsClean) {
  const auto r = check("stock x = 1 { inflow: 0 outflow: 0 }");
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(r.findings.empty());
}

TEST(Validate, UndeclaredReferenceReportedOncePerDeclaration) {
  const auto r = check("aux a = ghost + ghost * 2\naux b = ghost");
  EXPECT_EQ(r.error_count(), 2u);
  EXPECT_TRUE(has(r, Severity::error, "a", "undeclared reference ghost"));
  EXPECT_TRUE(has(r, Severity::error, "b", "undeclared reference ghost"));
}

TEST(Validate, DuplicateIdsAcrossCategories) {
  const auto r = check("param x = 1\nstock x = 1 { inflow: 0 outflow: 0 }");
  EXPECT_TRUE(has(r, Severity::error, "x", "duplicate id x"));
}

TEST(Validate, ArityErrors) {
  const auto r = check("param p = 1\naux a = MIN(p, 2, 3)\naux b = CLIP(p)");
  EXPECT_TRUE(has(r, Severity::error, "a", "MIN expects 2 arguments, got 3"));
  EXPECT_TRUE(has(r, Severity::error, "b", "CLIP expects 3 arguments, got 1"));
}

TEST(Validate, AlgebraicCycleNamesTheShortestCycle) {
  const auto r = check("aux a = b + 1\naux b = c\naux c = a");
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has(r, Severity::error, "a", "algebraic cycle a→b→c→a"));
  EXPECT_THROW(evaluation_order(parse_model_unchecked("model m\naux a = b\naux b = a")), CycleError);
}

TEST(Validate, CycleThroughSmoothIsStillAlgebraic) {
  const auto r = check("aux a = SMOOTH(b, 2)\naux b = a");
  EXPECT_FALSE(r.ok());
}

TEST(Validate, StocksBreakCycles) {
  const auto r = check("stock s = 1 { inflow: a outflow: 0 }\naux a = s * 0.1");
  EXPECT_TRUE(r.ok());
}

TEST(Validate, InitialExpressionsReadParametersOnly) {
  const auto r = check("param p = 2\nstock s = p * 3 { inflow: 0 outflow: 0 }\n"
                       "stock t = s { inflow: 0 outflow: 0 }\nstock u = SMOOTH(p, 1) { inflow: 0 outflow: 0 }");
  EXPECT_TRUE(has(r, Severity::error, "t", "initial expression references non-parameter s"));
  EXPECT_TRUE(has(r, Severity::error, "u", "SMOOTH is not allowed in an initial expression"));
  EXPECT_EQ(r.error_count(), 2u);
}

TEST(Validate, LookupChecks) {
  const auto r = check("lookup f = points((0, 0), (1, 1))\naux a = LOOKUP(g, 1)\naux b = LOOKUP(2, 1)");
  EXPECT_TRUE(has(r, Severity::error, "a", "unknown lookup curve g"));
  EXPECT_TRUE(has(r, Severity::error, "b", "LOOKUP expects a curve id as its first argument"));
}

TEST(Validate, InvalidCurveIsAnError) {
  const auto r = check("lookup f = points((0, 0.5), (1, 1))\naux a = LOOKUP(f, 1)");
  ASSERT_EQ(r.error_count(), 1u);
  EXPECT_EQ(r.errors()[0].location, "f");
}

TEST(Validate, UnitMismatch) {
  const auto r = check("param a = 1 [people]\nparam b = 1 [money]\naux c = a + b");
  EXPECT_TRUE(has(r, Severity::error, "c", "unit mismatch: 'people' + 'money'"));
  const auto flows = check("param a = 1 [people]\nparam b = 1 [money]\nstock s = 0 { inflow: a outflow: b }");
  EXPECT_TRUE(has(flows, Severity::error, "s", "unit mismatch: 'people' - 'money'"));
  EXPECT_TRUE(check("param a = 1 [people]\nparam b = 2\naux c = a * b + a").ok());
}

TEST(Validate, WarningsDoNotFail) {
  const auto r = check("param unused = 1\nlookup f = normal(median=1, ratio90=1.5)\nstock s = 1 { inflow: 0 outflow: 0 }");
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(has(r, Severity::warning, "unused", "parameter unused is never referenced"));
  EXPECT_TRUE(has(r, Severity::warning, "f", "lookup f is never used"));
}

TEST(Validate, NonFiniteFlowsAtTheInitialPoint) {
  const auto r = check("param z = 0\nstock s = 1 { inflow: 1 / z outflow: 0 }");
  EXPECT_TRUE(has(r, Severity::error, "s", "inflow is not finite at the initial point"));
}

TEST(Validate, MissingExpressions) {
  ModelSpec m;
  m.name = "m";
  m.stocks.push_back({"s", {}, Expr::constant(0), Expr::constant(0), ""});
  m.auxes.push_back({"a", {}, ""});
  const auto r = validate_model(m);
  EXPECT_TRUE(has(r, Severity::error, "s", "stock s has no initial expression"));
  EXPECT_TRUE(has(r, Severity::error, "a", "auxiliary a has no expression"));
}

TEST(Validate, ParameterRanges) {
  ModelSpec m;
  m.name = "m";
  m.params.push_back({"p", 5.0, "", 0.0, 1.0});
  m.stocks.push_back({"s", Expr::ref("p"), Expr::constant(0), Expr::constant(0), ""});
  EXPECT_EQ(validate_model(m).error_count(), 1u);
  m.params[0].value = 0.5;
  EXPECT_TRUE(validate_model(m).ok());
}

TEST(Validate, BadNames) {
  ModelSpec m;
  m.name = "Bad Name";
  m.params.push_back({"Upper", 1.0, ""});
  const auto r = validate_model(m);
  EXPECT_TRUE(has(r, Severity::error, "model", "invalid model name 'Bad Name'"));
  EXPECT_TRUE(has(r, Severity::error, "Upper", "invalid identifier 'Upper'"));
}

TEST(EvaluationOrder, DependenciesFirstTiesByDeclaration) {
  const auto m = parse_model_unchecked("model m\naux c = a + b\naux a = 1\naux d = 2\naux b = a");
  EXPECT_EQ(evaluation_order(m), (std::vector<std::string>{"a", "d", "b", "c"}));
}

TEST(RequireValid, ThrowsWithTheReport) {
  const auto m = parse_model_unchecked("model m\naux a = nope");
  try {
    require_valid(m);
    FAIL();
  } catch (const ValidationErrors& e) {
    EXPECT_EQ(e.report().error_count(), 1u);
    EXPECT_NE(std::string(e.what()).find("undeclared reference nope"), std::string::npos);
  }
}
