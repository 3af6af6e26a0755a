#pragma once

#include "dynex/model.hpp"
#include "dynex/simulate.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dynex {

// Minimum offered wage, enforced by clamping `stock` after every step from
// time `from` on.
struct WageFloor {
  double minimum = 0.0;
  double from = 0.0;
  std::string stock = "offered_salary";
};

// Parameter value change taking effect at time `from`.
struct ParamOverride {
  std::string id;
  double value = 0.0;
  double from = 0.0;
};

struct Composite;
using Policy = std::variant<WageFloor, ParamOverride, Composite>;

struct Composite {
  std::vector<Policy> parts;
};

// Adds the policy's events and floors to `cfg`. Throws ConfigError for a
// negative start time.
RunConfig apply_policy(RunConfig cfg, const Policy& policy);

// Metric name -> variable it reads at steady state.
using MetricMap = std::vector<std::pair<std::string, std::string>>;

// employment = exploitees, output = outcomes, wage = offered_salary,
// willing_unhired = willing_supply (people willing to work but not employed).
MetricMap default_metrics();

// The subset of `metrics` whose variables exist in `spec`.
MetricMap metrics_for(const ModelSpec& spec, const MetricMap& metrics = default_metrics());

struct SteadyOptions {
  double tol = 1e-6;
  double window = 50.0;
};

struct ScenarioResult {
  std::string name;
  ValueMap steady;
  std::map<std::string, double> metrics;
  Trajectory trajectory;
};

// Applies the policy, runs to steady state and reads the metrics. A
// NotConverged error is re-thrown with the scenario name in its message.
ScenarioResult run_scenario(const ModelSpec& spec, const Policy& policy, const RunConfig& cfg,
                            std::string name = "scenario", const SteadyOptions& steady = {},
                            const MetricMap& metrics = default_metrics());

struct GridAxis {
  std::string id;
  std::vector<double> values;
};

struct RangeAxis {
  std::string id;
  double low = 0.0;
  double high = 0.0;
};

// Either a full grid (row-major, last axis fastest) or a Latin hypercube of
// `samples` points over the ranges.
struct SweepPlan {
  std::vector<GridAxis> grid;
  std::vector<RangeAxis> ranges;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  RunConfig run;
};

using ParamPoint = std::vector<std::pair<std::string, double>>;

// Points in plan order. Throws ConfigError for an empty or mixed plan.
std::vector<ParamPoint> sweep_points(const SweepPlan& plan);

struct SweepOutcome {
  ParamPoint point;
  std::optional<ScenarioResult> result; // empty when the run failed
  std::string failure;                  // message of the failure, if any
};

// One outcome per plan point, in plan order. Points run on up to `threads`
// workers (0: hardware concurrency); failures are recorded, not thrown.
std::vector<SweepOutcome> sweep(const ModelSpec& spec, const SweepPlan& plan,
                                const SteadyOptions& steady = {},
                                const MetricMap& metrics = default_metrics(),
                                unsigned threads = 0);

struct ComparisonRow {
  std::string scenario;
  std::string metric;
  double baseline;
  double value;
  double abs_diff;
  double pct_diff; // 100 * abs_diff / |baseline|; 0 when both are 0
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
};

// Rows ordered by result, then metric name. Throws KeyMismatch when a result's
// metric names differ from the baseline's.
ComparisonTable compare(const std::vector<ScenarioResult>& results, const ScenarioResult& baseline);

// Scenario files:
//   scenario NAME
//   override PARAM = NUMBER [at TIME]
//   wage_floor NUMBER from TIME
// Each `scenario` line starts a new composite policy.
struct NamedPolicy {
  std::string name;
  Policy policy;
};

std::vector<NamedPolicy> parse_scenarios(std::string_view text);

// Plan files:
//   grid PARAM = v1, v2, ...
//   range PARAM = LOW..HIGH samples N
//   seed N
// The run configuration is left at its defaults.
SweepPlan parse_sweep_plan(std::string_view text);

} // namespace dynex
