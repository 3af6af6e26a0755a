#include "dynex/scenario.hpp"

#include "dynex/error.hpp"
#include "dynex/steady_state.hpp"
#include "overloaded.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

namespace dynex {

using detail::Overloaded;

RunConfig apply_policy(RunConfig cfg, const Policy& policy) {
  std::visit(Overloaded{
                 [&](const WageFloor& f) {
                   if (!(f.from >= 0.0))
                     throw ConfigError("wage floor start time must be >= 0");
                   cfg.floors.push_back({f.stock, f.minimum, f.from});
                 },
                 [&](const ParamOverride& o) {
                   if (!(o.from >= 0.0))
                     throw ConfigError("override start time must be >= 0");
                   cfg.events.push_back({std::max(o.from, cfg.t_start), o.id, o.value});
                 },
                 [&](const Composite& c) {
                   for (const auto& p : c.parts)
                     cfg = apply_policy(std::move(cfg), p);
                 },
             },
             policy);
  return cfg;
}

MetricMap default_metrics() {
  return {{"employment", "exploitees"},
          {"output", "outcomes"},
          {"wage", "offered_salary"},
          {"willing_unhired", "willing_supply"}};
}

MetricMap metrics_for(const ModelSpec& spec, const MetricMap& metrics) {
  MetricMap out;
  for (const auto& m : metrics)
    if (spec.kind_of(m.second))
      out.push_back(m);
  return out;
}

ScenarioResult run_scenario(const ModelSpec& spec, const Policy& policy, const RunConfig& cfg,
                            std::string name, const SteadyOptions& steady, const MetricMap& metrics) {
  ScenarioResult result;
  result.name = std::move(name);
  const RunConfig run = apply_policy(cfg, policy);
  result.trajectory = simulate(spec, run);
  try {
    result.steady = check_steady(spec, result.trajectory, steady.tol, steady.window);
  } catch (const NotConverged& e) {
    throw NotConverged(result.name + ": " + e.what(), e.variable(), e.residual());
  }
  for (const auto& [metric, variable] : metrics) {
    auto it = result.steady.find(variable);
    if (it == result.steady.end())
      throw UnknownVariable(variable);
    result.metrics[metric] = it->second;
  }
  return result;
}

namespace {

// Unbiased enough for sampling and, above all, fixed: high 64 bits of the
// 128-bit product.
std::uint64_t bounded(std::uint64_t x, std::uint64_t bound) {
  const std::uint64_t x_lo = x & 0xffffffffu, x_hi = x >> 32;
  const std::uint64_t b_lo = bound & 0xffffffffu, b_hi = bound >> 32;
  const std::uint64_t lo_lo = x_lo * b_lo;
  const std::uint64_t hi_lo = x_hi * b_lo;
  const std::uint64_t lo_hi = x_lo * b_hi;
  const std::uint64_t cross = (lo_lo >> 32) + (hi_lo & 0xffffffffu) + lo_hi;
  return x_hi * b_hi + (hi_lo >> 32) + (cross >> 32);
}

double unit_uniform(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

} // namespace

std::vector<ParamPoint> sweep_points(const SweepPlan& plan) {
  if (plan.grid.empty() == plan.ranges.empty())
    throw ConfigError("a sweep plan needs either grid axes or ranges, not both");
  std::vector<ParamPoint> points;
  if (!plan.grid.empty()) {
    std::size_t total = 1;
    for (const auto& axis : plan.grid) {
      if (axis.values.empty())
        throw ConfigError("grid axis '" + axis.id + "' has no values");
      total *= axis.values.size();
    }
    points.reserve(total);
    for (std::size_t k = 0; k < total; ++k) {
      ParamPoint p(plan.grid.size());
      std::size_t rest = k;
      for (std::size_t a = plan.grid.size(); a-- > 0;) {
        const auto& axis = plan.grid[a];
        p[a] = {axis.id, axis.values[rest % axis.values.size()]};
        rest /= axis.values.size();
      }
      points.push_back(std::move(p));
    }
    return points;
  }

  const std::size_t n = plan.samples;
  if (n == 0)
    throw ConfigError("a hypercube plan needs at least one sample");
  for (const auto& r : plan.ranges)
    if (!(r.low <= r.high))
      throw ConfigError("range for '" + r.id + "' has low > high");
  points.assign(n, ParamPoint(plan.ranges.size()));
  std::mt19937_64 rng(plan.seed);
  std::vector<std::size_t> perm(n);
  for (std::size_t d = 0; d < plan.ranges.size(); ++d) {
    const auto& r = plan.ranges[d];
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i)
      std::swap(perm[i], perm[bounded(rng(), i + 1)]);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (static_cast<double>(perm[i]) + unit_uniform(rng())) / static_cast<double>(n);
      points[i][d] = {r.id, r.low + (r.high - r.low) * u};
    }
  }
  return points;
}

std::vector<SweepOutcome> sweep(const ModelSpec& spec, const SweepPlan& plan, const SteadyOptions& steady,
                                const MetricMap& metrics, unsigned threads) {
  const auto points = sweep_points(plan);
  std::vector<SweepOutcome> out(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      out[i].point = points[i];
      RunConfig cfg = plan.run;
      for (const auto& [id, value] : points[i])
        cfg.overrides[id] = value;
      try {
        out[i].result = run_scenario(spec, Composite{}, cfg, "point " + std::to_string(i), steady, metrics);
      } catch (const std::exception& e) {
        out[i].failure = e.what();
      }
    }
  };
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, points.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back(worker);
  }
  return out;
}

ComparisonTable compare(const std::vector<ScenarioResult>& results, const ScenarioResult& baseline) {
  ComparisonTable table;
  for (const auto& r : results) {
    const bool same = r.metrics.size() == baseline.metrics.size() &&
                      std::equal(r.metrics.begin(), r.metrics.end(), baseline.metrics.begin(),
                                 [](const auto& a, const auto& b) { return a.first == b.first; });
    if (!same)
      throw KeyMismatch("metrics of '" + r.name + "' differ from the baseline's");
    for (const auto& [metric, value] : r.metrics) {
      const double base = baseline.metrics.at(metric);
      const double diff = value - base;
      double pct = 0.0;
      if (base != 0.0)
        pct = 100.0 * diff / std::abs(base);
      else if (diff != 0.0)
        pct = std::copysign(std::numeric_limits<double>::infinity(), diff);
      table.rows.push_back({r.name, metric, base, value, diff, pct});
    }
  }
  return table;
}

} // namespace dynex
