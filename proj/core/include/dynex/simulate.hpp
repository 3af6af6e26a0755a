#pragma once

#include "dynex/error.hpp"
#include "dynex/model.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dynex {

enum class IntegratorKind { euler, rk4 };

// Sets parameter `param` to `value` at the first step boundary at or after
// `time`, before that boundary's row is evaluated.
struct ParamEvent {
  double time;
  std::string param;
  double value;
};

// Keeps a stock at or above `minimum` from time `from` on. While the stock
// rests on the floor a negative net rate is treated as zero, also inside the
// RK4 stages.
struct StockFloor {
  std::string stock;
  double minimum;
  double from;
};

struct RunConfig {
  double t_start = 0.0;
  double t_end = 100.0;
  double dt = 0.125;
  int save_every = 1;
  IntegratorKind integrator = IntegratorKind::rk4;
  ValueMap overrides; // parameter values applied before initialization
  std::vector<ParamEvent> events;
  std::vector<StockFloor> floors;
};

// Saved rows of one run. Columns hold every parameter, stock and auxiliary
// in declaration order (params, stocks, auxes).
struct Trajectory {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const noexcept { return times.size(); }
  bool has(std::string_view name) const noexcept;
  // Throws UnknownColumn.
  const std::vector<double>& series(std::string_view name) const;
  double final_value(std::string_view name) const { return series(name).back(); }
  ValueMap row(std::size_t i) const;
  ValueMap final_values() const { return row(rows() - 1); }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// Raised when a stock, auxiliary or delay level stops being finite. Carries
// the rows saved before the offending step.
class NonFiniteState : public Error {
public:
  NonFiniteState(const std::string& what, std::string variable, double time, Trajectory partial);
  const std::string& variable() const noexcept { return variable_; }
  double time() const noexcept { return time_; }
  const Trajectory& trajectory() const noexcept { return partial_; }

private:
  std::string variable_;
  double time_;
  Trajectory partial_;
};

// Number of steps implied by the config. Throws ConfigError unless
// t_end >= t_start, dt > 0, save_every >= 1 and the span is a whole number of
// steps (relative tolerance 1e-9).
long step_count(const RunConfig& cfg);

// Validates the model (ValidationErrors), checks the config (ConfigError,
// UnknownVariable for overrides/events/floors naming unknown ids) and runs
// fixed-step integration.
Trajectory simulate(const ModelSpec& spec, const RunConfig& cfg);

// y = SMOOTH(STEP(height, 0), tau) from y(0) = 0, RK4. Requires tau > 0 and
// dt <= tau / 10.
Trajectory smooth_response_probe(double tau, double horizon, double dt, double height = 1.0);

// Largest |sum(group) - sum(group at t_start)| over saved rows. Group members
// must be stocks.
double conservation_probe(const ModelSpec& spec, const RunConfig& cfg,
                          std::span<const std::string> group);

} // namespace dynex
