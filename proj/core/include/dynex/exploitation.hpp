#pragma once

#include "dynex/error.hpp"
#include "dynex/loops.hpp"
#include "dynex/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dynex {

// Parameters of the labor-market exploitation model. Times are in model time
// units, money per person per time for salaries.
struct Calibration {
  double pool_init = 10000;      // people available for exploitation at t=0
  double pool_ref = 10000;       // pool size at which the demanded salary is w_ref
  double p_floor = 1;            // people; keeps the scarcity term finite
  double w_ref = 1;              // reference demanded salary
  double epsilon = 0.5;          // scarcity elasticity of the demanded salary
  double hire_time = 4;
  double layoff_time = 8;
  double quit_base = 0.02;       // 1/time
  double quit_slope = 0.5;       // extra quits per unit exhaustion, 1/time
  bool closed_population = true; // separated workers return to the pool
  double pool_shock_rate = 0;    // exogenous removal from the pool, 1/time
  double t_wage = 8;             // offered-salary adjustment time
  double target_premium = 1.05;
  double revenue_share = 0.3;    // share of revenue kept as capacity
  double price = 1;              // money per outcome at output_ref
  double output_ref = 31250;     // outcomes/time at which the price is `price`
  double demand_elasticity = 2;
  double p0 = 1;                 // outcomes per person per time at unit load
  double load_exponent_short = 0.3;
  double l_sustainable = 1;
  double t_burnout = 40;
  double t_recover = 100;
  double t_wom = 20;             // word-of-mouth smoothing time
  double optimism = 1.2;         // ex-ante overestimation
  double v_ref = 1.5;            // ex-post value at which word of mouth is neutral
  double k_init = 5000;
  double k_ref = 5000;
  double desired_workforce_ref = 2000;
  double incentive_boost = 1;
  LookupSource curve = AnchoredCurve{CurveKind::normal, 1.0, 1.5};
};

// Throws CalibrationError when the calibration violates its invariants or the
// resulting model does not validate.
ModelSpec build_exploitation_model(const Calibration& cal = {});

// The six narrated loops with their polarities and witness nodes.
std::vector<NamedLoop> fig2_loops();

// Steady state of `spec` from its own initial values (t = 2000, dt = 0.125,
// RK4, tolerance 1e-6 over the last 50 time units).
ValueMap baseline_operating_point(const ModelSpec& spec);

enum class Probe { b1_scarcity, r2_growth, b2_drain, r3_shortterm, b3_burnout, b4_wom };

std::string_view probe_name(Probe p) noexcept;
std::optional<Probe> probe_from_name(std::string_view name) noexcept;
inline constexpr Probe kAllProbes[] = {Probe::b1_scarcity,  Probe::r2_growth,  Probe::b2_drain,
                                       Probe::r3_shortterm, Probe::b3_burnout, Probe::b4_wom};

struct PatternReport {
  Probe probe;
  std::string detail;
};

class PatternViolation : public Error {
public:
  PatternViolation(Probe probe, double time, const std::string& what)
      : Error(what), probe_(probe), time_(time) {}
  Probe probe() const noexcept { return probe_; }
  // First time at which the expected signature fails.
  double time() const noexcept { return time_; }

private:
  Probe probe_;
  double time_;
};

// Starts a baseline and a perturbed run from the model's steady state and
// checks the loop's qualitative signature. Throws PatternViolation.
PatternReport loop_probe(const ModelSpec& spec, Probe probe);

} // namespace dynex
