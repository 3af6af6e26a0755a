#include "dynex/exploitation.hpp"

#include "dynex/dsl.hpp"
#include "dynex/simulate.hpp"
#include "dynex/steady_state.hpp"
#include "dynex/validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dynex {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok)
    throw CalibrationError("calibration: " + what);
}

void check_calibration(const Calibration& c) {
  for (auto [v, name] : {std::pair{c.hire_time, "hire_time"}, {c.layoff_time, "layoff_time"},
                         {c.t_wage, "t_wage"}, {c.t_burnout, "t_burnout"}, {c.t_recover, "t_recover"},
                         {c.t_wom, "t_wom"}})
    require(v > 0.0 && std::isfinite(v), std::string(name) + " must be > 0");
  require(c.revenue_share >= 0.0 && c.revenue_share <= 1.0, "revenue_share must lie in [0, 1]");
  require(c.pool_ref > 0.0, "pool_ref must be > 0");
  require(c.pool_init >= 0.0, "pool_init must be >= 0");
  require(c.p_floor > 0.0, "p_floor must be > 0");
  require(c.epsilon >= 0.0, "epsilon must be >= 0");
  require(c.optimism >= 1.0, "optimism must be >= 1");
  require(c.load_exponent_short > 0.0, "load_exponent_short must be > 0");
  require(c.k_ref > 0.0, "k_ref must be > 0");
  require(c.v_ref > 0.0, "v_ref must be > 0");
  require(c.output_ref > 0.0, "output_ref must be > 0");
  require(c.demand_elasticity > 0.0, "demand_elasticity must be > 0");
}

} // namespace

ModelSpec build_exploitation_model(const Calibration& c) {
  check_calibration(c);
  ModelSpec m;
  m.name = "exploitation";
  m.params = {
      {"pool_init", c.pool_init, "people"},
      {"pool_ref", c.pool_ref, "people"},
      {"p_floor", c.p_floor, "people"},
      {"w_ref", c.w_ref, "money/person/time"},
      {"epsilon", c.epsilon, ""},
      {"hire_time", c.hire_time, "time"},
      {"layoff_time", c.layoff_time, "time"},
      {"quit_base", c.quit_base, "1/time"},
      {"quit_slope", c.quit_slope, "1/time"},
      {"closed_population", c.closed_population ? 1.0 : 0.0, ""},
      {"pool_shock_rate", c.pool_shock_rate, "1/time"},
      {"t_wage", c.t_wage, "time"},
      {"target_premium", c.target_premium, ""},
      {"revenue_share", c.revenue_share, ""},
      {"price", c.price, "money/outcome"},
      {"output_ref", c.output_ref, "outcomes/time"},
      {"demand_elasticity", c.demand_elasticity, ""},
      {"p0", c.p0, "outcomes/person/time"},
      {"load_exponent_short", c.load_exponent_short, ""},
      {"l_sustainable", c.l_sustainable, ""},
      {"t_burnout", c.t_burnout, "time"},
      {"t_recover", c.t_recover, "time"},
      {"t_wom", c.t_wom, "time"},
      {"optimism", c.optimism, ""},
      {"v_ref", c.v_ref, ""},
      {"k_init", c.k_init, "money"},
      {"k_ref", c.k_ref, "money"},
      {"desired_workforce_ref", c.desired_workforce_ref, "people"},
      {"incentive_boost", c.incentive_boost, ""},
  };
  m.lookups = {{"f_willing", c.curve}};

  auto e = [](std::string_view text) { return parse_expression(text); };
  auto stock = [&](std::string id, std::string_view init, std::string_view in, std::string_view out,
                   std::string unit) {
    m.stocks.push_back({std::move(id), e(init), e(in), e(out), std::move(unit)});
  };
  auto aux = [&](std::string id, std::string_view expr, std::string unit) {
    m.auxes.push_back({std::move(id), e(expr), std::move(unit)});
  };

  stock("potential_exploitees", "pool_init", "closed_population * separations", "hiring + pool_removal",
        "people");
  stock("exploitees", "0", "hiring", "separations", "people");
  stock("capacity", "k_init", "revenue_share * revenue", "wage_bill", "money");
  stock("exhaustion", "0", "MAX(load - l_sustainable, 0) / t_burnout", "exhaustion / t_recover", "");
  stock("offered_salary", "w_ref", "(indicated_salary - offered_salary) / t_wage", "0",
        "money/person/time");

  // Scarcity raises the salary the pool demands.
  aux("demanded_salary", "w_ref * (pool_ref / MAX(potential_exploitees, p_floor)) ^ epsilon",
      "money/person/time");
  aux("relative_attractiveness", "offered_salary / demanded_salary", "");
  // Experienced value of a position, spread by word of mouth with a delay.
  aux("ex_post_value",
      "SMOOTH((offered_salary / w_ref) * (1 - 0.5 * exhaustion) * (l_sustainable / MAX(load, 0.1)), t_wom)",
      "");
  aux("wom_multiplier", "CLIP(ex_post_value / v_ref, 0.2, 1)", "");
  aux("ex_ante_value", "optimism * relative_attractiveness * wom_multiplier", "");
  aux("fraction_willing", "LOOKUP(f_willing, ex_ante_value)", "");
  aux("willing_supply", "fraction_willing * potential_exploitees", "people");
  aux("incentive_multiplier", "incentive_boost * (MAX(capacity, 0) / k_ref) ^ 0.5", "");
  aux("load", "incentive_multiplier", "");
  aux("desired_workforce", "desired_workforce_ref * incentive_multiplier", "people");
  aux("vacancies", "MAX(desired_workforce - exploitees, 0)", "people");
  // Smooth minimum of open vacancies and willing people.
  aux("hiring", "vacancies * willing_supply / MAX(vacancies + willing_supply, p_floor) / hire_time",
      "people/time");
  aux("quits", "exploitees * (quit_base + quit_slope * exhaustion)", "people/time");
  aux("layoffs", "MAX(exploitees - desired_workforce, 0) / layoff_time", "people/time");
  aux("separations", "quits + layoffs", "people/time");
  aux("pool_removal", "pool_shock_rate * potential_exploitees", "people/time");
  aux("outcomes", "exploitees * p0 * load ^ load_exponent_short * MAX(1 - exhaustion, 0)", "outcomes/time");
  aux("output_price", "price * (MAX(outcomes, 1) / output_ref) ^ (-1 / demand_elasticity)", "money/outcome");
  aux("revenue", "outcomes * output_price", "money/time");
  aux("wage_bill", "exploitees * offered_salary", "money/time");
  aux("affordability", "CLIP(capacity / k_ref, 0.5, 1.5)", "");
  aux("indicated_salary", "demanded_salary * target_premium * affordability", "money/person/time");
  aux("vacancy_fill_rate", "hiring / MAX(vacancies, p_floor)", "1/time");

  const auto report = validate_model(m);
  if (!report.ok()) {
    std::string msg = "calibration produces an invalid model";
    for (const auto& f : report.errors())
      msg += "; " + f.location + ": " + f.message;
    throw CalibrationError(msg);
  }
  return m;
}

std::vector<NamedLoop> fig2_loops() {
  return {
      {"B1", Polarity::balancing,
       {"potential_exploitees", "demanded_salary", "relative_attractiveness", "hiring"}},
      {"R2", Polarity::reinforcing,
       {"offered_salary", "relative_attractiveness", "hiring", "exploitees", "outcomes", "revenue",
        "capacity"}},
      {"B2", Polarity::balancing, {"offered_salary", "wage_bill", "capacity"}},
      {"R3", Polarity::reinforcing, {"incentive_multiplier", "load", "outcomes", "revenue", "capacity"}},
      {"B3", Polarity::balancing, {"load", "exhaustion", "outcomes", "capacity"}},
      {"B4", Polarity::balancing, {"load", "ex_post_value", "ex_ante_value", "hiring"}},
  };
}

namespace {

RunConfig settle_config() {
  RunConfig cfg;
  cfg.t_start = 0.0;
  cfg.t_end = 2000.0;
  cfg.dt = 0.125;
  cfg.integrator = IntegratorKind::rk4;
  return cfg;
}

constexpr double kShockTime = 10.0;

bool above(double x, double base) { return x > base + 1e-9 * std::max(1.0, std::abs(base)); }
bool below(double x, double base) { return x < base - 1e-9 * std::max(1.0, std::abs(base)); }

double param_value(const ModelSpec& spec, std::string_view id) {
  const auto* p = spec.find_param(id);
  if (!p)
    throw UnknownVariable(std::string(id));
  return p->value;
}

struct ProbeRuns {
  Trajectory base;
  Trajectory pert;
};

ProbeRuns probe_runs(const ModelSpec& warm, double horizon, std::vector<ParamEvent> events,
                     ValueMap overrides = {}) {
  RunConfig cfg = settle_config();
  cfg.t_end = horizon;
  ProbeRuns r;
  r.base = simulate(warm, cfg);
  cfg.events = std::move(events);
  cfg.overrides = std::move(overrides);
  r.pert = simulate(warm, cfg);
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

[[noreturn]] void violation(Probe p, double t, const std::string& what) {
  throw PatternViolation(p, t, std::string(probe_name(p)) + " failed at t=" + fmt(t) + ": " + what);
}

// First saved time in (from, until] at which `pert` exceeds `base`.
std::optional<double> first_above(const ProbeRuns& r, std::string_view var, double from, double until) {
  const auto& b = r.base.series(var);
  const auto& q = r.pert.series(var);
  for (std::size_t i = 0; i < r.pert.rows(); ++i) {
    const double t = r.pert.times[i];
    if (t > from && t <= until && above(q[i], b[i]))
      return t;
  }
  return std::nullopt;
}

} // namespace

std::string_view probe_name(Probe p) noexcept {
  switch (p) {
  case Probe::b1_scarcity:
    return "B1_scarcity";
  case Probe::r2_growth:
    return "R2_growth";
  case Probe::b2_drain:
    return "B2_drain";
  case Probe::r3_shortterm:
    return "R3_shortterm";
  case Probe::b3_burnout:
    return "B3_burnout";
  case Probe::b4_wom:
    return "B4_wom";
  }
  return "";
}

std::optional<Probe> probe_from_name(std::string_view name) noexcept {
  for (Probe p : kAllProbes)
    if (probe_name(p) == name)
      return p;
  return std::nullopt;
}

ValueMap baseline_operating_point(const ModelSpec& spec) { return steady_state(spec, settle_config()); }

PatternReport loop_probe(const ModelSpec& spec, Probe probe) {
  const ModelSpec warm = warm_start(spec, settle_config());
  const double t0 = kShockTime;

  switch (probe) {
  case Probe::b1_scarcity: {
    // A fifth of the pool disappears over one time unit.
    const double rate = -std::log(0.8);
    const auto r = probe_runs(warm, 40.0, {{t0, "pool_shock_rate", rate}, {t0 + 1.0, "pool_shock_rate", 0.0}});
    const auto t = first_above(r, "demanded_salary", t0, t0 + 5.0);
    if (!t)
      violation(probe, t0 + 5.0, "demanded_salary did not rise above baseline within 5 time units");
    return {probe, "demanded_salary above baseline at t=" + fmt(*t)};
  }
  case Probe::r2_growth: {
    const double share = 1.1 * param_value(warm, "revenue_share");
    const double horizon = 100.0;
    const auto r = probe_runs(warm, horizon, {{t0, "revenue_share", share}});
    const char* vars[] = {"capacity", "incentive_multiplier", "offered_salary"};
    auto all_above = [&](std::size_t i) {
      return std::all_of(std::begin(vars), std::end(vars),
                         [&](const char* v) { return above(r.pert.series(v)[i], r.base.series(v)[i]); });
    };
    std::optional<std::size_t> start;
    for (std::size_t i = 0; i < r.pert.rows() && !start; ++i)
      if (r.pert.times[i] > t0 && all_above(i))
        start = i;
    if (!start)
      violation(probe, horizon, "capacity, incentives and offered_salary never all rose above baseline");
    const double t1 = r.pert.times[*start];
    if (t1 + 20.0 > horizon)
      violation(probe, t1, "rise came too late to observe 20 time units");
    for (std::size_t i = *start; i < r.pert.rows() && r.pert.times[i] <= t1 + 20.0; ++i)
      if (!all_above(i))
        violation(probe, r.pert.times[i], "fell back to baseline within 20 time units of rising");
    return {probe, "all three above baseline on [" + fmt(t1) + ", " + fmt(t1 + 20.0) + "]"};
  }
  case Probe::b2_drain: {
    const auto r = probe_runs(warm, 100.0, {}, {{"revenue_share", 0.0}});
    const auto& k = r.pert.series("capacity");
    for (std::size_t i = 1; i < k.size(); ++i)
      if (k[i] > k[i - 1])
        violation(probe, r.pert.times[i], "capacity increased without revenue");
    return {probe, "capacity nonincreasing from " + fmt(k.front()) + " to " + fmt(k.back())};
  }
  case Probe::r3_shortterm: {
    const double boost = 1.2 * param_value(warm, "incentive_boost");
    const auto r = probe_runs(warm, 40.0, {{t0, "incentive_boost", boost}});
    const auto t = first_above(r, "outcomes", t0, t0 + 5.0);
    if (!t)
      violation(probe, t0 + 5.0, "outcomes did not exceed baseline within 5 time units");
    return {probe, "outcomes above baseline at t=" + fmt(*t)};
  }
  case Probe::b3_burnout: {
    const double boost = 1.2 * param_value(warm, "incentive_boost");
    const double horizon = 600.0;
    const auto r = probe_runs(warm, horizon, {{t0, "incentive_boost", boost}});
    if (!first_above(r, "outcomes", t0, horizon))
      violation(probe, horizon, "outcomes never exceeded baseline");
    const auto& o = r.pert.series("outcomes");
    std::size_t peak = 0;
    for (std::size_t i = 0; i < o.size(); ++i)
      if (r.pert.times[i] >= t0 && o[i] > o[peak])
        peak = i;
    const double low = *std::min_element(o.begin() + static_cast<std::ptrdiff_t>(peak), o.end());
    const double decline = 1.0 - low / o[peak];
    if (!(decline >= 0.05))
      violation(probe, horizon,
                "outcomes fell only " + fmt(100.0 * decline) + "% below their peak (need >= 5%)");
    return {probe, "outcomes peaked at t=" + fmt(r.pert.times[peak]) + " and then fell " +
                       fmt(100.0 * decline) + "%"};
  }
  case Probe::b4_wom: {
    const double boost = 1.2 * param_value(warm, "incentive_boost");
    const double horizon = 200.0;
    const auto r = probe_runs(warm, horizon, {{t0, "incentive_boost", boost}});
    const auto& vb = r.base.series("ex_post_value");
    const auto& vp = r.pert.series("ex_post_value");
    std::optional<std::size_t> start;
    for (std::size_t i = 0; i < vp.size() && !start; ++i)
      if (r.pert.times[i] > t0 && below(vp[i], vb[i]))
        start = i;
    if (!start)
      violation(probe, horizon, "ex_post_value never fell below baseline");
    const auto& hb = r.base.series("vacancy_fill_rate");
    const auto& hp = r.pert.series("vacancy_fill_rate");
    for (std::size_t i = *start; i < hp.size(); ++i)
      if (!below(hp[i], hb[i]))
        violation(probe, r.pert.times[i], "vacancy_fill_rate is not below baseline");
    return {probe, "ex_post_value below baseline from t=" + fmt(r.pert.times[*start]) +
                       "; vacancy_fill_rate below baseline thereafter"};
  }
  }
  throw ConfigError("unknown probe");
}

} // namespace dynex
