#include "dynex/simulate.hpp"

#include "dynex/validate.hpp"
#include "program.hpp"

#include <algorithm>
#include <cmath>

namespace dynex {

bool Trajectory::has(std::string_view name) const noexcept {
  return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<double>& Trajectory::series(std::string_view name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end())
    throw UnknownColumn("no recorded series '" + std::string(name) + "'");
  return columns[static_cast<std::size_t>(it - names.begin())];
}

ValueMap Trajectory::row(std::size_t i) const {
  ValueMap out;
  for (std::size_t c = 0; c < names.size(); ++c)
    out.emplace(names[c], columns[c].at(i));
  return out;
}

NonFiniteState::NonFiniteState(const std::string& what, std::string variable, double time,
                               Trajectory partial)
    : Error(what), variable_(std::move(variable)), time_(time), partial_(std::move(partial)) {}

long step_count(const RunConfig& cfg) {
  if (!std::isfinite(cfg.t_start) || !std::isfinite(cfg.t_end))
    throw ConfigError("t_start and t_end must be finite");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
    throw ConfigError("dt must be > 0");
  if (cfg.t_end < cfg.t_start)
    throw ConfigError("t_end must not precede t_start");
  if (cfg.save_every < 1)
    throw ConfigError("save_every must be >= 1");
  const double span = cfg.t_end - cfg.t_start;
  const double steps = span / cfg.dt;
  const double whole = std::round(steps);
  if (std::abs(steps - whole) > 1e-9 * std::max(1.0, whole))
    throw ConfigError("(t_end - t_start) / dt is not a whole number of steps");
  if (whole > 1e9)
    throw ConfigError("too many steps");
  return static_cast<long>(whole);
}

namespace {

struct BoundEvent {
  double time;
  std::size_t slot;
  double value;
};

struct BoundFloor {
  std::size_t stock;
  double minimum;
  double from;
};

std::size_t param_slot(const detail::Program& p, const std::string& id) {
  auto slot = p.slot(id);
  if (!slot)
    throw UnknownVariable(id);
  if (*slot >= p.param_count())
    throw ConfigError("'" + id + "' is not a parameter");
  return *slot;
}

} // namespace

Trajectory simulate(const ModelSpec& spec, const RunConfig& cfg) {
  require_valid(spec);
  const long n = step_count(cfg);
  const detail::Program prog(spec);
  auto ws = prog.make_workspace();

  for (const auto& [id, value] : cfg.overrides)
    ws.values[param_slot(prog, id)] = value;

  std::vector<BoundEvent> events;
  for (const auto& e : cfg.events) {
    if (!(e.time >= cfg.t_start && e.time <= cfg.t_end))
      throw ConfigError("event time for '" + e.param + "' lies outside the run");
    events.push_back({e.time, param_slot(prog, e.param), e.value});
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const BoundEvent& a, const BoundEvent& b) { return a.time < b.time; });

  std::vector<BoundFloor> floors;
  for (const auto& f : cfg.floors) {
    auto slot = prog.slot(f.stock);
    if (!slot)
      throw UnknownVariable(f.stock);
    if (*slot < prog.param_count() || *slot >= prog.param_count() + prog.stock_count())
      throw ConfigError("'" + f.stock + "' is not a stock");
    floors.push_back({*slot - prog.param_count(), f.minimum, f.from});
  }

  const double eps = 1e-9 * cfg.dt;
  std::size_t next_event = 0;
  // A stock resting on its floor does not move below it, inside a step
  // either; otherwise RK4 stages would see values under the floor.
  auto clamp = [&](double t, double* y) {
    for (const auto& f : floors)
      if (f.from <= t + eps && y[f.stock] < f.minimum)
        y[f.stock] = f.minimum;
  };
  auto hold = [&](double t, const double* y, double* dydt) {
    for (const auto& f : floors)
      if (f.from <= t + eps && y[f.stock] <= f.minimum && dydt[f.stock] < 0.0)
        dydt[f.stock] = 0.0;
  };
  auto stage = [&](double t, double* y, double* dydt) {
    clamp(t, y);
    prog.evaluate(ws, t, y, detail::DelayMode::dynamic);
    prog.rates(ws, y, dydt);
    hold(t, y, dydt);
  };

  auto boundary = [&](double t, double* y) {
    while (next_event < events.size() && events[next_event].time <= t + eps) {
      ws.values[events[next_event].slot] = events[next_event].value;
      ++next_event;
    }
    clamp(t, y);
  };

  Trajectory traj;
  traj.names = prog.names();
  traj.columns.resize(traj.names.size());
  const auto expected_rows = static_cast<std::size_t>(n / cfg.save_every + 2);
  traj.times.reserve(expected_rows);
  for (auto& c : traj.columns)
    c.reserve(expected_rows);

  const std::size_t m = prog.state_size();
  std::vector<double> y(m, 0.0), k1(m), k2(m), k3(m), k4(m), tmp(m);
  prog.initial_stocks(ws, cfg.t_start, y.data());
  boundary(cfg.t_start, y.data());
  prog.evaluate(ws, cfg.t_start, y.data(), detail::DelayMode::initialize);

  const std::size_t n_vars = prog.variable_count();
  const double dt = cfg.dt;
  for (long k = 0;; ++k) {
    const double t = cfg.t_start + static_cast<double>(k) * dt;
    if (k > 0) {
      boundary(t, y.data());
      prog.evaluate(ws, t, y.data(), detail::DelayMode::dynamic);
    }
    for (std::size_t v = prog.param_count(); v < n_vars; ++v) {
      if (!std::isfinite(ws.values[v])) {
        std::string name = traj.names[v];
        std::string what = "'" + name + "' is not finite at t=" + std::to_string(t);
        throw NonFiniteState(what, std::move(name), t, std::move(traj));
      }
    }
    for (std::size_t j = prog.stock_count(); j < m; ++j) {
      if (!std::isfinite(y[j]))
        throw NonFiniteState("a delay level is not finite at t=" + std::to_string(t), "delay", t,
                             std::move(traj));
    }
    if (k % cfg.save_every == 0 || k == n) {
      traj.times.push_back(t);
      for (std::size_t v = 0; v < n_vars; ++v)
        traj.columns[v].push_back(ws.values[v]);
    }
    if (k == n)
      break;

    prog.rates(ws, y.data(), k1.data());
    hold(t, y.data(), k1.data());
    if (cfg.integrator == IntegratorKind::euler) {
      for (std::size_t j = 0; j < m; ++j)
        y[j] += dt * k1[j];
      continue;
    }
    const double half = 0.5 * dt;
    for (std::size_t j = 0; j < m; ++j)
      tmp[j] = y[j] + half * k1[j];
    stage(t + half, tmp.data(), k2.data());
    for (std::size_t j = 0; j < m; ++j)
      tmp[j] = y[j] + half * k2[j];
    stage(t + half, tmp.data(), k3.data());
    for (std::size_t j = 0; j < m; ++j)
      tmp[j] = y[j] + dt * k3[j];
    stage(t + dt, tmp.data(), k4.data());
    for (std::size_t j = 0; j < m; ++j)
      y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  return traj;
}

Trajectory smooth_response_probe(double tau, double horizon, double dt, double height) {
  if (!(tau > 0.0))
    throw ConfigError("tau must be > 0");
  if (!(dt > 0.0) || dt > tau / 10.0 * (1.0 + 1e-12))
    throw ConfigError("dt must be in (0, tau/10]");
  ModelSpec spec;
  spec.name = "smooth_probe";
  spec.params = {{"tau", tau, "time"}, {"height", height, ""}};
  spec.auxes = {{"y",
                 Expr::call(Builtin::smooth,
                            {Expr::call(Builtin::step, {Expr::ref("height"), Expr::constant(0.0)}),
                             Expr::ref("tau")}),
                 ""}};
  RunConfig cfg;
  cfg.t_start = 0.0;
  cfg.t_end = horizon;
  cfg.dt = dt;
  cfg.integrator = IntegratorKind::rk4;
  return simulate(spec, cfg);
}

double conservation_probe(const ModelSpec& spec, const RunConfig& cfg,
                          std::span<const std::string> group) {
  for (const auto& id : group) {
    if (!spec.kind_of(id))
      throw UnknownVariable(id);
    if (!spec.find_stock(id))
      throw ConfigError("'" + id + "' is not a stock");
  }
  if (group.empty())
    return 0.0;
  const Trajectory traj = simulate(spec, cfg);
  std::vector<const std::vector<double>*> cols;
  for (const auto& id : group)
    cols.push_back(&traj.series(id));
  auto total = [&](std::size_t row) {
    double s = 0.0;
    for (const auto* c : cols)
      s += (*c)[row];
    return s;
  };
  const double base = total(0);
  double drift = 0.0;
  for (std::size_t r = 0; r < traj.rows(); ++r)
    drift = std::max(drift, std::abs(total(r) - base));
  return drift;
}

} // namespace dynex
