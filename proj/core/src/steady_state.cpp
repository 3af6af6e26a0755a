#include "dynex/steady_state.hpp"

#include "dynex/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dynex {

ValueMap check_steady(const ModelSpec& spec, const Trajectory& traj, double tol, double window) {
  if (!(tol > 0.0))
    throw ConfigError("tolerance must be > 0");
  if (traj.rows() == 0)
    throw ConfigError("empty trajectory");
  const double t_end = traj.times.back();
  if (!(window > 0.0) || window > t_end - traj.times.front() + 1e-12 * std::abs(t_end))
    throw ConfigError("steady-state window must be positive and fit inside the run");

  const double from = t_end - window * (1.0 + 1e-12);
  std::size_t first = 0;
  while (first < traj.rows() && traj.times[first] < from)
    ++first;
  if (traj.rows() - first < 2)
    throw ConfigError("steady-state window holds fewer than two saved rows");

  double worst = 0.0;
  std::string worst_id;
  for (const auto& s : spec.stocks) {
    const auto& x = traj.series(s.id);
    for (std::size_t i = first; i + 1 < traj.rows(); ++i) {
      const double rate = std::abs(x[i + 1] - x[i]) / (traj.times[i + 1] - traj.times[i]);
      const double rel = rate / std::max(std::abs(x[i + 1]), 1.0);
      if (worst_id.empty() || rel > worst) {
        worst = rel;
        worst_id = s.id;
      }
    }
  }
  if (worst >= tol) {
    std::ostringstream msg;
    msg << "no steady state: '" << worst_id << "' still changes at relative rate " << worst
        << " per unit time over the last " << window << " time units (tolerance " << tol << ")";
    throw NotConverged(msg.str(), worst_id, worst);
  }
  return traj.final_values();
}

ValueMap steady_state(const ModelSpec& spec, const RunConfig& cfg, double tol, double window) {
  if (!(tol > 0.0))
    throw ConfigError("tolerance must be > 0");
  if (!(window > 0.0) || window > cfg.t_end - cfg.t_start)
    throw ConfigError("steady-state window must be positive and fit inside the run");
  return check_steady(spec, simulate(spec, cfg), tol, window);
}

ModelSpec with_initial_state(ModelSpec spec, const ValueMap& state) {
  for (auto& s : spec.stocks) {
    auto it = state.find(s.id);
    if (it == state.end())
      throw UnknownVariable(s.id);
    s.initial = Expr::constant(it->second);
  }
  return spec;
}

ModelSpec warm_start(const ModelSpec& spec, const RunConfig& cfg, double tol, double window) {
  ModelSpec out = with_initial_state(spec, steady_state(spec, cfg, tol, window));
  for (const auto& [id, value] : cfg.overrides)
    out = with_parameter(std::move(out), id, value);
  return out;
}

} // namespace dynex
