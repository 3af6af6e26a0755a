#pragma once

#include "dynex/model.hpp"
#include "dynex/simulate.hpp"

namespace dynex {

// Runs `cfg` and returns the final value of every variable, provided each
// stock's relative rate of change |dx/dt| / max(|x|, 1), measured between
// consecutive saved rows of the trailing `window`, stays below `tol`.
// Throws NotConverged naming the worst stock and its residual, ConfigError
// when the run is shorter than the window.
ValueMap steady_state(const ModelSpec& spec, const RunConfig& cfg, double tol = 1e-6,
                      double window = 50.0);

// Copy of `spec` whose stock initial expressions are the constants in
// `state`. Throws UnknownVariable when a stock is missing.
ModelSpec with_initial_state(ModelSpec spec, const ValueMap& state);

// The convergence test of steady_state() applied to an existing run of
// `spec`; returns the trajectory's final row.
ValueMap check_steady(const ModelSpec& spec, const Trajectory& traj, double tol, double window);

// with_initial_state(spec, steady_state(spec, cfg, tol, window)), with the
// config's parameter overrides written into the returned spec.
ModelSpec warm_start(const ModelSpec& spec, const RunConfig& cfg, double tol = 1e-6,
                     double window = 50.0);

} // namespace dynex
