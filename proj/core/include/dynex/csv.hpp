#pragma once

#include "dynex/simulate.hpp"

#include <ostream>
#include <span>
#include <string>

namespace dynex {

// Shortest decimal text that reads back to exactly `v`.
std::string format_shortest(double v);

// Writes "time,<columns...>" and one row per saved step, '\n' line endings,
// exactly one trailing newline. Returns the number of bytes written.
// Throws UnknownColumn for a column the trajectory lacks and SinkError when
// the stream fails.
std::size_t write_csv(const Trajectory& traj, std::span<const std::string> columns, std::ostream& sink);

} // namespace dynex
