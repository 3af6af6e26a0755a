#include "dynex/csv.hpp"

#include "dynex/error.hpp"

#include <array>
#include <charconv>

namespace dynex {

std::string format_shortest(double v) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

std::size_t write_csv(const Trajectory& traj, std::span<const std::string> columns, std::ostream& sink) {
  std::vector<const std::vector<double>*> cols;
  cols.reserve(columns.size());
  for (const auto& c : columns)
    cols.push_back(&traj.series(c));

  std::string out = "time";
  for (const auto& c : columns)
    out += "," + c;
  out += '\n';
  std::array<char, 32> buf{};
  auto put = [&](double v) {
    const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), r.ptr);
  };
  for (std::size_t i = 0; i < traj.rows(); ++i) {
    put(traj.times[i]);
    for (const auto* c : cols) {
      out += ',';
      put((*c)[i]);
    }
    out += '\n';
  }
  sink.write(out.data(), static_cast<std::streamsize>(out.size()));
  sink.flush();
  if (!sink)
    throw SinkError("failed to write CSV output");
  return out.size();
}

} // namespace dynex
