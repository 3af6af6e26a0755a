#pragma once

#include "dynex/graph.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dynex {

enum class Polarity { balancing, reinforcing };

std::string_view polarity_name(Polarity p) noexcept;

// Elementary cycle starting at its lexicographically smallest node.
// signs[i] is the sign of the edge nodes[i] -> nodes[(i + 1) % size].
struct Cycle {
  std::vector<std::string> nodes;
  std::vector<int> signs;

  friend bool operator==(const Cycle&, const Cycle&) = default;
};

// Balancing iff the cycle has an odd number of negative links.
Polarity classify(const Cycle& cycle) noexcept;

struct Loop {
  Cycle cycle;
  Polarity polarity;

  friend bool operator==(const Loop&, const Loop&) = default;
};

struct LoopReport {
  std::vector<Loop> loops; // sorted by node sequence
  bool truncated = false;  // some cycle longer than max_len was skipped

  friend bool operator==(const LoopReport&, const LoopReport&) = default;
};

// Every elementary cycle with at most max_len nodes, exactly once each.
// The truncation flag is exact when every strongly connected component fits
// in max_len or a bounded search settles it; otherwise it is set
// conservatively. Throws ConfigError when max_len is 0.
LoopReport enumerate_cycles(const SignedDigraph& g, std::size_t max_len);

struct NamedLoop {
  std::string label;
  Polarity expected;
  std::vector<std::string> witness; // must appear in cyclic order
};

enum class MatchStatus { found, missing, polarity_mismatch };

std::string_view match_status_name(MatchStatus s) noexcept;

struct LoopMatch {
  std::string label;
  Polarity expected;
  MatchStatus status;
  std::optional<std::size_t> loop; // index into LoopReport::loops
};

struct MatchReport {
  std::vector<LoopMatch> matches;

  bool all_found() const noexcept;
};

// True when `witness` is a subsequence of some rotation of the cycle.
bool contains_in_cyclic_order(const Cycle& cycle, std::span<const std::string> witness);

// For each named loop: the shortest cycle carrying the witness with the
// expected polarity (found), else the shortest carrying it with the other
// polarity (polarity_mismatch), else missing. Ties go to the earlier cycle.
MatchReport match_named_loops(const LoopReport& report, std::span<const NamedLoop> expected);

} // namespace dynex
