#pragma once

#include "dynex/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dynex {

struct SignedEdge {
  std::string from;
  std::string to;
  int sign; // +1 or -1

  friend bool operator==(const SignedEdge&, const SignedEdge&) = default;
};

// Directed graph with signed edges. Nodes are kept sorted; edges are sorted
// by (from, to) and unique.
class SignedDigraph {
public:
  void add_node(std::string_view name);
  // Adds both endpoints. Throws ConfigError for a duplicate (from, to) pair
  // or a sign other than +1/-1.
  void add_edge(std::string_view from, std::string_view to, int sign);

  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const std::vector<SignedEdge>& edges() const noexcept { return edges_; }
  std::optional<int> sign(std::string_view from, std::string_view to) const;
  bool has_node(std::string_view name) const;

  friend bool operator==(const SignedDigraph&, const SignedDigraph&) = default;

private:
  std::vector<std::string> nodes_;
  std::vector<SignedEdge> edges_;
};

// Link polarities at an operating point, by central finite differences of
// each equation with respect to each variable it reads directly. A stock
// receives an edge from every variable in its inflow or outflow, signed by
// the partial of (inflow - outflow). Delays are evaluated at equilibrium
// (output equals input). Parameters missing from `point` take their declared
// values; stocks and auxiliaries must be present (UnknownVariable).
// Throws NonFiniteDerivative when a perturbed evaluation is not finite.
SignedDigraph signed_graph(const ModelSpec& spec, const ValueMap& point, double time = 0.0);

} // namespace dynex
