#include "dynex/graph.hpp"

#include "dynex/error.hpp"
#include "program.hpp"

#include <algorithm>
#include <cmath>

namespace dynex {

void SignedDigraph::add_node(std::string_view name) {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), name);
  if (it == nodes_.end() || *it != name)
    nodes_.insert(it, std::string(name));
}

void SignedDigraph::add_edge(std::string_view from, std::string_view to, int sign) {
  if (sign != 1 && sign != -1)
    throw ConfigError("edge sign must be +1 or -1");
  auto key = [](const SignedEdge& e) { return std::pair<std::string_view, std::string_view>(e.from, e.to); };
  const std::pair<std::string_view, std::string_view> k(from, to);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), k,
                             [&](const SignedEdge& e, const auto& v) { return key(e) < v; });
  if (it != edges_.end() && key(*it) == k)
    throw ConfigError("duplicate edge " + std::string(from) + " -> " + std::string(to));
  edges_.insert(it, SignedEdge{std::string(from), std::string(to), sign});
  add_node(from);
  add_node(to);
}

std::optional<int> SignedDigraph::sign(std::string_view from, std::string_view to) const {
  for (const auto& e : edges_)
    if (e.from == from && e.to == to)
      return e.sign;
  return std::nullopt;
}

bool SignedDigraph::has_node(std::string_view name) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), name);
}

namespace {

constexpr double kMinDerivative = 1e-12;

} // namespace

SignedDigraph signed_graph(const ModelSpec& spec, const ValueMap& point, double time) {
  const detail::Program program(spec);
  auto ws = program.make_workspace();
  for (const auto& [name, value] : point) {
    auto slot = program.slot(name);
    if (!slot)
      throw UnknownVariable(name);
    ws.values[*slot] = value;
  }
  for (const auto& s : spec.stocks)
    if (!point.count(s.id))
      throw UnknownVariable(s.id);
  for (const auto& a : spec.auxes)
    if (!point.count(a.id))
      throw UnknownVariable(a.id);

  std::vector<double> y(program.state_size(), 0.0);
  auto eval = [&](const detail::Code& code) {
    return program.run(code, ws, time, y.data(), detail::DelayMode::equilibrium);
  };

  SignedDigraph g;
  for (const auto& name : program.names())
    g.add_node(name);

  auto partial = [&](const std::string& target, const std::string& source, auto&& f) {
    const std::size_t slot = *program.slot(source);
    const double x = ws.values[slot];
    const double h = std::max(1e-6, 1e-6 * std::abs(x));
    ws.values[slot] = x + h;
    const double up = f();
    ws.values[slot] = x - h;
    const double down = f();
    ws.values[slot] = x;
    const double d = (up - down) / (2.0 * h);
    if (!std::isfinite(d))
      throw NonFiniteDerivative("d " + target + " / d " + source + " is not finite");
    if (std::abs(d) >= kMinDerivative)
      g.add_edge(source, target, d > 0.0 ? 1 : -1);
  };

  for (std::size_t i = 0; i < spec.auxes.size(); ++i) {
    const auto& code = program.aux_code(i);
    for (const auto& r : references(spec.auxes[i].expr))
      partial(spec.auxes[i].id, r, [&] { return eval(code); });
  }
  for (std::size_t i = 0; i < spec.stocks.size(); ++i) {
    const auto& s = spec.stocks[i];
    std::vector<std::string> sources = references(s.inflow);
    for (auto& r : references(s.outflow))
      if (std::find(sources.begin(), sources.end(), r) == sources.end())
        sources.push_back(r);
    for (const auto& r : sources)
      partial(s.id, r, [&] { return eval(program.inflow_code(i)) - eval(program.outflow_code(i)); });
  }
  return g;
}

} // namespace dynex
