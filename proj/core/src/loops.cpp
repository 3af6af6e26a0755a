#include "dynex/loops.hpp"

#include "dynex/error.hpp"

#include <algorithm>
#include <deque>

namespace dynex {

std::string_view polarity_name(Polarity p) noexcept {
  return p == Polarity::balancing ? "balancing" : "reinforcing";
}

std::string_view match_status_name(MatchStatus s) noexcept {
  switch (s) {
  case MatchStatus::found:
    return "found";
  case MatchStatus::missing:
    return "missing";
  case MatchStatus::polarity_mismatch:
    return "polarity_mismatch";
  }
  return "missing";
}

Polarity classify(const Cycle& cycle) noexcept {
  const auto negatives = std::count(cycle.signs.begin(), cycle.signs.end(), -1);
  return negatives % 2 == 1 ? Polarity::balancing : Polarity::reinforcing;
}

namespace {

struct Arc {
  std::size_t to;
  int sign;
};

using Adjacency = std::vector<std::vector<Arc>>;

Adjacency adjacency(const SignedDigraph& g) {
  const auto& nodes = g.nodes();
  auto index = [&](const std::string& n) {
    return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), n) - nodes.begin());
  };
  Adjacency adj(nodes.size());
  for (const auto& e : g.edges())
    adj[index(e.from)].push_back({index(e.to), e.sign});
  for (auto& out : adj)
    std::sort(out.begin(), out.end(), [](const Arc& a, const Arc& b) { return a.to < b.to; });
  return adj;
}

// Nodes >= s that lie on a cycle through s using only nodes >= s.
std::vector<bool> component_from(const Adjacency& adj, std::size_t s) {
  const std::size_t n = adj.size();
  std::vector<bool> fwd(n, false), bwd(n, false);
  std::deque<std::size_t> q{s};
  fwd[s] = true;
  while (!q.empty()) {
    auto v = q.front();
    q.pop_front();
    for (const auto& a : adj[v])
      if (a.to >= s && !fwd[a.to]) {
        fwd[a.to] = true;
        q.push_back(a.to);
      }
  }
  std::vector<std::vector<std::size_t>> radj(n);
  for (std::size_t v = s; v < n; ++v)
    for (const auto& a : adj[v])
      if (a.to >= s)
        radj[a.to].push_back(v);
  q = {s};
  bwd[s] = true;
  while (!q.empty()) {
    auto v = q.front();
    q.pop_front();
    for (auto u : radj[v])
      if (!bwd[u]) {
        bwd[u] = true;
        q.push_back(u);
      }
  }
  std::vector<bool> out(n, false);
  for (std::size_t v = s; v < n; ++v)
    out[v] = fwd[v] && bwd[v];
  return out;
}

std::size_t largest_component(const Adjacency& adj) {
  std::size_t best = 0;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    const auto comp = component_from(adj, s);
    best = std::max(best, static_cast<std::size_t>(std::count(comp.begin(), comp.end(), true)));
  }
  return best;
}

// Backtracking search for elementary cycles through `s` (the smallest node of
// each cycle). `visit` returns false to stop the search; so does running out
// of `budget` edge expansions, when given.
template <class Visit>
bool cycles_through(const Adjacency& adj, std::size_t s, const std::vector<bool>& allowed,
                    std::size_t max_len, Visit&& visit, std::size_t* budget = nullptr) {
  std::vector<std::size_t> path{s};
  std::vector<int> signs;
  std::vector<bool> on_path(adj.size(), false);
  on_path[s] = true;
  std::vector<std::size_t> next{0};
  while (!path.empty()) {
    const std::size_t v = path.back();
    std::size_t& i = next.back();
    if (i == adj[v].size()) {
      on_path[v] = false;
      path.pop_back();
      next.pop_back();
      if (!signs.empty())
        signs.pop_back();
      continue;
    }
    const Arc a = adj[v][i++];
    if (budget && (*budget)-- == 0)
      return false;
    if (a.to == s) {
      signs.push_back(a.sign);
      const bool go_on = visit(path, signs);
      signs.pop_back();
      if (!go_on)
        return false;
      continue;
    }
    if (!allowed[a.to] || on_path[a.to] || path.size() >= max_len)
      continue;
    path.push_back(a.to);
    signs.push_back(a.sign);
    on_path[a.to] = true;
    next.push_back(0);
  }
  return true;
}

// Searches for any elementary cycle longer than max_len. Gives up after a
// fixed amount of work and answers true.
bool longer_cycle_exists(const Adjacency& adj, std::size_t max_len) {
  std::size_t budget = 5'000'000;
  bool found = false;
  for (std::size_t s = 0; s < adj.size() && !found; ++s) {
    const auto comp = component_from(adj, s);
    if (static_cast<std::size_t>(std::count(comp.begin(), comp.end(), true)) <= max_len)
      continue;
    cycles_through(
        adj, s, comp, adj.size(),
        [&](const std::vector<std::size_t>& path, const std::vector<int>&) {
          found = path.size() > max_len;
          return !found;
        },
        &budget);
    if (budget == 0 || budget == static_cast<std::size_t>(-1))
      return true;
  }
  return found;
}

} // namespace

LoopReport enumerate_cycles(const SignedDigraph& g, std::size_t max_len) {
  if (max_len == 0)
    throw ConfigError("max_len must be >= 1");
  const auto& names = g.nodes();
  const Adjacency adj = adjacency(g);
  LoopReport report;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    const auto comp = component_from(adj, s);
    cycles_through(adj, s, comp, max_len,
                   [&](const std::vector<std::size_t>& path, const std::vector<int>& signs) {
                     Cycle c;
                     for (auto v : path)
                       c.nodes.push_back(names[v]);
                     c.signs = signs;
                     const Polarity p = classify(c);
                     report.loops.push_back({std::move(c), p});
                     return true;
                   });
  }
  std::sort(report.loops.begin(), report.loops.end(),
            [](const Loop& a, const Loop& b) { return a.cycle.nodes < b.cycle.nodes; });
  report.truncated = largest_component(adj) > max_len && longer_cycle_exists(adj, max_len);
  return report;
}

bool contains_in_cyclic_order(const Cycle& cycle, std::span<const std::string> witness) {
  const std::size_t n = cycle.nodes.size();
  if (witness.empty())
    return true;
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < n && k < witness.size(); ++i)
      if (cycle.nodes[(r + i) % n] == witness[k])
        ++k;
    if (k == witness.size())
      return true;
  }
  return false;
}

bool MatchReport::all_found() const noexcept {
  return std::all_of(matches.begin(), matches.end(),
                     [](const LoopMatch& m) { return m.status == MatchStatus::found; });
}

MatchReport match_named_loops(const LoopReport& report, std::span<const NamedLoop> expected) {
  MatchReport out;
  for (const auto& named : expected) {
    LoopMatch m{named.label, named.expected, MatchStatus::missing, std::nullopt};
    // Shortest carrier wins; ties go to enumeration order.
    auto shorter = [&](std::size_t i) {
      return !m.loop || report.loops[i].cycle.nodes.size() < report.loops[*m.loop].cycle.nodes.size();
    };
    for (std::size_t i = 0; i < report.loops.size(); ++i) {
      const auto& loop = report.loops[i];
      if (!contains_in_cyclic_order(loop.cycle, named.witness))
        continue;
      if (loop.polarity == named.expected) {
        if (m.status != MatchStatus::found || shorter(i)) {
          m.status = MatchStatus::found;
          m.loop = i;
        }
      } else if (m.status == MatchStatus::missing || (m.status == MatchStatus::polarity_mismatch && shorter(i))) {
        m.status = MatchStatus::polarity_mismatch;
        m.loop = i;
      }
    }
    out.matches.push_back(std::move(m));
  }
  return out;
}

} // namespace dynex
