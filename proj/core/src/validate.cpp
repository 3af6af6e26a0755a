#include "dynex/validate.hpp"

#include "overloaded.hpp"
#include "program.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <sstream>

namespace dynex {

using detail::Overloaded;

bool ValidationReport::ok() const noexcept { return error_count() == 0; }

std::size_t ValidationReport::error_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(), [](const Finding& f) {
    return f.severity == Severity::error;
  }));
}

std::vector<Finding> ValidationReport::errors() const {
  std::vector<Finding> out;
  std::copy_if(findings.begin(), findings.end(), std::back_inserter(out),
               [](const Finding& f) { return f.severity == Severity::error; });
  return out;
}

namespace {

std::string join_errors(const ValidationReport& report) {
  std::string msg = "model has validation errors";
  for (const auto& f : report.errors())
    msg += "\n  " + f.location + ": " + f.message;
  return msg;
}

// For each aux (by declaration index), the auxes its expression reads.
std::vector<std::vector<std::size_t>> aux_dependencies(const ModelSpec& spec) {
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < spec.auxes.size(); ++i)
    index.emplace(spec.auxes[i].id, i);
  std::vector<std::vector<std::size_t>> deps(spec.auxes.size());
  for (std::size_t i = 0; i < spec.auxes.size(); ++i) {
    for (const auto& r : references(spec.auxes[i].expr)) {
      auto it = index.find(r);
      if (it != index.end() && std::find(deps[i].begin(), deps[i].end(), it->second) == deps[i].end())
        deps[i].push_back(it->second);
    }
  }
  return deps;
}

// One description per strongly connected group of auxes that forms an
// algebraic loop, e.g. "a→b→a". Groups are reported by their first declared
// member; the path is the shortest cycle through it.
std::vector<std::string> algebraic_cycles(const ModelSpec& spec) {
  const auto deps = aux_dependencies(spec);
  const std::size_t n = deps.size();

  // Tarjan's SCC, iterative.
  std::vector<int> idx(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  int counter = 0, ncomp = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (idx[root] >= 0)
      continue;
    std::vector<std::pair<std::size_t, std::size_t>> work{{root, 0}};
    idx[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!work.empty()) {
      auto& [v, next] = work.back();
      if (next < deps[v].size()) {
        const std::size_t w = deps[v][next++];
        if (idx[w] < 0) {
          idx[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          work.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], idx[w]);
        }
        continue;
      }
      if (low[v] == idx[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = ncomp;
        } while (w != v);
        ++ncomp;
      }
      const std::size_t done = v;
      work.pop_back();
      if (!work.empty())
        low[work.back().first] = std::min(low[work.back().first], low[done]);
    }
  }

  std::vector<std::string> out;
  std::vector<bool> reported(static_cast<std::size_t>(ncomp), false);
  for (std::size_t s = 0; s < n; ++s) {
    const auto c = static_cast<std::size_t>(comp[s]);
    if (reported[c])
      continue;
    const bool self = std::find(deps[s].begin(), deps[s].end(), s) != deps[s].end();
    const auto size = std::count(comp.begin(), comp.end(), comp[s]);
    if (size < 2 && !self)
      continue;
    reported[c] = true;
    // BFS from s back to s inside the component.
    std::vector<std::ptrdiff_t> parent(n, -1);
    std::deque<std::size_t> queue{s};
    std::optional<std::size_t> closing;
    std::vector<bool> seen(n, false);
    while (!queue.empty() && !closing) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t w : deps[v]) {
        if (comp[w] != comp[s])
          continue;
        if (w == s) {
          closing = v;
          break;
        }
        if (!seen[w]) {
          seen[w] = true;
          parent[w] = static_cast<std::ptrdiff_t>(v);
          queue.push_back(w);
        }
      }
    }
    std::vector<std::size_t> path;
    for (std::size_t v = *closing; v != s; v = static_cast<std::size_t>(parent[v]))
      path.push_back(v);
    std::reverse(path.begin(), path.end());
    std::string text = spec.auxes[s].id;
    for (std::size_t v : path)
      text += "→" + spec.auxes[v].id;
    text += "→" + spec.auxes[s].id;
    out.push_back(std::move(text));
  }
  return out;
}

using Unit = std::optional<std::string>; // nullopt: matches anything

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

Unit unit_tag(std::string_view text) {
  std::string t = trim(text);
  if (t.empty() || t == "1")
    return std::nullopt;
  return t;
}

class Checker {
public:
  Checker(const ModelSpec& spec, ValidationReport& report) : spec_(spec), report_(report) {
    for (const auto& p : spec.params)
      units_.emplace(p.id, unit_tag(p.unit));
    for (const auto& s : spec.stocks)
      units_.emplace(s.id, unit_tag(s.unit));
    for (const auto& a : spec.auxes)
      units_.emplace(a.id, unit_tag(a.unit));
    for (const auto& l : spec.lookups)
      curves_.insert(l.id);
  }

  // Reference, arity and LOOKUP checks. Undeclared names are reported once
  // per declaration.
  void structure(const Expr& e, const std::string& where, bool initial) {
    std::set<std::string> undeclared;
    walk(e, where, initial, undeclared);
  }

  Unit units(const Expr& e, const std::string& where) {
    return std::visit(
        Overloaded{
            [](const Constant&) -> Unit { return std::nullopt; },
            [&](const VarRef& r) -> Unit {
              auto it = units_.find(r.name);
              return it == units_.end() ? std::nullopt : it->second;
            },
            [&](const Negate& n) -> Unit { return units(n.arg, where); },
            [&](const Binary& b) -> Unit {
              Unit l = units(b.lhs, where);
              Unit r = units(b.rhs, where);
              switch (b.op) {
              case BinaryOp::add:
              case BinaryOp::sub:
                return additive(l, r, b.op == BinaryOp::add ? "+" : "-", where);
              case BinaryOp::mul:
                if (!l)
                  return r;
                if (!r)
                  return l;
                return std::nullopt;
              case BinaryOp::div:
                return r ? std::nullopt : l;
              case BinaryOp::pow:
                return std::nullopt;
              }
              return std::nullopt;
            },
            [&](const Call& c) -> Unit {
              std::vector<Unit> args;
              for (std::size_t i = (c.fn == Builtin::lookup ? 1 : 0); i < c.args.size(); ++i)
                args.push_back(c.args[i].empty() ? std::nullopt : units(c.args[i], where));
              switch (c.fn) {
              case Builtin::smooth:
              case Builtin::delay1:
              case Builtin::delay3:
              case Builtin::step:
                return args.empty() ? std::nullopt : args[0];
              default:
                return std::nullopt;
              }
            },
        },
        e.node().value);
  }

  Unit additive(const Unit& l, const Unit& r, std::string_view op, const std::string& where) {
    if (l && r && *l != *r) {
      error(where, "unit mismatch: '" + *l + "' " + std::string(op) + " '" + *r + "'");
      return l;
    }
    return l ? l : r;
  }

  void error(const std::string& where, std::string message) {
    report_.findings.push_back({Severity::error, where, std::move(message)});
  }

private:
  void walk(const Expr& e, const std::string& where, bool initial, std::set<std::string>& undeclared) {
    std::visit(Overloaded{
                   [](const Constant&) {},
                   [&](const VarRef& r) {
                     const auto kind = spec_.kind_of(r.name);
                     if (!kind) {
                       if (undeclared.insert(r.name).second)
                         error(where, "undeclared reference " + r.name);
                     } else if (initial && *kind != VariableKind::param) {
                       error(where, "initial expression references non-parameter " + r.name);
                     }
                   },
                   [&](const Negate& n) { walk(n.arg, where, initial, undeclared); },
                   [&](const Binary& b) {
                     walk(b.lhs, where, initial, undeclared);
                     walk(b.rhs, where, initial, undeclared);
                   },
                   [&](const Call& c) {
                     const std::string name(builtin_name(c.fn));
                     if (c.args.size() != builtin_arity(c.fn)) {
                       error(where, name + " expects " + std::to_string(builtin_arity(c.fn)) +
                                        " arguments, got " + std::to_string(c.args.size()));
                     }
                     if (initial && is_stateful(c.fn))
                       error(where, name + " is not allowed in an initial expression");
                     std::size_t first = 0;
                     if (c.fn == Builtin::lookup && !c.args.empty()) {
                       first = 1;
                       const auto* id = c.args[0].empty() ? nullptr
                                                          : std::get_if<VarRef>(&c.args[0].node().value);
                       if (!id)
                         error(where, "LOOKUP expects a curve id as its first argument");
                       else if (!curves_.count(id->name))
                         error(where, "unknown lookup curve " + id->name);
                     }
                     for (std::size_t i = first; i < c.args.size(); ++i) {
                       if (c.args[i].empty())
                         error(where, name + " has an empty argument");
                       else
                         walk(c.args[i], where, initial, undeclared);
                     }
                   },
               },
               e.node().value);
  }

  const ModelSpec& spec_;
  ValidationReport& report_;
  std::map<std::string, Unit, std::less<>> units_;
  std::set<std::string, std::less<>> curves_;
};

std::string format_value(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void numeric_checks(const ModelSpec& spec, ValidationReport& report) {
  try {
    detail::Program program(spec);
    auto ws = program.make_workspace();
    std::vector<double> y(program.state_size(), 0.0);
    program.initial_stocks(ws, 0.0, y.data());
    for (std::size_t i = 0; i < spec.stocks.size(); ++i)
      if (!std::isfinite(y[i]))
        report.findings.push_back(
            {Severity::error, spec.stocks[i].id, "initial value is not finite"});
    program.evaluate(ws, 0.0, y.data(), detail::DelayMode::initialize);
    for (std::size_t i = 0; i < spec.stocks.size(); ++i) {
      if (!std::isfinite(ws.inflow[i]))
        report.findings.push_back(
            {Severity::error, spec.stocks[i].id, "inflow is not finite at the initial point"});
      if (!std::isfinite(ws.outflow[i]))
        report.findings.push_back(
            {Severity::error, spec.stocks[i].id, "outflow is not finite at the initial point"});
    }
    for (std::size_t i = 0; i < spec.auxes.size(); ++i)
      if (!std::isfinite(ws.values[program.aux_slot(i)]))
        report.findings.push_back(
            {Severity::warning, spec.auxes[i].id, "value is not finite at the initial point"});
  } catch (const Error& e) {
    report.findings.push_back({Severity::error, "model", e.what()});
  }
}

} // namespace

ValidationReport validate_model(const ModelSpec& spec) {
  ValidationReport report;
  auto error = [&](const std::string& where, std::string message) {
    report.findings.push_back({Severity::error, where, std::move(message)});
  };

  if (!is_valid_identifier(spec.name))
    error("model", "invalid model name '" + spec.name + "'");

  std::set<std::string, std::less<>> seen;
  auto declare = [&](const std::string& id) {
    if (!is_valid_identifier(id))
      error(id, "invalid identifier '" + id + "'");
    if (!seen.insert(id).second)
      error(id, "duplicate id " + id);
  };
  for (const auto& p : spec.params)
    declare(p.id);
  for (const auto& l : spec.lookups)
    declare(l.id);
  for (const auto& s : spec.stocks)
    declare(s.id);
  for (const auto& a : spec.auxes)
    declare(a.id);

  for (const auto& p : spec.params) {
    if (!std::isfinite(p.value))
      error(p.id, "parameter value is not finite");
    else if (p.value < p.lower || p.value > p.upper)
      error(p.id, "value " + format_value(p.value) + " outside [" + format_value(p.lower) + ", " +
                      format_value(p.upper) + "]");
  }
  for (const auto& l : spec.lookups) {
    try {
      resolve_curve(l.source);
    } catch (const Error& e) {
      error(l.id, std::string("invalid curve: ") + e.what());
    }
  }

  Checker checker(spec, report);
  for (const auto& s : spec.stocks) {
    if (s.initial.empty())
      error(s.id, "stock " + s.id + " has no initial expression");
    else
      checker.structure(s.initial, s.id, true);
    if (s.inflow.empty())
      error(s.id, "stock " + s.id + " has no inflow expression");
    else
      checker.structure(s.inflow, s.id, false);
    if (s.outflow.empty())
      error(s.id, "stock " + s.id + " has no outflow expression");
    else
      checker.structure(s.outflow, s.id, false);
  }
  for (const auto& a : spec.auxes) {
    if (a.expr.empty())
      error(a.id, "auxiliary " + a.id + " has no expression");
    else
      checker.structure(a.expr, a.id, false);
  }

  for (const auto& cycle : algebraic_cycles(spec))
    error(cycle.substr(0, cycle.find("→")), "algebraic cycle " + cycle);

  for (const auto& s : spec.stocks) {
    Unit in, out;
    if (!s.initial.empty())
      checker.units(s.initial, s.id);
    if (!s.inflow.empty())
      in = checker.units(s.inflow, s.id);
    if (!s.outflow.empty())
      out = checker.units(s.outflow, s.id);
    checker.additive(in, out, "-", s.id);
  }
  for (const auto& a : spec.auxes)
    if (!a.expr.empty())
      checker.units(a.expr, a.id);

  // Unused declarations are worth a warning, never an error.
  std::set<std::string, std::less<>> used, curves_used;
  auto note = [&](const Expr& e) {
    if (e.empty())
      return;
    for (auto& r : references(e))
      used.insert(r);
    for (auto& c : lookups_used(e))
      curves_used.insert(c);
  };
  for (const auto& s : spec.stocks) {
    note(s.initial);
    note(s.inflow);
    note(s.outflow);
  }
  for (const auto& a : spec.auxes)
    note(a.expr);
  for (const auto& p : spec.params)
    if (!used.count(p.id))
      report.findings.push_back({Severity::warning, p.id, "parameter " + p.id + " is never referenced"});
  for (const auto& l : spec.lookups)
    if (!curves_used.count(l.id))
      report.findings.push_back({Severity::warning, l.id, "lookup " + l.id + " is never used"});

  if (report.ok())
    numeric_checks(spec, report);
  return report;
}

std::vector<std::string> evaluation_order(const ModelSpec& spec) {
  const auto deps = aux_dependencies(spec);
  const std::size_t n = deps.size();
  std::vector<std::size_t> pending(n, 0);
  std::vector<std::vector<std::size_t>> users(n);
  for (std::size_t i = 0; i < n; ++i) {
    pending[i] = deps[i].size();
    for (std::size_t d : deps[i])
      users[d].push_back(i);
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (pending[i] == 0)
      ready.push(i);
  std::vector<std::string> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t i = ready.top();
    ready.pop();
    order.push_back(spec.auxes[i].id);
    for (std::size_t u : users[i])
      if (--pending[u] == 0)
        ready.push(u);
  }
  if (order.size() != n) {
    const auto cycles = algebraic_cycles(spec);
    throw CycleError("algebraic cycle " + (cycles.empty() ? std::string("among auxiliaries") : cycles.front()));
  }
  return order;
}

ValidationErrors::ValidationErrors(ValidationReport report)
    : Error(join_errors(report)), report_(std::move(report)) {}

void require_valid(const ModelSpec& spec) {
  auto report = validate_model(spec);
  if (!report.ok())
    throw ValidationErrors(std::move(report));
}

} // namespace dynex
