#include "dynex/expr.hpp"

#include "overloaded.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace dynex {

namespace {

struct BuiltinInfo {
  Builtin fn;
  std::string_view name;
  std::size_t arity;
};

constexpr std::array<BuiltinInfo, 10> kBuiltins{{
    {Builtin::min, "MIN", 2},
    {Builtin::max, "MAX", 2},
    {Builtin::clip, "CLIP", 3},
    {Builtin::step, "STEP", 2},
    {Builtin::pulse, "PULSE", 2},
    {Builtin::smooth, "SMOOTH", 2},
    {Builtin::delay1, "DELAY1", 2},
    {Builtin::delay3, "DELAY3", 2},
    {Builtin::lookup, "LOOKUP", 2},
    {Builtin::time, "TIME", 0},
}};

const BuiltinInfo& info(Builtin fn) {
  return kBuiltins[static_cast<std::size_t>(fn)];
}

using detail::Overloaded;

void collect(const Expr& e, std::vector<std::string>& vars, std::vector<std::string>& curves) {
  if (e.empty())
    return;
  auto add_unique = [](std::vector<std::string>& out, const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end())
      out.push_back(name);
  };
  std::visit(Overloaded{
                 [](const Constant&) {},
                 [&](const VarRef& r) { add_unique(vars, r.name); },
                 [&](const Negate& n) { collect(n.arg, vars, curves); },
                 [&](const Binary& b) {
                   collect(b.lhs, vars, curves);
                   collect(b.rhs, vars, curves);
                 },
                 [&](const Call& c) {
                   std::size_t first = 0;
                   if (c.fn == Builtin::lookup && !c.args.empty() && !c.args[0].empty()) {
                     if (auto* id = std::get_if<VarRef>(&c.args[0].node().value)) {
                       add_unique(curves, id->name);
                       first = 1;
                     }
                   }
                   for (std::size_t i = first; i < c.args.size(); ++i)
                     collect(c.args[i], vars, curves);
                 },
             },
             e.node().value);
}

} // namespace

std::string_view builtin_name(Builtin fn) noexcept { return info(fn).name; }

std::optional<Builtin> builtin_from_name(std::string_view name) noexcept {
  for (const auto& b : kBuiltins)
    if (b.name == name)
      return b.fn;
  return std::nullopt;
}

std::size_t builtin_arity(Builtin fn) noexcept { return info(fn).arity; }

bool is_stateful(Builtin fn) noexcept {
  return fn == Builtin::smooth || fn == Builtin::delay1 || fn == Builtin::delay3;
}

Expr Expr::constant(double value) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{Constant{value}}));
}

Expr Expr::ref(std::string name) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{VarRef{std::move(name)}}));
}

Expr Expr::negate(Expr arg) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{Negate{std::move(arg)}}));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{Binary{op, std::move(lhs), std::move(rhs)}}));
}

Expr Expr::call(Builtin fn, std::vector<Expr> args) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{Call{fn, std::move(args)}}));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_)
    return true;
  if (a.empty() || b.empty())
    return false;
  const auto& va = a.node().value;
  const auto& vb = b.node().value;
  if (va.index() != vb.index())
    return false;
  return std::visit(Overloaded{
                        [&](const Constant& x) { return x.value == std::get<Constant>(vb).value; },
                        [&](const VarRef& x) { return x.name == std::get<VarRef>(vb).name; },
                        [&](const Negate& x) { return x.arg == std::get<Negate>(vb).arg; },
                        [&](const Binary& x) {
                          const auto& y = std::get<Binary>(vb);
                          return x.op == y.op && x.lhs == y.lhs && x.rhs == y.rhs;
                        },
                        [&](const Call& x) {
                          const auto& y = std::get<Call>(vb);
                          return x.fn == y.fn && x.args == y.args;
                        },
                    },
                    va);
}

Expr operator+(Expr a, Expr b) { return Expr::binary(BinaryOp::add, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::binary(BinaryOp::sub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::binary(BinaryOp::mul, std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return Expr::binary(BinaryOp::div, std::move(a), std::move(b)); }
Expr operator-(Expr a) { return Expr::negate(std::move(a)); }
Expr pow(Expr base, Expr exponent) {
  return Expr::binary(BinaryOp::pow, std::move(base), std::move(exponent));
}

std::vector<std::string> references(const Expr& e) {
  std::vector<std::string> vars, curves;
  collect(e, vars, curves);
  return vars;
}

std::vector<std::string> lookups_used(const Expr& e) {
  std::vector<std::string> vars, curves;
  collect(e, vars, curves);
  return curves;
}

} // namespace dynex
