#include "dynex/dsl.hpp"

#include "overloaded.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <system_error>

namespace dynex {

using detail::Overloaded;

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 6);
  if (std::isfinite(v)) {
    double back = 0.0;
    const auto p = std::from_chars(buf.data(), r.ptr, back);
    if (p.ec != std::errc() || back != v)
      r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  }
  return std::string(buf.data(), r.ptr);
}

namespace {

// Binding strength, loosest first.
enum Level { kAdditive = 1, kMultiplicative = 2, kUnary = 3, kPower = 4, kAtom = 5 };

int level(const Expr& e) {
  return std::visit(Overloaded{
                        [](const Constant& c) { return std::signbit(c.value) ? int(kUnary) : int(kAtom); },
                        [](const VarRef&) { return int(kAtom); },
                        [](const Negate&) { return int(kUnary); },
                        [](const Binary& b) {
                          switch (b.op) {
                          case BinaryOp::add:
                          case BinaryOp::sub:
                            return int(kAdditive);
                          case BinaryOp::mul:
                          case BinaryOp::div:
                            return int(kMultiplicative);
                          case BinaryOp::pow:
                            return int(kPower);
                          }
                          return int(kAtom);
                        },
                        [](const Call&) { return int(kAtom); },
                    },
                    e.node().value);
}

void write(const Expr& e, std::string& out);

void write_wrapped(const Expr& e, bool parens, std::string& out) {
  if (parens)
    out += '(';
  write(e, out);
  if (parens)
    out += ')';
}

void write(const Expr& e, std::string& out) {
  std::visit(Overloaded{
                 [&](const Constant& c) {
                   // Negative literals only come from code; keep them atomic.
                   if (std::signbit(c.value))
                     out += "(" + format_number(c.value) + ")";
                   else
                     out += format_number(c.value);
                 },
                 [&](const VarRef& r) { out += r.name; },
                 [&](const Negate& n) {
                   out += '-';
                   write_wrapped(n.arg, level(n.arg) < kUnary, out);
                 },
                 [&](const Binary& b) {
                   const int me = level(e);
                   static constexpr std::string_view sym[] = {" + ", " - ", " * ", " / ", " ^ "};
                   if (b.op == BinaryOp::pow) {
                     write_wrapped(b.lhs, level(b.lhs) <= kPower, out);
                     out += sym[static_cast<std::size_t>(b.op)];
                     write_wrapped(b.rhs, level(b.rhs) < kUnary, out);
                     return;
                   }
                   write_wrapped(b.lhs, level(b.lhs) < me, out);
                   out += sym[static_cast<std::size_t>(b.op)];
                   write_wrapped(b.rhs, level(b.rhs) <= me, out);
                 },
                 [&](const Call& c) {
                   out += builtin_name(c.fn);
                   out += '(';
                   for (std::size_t i = 0; i < c.args.size(); ++i) {
                     if (i)
                       out += ", ";
                     write(c.args[i], out);
                   }
                   out += ')';
                 },
             },
             e.node().value);
}

void write_unit(const std::string& unit, std::string& out) {
  if (!unit.empty())
    out += " [" + unit + "]";
}

} // namespace

std::string format_expr(const Expr& e) {
  std::string out;
  if (!e.empty())
    write(e, out);
  return out;
}

std::string serialize_model(const ModelSpec& spec) {
  std::string out = "model " + spec.name + "\n";
  if (!spec.params.empty())
    out += '\n';
  for (const auto& p : spec.params) {
    out += "param " + p.id + " = " + format_number(p.value);
    write_unit(p.unit, out);
    out += '\n';
  }
  if (!spec.lookups.empty())
    out += '\n';
  for (const auto& l : spec.lookups) {
    out += "lookup " + l.id + " = ";
    std::visit(Overloaded{
                   [&](const AnchoredCurve& c) {
                     out += c.kind == CurveKind::lognormal ? "lognormal" : "normal";
                     out += "(median=" + format_number(c.median) + ", ratio90=" + format_number(c.ratio90) + ")";
                   },
                   [&](const PointTable& t) {
                     out += "points(";
                     for (std::size_t i = 0; i < t.points.size(); ++i) {
                       if (i)
                         out += ", ";
                       out += "(" + format_number(t.points[i].ratio) + ", " +
                              format_number(t.points[i].fraction) + ")";
                     }
                     out += ")";
                   },
               },
               l.source);
    out += '\n';
  }
  if (!spec.stocks.empty())
    out += '\n';
  for (const auto& s : spec.stocks) {
    out += "stock " + s.id + " = " + format_expr(s.initial);
    write_unit(s.unit, out);
    out += " { inflow: " + format_expr(s.inflow) + " outflow: " + format_expr(s.outflow) + " }\n";
  }
  if (!spec.auxes.empty())
    out += '\n';
  for (const auto& a : spec.auxes) {
    out += "aux " + a.id + " = " + format_expr(a.expr);
    write_unit(a.unit, out);
    out += '\n';
  }
  return out;
}

} // namespace dynex
