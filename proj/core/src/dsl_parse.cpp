#include "dynex/dsl.hpp"

#include "dynex/validate.hpp"
#include "lexer.hpp"

#include <algorithm>

namespace dynex {

ParseError::ParseError(SourceSpan span, std::string message, std::vector<std::string> expected)
    : Error([&] {
        std::string w = std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + message;
        if (!expected.empty()) {
          w += " (expected ";
          for (std::size_t i = 0; i < expected.size(); ++i)
            w += (i ? ", " : "") + expected[i];
          w += ")";
        }
        return w;
      }()),
      span_(span), message_(std::move(message)), expected_(std::move(expected)) {}

namespace {

using detail::Lexer;
using detail::Token;
using detail::TokenKind;

class Parser {
public:
  explicit Parser(std::string_view text) : lex_(text) { tok_ = lex_.next(); }

  ModelSpec model() {
    ModelSpec spec;
    keyword("model");
    spec.name = ident("model name");
    while (tok_.kind != TokenKind::end) {
      if (tok_.kind != TokenKind::ident)
        fail("expected a declaration", {"param", "lookup", "stock", "aux"});
      if (tok_.text == "param")
        spec.params.push_back(param());
      else if (tok_.text == "lookup")
        spec.lookups.push_back(lookup());
      else if (tok_.text == "stock")
        spec.stocks.push_back(stock());
      else if (tok_.text == "aux")
        spec.auxes.push_back(aux());
      else
        fail("unknown declaration '" + tok_.text + "'", {"param", "lookup", "stock", "aux"});
    }
    return spec;
  }

  Expr expression_only() {
    Expr e = expr();
    if (tok_.kind != TokenKind::end)
      fail("unexpected " + describe(tok_) + " after expression", {"end of input"});
    return e;
  }

private:
  [[noreturn]] void fail(std::string message, std::vector<std::string> expected = {}) {
    throw ParseError(tok_.span, std::move(message), std::move(expected));
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
    case TokenKind::end:
      return "end of input";
    case TokenKind::unit:
      return "unit [" + t.text + "]";
    default:
      return "'" + t.text + "'";
    }
  }

  [[noreturn]] void unexpected(std::vector<std::string> expected) {
    fail("unexpected " + describe(tok_), std::move(expected));
  }

  void advance() { tok_ = lex_.next(); }

  bool is_punct(char c) const { return tok_.kind == TokenKind::punct && tok_.text[0] == c; }

  void punct(char c) {
    if (!is_punct(c))
      unexpected({std::string("'") + c + "'"});
    advance();
  }

  void keyword(std::string_view word) {
    if (tok_.kind != TokenKind::ident || tok_.text != word)
      unexpected({std::string("'") + std::string(word) + "'"});
    advance();
  }

  std::string ident(const char* what) {
    if (tok_.kind != TokenKind::ident)
      unexpected({what});
    std::string s = tok_.text;
    advance();
    return s;
  }

  double number(bool allow_sign) {
    bool negative = false;
    if (allow_sign && is_punct('-')) {
      negative = true;
      advance();
    }
    if (tok_.kind != TokenKind::number)
      unexpected({"number"});
    const double v = tok_.value;
    advance();
    return negative ? -v : v;
  }

  std::string optional_unit() {
    if (tok_.kind != TokenKind::unit)
      return {};
    std::string u = tok_.text;
    advance();
    return u;
  }

  ParamDef param() {
    advance();
    ParamDef p;
    p.id = ident("parameter name");
    punct('=');
    p.value = number(true);
    p.unit = optional_unit();
    return p;
  }

  LookupDef lookup() {
    advance();
    LookupDef l;
    l.id = ident("curve name");
    punct('=');
    if (tok_.kind != TokenKind::ident)
      unexpected({"normal", "lognormal", "points"});
    const std::string kind = tok_.text;
    if (kind == "normal" || kind == "lognormal") {
      advance();
      AnchoredCurve c;
      c.kind = kind == "normal" ? CurveKind::normal : CurveKind::lognormal;
      punct('(');
      keyword("median");
      punct('=');
      c.median = number(false);
      punct(',');
      keyword("ratio90");
      punct('=');
      c.ratio90 = number(false);
      punct(')');
      l.source = c;
    } else if (kind == "points") {
      advance();
      PointTable t;
      punct('(');
      do {
        if (!t.points.empty())
          advance();
        punct('(');
        CurvePoint p;
        p.ratio = number(true);
        punct(',');
        p.fraction = number(true);
        punct(')');
        t.points.push_back(p);
      } while (is_punct(','));
      punct(')');
      l.source = std::move(t);
    } else {
      unexpected({"normal", "lognormal", "points"});
    }
    return l;
  }

  StockDef stock() {
    advance();
    StockDef s;
    s.id = ident("stock name");
    punct('=');
    s.initial = expr();
    s.unit = optional_unit();
    punct('{');
    keyword("inflow");
    punct(':');
    s.inflow = expr();
    keyword("outflow");
    punct(':');
    s.outflow = expr();
    punct('}');
    return s;
  }

  AuxDef aux() {
    advance();
    AuxDef a;
    a.id = ident("auxiliary name");
    punct('=');
    a.expr = expr();
    a.unit = optional_unit();
    return a;
  }

  Expr expr() {
    Expr lhs = term();
    while (is_punct('+') || is_punct('-')) {
      const BinaryOp op = tok_.text[0] == '+' ? BinaryOp::add : BinaryOp::sub;
      advance();
      lhs = Expr::binary(op, std::move(lhs), term());
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    while (is_punct('*') || is_punct('/')) {
      const BinaryOp op = tok_.text[0] == '*' ? BinaryOp::mul : BinaryOp::div;
      advance();
      lhs = Expr::binary(op, std::move(lhs), unary());
    }
    return lhs;
  }

  Expr unary() {
    if (is_punct('-')) {
      advance();
      return Expr::negate(unary());
    }
    return power();
  }

  // '^' binds tighter than unary minus and associates to the right; its
  // right operand may itself be negated.
  Expr power() {
    Expr base = primary();
    if (is_punct('^')) {
      advance();
      return Expr::binary(BinaryOp::pow, std::move(base), unary());
    }
    return base;
  }

  Expr primary() {
    switch (tok_.kind) {
    case TokenKind::number: {
      const double v = tok_.value;
      advance();
      return Expr::constant(v);
    }
    case TokenKind::ident: {
      std::string name = tok_.text;
      advance();
      return Expr::ref(std::move(name));
    }
    case TokenKind::call: {
      const auto fn = builtin_from_name(tok_.text);
      if (!fn)
        fail("unknown function '" + tok_.text + "'");
      advance();
      punct('(');
      std::vector<Expr> args;
      if (!is_punct(')')) {
        args.push_back(expr());
        while (is_punct(',')) {
          advance();
          args.push_back(expr());
        }
      }
      punct(')');
      return Expr::call(*fn, std::move(args));
    }
    case TokenKind::punct:
      if (is_punct('(')) {
        advance();
        Expr inner = expr();
        punct(')');
        return inner;
      }
      break;
    default:
      break;
    }
    unexpected({"expression"});
  }

  Lexer lex_;
  Token tok_;
};

} // namespace

ModelSpec parse_model_unchecked(std::string_view text) { return Parser(text).model(); }

ModelSpec parse_model(std::string_view text) {
  ModelSpec spec = parse_model_unchecked(text);
  require_valid(spec);
  return spec;
}

Expr parse_expression(std::string_view text) { return Parser(text).expression_only(); }

} // namespace dynex
