#include "dynex/dsl.hpp"
#include "dynex/scenario.hpp"

#include "lexer.hpp"

#include <charconv>

namespace dynex {

namespace {

using detail::Lexer;
using detail::Token;
using detail::TokenKind;

// Tokens of one line, consumed front to back.
class LineReader {
public:
  LineReader(std::string_view line, std::size_t number) : lex_(line, number) { tok_ = lex_.next(); }

  bool done() const { return tok_.kind == TokenKind::end; }
  const Token& peek() const { return tok_; }

  [[noreturn]] void fail(std::string message, std::vector<std::string> expected = {}) const {
    throw ParseError(tok_.span, std::move(message), std::move(expected));
  }

  std::string word(const char* what) {
    if (tok_.kind != TokenKind::ident)
      fail("unexpected " + describe(), {what});
    std::string w = tok_.text;
    tok_ = lex_.next();
    return w;
  }

  bool accept_word(std::string_view w) {
    if (tok_.kind == TokenKind::ident && tok_.text == w) {
      tok_ = lex_.next();
      return true;
    }
    return false;
  }

  void expect_word(std::string_view w) {
    if (!accept_word(w))
      fail("unexpected " + describe(), {"'" + std::string(w) + "'"});
  }

  bool accept_punct(char c) {
    if (tok_.kind == TokenKind::punct && tok_.text[0] == c) {
      tok_ = lex_.next();
      return true;
    }
    return false;
  }

  void expect_punct(char c) {
    if (!accept_punct(c))
      fail("unexpected " + describe(), {std::string("'") + c + "'"});
  }

  double number() {
    const bool negative = accept_punct('-');
    if (tok_.kind != TokenKind::number)
      fail("unexpected " + describe(), {"number"});
    const double v = tok_.value;
    tok_ = lex_.next();
    return negative ? -v : v;
  }

  std::uint64_t integer() {
    if (tok_.kind != TokenKind::number)
      fail("unexpected " + describe(), {"integer"});
    std::uint64_t v = 0;
    const auto& t = tok_.text;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size())
      fail("expected a non-negative integer, got '" + t + "'", {"integer"});
    tok_ = lex_.next();
    return v;
  }

  void end() {
    if (!done())
      fail("unexpected " + describe(), {"end of line"});
  }

private:
  std::string describe() const {
    if (tok_.kind == TokenKind::end)
      return "end of line";
    return "'" + tok_.text + "'";
  }

  Lexer lex_;
  Token tok_;
};

template <class F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t number = 1;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    LineReader r(line, number);
    if (!r.done())
      f(r);
    if (nl == std::string_view::npos)
      break;
    text.remove_prefix(nl + 1);
    ++number;
  }
}

} // namespace

std::vector<NamedPolicy> parse_scenarios(std::string_view text) {
  std::vector<NamedPolicy> out;
  for_each_line(text, [&](LineReader& r) {
    if (r.accept_word("scenario")) {
      out.push_back({r.word("scenario name"), Composite{}});
      r.end();
      return;
    }
    if (out.empty())
      r.fail("policy line before the first scenario", {"'scenario'"});
    auto& parts = std::get<Composite>(out.back().policy).parts;
    if (r.accept_word("override")) {
      ParamOverride o;
      o.id = r.word("parameter name");
      r.expect_punct('=');
      o.value = r.number();
      if (r.accept_word("at"))
        o.from = r.number();
      r.end();
      parts.push_back(o);
    } else if (r.accept_word("wage_floor")) {
      WageFloor f;
      f.minimum = r.number();
      r.expect_word("from");
      f.from = r.number();
      r.end();
      parts.push_back(f);
    } else {
      r.fail("unknown scenario line", {"'scenario'", "'override'", "'wage_floor'"});
    }
  });
  return out;
}

SweepPlan parse_sweep_plan(std::string_view text) {
  SweepPlan plan;
  bool have_samples = false;
  for_each_line(text, [&](LineReader& r) {
    if (r.accept_word("grid")) {
      GridAxis axis;
      axis.id = r.word("parameter name");
      r.expect_punct('=');
      do
        axis.values.push_back(r.number());
      while (r.accept_punct(','));
      r.end();
      plan.grid.push_back(std::move(axis));
    } else if (r.accept_word("range")) {
      RangeAxis axis;
      axis.id = r.word("parameter name");
      r.expect_punct('=');
      axis.low = r.number();
      r.expect_punct('.');
      r.expect_punct('.');
      axis.high = r.number();
      r.expect_word("samples");
      const auto n = static_cast<std::size_t>(r.integer());
      if (have_samples && n != plan.samples)
        r.fail("all ranges must use the same sample count");
      plan.samples = n;
      have_samples = true;
      r.end();
      plan.ranges.push_back(std::move(axis));
    } else if (r.accept_word("seed")) {
      plan.seed = r.integer();
      r.end();
    } else {
      r.fail("unknown plan line", {"'grid'", "'range'", "'seed'"});
    }
  });
  return plan;
}

} // namespace dynex
