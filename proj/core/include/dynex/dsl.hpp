#pragma once

#include "dynex/error.hpp"
#include "dynex/model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace dynex {

struct SourceSpan {
  std::size_t line = 1;   // 1-based
  std::size_t column = 1; // 1-based
  std::size_t length = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

class ParseError : public Error {
public:
  ParseError(SourceSpan span, std::string message, std::vector<std::string> expected = {});
  const SourceSpan& span() const noexcept { return span_; }
  const std::string& message() const noexcept { return message_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
  SourceSpan span_;
  std::string message_;
  std::vector<std::string> expected_;
};

// Model files:
//
//   model NAME
//   param ID = NUMBER [unit]
//   lookup ID = normal(median=NUMBER, ratio90=NUMBER)
//             | lognormal(median=NUMBER, ratio90=NUMBER)
//             | points((r, f), (r, f), ...)
//   stock ID = EXPR [unit] { inflow: EXPR outflow: EXPR }
//   aux ID = EXPR [unit]
//
// `#` starts a comment that runs to the end of the line. Parameter values and
// point coordinates may carry a leading minus sign.
//
// Throws ParseError on the first syntax error, then ValidationErrors if the
// parsed model does not validate.
ModelSpec parse_model(std::string_view text);

// Syntax only; no validation.
ModelSpec parse_model_unchecked(std::string_view text);

// A single expression, e.g. "w_ref * (pool_ref / MAX(p, 1)) ^ epsilon".
Expr parse_expression(std::string_view text);

// Canonical text: params, lookups, stocks, auxes in declaration order, one
// declaration per line. parse_model(serialize_model(s)) == s for every spec
// the parser can produce.
std::string serialize_model(const ModelSpec& spec);

std::string format_expr(const Expr& e);

// Shortest text that reads back to exactly `v`, preferring 6 significant
// digits when those suffice.
std::string format_number(double v);

} // namespace dynex
