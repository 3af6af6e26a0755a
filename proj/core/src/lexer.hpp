#pragma once

#include "dynex/dsl.hpp"

#include <algorithm>
#include <charconv>
#include <string>
#include <string_view>

namespace dynex::detail {

enum class TokenKind { ident, call, number, punct, unit, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;
  double value = 0.0;
  SourceSpan span;
};

// Tokenizer shared by model, scenario and plan files. Identifiers are
// lowercase, builtin names uppercase; '[' ... ']' is read raw as a unit.
class Lexer {
public:
  explicit Lexer(std::string_view text, std::size_t first_line = 1)
      : text_(text), line_(first_line) {}

  Token next() {
    skip_space();
    Token t;
    t.span = {line_, col_, 0};
    if (pos_ >= text_.size())
      return t;
    const char c = text_[pos_];
    if (is_word(c)) {
      std::size_t end = pos_;
      while (end < text_.size() && is_word_tail(text_[end]))
        ++end;
      t.text = std::string(text_.substr(pos_, end - pos_));
      t.kind = classify(t);
      take(end - pos_, t);
      return t;
    }
    if (is_digit(c))
      return number(t);
    if (c == '[') {
      const std::size_t close = text_.find_first_of("]\n", pos_ + 1);
      if (close == std::string_view::npos || text_[close] != ']')
        throw ParseError(t.span, "unterminated unit", {"']'"});
      t.kind = TokenKind::unit;
      t.text = trim(text_.substr(pos_ + 1, close - pos_ - 1));
      take(close + 1 - pos_, t);
      return t;
    }
    static constexpr std::string_view kPunct = "(),={}+-*/^:.";
    if (kPunct.find(c) != std::string_view::npos) {
      t.kind = TokenKind::punct;
      t.text = std::string(1, c);
      take(1, t);
      return t;
    }
    t.span.length = 1;
    throw ParseError(t.span, std::string("unexpected character '") + c + "'");
  }

private:
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_word(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_word_tail(char c) { return is_word(c) || is_digit(c); }

  static std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos)
      return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
  }

  TokenKind classify(const Token& t) const {
    if (is_valid_identifier(t.text))
      return TokenKind::ident;
    const bool upper = t.text[0] >= 'A' && t.text[0] <= 'Z' &&
                       std::all_of(t.text.begin(), t.text.end(), [](char ch) {
                         return (ch >= 'A' && ch <= 'Z') || is_digit(ch) || ch == '_';
                       });
    if (upper)
      return TokenKind::call;
    SourceSpan s = t.span;
    s.length = t.text.size();
    throw ParseError(s, "invalid identifier '" + t.text + "'", {"lowercase identifier"});
  }

  Token number(Token& t) {
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < text_.size() && is_digit(text_[end]))
        ++end;
    };
    digits();
    if (end + 1 < text_.size() && text_[end] == '.' && is_digit(text_[end + 1])) {
      ++end;
      digits();
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t mark = end++;
      if (end < text_.size() && (text_[end] == '+' || text_[end] == '-'))
        ++end;
      if (end < text_.size() && is_digit(text_[end]))
        digits();
      else
        end = mark;
    }
    t.kind = TokenKind::number;
    t.text = std::string(text_.substr(pos_, end - pos_));
    const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) {
      t.span.length = t.text.size();
      throw ParseError(t.span, "number out of range: " + t.text);
    }
    take(end - pos_, t);
    return t;
  }

  void take(std::size_t n, Token& t) {
    t.span.length = n;
    pos_ += n;
    col_ += n;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++col_;
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n')
          ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t col_ = 1;
};

} // namespace dynex::detail
