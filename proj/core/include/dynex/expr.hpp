#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dynex {

enum class BinaryOp : std::uint8_t { add, sub, mul, div, pow };

enum class Builtin : std::uint8_t {
  min,
  max,
  clip,
  step,
  pulse,
  smooth,
  delay1,
  delay3,
  lookup,
  time,
};

std::string_view builtin_name(Builtin fn) noexcept;
std::optional<Builtin> builtin_from_name(std::string_view name) noexcept;
// Number of arguments the builtin takes. LOOKUP counts its curve id.
std::size_t builtin_arity(Builtin fn) noexcept;
// SMOOTH, DELAY1 and DELAY3 carry hidden integration state.
bool is_stateful(Builtin fn) noexcept;

struct ExprNode;

// Immutable expression tree. Copies share structure; equality is structural.
// A default-constructed Expr is empty and only valid as "missing".
class Expr {
public:
  Expr() = default;

  static Expr constant(double value);
  static Expr ref(std::string name);
  static Expr negate(Expr arg);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr call(Builtin fn, std::vector<Expr> args);

  bool empty() const noexcept { return node_ == nullptr; }
  explicit operator bool() const noexcept { return !empty(); }
  const ExprNode& node() const { return *node_; }

  friend bool operator==(const Expr& a, const Expr& b);

private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct Constant {
  double value;
};

struct VarRef {
  std::string name;
};

struct Negate {
  Expr arg;
};

struct Binary {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
};

// For LOOKUP the first argument is a VarRef naming the curve.
struct Call {
  Builtin fn;
  std::vector<Expr> args;
};

struct ExprNode {
  std::variant<Constant, VarRef, Negate, Binary, Call> value;
};

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator-(Expr a);
Expr pow(Expr base, Expr exponent);

// Variables the expression reads, in first-appearance order, without
// duplicates. Curve ids of LOOKUP calls are not included.
std::vector<std::string> references(const Expr& e);

// Curve ids used by LOOKUP calls.
std::vector<std::string> lookups_used(const Expr& e);

} // namespace dynex
