#pragma once

#include "dynex/expr.hpp"
#include "dynex/willingness.hpp"

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dynex {

using ValueMap = std::map<std::string, double, std::less<>>;

// True for names matching [a-z_][a-z0-9_]*.
bool is_valid_identifier(std::string_view name) noexcept;

struct ParamDef {
  std::string id;
  double value = 0.0;
  std::string unit;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  friend bool operator==(const ParamDef&, const ParamDef&) = default;
};

// Two-anchor curve as written in model files: 50% willing at `median`,
// 90% at `ratio90`.
struct AnchoredCurve {
  CurveKind kind = CurveKind::normal;
  double median = 1.0;
  double ratio90 = 1.5;

  friend bool operator==(const AnchoredCurve&, const AnchoredCurve&) = default;
};

struct PointTable {
  std::vector<CurvePoint> points;

  friend bool operator==(const PointTable& a, const PointTable& b);
};

using LookupSource = std::variant<AnchoredCurve, PointTable>;

struct LookupDef {
  std::string id;
  LookupSource source;

  friend bool operator==(const LookupDef&, const LookupDef&) = default;
};

// Throws InfeasibleAnchors or DomainError if the source does not describe a
// valid curve.
WillingnessCurve resolve_curve(const LookupSource& source);

struct StockDef {
  std::string id;
  Expr initial;
  Expr inflow;
  Expr outflow;
  std::string unit;

  friend bool operator==(const StockDef&, const StockDef&) = default;
};

struct AuxDef {
  std::string id;
  Expr expr;
  std::string unit;

  friend bool operator==(const AuxDef&, const AuxDef&) = default;
};

enum class VariableKind { param, stock, aux };

struct ModelSpec {
  std::string name;
  std::vector<ParamDef> params;
  std::vector<LookupDef> lookups;
  std::vector<StockDef> stocks;
  std::vector<AuxDef> auxes;

  const ParamDef* find_param(std::string_view id) const;
  const StockDef* find_stock(std::string_view id) const;
  const AuxDef* find_aux(std::string_view id) const;
  const LookupDef* find_lookup(std::string_view id) const;
  std::optional<VariableKind> kind_of(std::string_view id) const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Copy of `spec` with one parameter value replaced. Throws UnknownVariable if
// `id` is not a parameter.
ModelSpec with_parameter(ModelSpec spec, std::string_view id, double value);

} // namespace dynex
