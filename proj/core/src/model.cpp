#include "dynex/model.hpp"

#include "dynex/error.hpp"
#include "overloaded.hpp"

#include <algorithm>

namespace dynex {

bool is_valid_identifier(std::string_view name) noexcept {
  if (name.empty())
    return false;
  auto head = [](char c) { return (c >= 'a' && c <= 'z') || c == '_'; };
  auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
  return head(name.front()) && std::all_of(name.begin() + 1, name.end(), tail);
}

bool operator==(const PointTable& a, const PointTable& b) {
  return std::equal(a.points.begin(), a.points.end(), b.points.begin(), b.points.end(),
                    [](const CurvePoint& x, const CurvePoint& y) {
                      return x.ratio == y.ratio && x.fraction == y.fraction;
                    });
}

WillingnessCurve resolve_curve(const LookupSource& source) {
  return std::visit(detail::Overloaded{
                        [](const AnchoredCurve& c) {
                          const CurveAnchor anchors[] = {{c.median, 0.5}, {c.ratio90, 0.9}};
                          return calibrate(c.kind, anchors);
                        },
                        [](const PointTable& t) {
                          WillingnessCurve curve = PiecewiseCumulative{t.points};
                          check_curve(curve);
                          return curve;
                        },
                    },
                    source);
}

namespace {

template <class T>
const T* find_by_id(const std::vector<T>& items, std::string_view id) {
  auto it = std::find_if(items.begin(), items.end(), [&](const T& x) { return x.id == id; });
  return it == items.end() ? nullptr : &*it;
}

} // namespace

const ParamDef* ModelSpec::find_param(std::string_view id) const { return find_by_id(params, id); }
const StockDef* ModelSpec::find_stock(std::string_view id) const { return find_by_id(stocks, id); }
const AuxDef* ModelSpec::find_aux(std::string_view id) const { return find_by_id(auxes, id); }
const LookupDef* ModelSpec::find_lookup(std::string_view id) const { return find_by_id(lookups, id); }

std::optional<VariableKind> ModelSpec::kind_of(std::string_view id) const {
  if (find_param(id))
    return VariableKind::param;
  if (find_stock(id))
    return VariableKind::stock;
  if (find_aux(id))
    return VariableKind::aux;
  return std::nullopt;
}

ModelSpec with_parameter(ModelSpec spec, std::string_view id, double value) {
  auto it = std::find_if(spec.params.begin(), spec.params.end(),
                         [&](const ParamDef& p) { return p.id == id; });
  if (it == spec.params.end())
    throw UnknownVariable(std::string(id));
  it->value = value;
  return spec;
}

} // namespace dynex
