#include "dynex/willingness.hpp"

#include "dynex/error.hpp"
#include "overloaded.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace dynex {

using detail::Overloaded;

namespace {

constexpr double kAnchorTolerance = 1e-9;

// Upper tail of the standard normal.
double upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double upper_tail_inverse(double q) {
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

double normal_quantile(double p) { return -upper_tail_inverse(p); }

// Q(z0 + d) / Q(z0) for the truncated normal. Falls back to the Mills-ratio
// asymptote when Q(z0) underflows (parent mean far below zero).
double tail_ratio(double z0, double d) {
  const double denom = upper_tail(z0);
  if (denom > 0.0)
    return upper_tail(z0 + d) / denom;
  const double z1 = z0 + d;
  return std::exp(-z0 * d - 0.5 * d * d) * (z0 / z1);
}

double truncated_normal_cdf(const NormalCdf& c, double ratio) {
  const double z0 = -c.mu / c.sigma;
  const double d = ratio / c.sigma;
  return 1.0 - tail_ratio(z0, d);
}

double piecewise_cdf(const PiecewiseCumulative& c, double ratio) {
  const auto& pts = c.points;
  if (ratio <= pts.front().ratio)
    return pts.front().fraction;
  if (ratio >= pts.back().ratio)
    return pts.back().fraction;
  auto hi = std::upper_bound(pts.begin(), pts.end(), ratio,
                             [](double r, const CurvePoint& p) { return r < p.ratio; });
  auto lo = std::prev(hi);
  const double w = (ratio - lo->ratio) / (hi->ratio - lo->ratio);
  return lo->fraction + w * (hi->fraction - lo->fraction);
}

double piecewise_quantile(const PiecewiseCumulative& c, double p) {
  const auto& pts = c.points;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i - 1].fraction == p && pts[i].fraction == p && pts[i].ratio > pts[i - 1].ratio)
      throw NotInvertible("curve is flat at fraction " + std::to_string(p));
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const auto& a = pts[i - 1];
    const auto& b = pts[i];
    if (a.fraction < p && p <= b.fraction)
      return a.ratio + (p - a.fraction) / (b.fraction - a.fraction) * (b.ratio - a.ratio);
  }
  throw NotInvertible("fraction " + std::to_string(p) + " is not reached by the curve");
}

// Bisection on a bracket [lo, hi] where g(lo) and g(hi) differ in sign.
// Runs until the bracket cannot shrink further in floating point.
template <class F>
double bisect(F&& g, double lo, double hi) {
  double glo = g(lo);
  for (int i = 0; i < 2000; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    const double gm = g(mid);
    if (gm == 0.0)
      return mid;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Parent mean of a truncated normal with spread sigma whose cumulative curve
// passes through the anchor. F(anchor) decreases in mu.
double fit_mu(double sigma, const CurveAnchor& a) {
  auto g = [&](double mu) { return truncated_normal_cdf({mu, sigma}, a.ratio) - a.fraction; };
  double lo = a.ratio - 10.0 * sigma;
  double hi = a.ratio + 10.0 * sigma;
  for (int i = 0; i < 200 && g(lo) < 0.0; ++i)
    lo -= (hi - lo);
  for (int i = 0; i < 200 && g(hi) > 0.0; ++i)
    hi += (hi - lo);
  return bisect(g, lo, hi);
}

void require_two_anchor_fit(std::span<const CurveAnchor> anchors) {
  if (anchors.size() != 2)
    throw InfeasibleAnchors("two-parameter curves need exactly 2 anchors, got " +
                            std::to_string(anchors.size()));
  const auto& a = anchors[0];
  const auto& b = anchors[1];
  if (!(a.ratio < b.ratio))
    throw InfeasibleAnchors("anchor ratios must be strictly increasing");
  if (!(a.fraction < b.fraction))
    throw InfeasibleAnchors("anchor fractions must be strictly increasing");
  if (!(a.ratio > 0.0) || !(a.fraction > 0.0) || !(b.fraction < 1.0))
    throw InfeasibleAnchors("anchors must have ratio > 0 and fraction in (0, 1)");
}

void verify_anchors(const WillingnessCurve& curve, std::span<const CurveAnchor> anchors) {
  for (const auto& a : anchors) {
    const double f = fraction_willing(curve, a.ratio);
    if (!(std::abs(f - a.fraction) < kAnchorTolerance))
      throw InfeasibleAnchors("fitted curve misses anchor (" + std::to_string(a.ratio) + ", " +
                              std::to_string(a.fraction) + ")");
  }
}

WillingnessCurve calibrate_normal(std::span<const CurveAnchor> anchors) {
  require_two_anchor_fit(anchors);
  const auto& a = anchors[0];
  const auto& b = anchors[1];

  // Outer solve on log(sigma): spreading the curve lowers F(b) once F(a) is
  // pinned by the inner solve.
  auto g = [&](double log_sigma) {
    const double sigma = std::exp(log_sigma);
    return truncated_normal_cdf({fit_mu(sigma, a), sigma}, b.ratio) - b.fraction;
  };
  const double scale = b.ratio - a.ratio;
  double lo = std::log(scale * 1e-6);
  double hi = std::log(scale * 1e3);
  if (!(g(lo) > 0.0) || !(g(hi) < 0.0))
    throw InfeasibleAnchors("no truncated normal passes through both anchors");
  const double sigma = std::exp(bisect(g, lo, hi));
  WillingnessCurve curve = NormalCdf{fit_mu(sigma, a), sigma};
  verify_anchors(curve, anchors);
  return curve;
}

WillingnessCurve calibrate_lognormal(std::span<const CurveAnchor> anchors) {
  require_two_anchor_fit(anchors);
  const auto& a = anchors[0];
  const auto& b = anchors[1];
  const double za = normal_quantile(a.fraction);
  const double zb = normal_quantile(b.fraction);
  const double s = (std::log(b.ratio) - std::log(a.ratio)) / (zb - za);
  WillingnessCurve curve = LogNormalCdf{std::log(a.ratio) - s * za, s};
  verify_anchors(curve, anchors);
  return curve;
}

WillingnessCurve calibrate_piecewise(std::span<const CurveAnchor> anchors) {
  if (anchors.size() < 2)
    throw InfeasibleAnchors("piecewise curves need at least 2 anchors");
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const auto& p = anchors[i];
    if (!(p.ratio >= 0.0) || !(p.fraction >= 0.0) || !(p.fraction <= 1.0))
      throw InfeasibleAnchors("anchor out of range");
    if (i > 0 && !(anchors[i - 1].ratio < p.ratio))
      throw InfeasibleAnchors("anchor ratios must be strictly increasing");
    if (i > 0 && !(anchors[i - 1].fraction < p.fraction))
      throw InfeasibleAnchors("anchor fractions must be strictly increasing");
  }
  PiecewiseCumulative c;
  if (anchors.front().ratio > 0.0)
    c.points.push_back({0.0, 0.0});
  else if (anchors.front().fraction != 0.0)
    throw InfeasibleAnchors("a curve through ratio 0 must start at fraction 0");
  c.points.insert(c.points.end(), anchors.begin(), anchors.end());
  if (anchors.back().fraction < 1.0)
    c.points.push_back({2.0 * anchors.back().ratio, 1.0});
  return c;
}

} // namespace

double standard_normal_cdf(double z) { return upper_tail(-z); }

void check_curve(const WillingnessCurve& curve) {
  std::visit(Overloaded{
                 [](const NormalCdf& c) {
                   if (!std::isfinite(c.mu) || !(c.sigma > 0.0) || !std::isfinite(c.sigma))
                     throw DomainError("normal curve needs finite mu and sigma > 0");
                 },
                 [](const LogNormalCdf& c) {
                   if (!std::isfinite(c.log_median) || !(c.log_sigma > 0.0) ||
                       !std::isfinite(c.log_sigma))
                     throw DomainError("log-normal curve needs finite parameters and sigma > 0");
                 },
                 [](const PiecewiseCumulative& c) {
                   const auto& pts = c.points;
                   if (pts.size() < 2)
                     throw DomainError("piecewise curve needs at least 2 points");
                   if (pts.front().fraction != 0.0 || pts.back().fraction != 1.0)
                     throw DomainError("piecewise curve must run from fraction 0 to 1");
                   for (std::size_t i = 0; i < pts.size(); ++i) {
                     if (!(pts[i].ratio >= 0.0) || !std::isfinite(pts[i].ratio))
                       throw DomainError("piecewise curve ratios must be finite and >= 0");
                     if (i > 0 && (pts[i].ratio < pts[i - 1].ratio ||
                                   pts[i].fraction < pts[i - 1].fraction))
                       throw DomainError("piecewise curve must be nondecreasing");
                   }
                 },
             },
             curve);
}

double fraction_willing(const WillingnessCurve& curve, double ratio) {
  if (!(ratio >= 0.0))
    throw DomainError("salary ratio must be >= 0");
  return std::visit(Overloaded{
                        [&](const NormalCdf& c) { return truncated_normal_cdf(c, ratio); },
                        [&](const LogNormalCdf& c) {
                          if (ratio == 0.0)
                            return 0.0;
                          return standard_normal_cdf((std::log(ratio) - c.log_median) / c.log_sigma);
                        },
                        [&](const PiecewiseCumulative& c) { return piecewise_cdf(c, ratio); },
                    },
                    curve);
}

double quantile(const WillingnessCurve& curve, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw DomainError("quantile fraction must lie in (0, 1)");
  return std::visit(
      Overloaded{
          [&](const NormalCdf& c) {
            const double z0 = -c.mu / c.sigma;
            const double tail0 = upper_tail(z0);
            if (tail0 > 0.0) {
              const double r = c.mu + c.sigma * upper_tail_inverse((1.0 - fraction) * tail0);
              return std::max(r, 0.0);
            }
            // Parent mean far below zero: invert numerically on a doubling bracket.
            double hi = c.sigma;
            while (truncated_normal_cdf(c, hi) < fraction)
              hi *= 2.0;
            return bisect([&](double r) { return truncated_normal_cdf(c, r) - fraction; }, 0.0, hi);
          },
          [&](const LogNormalCdf& c) {
            return std::exp(c.log_median + c.log_sigma * normal_quantile(fraction));
          },
          [&](const PiecewiseCumulative& c) { return piecewise_quantile(c, fraction); },
      },
      curve);
}

WillingnessCurve calibrate(CurveKind kind, std::span<const CurveAnchor> anchors) {
  switch (kind) {
  case CurveKind::normal:
    return calibrate_normal(anchors);
  case CurveKind::lognormal:
    return calibrate_lognormal(anchors);
  case CurveKind::piecewise:
    return calibrate_piecewise(anchors);
  }
  throw InfeasibleAnchors("unknown curve kind");
}

double exploitee_count(double fraction, double pool) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw DomainError("fraction must lie in [0, 1]");
  if (!(pool >= 0.0))
    throw DomainError("pool must be >= 0");
  return fraction * pool;
}

WillingnessCurve default_willingness_curve() {
  static const WillingnessCurve curve = [] {
    const CurveAnchor anchors[] = {kMedianAnchor, kUpperAnchor};
    return calibrate(CurveKind::normal, anchors);
  }();
  return curve;
}

WillingnessCurve default_skewed_curve() {
  static const WillingnessCurve curve = [] {
    const CurveAnchor anchors[] = {kMedianAnchor, kUpperAnchor};
    return calibrate(CurveKind::lognormal, anchors);
  }();
  return curve;
}

} // namespace dynex
