#pragma once

#include <span>
#include <variant>
#include <vector>

namespace dynex {

// Acceptance curves: the share of a pool of potential workers willing to take
// a position, as a function of the salary ratio (offered / average demanded).
// The ratio is unbounded above; every curve maps [0, inf) onto [0, 1] and is
// nondecreasing.

// Normal distribution of reservation ratios, truncated at 0 and renormalized
// so that the cumulative curve is exactly 0 at ratio 0. `mu` and `sigma` are
// the parameters of the untruncated parent.
struct NormalCdf {
  double mu;
  double sigma;
};

// Right-skewed alternative: ln(ratio) is normal with the given parameters.
struct LogNormalCdf {
  double log_median;
  double log_sigma;
};

struct CurvePoint {
  double ratio;
  double fraction;
};

// Linear interpolation between points; 0 below the first point, 1 above the
// last. Points are nondecreasing in both coordinates, the first fraction is 0
// and the last fraction is 1.
struct PiecewiseCumulative {
  std::vector<CurvePoint> points;
};

using WillingnessCurve = std::variant<NormalCdf, LogNormalCdf, PiecewiseCumulative>;

enum class CurveKind { normal, lognormal, piecewise };

using CurveAnchor = CurvePoint;

// Throws DomainError if the curve violates its invariants.
void check_curve(const WillingnessCurve& curve);

// Throws DomainError for a negative (or NaN) ratio.
double fraction_willing(const WillingnessCurve& curve, double ratio);

// Smallest ratio at which the curve reaches `fraction`, 0 < fraction < 1.
// Throws NotInvertible when the curve is flat at the requested level and
// DomainError when the fraction is outside (0, 1).
double quantile(const WillingnessCurve& curve, double fraction);

// Fits a curve through the anchors. Normal and log-normal take exactly two
// anchors; piecewise takes two or more and is extended with (0, 0) and, if
// the last anchor is below 1, with (2 * last ratio, 1).
// Throws InfeasibleAnchors for repeated or non-monotone anchors, or anchors
// the chosen family cannot reproduce.
WillingnessCurve calibrate(CurveKind kind, std::span<const CurveAnchor> anchors);

// Number of people willing at `fraction` of a pool. Throws DomainError when
// the fraction is outside [0, 1] or the pool is negative.
double exploitee_count(double fraction, double pool);

// Half the pool is willing when offer equals demand; 90% at ratio 1.5.
inline constexpr CurveAnchor kMedianAnchor{1.0, 0.5};
inline constexpr CurveAnchor kUpperAnchor{1.5, 0.9};

WillingnessCurve default_willingness_curve();
// Log-normal fit to the same two anchors.
WillingnessCurve default_skewed_curve();

// Standard normal cumulative distribution (untruncated).
double standard_normal_cdf(double z);

} // namespace dynex
