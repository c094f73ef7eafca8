#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "catsteer/analytic_cat.hpp"
#include "catsteer/common.hpp"
#include "catsteer/ghz.hpp"
#include "catsteer/grid.hpp"
#include "catsteer/steering.hpp"

namespace catsteer {
namespace coarse_grain {

// Measurement-resolution model of delta-scopic local realism: Bob's
// conditional distributions are smeared by a kernel of scale delta.
struct Kernel {
  enum class Kind { Gaussian, Box };
  Kind kind = Kind::Gaussian;
  double width = 0.0;  // std deviation for gaussian, full width for box

  Kernel(Kind k, double w) : kind(k), width(w) {
    if (!(w > 0.0)) throw std::invalid_argument("kernel width must be > 0");
  }
  static Kernel gaussian(double sigma) { return Kernel(Kind::Gaussian, sigma); }
  static Kernel box(double full_width) { return Kernel(Kind::Box, full_width); }
};

// Discrete convolution on the distribution's own grid, renormalized to unit
// trapezoid integral. The grid must resolve the kernel (step <= width/4).
inline ConditionalDist convolve(const ConditionalDist& dist, const Kernel& k) {
  const double h = dist.grid.step;
  if (h > k.width / 4.0)
    throw GridResolutionError("grid step " + std::to_string(h) +
                              " too coarse for kernel width " +
                              std::to_string(k.width));
  // kernel taps, normalized to unit discrete mass
  std::vector<double> taps;
  long half = 0;
  if (k.kind == Kernel::Kind::Gaussian) {
    half = static_cast<long>(std::ceil(8.0 * k.width / h));
    taps.resize(2 * half + 1);
    for (long i = -half; i <= half; ++i) {
      const double u = static_cast<double>(i) * h / k.width;
      taps[i + half] = std::exp(-0.5 * u * u);
    }
  } else {
    half = static_cast<long>(std::floor(0.5 * k.width / h));
    taps.assign(2 * half + 1, 1.0);
  }
  double tap_sum = 0.0;
  for (double t : taps) tap_sum += t;
  for (double& t : taps) t /= tap_sum;

  ConditionalDist out = dist;
  const long n = static_cast<long>(dist.densities.size());
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    const long jlo = std::max<long>(-half, -i);
    const long jhi = std::min<long>(half, n - 1 - i);
    for (long j = jlo; j <= jhi; ++j)
      acc += taps[j + half] * dist.densities[i + j];
    out.densities[i] = acc;
  }
  const double z = trapezoid(out.densities, h);
  for (double& d : out.densities) d /= z;
  return out;
}

struct CoarseVariances {
  double var_inf_x = 0.5;
  double var_inf_p = 0.5;
};

// Closed forms for the gaussian kernel: convolution adds delta^2 to every
// conditional variance, so
//   var_inf_x(delta) = 1/2 + delta^2
//   var_inf_p(delta) = 1/2 - D(alpha) + delta^2.
inline CoarseVariances coarse_inference_variances_closed_form(
    const CatState& cat, double delta) {
  const double d2 = delta * delta;
  return {0.5 + d2,
          0.5 - analytic_cat::fringe_variance_deficit(cat.alpha) + d2};
}

// Numeric route: tabulate, convolve, integrate. Kept independent of the
// closed forms so the two can check each other.
inline CoarseVariances coarse_inference_variances(const CatState& cat,
                                                  double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  const Kernel k = Kernel::gaussian(delta);
  const double alpha = cat.alpha;

  double step_x = std::min(0.01, delta / 4.0);
  const double span_x = kSqrt2 * alpha + 8.0 + 8.0 * delta;
  double step_p =
      alpha > 0.0 ? std::min(fringe_period(alpha) / 16.0, delta / 4.0)
                  : delta / 4.0;
  const double span_p = 8.0 + 8.0 * delta;

  CoarseVariances cv{0.0, 0.0};
  for (int outcome : {+1, -1}) {
    const auto dx = analytic_cat::tabulate_x(
        cat, outcome, QuadratureGrid::symmetric(span_x, step_x));
    cv.var_inf_x += 0.5 * convolve(dx, k).moments().variance;
    const auto dp = analytic_cat::tabulate_p(
        cat, outcome, QuadratureGrid::symmetric(span_p, step_p));
    cv.var_inf_p += 0.5 * convolve(dp, k).moments().variance;
  }
  return cv;
}

inline SteeringReport coarse_witness_closed_form(const CatState& cat,
                                                 double delta) {
  const auto cv = coarse_inference_variances_closed_form(cat, delta);
  return product_witness(cv.var_inf_x, cv.var_inf_p, 0.5);
}

// Smallest gaussian smearing width at which the quadrature product witness
// stops violating. Solving (1/2 + t)(1/2 - D + t) = 1/4 for t = delta^2:
//   delta*^2 = ( sqrt(1 + D^2) - (1 - D) ) / 2
//            = D/2 + D^2 / (2 (1 + sqrt(1 + D^2)))
// (second form avoids the cancellation that rounds the first to zero once
// D < machine epsilon); tends to alpha e^{-2 alpha^2} for large alpha.
inline std::optional<double> critical_delta_closed_form(const CatState& cat) {
  if (cat.degenerate()) return std::nullopt;  // no steering signature to destroy
  const double D = analytic_cat::fringe_variance_deficit(cat.alpha);
  const double t = 0.5 * D + 0.5 * D * D / (1.0 + std::sqrt(1.0 + D * D));
  return std::sqrt(t);
}

// Bisection over the numeric convolution route, to absolute tolerance tol.
// Returns nullopt when the witness does not violate even unsmeared.
inline std::optional<double> critical_delta(const CatState& cat, double tol) {
  if (!(cat.alpha > 0.0))
    throw std::invalid_argument("critical_delta requires alpha > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  const auto seed = critical_delta_closed_form(cat);
  if (!seed) return std::nullopt;
  // below any resolvable grid scale the convolution route is meaningless;
  // the closed form is the only available answer there
  if (*seed < 1e-7) return seed;

  // exact threshold, no guard band: the guard would bias the root by
  // ~1e-12/(2 delta*), which matters at the 1e-6 relative tolerance
  const auto violates = [&](double delta) {
    const auto cv = coarse_inference_variances(cat, delta);
    return std::sqrt(cv.var_inf_x * cv.var_inf_p) < 0.5;
  };

  double lo = *seed / 4.0, hi = *seed * 4.0;
  int guard = 0;
  while (!violates(lo)) {
    lo /= 4.0;
    if (++guard > 20) return std::nullopt;
  }
  guard = 0;
  while (violates(hi)) {
    hi *= 4.0;
    if (++guard > 20)
      throw std::runtime_error("critical_delta failed to bracket");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (violates(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Smears the GHZ witness inference statistics by a fixed floor added in
// quadrature to each inference variance (the outcome-unit analog of the
// gaussian convolution model) and reports whether the witness still
// violates.
inline SteeringReport ghz_smeared_witness(int n, double smear) {
  const auto d = ghz::ghz_steering_witness_detail(n);
  const double s2 = smear * smear;
  const double lhs = std::sqrt((d.var_inf_sz + s2) * (d.var_inf_pry + s2));
  return SteeringReport::from(lhs, d.report.bound);
}

// Whether GHZ steering survives smearing by one spin unit. Expected false:
// the smeared product reaches (n-1)/2 exactly, meeting the bound.
inline bool ghz_unit_check(int n, double smear = 1.0) {
  if (smear == 0.0) return ghz::ghz_steering_witness(n).violated;
  return ghz_smeared_witness(n, smear).violated;
}

}  // namespace coarse_grain
}  // namespace catsteer
