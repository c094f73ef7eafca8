#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "catsteer/common.hpp"

namespace catsteer {

// Uniform 1-D grid, closed at both ends: points min, min+step, ...
struct QuadratureGrid {
  double min = 0.0;
  double max = 0.0;
  double step = 0.0;

  QuadratureGrid() = default;
  QuadratureGrid(double lo, double hi, double h) : min(lo), max(hi), step(h) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && std::isfinite(h)))
      throw std::invalid_argument("grid bounds must be finite");
    if (!(lo < hi)) throw std::invalid_argument("grid requires min < max");
    if (!(h > 0.0)) throw std::invalid_argument("grid requires step > 0");
  }

  static QuadratureGrid symmetric(double half_span, double h) {
    return QuadratureGrid(-half_span, half_span, h);
  }

  std::size_t size() const {
    return static_cast<std::size_t>(std::floor((max - min) / step)) + 1;
  }

  double point(std::size_t i) const { return min + static_cast<double>(i) * step; }

  std::vector<double> points() const {
    std::vector<double> xs(size());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = point(i);
    return xs;
  }
};

inline double trapezoid(const std::vector<double>& y, double step) {
  if (y.size() < 2) return 0.0;
  double s = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
  return s * step;
}

// Mean and variance of a (not necessarily normalized) tabulated density.
inline MomentSummary tabulated_moments(const QuadratureGrid& g,
                                       const std::vector<double>& density) {
  std::vector<double> w0(density.size()), w1(density.size()), w2(density.size());
  for (std::size_t i = 0; i < density.size(); ++i) {
    const double x = g.point(i);
    w0[i] = density[i];
    w1[i] = x * density[i];
    w2[i] = x * x * density[i];
  }
  const double m0 = trapezoid(w0, g.step);
  const double m1 = trapezoid(w1, g.step) / m0;
  const double m2 = trapezoid(w2, g.step) / m0;
  return {m1, m2 - m1 * m1};
}

// Spacing of the interference oscillations in the sigma_X-conditioned P
// distribution: pi / (sqrt(2) alpha).
inline double fringe_period(double alpha) {
  return kPi / (kSqrt2 * alpha);
}

// P-basis grids must place at least 8 samples per fringe period.
inline void check_fringe_resolution(const QuadratureGrid& g, double alpha) {
  if (alpha <= 0.0) return;  // no fringes in the degenerate product state
  const double limit = fringe_period(alpha) / 8.0;
  if (g.step > limit)
    throw GridResolutionError(
        "P-basis grid step " + std::to_string(g.step) +
        " aliases fringes; need step <= " + std::to_string(limit));
}

// Location of the peak of |F(omega)| = |integral f(p) e^{-i omega p} dp|
// over a dense frequency scan, refined by parabolic interpolation. Used to
// measure fringe frequencies from tabulated data.
inline double fourier_peak_frequency(const QuadratureGrid& g,
                                     const std::vector<double>& f,
                                     double omega_lo, double omega_hi,
                                     std::size_t n_scan = 4096) {
  std::vector<double> mag(n_scan);
  const double dw = (omega_hi - omega_lo) / static_cast<double>(n_scan - 1);
  for (std::size_t k = 0; k < n_scan; ++k) {
    const double w = omega_lo + dw * static_cast<double>(k);
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double p = g.point(i);
      re += f[i] * std::cos(w * p);
      im -= f[i] * std::sin(w * p);
    }
    mag[k] = re * re + im * im;
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < n_scan; ++k)
    if (mag[k] > mag[best]) best = k;
  double w = omega_lo + dw * static_cast<double>(best);
  if (best > 0 && best + 1 < n_scan) {
    const double a = mag[best - 1], b = mag[best], c = mag[best + 1];
    const double denom = a - 2.0 * b + c;
    if (denom != 0.0) w += 0.5 * dw * (a - c) / denom;
  }
  return w;
}

}  // namespace catsteer
