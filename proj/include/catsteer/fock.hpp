#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "catsteer/common.hpp"
#include "catsteer/grid.hpp"
#include "catsteer/steering.hpp"

namespace catsteer {
namespace fock {

using cplx = std::complex<double>;

inline constexpr double kTailBound = 1e-12;

// Truncation dimension that keeps the Poisson tail below kTailBound for the
// desk-scale regime alpha <= 4.
inline int required_dim(double alpha) {
  return static_cast<int>(std::ceil(alpha * alpha + 8.0 * alpha + 20.0));
}

// Poisson tail mass sum_{n >= dim} e^{-alpha^2} alpha^{2n} / n!, an upper
// bound on the probability discarded by truncation.
inline double truncation_error(double alpha, int dim) {
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  const double lambda = alpha * alpha;
  if (lambda == 0.0) return 0.0;
  // first term via logs, then the ratio recurrence
  double log_term = -lambda + dim * std::log(lambda) - std::lgamma(dim + 1.0);
  double term = std::exp(log_term);
  double sum = 0.0;
  for (int n = dim; n < dim + 100000; ++n) {
    sum += term;
    term *= lambda / (n + 1.0);
    if (term < sum * 1e-18 + 1e-300) break;
  }
  return sum;
}

inline void check_tail(double alpha, int dim) {
  if (truncation_error(alpha, dim) > kTailBound)
    throw std::invalid_argument(
        "truncation dim " + std::to_string(dim) +
        " leaves Poisson tail above 1e-12 for alpha " + std::to_string(alpha));
}

// Coherent-state number amplitudes c_n = e^{-alpha^2/2} alpha^n / sqrt(n!)
// by the stable recurrence c_{n+1} = c_n alpha / sqrt(n+1). alpha real.
inline std::vector<double> coherent_amplitudes(double alpha, int dim) {
  check_tail(std::abs(alpha), dim);
  std::vector<double> c(dim);
  c[0] = std::exp(-0.5 * alpha * alpha);
  for (int n = 0; n + 1 < dim; ++n) c[n + 1] = c[n] * alpha / std::sqrt(n + 1.0);
  return c;
}

// Spin (up/down) x truncated oscillator amplitude table.
struct JointFockState {
  std::vector<cplx> up;    // amplitudes with the spin in |up>_Z
  std::vector<cplx> down;  // amplitudes with the spin in |down>_Z
  double truncation_deficit = 0.0;  // pre-normalization probability deficit

  int dim() const { return static_cast<int>(up.size()); }

  double norm2() const {
    double s = 0.0;
    for (const auto& a : up) s += std::norm(a);
    for (const auto& a : down) s += std::norm(a);
    return s;
  }
};

struct OscillatorState {
  std::vector<cplx> amplitudes;

  int dim() const { return static_cast<int>(amplitudes.size()); }

  double norm2() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s;
  }
};

struct BlochVector {
  double bx = 0.0, by = 0.0, bz = 0.0;
  double length() const { return std::sqrt(bx * bx + by * by + bz * bz); }
};

// (e^{-i pi/4} |alpha>|up> + e^{+i pi/4} |-alpha>|down>) / sqrt(2),
// renormalized after truncation.
inline JointFockState build_coherent_cat(double alpha, int dim) {
  const auto c = coherent_amplitudes(alpha, dim);
  const cplx ph_up = std::polar(1.0, -kPi / 4.0);
  const cplx ph_dn = std::polar(1.0, +kPi / 4.0);
  JointFockState s;
  s.up.resize(dim);
  s.down.resize(dim);
  const double inv_sqrt2 = 1.0 / kSqrt2;
  for (int n = 0; n < dim; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;  // c_n(-alpha)
    s.up[n] = ph_up * (c[n] * inv_sqrt2);
    s.down[n] = ph_dn * (sign * c[n] * inv_sqrt2);
  }
  const double n2 = s.norm2();
  s.truncation_deficit = 1.0 - n2;
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& a : s.up) a *= inv;
  for (auto& a : s.down) a *= inv;
  return s;
}

// Normalized oscillator eigenfunction psi_n(x) for all n < nmax, by the
// three-term recurrence on normalized functions (raw Hermite polynomials
// overflow long before n ~ 60).
inline std::vector<double> hermite_table(int nmax, double x) {
  std::vector<double> psi(nmax);
  if (nmax <= 0) return psi;
  psi[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  if (nmax > 1) psi[1] = kSqrt2 * x * psi[0];
  for (int n = 1; n + 1 < nmax; ++n)
    psi[n + 1] = std::sqrt(2.0 / (n + 1.0)) * x * psi[n] -
                 std::sqrt(n / (n + 1.0)) * psi[n - 1];
  return psi;
}

inline double hermite_wavefunction(int n, double x) {
  if (n < 0) throw std::invalid_argument("hermite_wavefunction requires n >= 0");
  return hermite_table(n + 1, x)[n];
}

// Projects the spin onto the outcome eigenstate of the given setting.
// Returns the branch probability and the renormalized oscillator state.
inline std::pair<double, OscillatorState> project_spin(const JointFockState& s,
                                                       Setting setting,
                                                       int outcome) {
  require_sign(outcome, "outcome");
  const int dim = s.dim();
  OscillatorState osc;
  osc.amplitudes.resize(dim);
  const double inv_sqrt2 = 1.0 / kSqrt2;
  for (int n = 0; n < dim; ++n) {
    switch (setting) {
      case Setting::Z:
        osc.amplitudes[n] = (outcome == +1) ? s.up[n] : s.down[n];
        break;
      case Setting::X:
        // <x_out| = (<up| + out <down|)/sqrt(2)
        osc.amplitudes[n] = (s.up[n] + double(outcome) * s.down[n]) * inv_sqrt2;
        break;
      case Setting::Y:
        // <y_out| = (<up| - i out <down|)/sqrt(2)
        osc.amplitudes[n] =
            (s.up[n] - cplx(0.0, double(outcome)) * s.down[n]) * inv_sqrt2;
        break;
    }
  }
  const double prob = osc.norm2();
  if (prob < 1e-14)
    throw ImpossibleOutcomeError("conditioning on a zero-probability outcome");
  const double inv = 1.0 / std::sqrt(prob);
  for (auto& a : osc.amplitudes) a *= inv;
  return {prob, osc};
}

// |sum_n a_n phi_n(value)|^2 where phi_n = psi_n for the X basis and
// phi_n = i^n psi_n for the P basis (the Fourier phase matching
// P = i (a - a^dag) / sqrt(2)).
inline double quadrature_density(const OscillatorState& osc, Basis basis,
                                 double value) {
  const auto psi = hermite_table(osc.dim(), value);
  cplx amp(0.0, 0.0);
  if (basis == Basis::X) {
    for (int n = 0; n < osc.dim(); ++n) amp += osc.amplitudes[n] * psi[n];
  } else {
    static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (int n = 0; n < osc.dim(); ++n)
      amp += osc.amplitudes[n] * ipow[n % 4] * psi[n];
  }
  return std::norm(amp);
}

// Quadrature moments from ladder-operator matrix elements.
// X = (a + a^dag)/sqrt(2), P = i(a - a^dag)/sqrt(2).
struct QuadratureMoments {
  MomentSummary x;
  MomentSummary p;
};

inline QuadratureMoments ladder_moments(const OscillatorState& osc) {
  const int dim = osc.dim();
  cplx a_exp(0.0, 0.0), a2_exp(0.0, 0.0);
  double n_exp = 0.0;
  for (int n = 0; n < dim; ++n) {
    n_exp += n * std::norm(osc.amplitudes[n]);
    if (n + 1 < dim)
      a_exp += std::conj(osc.amplitudes[n]) * osc.amplitudes[n + 1] *
               std::sqrt(n + 1.0);
    if (n + 2 < dim)
      a2_exp += std::conj(osc.amplitudes[n]) * osc.amplitudes[n + 2] *
                std::sqrt((n + 1.0) * (n + 2.0));
  }
  QuadratureMoments m;
  // <P> = i(<a> - <a*>)/sqrt2 = -sqrt2 Im<a> under the P = i(a - a^dag)/sqrt2
  // convention shared with the i^n wavefunction phase
  const double mean_x = kSqrt2 * a_exp.real();
  const double mean_p = -kSqrt2 * a_exp.imag();
  const double x2 = a2_exp.real() + n_exp + 0.5;
  const double p2 = -a2_exp.real() + n_exp + 0.5;
  m.x = {mean_x, x2 - mean_x * mean_x};
  m.p = {mean_p, p2 - mean_p * mean_p};
  return m;
}

inline BlochVector bloch_from_density(const cplx& r_uu, const cplx& r_ud,
                                      const cplx& r_dd) {
  const double tr = r_uu.real() + r_dd.real();
  BlochVector b;
  b.bx = 2.0 * r_ud.real() / tr;
  b.by = -2.0 * r_ud.imag() / tr;
  b.bz = (r_uu.real() - r_dd.real()) / tr;
  return b;
}

// Reduced spin state of the joint system, as a Bloch vector.
inline BlochVector reduced_spin(const JointFockState& s) {
  cplx r_uu(0, 0), r_ud(0, 0), r_dd(0, 0);
  for (int n = 0; n < s.dim(); ++n) {
    r_uu += s.up[n] * std::conj(s.up[n]);
    r_ud += s.up[n] * std::conj(s.down[n]);
    r_dd += s.down[n] * std::conj(s.down[n]);
  }
  return bloch_from_density(r_uu, r_ud, r_dd);
}

// Projects the oscillator onto even (+1) or odd (-1) number states; returns
// the outcome probability and the conditioned spin Bloch vector.
inline std::pair<double, BlochVector> parity_condition(const JointFockState& s,
                                                       int parity) {
  require_sign(parity, "parity");
  cplx r_uu(0, 0), r_ud(0, 0), r_dd(0, 0);
  double prob = 0.0;
  for (int n = (parity == +1) ? 0 : 1; n < s.dim(); n += 2) {
    r_uu += s.up[n] * std::conj(s.up[n]);
    r_ud += s.up[n] * std::conj(s.down[n]);
    r_dd += s.down[n] * std::conj(s.down[n]);
    prob += std::norm(s.up[n]) + std::norm(s.down[n]);
  }
  if (prob < 1e-14)
    throw ImpossibleOutcomeError("conditioning on a zero-probability parity");
  return {prob, bloch_from_density(r_uu, r_ud, r_dd)};
}

// Conditioned spin Bloch vectors given the sign of an X-quadrature
// measurement on the oscillator, by numeric quadrature of the joint
// position-space density matrix.
inline std::pair<std::pair<double, BlochVector>, std::pair<double, BlochVector>>
condition_on_x_sign(const JointFockState& s, double span, double step = 0.01) {
  const int dim = s.dim();
  cplx pos_uu(0, 0), pos_ud(0, 0), pos_dd(0, 0);
  cplx neg_uu(0, 0), neg_ud(0, 0), neg_dd(0, 0);
  const auto accumulate = [&](double x, double w, bool positive) {
    const auto psi = hermite_table(dim, x);
    cplx au(0, 0), ad(0, 0);
    for (int n = 0; n < dim; ++n) {
      au += s.up[n] * psi[n];
      ad += s.down[n] * psi[n];
    }
    const cplx uu = au * std::conj(au) * w;
    const cplx ud = au * std::conj(ad) * w;
    const cplx dd = ad * std::conj(ad) * w;
    if (positive) {
      pos_uu += uu; pos_ud += ud; pos_dd += dd;
    } else {
      neg_uu += uu; neg_ud += ud; neg_dd += dd;
    }
  };
  // two trapezoid rules, [0, span] and [-span, 0]; x = 0 carries the
  // endpoint half-weight on each side so the probabilities sum to 1
  const std::size_t m = static_cast<std::size_t>(std::ceil(span / step)) + 1;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = i * step;
    const double w = (i == 0 || i + 1 == m) ? 0.5 * step : step;
    accumulate(x, w, true);
    accumulate(-x, w, false);
  }
  const double p_pos = pos_uu.real() + pos_dd.real();
  const double p_neg = neg_uu.real() + neg_dd.real();
  return {{p_pos, bloch_from_density(pos_uu, pos_ud, pos_dd)},
          {p_neg, bloch_from_density(neg_uu, neg_ud, neg_dd)}};
}

// Two-setting spin steering witness: the cat-side measurements (number
// parity, sign of X) are used to infer the spin observables sigma_X and
// sigma_Z, against the spin uncertainty bound |<sigma_Y>|/2 of the reduced
// spin state. This is the minimal spin analog of the quadrature product
// witness; the conditioned values are recorded as regression fixtures
// rather than asserted to violate.
inline SteeringReport spin_steering_witness(const JointFockState& s,
                                            double x_span) {
  double var_inf_sx = 0.0;
  for (int parity : {+1, -1}) {
    const auto [prob, bloch] = parity_condition(s, parity);
    var_inf_sx += prob * (1.0 - bloch.bx * bloch.bx);
  }
  const auto signs = condition_on_x_sign(s, x_span);
  double var_inf_sz = 0.0;
  for (const auto& branch : {signs.first, signs.second})
    var_inf_sz += branch.first * (1.0 - branch.second.bz * branch.second.bz);
  const double bound = std::abs(reduced_spin(s).by) / 2.0;
  return SteeringReport::from(std::sqrt(var_inf_sx * var_inf_sz), bound);
}

}  // namespace fock
}  // namespace catsteer
