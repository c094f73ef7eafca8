#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "catsteer/common.hpp"
#include "catsteer/steering.hpp"

namespace catsteer {
namespace ghz {

using cplx = std::complex<double>;

inline constexpr int kMaxQubits = 24;

enum class Pauli : char { I = 'I', X = 'X', Y = 'Y', Z = 'Z' };

struct PauliString {
  std::vector<Pauli> ops;

  static PauliString from_string(const std::string& s) {
    PauliString ps;
    ps.ops.reserve(s.size());
    for (char c : s) {
      switch (c) {
        case 'I': ps.ops.push_back(Pauli::I); break;
        case 'X': ps.ops.push_back(Pauli::X); break;
        case 'Y': ps.ops.push_back(Pauli::Y); break;
        case 'Z': ps.ops.push_back(Pauli::Z); break;
        default: throw std::invalid_argument("bad Pauli symbol");
      }
    }
    return ps;
  }
};

// Dense n-qubit state. Bit k of a basis index is qubit k, bit value 0 = up.
struct QubitState {
  int n = 0;
  std::vector<cplx> amp;

  double norm2() const {
    double s = 0.0;
    for (const auto& a : amp) s += std::norm(a);
    return s;
  }

  void normalize() {
    const double inv = 1.0 / std::sqrt(norm2());
    for (auto& a : amp) a *= inv;
  }
};

// (|up>^n - |down>^n)/sqrt(2): amplitude +1/sqrt(2) at index 0 and
// -1/sqrt(2) at the all-ones index.
inline QubitState build_ghz(int n) {
  if (n < 2 || n > kMaxQubits)
    throw std::invalid_argument("build_ghz requires 2 <= n <= 24");
  QubitState s;
  s.n = n;
  s.amp.assign(std::size_t(1) << n, cplx(0, 0));
  s.amp.front() = cplx(1.0 / kSqrt2, 0.0);
  s.amp.back() = cplx(-1.0 / kSqrt2, 0.0);
  return s;
}

// Matrix-free |phi> = P|psi> for a Pauli string.
inline QubitState apply(const QubitState& s, const PauliString& ps) {
  if (static_cast<int>(ps.ops.size()) != s.n)
    throw std::invalid_argument("Pauli string length mismatch");
  std::uint64_t flip = 0;
  for (int k = 0; k < s.n; ++k)
    if (ps.ops[k] == Pauli::X || ps.ops[k] == Pauli::Y)
      flip |= std::uint64_t(1) << k;
  QubitState out;
  out.n = s.n;
  out.amp.assign(s.amp.size(), cplx(0, 0));
  for (std::uint64_t i = 0; i < s.amp.size(); ++i) {
    if (s.amp[i] == cplx(0, 0)) continue;
    cplx phase(1.0, 0.0);
    for (int k = 0; k < s.n; ++k) {
      const int bit = (i >> k) & 1;
      switch (ps.ops[k]) {
        case Pauli::I: break;
        case Pauli::X: break;
        case Pauli::Y: phase *= bit ? cplx(0, -1) : cplx(0, 1); break;
        case Pauli::Z: if (bit) phase = -phase; break;
      }
    }
    out.amp[i ^ flip] += phase * s.amp[i];
  }
  return out;
}

inline double expectation(const QubitState& s, const PauliString& ps) {
  const QubitState t = apply(s, ps);
  cplx e(0, 0);
  for (std::size_t i = 0; i < s.amp.size(); ++i)
    e += std::conj(s.amp[i]) * t.amp[i];
  return e.real();
}

// Projects the last qubit (Alice's) onto the outcome eigenstate of the
// setting and returns the probability and the conditional state of the
// remaining n-1 qubits.
inline std::pair<double, QubitState> alice_condition(const QubitState& s,
                                                     Setting setting,
                                                     int outcome) {
  require_sign(outcome, "outcome");
  // eigenvector (u, v) in the up/down basis
  cplx u(1, 0), v(0, 0);
  switch (setting) {
    case Setting::Z:
      u = (outcome == +1) ? 1.0 : 0.0;
      v = (outcome == +1) ? 0.0 : 1.0;
      break;
    case Setting::X:
      u = 1.0 / kSqrt2;
      v = double(outcome) / kSqrt2;
      break;
    case Setting::Y:
      u = 1.0 / kSqrt2;
      v = cplx(0, double(outcome)) / kSqrt2;
      break;
  }
  const std::uint64_t high = std::uint64_t(1) << (s.n - 1);
  QubitState cond;
  cond.n = s.n - 1;
  cond.amp.resize(high);
  for (std::uint64_t j = 0; j < high; ++j)
    cond.amp[j] = std::conj(u) * s.amp[j] + std::conj(v) * s.amp[j | high];
  const double prob = cond.norm2();
  if (prob < 1e-14)
    throw ImpossibleOutcomeError("conditioning on a zero-probability outcome");
  cond.normalize();
  return {prob, cond};
}

// Distribution of the collective Z spin sum_k sigma_Z^(k) in spin-1/2 units:
// each qubit contributes +-1/2, so an n-qubit register has support
// -n/2, -n/2 + 1, ..., +n/2.
struct CollectiveSpinDist {
  std::vector<double> support;        // ascending, unit steps
  std::vector<double> probabilities;  // sums to 1

  MomentSummary moments() const {
    double m = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
      m += support[i] * probabilities[i];
      m2 += support[i] * support[i] * probabilities[i];
    }
    return {m, m2 - m * m};
  }
};

inline CollectiveSpinDist collective_sz_dist(const QubitState& s) {
  CollectiveSpinDist d;
  d.support.resize(s.n + 1);
  d.probabilities.assign(s.n + 1, 0.0);
  for (int k = 0; k <= s.n; ++k)
    d.support[k] = -0.5 * s.n + k;  // k qubits up
  for (std::uint64_t i = 0; i < s.amp.size(); ++i) {
    const int downs = __builtin_popcountll(i);
    d.probabilities[s.n - downs] += std::norm(s.amp[i]);
  }
  return d;
}

// Product observable Y x Y x ... x Y over all qubits of the state.
inline PauliString pr_y_string(int n) {
  PauliString ps;
  ps.ops.assign(n, Pauli::Y);
  return ps;
}

// Same with qubit J (1-based) carrying X instead of Y.
inline PauliString pr_y_j_string(int n, int j) {
  if (j < 1 || j > n) throw std::out_of_range("J out of range");
  PauliString ps = pr_y_string(n);
  ps.ops[j - 1] = Pauli::X;
  return ps;
}

// Mean and variance of the Y-product observable (eigenvalues +-1). The
// variance is clamped at zero: rounding can push |mean| a few ulp past 1.
inline MomentSummary pr_y(const QubitState& s) {
  const double mean = expectation(s, pr_y_string(s.n));
  return {mean, std::max(0.0, 1.0 - mean * mean)};
}

inline double pr_y_J(const QubitState& s, int j) {
  return expectation(s, pr_y_j_string(s.n, j));
}

// |< sum_J Pr_Y(J) >| / 2 -- the uncertainty-relation lower bound on
// Delta(sigma_Z^B) * Delta(Pr_Y^B) for any genuine quantum state.
inline double ur_bound(const QubitState& s) {
  double sum = 0.0;
  for (int j = 1; j <= s.n; ++j) sum += pr_y_J(s, j);
  return std::abs(sum) / 2.0;
}

// Which Alice setting leaves the conditional Y-product definite alternates
// with the parity of the cat-register size: for an even number of cat
// qubits the X setting does, for an odd number the Y setting does (and the
// other setting pins the Pr_Y(J) products used for the bound). Both
// assignments are computed here, not assumed.
struct GhzWitnessDetail {
  SteeringReport report;
  double var_inf_sz = 0.0;      // from Z-conditioning
  double var_inf_pry = 0.0;     // from the definite setting below
  Setting pry_setting = Setting::X;    // setting used to infer Pr_Y^B
  Setting bound_setting = Setting::Y;  // setting whose Pr_Y(J) set the bound
  // per outcome (+1 first): conditioned <Pr_Y^B> and the common Pr_Y(J) sign
  std::array<double, 2> pry_values{};
  std::array<double, 2> pry_j_values{};
};

inline GhzWitnessDetail ghz_steering_witness_detail(int n) {
  if (n < 3 || n > kMaxQubits)
    throw std::invalid_argument("ghz witness requires 3 <= n <= 24");
  const QubitState psi = build_ghz(n);

  GhzWitnessDetail d;
  for (int outcome : {+1, -1}) {
    const auto [prob, cond] = alice_condition(psi, Setting::Z, outcome);
    d.var_inf_sz += prob * collective_sz_dist(cond).moments().variance;
  }

  const auto inf_pry = [&](Setting setting) {
    double v = 0.0;
    for (int outcome : {+1, -1}) {
      const auto [prob, cond] = alice_condition(psi, setting, outcome);
      v += prob * pr_y(cond).variance;
    }
    return v;
  };
  const double via_x = inf_pry(Setting::X);
  const double via_y = inf_pry(Setting::Y);
  d.pry_setting = (via_x <= via_y) ? Setting::X : Setting::Y;
  d.bound_setting = (d.pry_setting == Setting::X) ? Setting::Y : Setting::X;
  d.var_inf_pry = std::min(via_x, via_y);

  double bound = 0.0;
  int idx = 0;
  for (int outcome : {+1, -1}) {
    const auto [prob, cond] = alice_condition(psi, d.bound_setting, outcome);
    bound += prob * ur_bound(cond);
    d.pry_j_values[idx] = pr_y_J(cond, 1);
    const auto [p2, cond2] = alice_condition(psi, d.pry_setting, outcome);
    d.pry_values[idx] = pr_y(cond2).mean;
    ++idx;
  }
  d.report = SteeringReport::from(std::sqrt(d.var_inf_sz * d.var_inf_pry), bound);
  return d;
}

inline SteeringReport ghz_steering_witness(int n) {
  return ghz_steering_witness_detail(n).report;
}

// Same construction without conditioning: variances of the reduced cat
// register and the unconditioned Pr_Y(J) bound. Never violated.
inline SteeringReport ghz_unconditioned_witness(int n) {
  const QubitState psi = build_ghz(n);
  // reduced cat-register statistics, via both Alice outcomes of a discarded
  // measurement in the Z basis (the reduced state is the same mixture)
  double var_sz = 0.0, var_pry = 0.0, bound = 0.0;
  double mean_sz = 0.0, mean_pry = 0.0;
  for (int outcome : {+1, -1}) {
    const auto [prob, cond] = alice_condition(psi, Setting::Z, outcome);
    const auto mz = collective_sz_dist(cond).moments();
    const auto my = pr_y(cond);
    mean_sz += prob * mz.mean;
    mean_pry += prob * my.mean;
    var_sz += prob * (mz.variance + mz.mean * mz.mean);
    var_pry += prob * (my.variance + my.mean * my.mean);
    double sum = 0.0;
    for (int j = 1; j <= cond.n; ++j) sum += pr_y_J(cond, j);
    bound += prob * sum;
  }
  var_sz -= mean_sz * mean_sz;
  var_pry -= mean_pry * mean_pry;
  return SteeringReport::from(std::sqrt(var_sz * var_pry),
                              std::abs(bound) / 2.0);
}

}  // namespace ghz
}  // namespace catsteer
