#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "catsteer/common.hpp"
#include "catsteer/grid.hpp"
#include "catsteer/steering.hpp"

namespace catsteer {

// Entangled coherent superposition parameterized by a real amplitude alpha.
// alpha == 0 is the degenerate product state (vacuum, no steering); it is
// accepted and flagged so callers can report the boundary case.
struct CatState {
  double alpha;

  explicit CatState(double a) : alpha(a) {
    if (!std::isfinite(a) || a < 0.0)
      throw std::invalid_argument("CatState requires finite alpha >= 0");
  }

  bool degenerate() const { return alpha == 0.0; }
};

struct ConditionalDist {
  Basis basis = Basis::X;
  Setting alice_setting = Setting::Z;
  int alice_outcome = +1;
  QuadratureGrid grid;
  std::vector<double> densities;

  double integral() const { return trapezoid(densities, grid.step); }
  MomentSummary moments() const { return tabulated_moments(grid, densities); }
};

namespace analytic_cat {

// Z-setting conditional X density: a Gaussian hill of variance 1/2 centred
// at outcome * sqrt(2) * alpha.
inline double cond_x_density(const CatState& cat, int outcome, double x) {
  require_sign(outcome, "outcome");
  const double d = x - outcome * kSqrt2 * cat.alpha;
  return kInvSqrtPi * std::exp(-d * d);
}

// X-setting conditional P density: Gaussian envelope with interference
// fringes of period pi/(sqrt(2) alpha).
inline double cond_p_density(const CatState& cat, int outcome, double p) {
  require_sign(outcome, "outcome");
  return kInvSqrtPi * std::exp(-p * p) *
         (1.0 + outcome * std::sin(2.0 * kSqrt2 * cat.alpha * p));
}

// Mean of the fringe distribution: outcome * sqrt(2) alpha exp(-2 alpha^2).
inline double fringe_mean(const CatState& cat, int outcome) {
  require_sign(outcome, "outcome");
  return outcome * kSqrt2 * cat.alpha * std::exp(-2.0 * cat.alpha * cat.alpha);
}

// Amount by which the fringe pattern pulls the conditional P variance below
// the coherent-state value 1/2:
//
//   Var(P | sigma_X outcome) = 1/2 - 2 alpha^2 exp(-4 alpha^2)
//
// The exponent is alpha^2, confirmed independently by numeric integration of
// the fringe density and by the truncated-Fock oracle (see tests).
inline double fringe_variance_deficit(double alpha) {
  return 2.0 * alpha * alpha * std::exp(-4.0 * alpha * alpha);
}

inline MomentSummary conditional_moments(const CatState& cat, Setting setting,
                                         int outcome) {
  require_sign(outcome, "outcome");
  if (setting == Setting::Z)
    return {outcome * kSqrt2 * cat.alpha, 0.5};
  if (setting == Setting::X)
    return {fringe_mean(cat, outcome), 0.5 - fringe_variance_deficit(cat.alpha)};
  throw std::invalid_argument("analytic model covers settings Z and X only");
}

struct InferenceVariances {
  double var_inf_x = 0.5;
  double var_inf_p = 0.5;
};

// Outcome probabilities are exactly 1/2 for both settings, and the
// conditional variances are outcome-independent, so the averages collapse to
// the single-outcome values.
inline InferenceVariances inference_variances(const CatState& cat) {
  return {0.5, 0.5 - fringe_variance_deficit(cat.alpha)};
}

// Deficit of the steering product below the bound 1/2, evaluated without
// the cancellation that makes 1/2 - lhs round to zero at large alpha:
//   1/2 - sqrt(var_inf_x * var_inf_p) = D / (1 + sqrt(1 - 2 D))
// with D the fringe variance deficit.
inline double witness_margin(const CatState& cat) {
  const double d = fringe_variance_deficit(cat.alpha);
  return d / (1.0 + std::sqrt(1.0 - 2.0 * d));
}

inline SteeringReport quadrature_witness(const CatState& cat) {
  const auto iv = inference_variances(cat);
  return SteeringReport::from_margin(std::sqrt(iv.var_inf_x * iv.var_inf_p),
                                     0.5, witness_margin(cat));
}

inline ConditionalDist tabulate_x(const CatState& cat, int outcome,
                                  const QuadratureGrid& g) {
  ConditionalDist d;
  d.basis = Basis::X;
  d.alice_setting = Setting::Z;
  d.alice_outcome = outcome;
  d.grid = g;
  d.densities.resize(g.size());
  for (std::size_t i = 0; i < d.densities.size(); ++i)
    d.densities[i] = cond_x_density(cat, outcome, g.point(i));
  return d;
}

inline ConditionalDist tabulate_p(const CatState& cat, int outcome,
                                  const QuadratureGrid& g) {
  check_fringe_resolution(g, cat.alpha);
  ConditionalDist d;
  d.basis = Basis::P;
  d.alice_setting = Setting::X;
  d.alice_outcome = outcome;
  d.grid = g;
  d.densities.resize(g.size());
  for (std::size_t i = 0; i < d.densities.size(); ++i)
    d.densities[i] = cond_p_density(cat, outcome, g.point(i));
  return d;
}

// The (P_{lambda_z}(x), P_{lambda_x}(p)) prediction pair of a hidden state.
inline std::pair<ConditionalDist, ConditionalDist> element_of_reality_predictions(
    const CatState& cat, const ElementOfRealityState& eor,
    const QuadratureGrid& gx, const QuadratureGrid& gp) {
  require_sign(eor.lambda_z, "lambda_z");
  require_sign(eor.lambda_x, "lambda_x");
  return {tabulate_x(cat, eor.lambda_z, gx), tabulate_p(cat, eor.lambda_x, gp)};
}

// matrix[i][j] = P_{lambda_z}(x_i) * P_{lambda_x}(p_j).
inline std::vector<std::vector<double>> fig2_density_grid(
    const CatState& cat, const ElementOfRealityState& eor,
    const QuadratureGrid& gx, const QuadratureGrid& gp) {
  const auto pred = element_of_reality_predictions(cat, eor, gx, gp);
  std::vector<std::vector<double>> m(gx.size(),
                                     std::vector<double>(gp.size()));
  for (std::size_t i = 0; i < gx.size(); ++i)
    for (std::size_t j = 0; j < gp.size(); ++j)
      m[i][j] = pred.first.densities[i] * pred.second.densities[j];
  return m;
}

}  // namespace analytic_cat
}  // namespace catsteer
