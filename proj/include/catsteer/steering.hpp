#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "catsteer/common.hpp"

namespace catsteer {

// Outcome-resolved conditional statistics of one Bob observable under a
// single Alice setting.
struct ConditionalEnsemble {
  struct Entry {
    std::string setting;
    std::string outcome;
    double probability = 0.0;
    double mean = 0.0;
    double variance = 0.0;
  };
  std::vector<Entry> entries;

  void validate() const {
    if (entries.empty())
      throw std::invalid_argument("ensemble has no entries");
    double psum = 0.0;
    for (const auto& e : entries) {
      if (e.setting != entries.front().setting)
        throw std::invalid_argument("mixed-setting ensemble rejected");
      if (e.probability < 0.0)
        throw std::invalid_argument("negative outcome probability");
      if (e.variance < 0.0)
        throw std::invalid_argument("negative conditional variance");
      psum += e.probability;
    }
    if (std::abs(psum - 1.0) > 1e-9)
      throw std::invalid_argument("outcome probabilities must sum to 1");
  }
};

// (Delta_inf)^2 = sum over outcomes of P(outcome) * Var(observable|outcome).
inline double inference_variance(const ConditionalEnsemble& ens) {
  ens.validate();
  double v = 0.0;
  for (const auto& e : ens.entries) v += e.probability * e.variance;
  return v;
}

struct SteeringReport {
  double lhs = 0.0;
  double bound = 0.0;
  bool violated = false;
  double margin = 0.0;  // bound - lhs

  static SteeringReport from(double lhs, double bound) {
    SteeringReport r;
    r.lhs = lhs;
    r.bound = bound;
    r.margin = bound - lhs;
    r.violated = lhs < bound - kViolationGuard;
    return r;
  }

  // For use when the deficit bound - lhs is known to better accuracy than
  // the subtraction of two nearly equal doubles can provide.
  static SteeringReport from_margin(double lhs, double bound, double margin) {
    SteeringReport r;
    r.lhs = lhs;
    r.bound = bound;
    r.margin = margin;
    r.violated = margin > kViolationGuard;
    return r;
  }
};

// Product witness sqrt(var_a * var_b) against an uncertainty bound; the
// inequality is strict, guarded by kViolationGuard.
inline SteeringReport product_witness(double var_a, double var_b, double bound) {
  if (var_a < 0.0 || var_b < 0.0 || bound < 0.0)
    throw std::invalid_argument("product_witness requires non-negative inputs");
  return SteeringReport::from(std::sqrt(var_a * var_b), bound);
}

// Whether the cat-paradox remains signifiable when the X hidden variable is
// allowed indeterminacy Delta and the P hidden variable indeterminacy delta,
// under an uncertainty product bound c. Signifiable iff Delta*delta < c.
inline bool falsifiability_2b(double Delta, double delta, double c) {
  if (!(Delta > 0.0) || !(delta > 0.0) || !(c > 0.0))
    throw std::invalid_argument("falsifiability_2b requires positive inputs");
  return Delta * delta < c;
}

}  // namespace catsteer
