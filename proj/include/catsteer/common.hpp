#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace catsteer {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrtPi = 0.56418958354775628695;

// Guard band for strict steering inequalities, so floating-point noise at
// the product-state boundary never reports a spurious violation.
inline constexpr double kViolationGuard = 1e-12;

enum class Basis { X, P };

// Alice's measurement setting on the spin / N-th qubit.
enum class Setting { Z, X, Y };

inline const char* to_string(Basis b) { return b == Basis::X ? "x" : "p"; }

inline const char* to_string(Setting s) {
  switch (s) {
    case Setting::Z: return "z";
    case Setting::X: return "x";
    default: return "y";
  }
}

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;
};

// Hidden-state value pair: predetermined signs for the two conditioning
// families (Z-setting outcome for the X distribution, X-setting outcome for
// the P distribution).
struct ElementOfRealityState {
  int lambda_z = +1;
  int lambda_x = +1;
};

inline void require_sign(int s, const char* what) {
  if (s != +1 && s != -1)
    throw std::invalid_argument(std::string(what) + " must be +1 or -1");
}

// A grid too coarse to resolve interference fringes (or a smearing kernel)
// is rejected rather than silently aliased.
class GridResolutionError : public std::runtime_error {
 public:
  explicit GridResolutionError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// Conditioning on an outcome of probability zero.
class ImpossibleOutcomeError : public std::runtime_error {
 public:
  explicit ImpossibleOutcomeError(const std::string& msg)
      : std::runtime_error(msg) {}
};

}  // namespace catsteer
