#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "catsteer/analytic_cat.hpp"
#include "catsteer/fock.hpp"

using namespace catsteer;
using doctest::Approx;

namespace {

// padding over the tail rule so truncated amplitudes are negligible at the
// 1e-8 density comparison level, not just at the 1e-12 probability level
int oracle_dim(double alpha) { return fock::required_dim(alpha) + 32; }

MomentSummary numeric_quadrature_moments(const fock::OscillatorState& osc,
                                         Basis basis, double span) {
  const QuadratureGrid g = QuadratureGrid::symmetric(span, 0.005);
  std::vector<double> d(g.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = fock::quadrature_density(osc, basis, g.point(i));
  return tabulated_moments(g, d);
}

}  // namespace

TEST_CASE("coherent amplitudes: vacuum, direct formula, norm") {
  const auto vac = fock::coherent_amplitudes(0.0, 4);
  CHECK(vac[0] == 1.0);
  CHECK(vac[1] == 0.0);
  CHECK(vac[3] == 0.0);

  const auto c = fock::coherent_amplitudes(2.0, 40);
  CHECK(c[4] == Approx(std::exp(-2.0) * 16.0 / std::sqrt(24.0)).epsilon(1e-14));
  double norm = 0.0;
  for (double a : c) norm += a * a;
  CHECK(norm >= 1.0 - 1e-12);
}

TEST_CASE("truncation error: zero amplitude, tail rule, monotonicity") {
  CHECK(fock::truncation_error(0.0, 1) == 0.0);
  CHECK(fock::truncation_error(2.0, 40) < 1e-12);
  double prev = fock::truncation_error(2.0, 10);
  for (int dim = 11; dim <= 30; ++dim) {
    const double cur = fock::truncation_error(2.0, dim);
    CHECK(cur <= prev);
    prev = cur;
  }
  // the dim rule keeps the tail below the bound across the desk-scale range
  for (double alpha : {0.5, 1.0, 2.0, 4.0})
    CHECK(fock::truncation_error(alpha, fock::required_dim(alpha)) <= 1e-12);
  CHECK_THROWS_AS(fock::coherent_amplitudes(2.0, 8), std::invalid_argument);
}

TEST_CASE("cat construction: norm, reduced spin") {
  const auto s = fock::build_coherent_cat(2.0, oracle_dim(2.0));
  CHECK(s.norm2() == Approx(1.0).epsilon(1e-14));
  CHECK(s.truncation_deficit < 1e-12);
  const auto b = fock::reduced_spin(s);
  CHECK(b.bz == Approx(0.0).epsilon(1e-14));
  CHECK(b.bx == Approx(0.0).epsilon(1e-14));
  // <sigma_Y> equals the coherent overlap <-alpha|alpha> = e^{-2 alpha^2}
  const auto s1 = fock::build_coherent_cat(1.0, oracle_dim(1.0));
  CHECK(fock::reduced_spin(s1).by == Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(fock::reduced_spin(s).by == Approx(std::exp(-8.0)).epsilon(1e-10));
}

TEST_CASE("hermite functions: values, parity, normalization") {
  CHECK(fock::hermite_wavefunction(0, 0.0) == Approx(std::pow(kPi, -0.25)).epsilon(1e-14));
  CHECK(fock::hermite_wavefunction(1, 0.0) == 0.0);
  const QuadratureGrid g = QuadratureGrid::symmetric(10.0, 0.002);
  std::vector<double> sq(g.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double v = fock::hermite_wavefunction(5, g.point(i));
    sq[i] = v * v;
  }
  CHECK(trapezoid(sq, g.step) == Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(fock::hermite_wavefunction(-1, 0.0), std::invalid_argument);
}

TEST_CASE("spin projection probabilities") {
  for (double alpha : {0.5, 2.0}) {
    const auto s = fock::build_coherent_cat(alpha, oracle_dim(alpha));
    for (Setting set : {Setting::Z, Setting::X, Setting::Y}) {
      const double pp = fock::project_spin(s, set, +1).first;
      const double pm = fock::project_spin(s, set, -1).first;
      CHECK(pp + pm == Approx(1.0).epsilon(1e-12));
      if (set != Setting::Y) CHECK(pp == Approx(0.5).epsilon(1e-12));
    }
    // sigma_Y probabilities carry the overlap bias
    CHECK(fock::project_spin(s, Setting::Y, +1).first ==
          Approx(0.5 * (1.0 + std::exp(-2.0 * alpha * alpha))).epsilon(1e-12));
  }
}

TEST_CASE("oracle densities reproduce the closed forms") {
  std::mt19937_64 rng(11);
  for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
    const CatState cat(alpha);
    const auto s = fock::build_coherent_cat(alpha, oracle_dim(alpha));
    std::uniform_real_distribution<double> ux(-(kSqrt2 * alpha + 4.0),
                                              kSqrt2 * alpha + 4.0);
    std::uniform_real_distribution<double> up(-4.0, 4.0);
    for (int outcome : {+1, -1}) {
      const auto condz = fock::project_spin(s, Setting::Z, outcome).second;
      const auto condx = fock::project_spin(s, Setting::X, outcome).second;
      for (int k = 0; k < 25; ++k) {
        const double x = ux(rng), p = up(rng);
        CHECK(std::abs(fock::quadrature_density(condz, Basis::X, x) -
                       analytic_cat::cond_x_density(cat, outcome, x)) < 1e-8);
        CHECK(std::abs(fock::quadrature_density(condx, Basis::P, p) -
                       analytic_cat::cond_p_density(cat, outcome, p)) < 1e-8);
      }
    }
  }
}

TEST_CASE("specific oracle values behind the analytic spot checks") {
  // vacuum ground state and displaced ground state peak
  fock::OscillatorState vac;
  vac.amplitudes.assign(8, {0, 0});
  vac.amplitudes[0] = {1, 0};
  CHECK(fock::quadrature_density(vac, Basis::X, 0.0) == Approx(kInvSqrtPi).epsilon(1e-12));

  fock::OscillatorState coh;
  const auto c = fock::coherent_amplitudes(2.0, oracle_dim(2.0));
  coh.amplitudes.assign(c.size(), {0, 0});
  for (std::size_t n = 0; n < c.size(); ++n) coh.amplitudes[n] = {c[n], 0.0};
  CHECK(fock::quadrature_density(coh, Basis::X, 2.0 * kSqrt2) ==
        Approx(kInvSqrtPi).epsilon(1e-8));
}

TEST_CASE("ladder moments match wavefunction moments (phase conventions)") {
  const auto s = fock::build_coherent_cat(1.5, oracle_dim(1.5));
  for (Setting set : {Setting::Z, Setting::X, Setting::Y}) {
    const auto cond = fock::project_spin(s, set, +1).second;
    const auto lm = fock::ladder_moments(cond);
    const auto nx = numeric_quadrature_moments(cond, Basis::X, 10.0);
    const auto np = numeric_quadrature_moments(cond, Basis::P, 10.0);
    CHECK(lm.x.mean == Approx(nx.mean).epsilon(1e-10));
    CHECK(std::abs(lm.x.variance - nx.variance) < 1e-10);
    CHECK(lm.p.mean == Approx(np.mean).epsilon(1e-10));
    CHECK(std::abs(lm.p.variance - np.variance) < 1e-10);
  }
}

TEST_CASE("conditioned states respect the Heisenberg floor") {
  for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
    const auto s = fock::build_coherent_cat(alpha, oracle_dim(alpha));
    for (Setting set : {Setting::Z, Setting::X, Setting::Y})
      for (int outcome : {+1, -1}) {
        const auto cond = fock::project_spin(s, set, outcome).second;
        const auto lm = fock::ladder_moments(cond);
        CHECK(std::sqrt(lm.x.variance * lm.p.variance) >= 0.5 - 1e-11);
      }
  }
}

TEST_CASE("impossible outcomes raise instead of returning NaN states") {
  // spin-up product state: sigma_Z = -1 has zero probability
  fock::JointFockState s;
  s.up.assign(8, {0, 0});
  s.down.assign(8, {0, 0});
  s.up[0] = {1, 0};
  CHECK_THROWS_AS(fock::project_spin(s, Setting::Z, -1), ImpossibleOutcomeError);
  // vacuum is even: odd parity impossible
  CHECK_THROWS_AS(fock::parity_condition(s, -1), ImpossibleOutcomeError);
  const auto [p, b] = fock::parity_condition(s, +1);
  CHECK(p == Approx(1.0).epsilon(1e-14));
  CHECK(b.bz == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("parity conditioning pins the spin on the sigma_Y axis") {
  for (double alpha : {1.0, 2.0}) {
    const auto s = fock::build_coherent_cat(alpha, oracle_dim(alpha));
    const auto [pe, be] = fock::parity_condition(s, +1);
    const auto [po, bo] = fock::parity_condition(s, -1);
    CHECK(pe + po == Approx(1.0).epsilon(1e-12));
    const double bias = std::exp(-2.0 * alpha * alpha);
    CHECK(pe == Approx(0.5 * (1.0 + bias)).epsilon(1e-12));
    CHECK(be.by == Approx(+1.0).epsilon(1e-12));
    CHECK(bo.by == Approx(-1.0).epsilon(1e-12));
    CHECK(be.length() == Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("x-sign conditioning: probabilities and near-definite sigma_Z") {
  const auto s = fock::build_coherent_cat(2.0, oracle_dim(2.0));
  const auto [pos, neg] = fock::condition_on_x_sign(s, kSqrt2 * 2.0 + 8.0);
  CHECK(pos.first + neg.first == Approx(1.0).epsilon(1e-9));
  CHECK(pos.first == Approx(0.5).epsilon(1e-6));
  CHECK(pos.second.bz > 0.999);
  CHECK(neg.second.bz < -0.999);
}

TEST_CASE("spin steering witness: regression fixtures, never violates") {
  const auto s2 = fock::build_coherent_cat(2.0, oracle_dim(2.0));
  const auto r2 = fock::spin_steering_witness(s2, kSqrt2 * 2.0 + 8.0);
  CHECK(r2.lhs >= 0.0);
  CHECK(r2.bound == Approx(0.5 * std::exp(-8.0)).epsilon(1e-9));
  CHECK_FALSE(r2.violated);
  CHECK(r2.lhs == Approx(0.011256848551668).epsilon(1e-9));  // frozen fixture

  const auto s05 = fock::build_coherent_cat(0.5, oracle_dim(0.5));
  const auto r05 = fock::spin_steering_witness(s05, kSqrt2 * 0.5 + 8.0);
  CHECK(r05.bound == Approx(0.5 * std::exp(-0.5)).epsilon(1e-9));
  CHECK_FALSE(r05.violated);
  CHECK(r05.lhs == Approx(0.730716135074836).epsilon(1e-9));  // frozen fixture
}
