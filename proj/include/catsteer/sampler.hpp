#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "catsteer/analytic_cat.hpp"
#include "catsteer/common.hpp"
#include "catsteer/ghz.hpp"
#include "catsteer/grid.hpp"
#include "catsteer/steering.hpp"

namespace catsteer {
namespace mc {

// Stream derivation: mt19937_64 engines seeded through splitmix64 of
// (master seed, plan-entry index, shot block), so per-block sampling is
// reproducible independently of scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t entry,
                                     std::uint64_t block) {
  return std::mt19937_64(
      splitmix64(splitmix64(seed ^ (entry * 0x9e3779b97f4a7c15ULL)) + block));
}

inline constexpr std::uint64_t kShotBlock = 4096;

struct PlanEntry {
  Setting alice_setting = Setting::Z;
  std::string bob_observable;  // "X", "P", "sz_b", "pr_y"
  double fraction = 0.0;
};

struct SampleConfig {
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  std::vector<PlanEntry> plan;

  void validate() const {
    if (shots == 0) throw std::invalid_argument("shots must be > 0");
    if (plan.empty()) throw std::invalid_argument("empty settings plan");
    double f = 0.0;
    for (const auto& e : plan) f += e.fraction;
    if (std::abs(f - 1.0) > 1e-12)
      throw std::invalid_argument("plan fractions must sum to 1");
  }

  static SampleConfig coherent_default(std::uint64_t shots, std::uint64_t seed) {
    return {shots, seed,
            {{Setting::Z, "X", 0.5}, {Setting::X, "P", 0.5}}};
  }
  static SampleConfig ghz_default(std::uint64_t shots, std::uint64_t seed) {
    return {shots, seed,
            {{Setting::Z, "sz_b", 0.5}, {Setting::X, "pr_y", 0.5}}};
  }
};

struct SampleRecord {
  std::string alice_setting;
  int alice_outcome = +1;
  std::string bob_observable;
  double bob_value = 0.0;
};

// Tabulated inverse-CDF sampler for a smooth 1-D density.
class InverseCdfSampler {
 public:
  InverseCdfSampler(const QuadratureGrid& g, const std::vector<double>& density)
      : grid_(g), cdf_(density.size(), 0.0) {
    for (std::size_t i = 1; i < density.size(); ++i)
      cdf_[i] = cdf_[i - 1] + 0.5 * (density[i - 1] + density[i]) * g.step;
    const double total = cdf_.back();
    for (double& c : cdf_) c /= total;
  }

  double operator()(double u) const {
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.begin()) return grid_.min;
    if (it == cdf_.end()) return grid_.max;
    const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
    const double c0 = cdf_[i - 1], c1 = cdf_[i];
    const double t = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.0;
    return grid_.point(i - 1) + t * grid_.step;
  }

 private:
  QuadratureGrid grid_;
  std::vector<double> cdf_;
};

// Born-rule sampling of (setting, outcome, Bob value) records for the
// coherent realisation. X values by tabulated inverse CDF; P values by
// rejection against the fringe envelope (2/sqrt(pi)) e^{-p^2}, acceptance
// ratio (1 + outcome sin(2 sqrt2 alpha p))/2.
inline std::vector<SampleRecord> sample_coherent_cat(const CatState& cat,
                                                     const SampleConfig& cfg) {
  cfg.validate();
  std::vector<SampleRecord> out;
  out.reserve(cfg.shots);

  // X-basis inverse-CDF tables per outcome
  const double span = kSqrt2 * cat.alpha + 8.0;
  const QuadratureGrid gx = QuadratureGrid::symmetric(span, 0.005);
  std::vector<InverseCdfSampler> xsamplers;
  for (int outcome : {+1, -1}) {
    std::vector<double> d(gx.size());
    for (std::size_t i = 0; i < d.size(); ++i)
      d[i] = analytic_cat::cond_x_density(cat, outcome, gx.point(i));
    xsamplers.emplace_back(gx, d);
  }

  std::uint64_t assigned = 0;
  for (std::size_t e = 0; e < cfg.plan.size(); ++e) {
    const auto& entry = cfg.plan[e];
    const std::uint64_t n =
        (e + 1 == cfg.plan.size())
            ? cfg.shots - assigned
            : static_cast<std::uint64_t>(std::llround(entry.fraction * cfg.shots));
    assigned += n;
    const std::string setting_label =
        std::string("sigma_") + to_string(entry.alice_setting);
    for (std::uint64_t block = 0; block * kShotBlock < n; ++block) {
      // fresh engine and distributions per block: no generator state leaks
      // across blocks, so blocks could be produced in any order
      auto rng = stream_engine(cfg.seed, e, block);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      std::normal_distribution<double> envelope(0.0, 1.0 / kSqrt2);
      const std::uint64_t hi = std::min(n, (block + 1) * kShotBlock);
      for (std::uint64_t shot = block * kShotBlock; shot < hi; ++shot) {
        const int outcome = (unif(rng) < 0.5) ? +1 : -1;  // both settings fair
        SampleRecord rec;
        rec.alice_setting = setting_label;
        rec.alice_outcome = outcome;
        rec.bob_observable = entry.bob_observable;
        if (entry.bob_observable == "X") {
          rec.bob_value = xsamplers[outcome == +1 ? 0 : 1](unif(rng));
        } else if (entry.bob_observable == "P") {
          const double k = 2.0 * kSqrt2 * cat.alpha;
          for (;;) {
            const double p = envelope(rng);
            if (unif(rng) < 0.5 * (1.0 + outcome * std::sin(k * p))) {
              rec.bob_value = p;
              break;
            }
          }
        } else {
          throw std::invalid_argument("unknown Bob observable " +
                                      entry.bob_observable);
        }
        out.push_back(std::move(rec));
      }
    }
  }
  return out;
}

inline std::vector<SampleRecord> sample_ghz(int n, const SampleConfig& cfg) {
  cfg.validate();
  const ghz::QubitState psi = ghz::build_ghz(n);
  std::vector<SampleRecord> out;
  out.reserve(cfg.shots);

  std::uint64_t assigned = 0;
  for (std::size_t e = 0; e < cfg.plan.size(); ++e) {
    const auto& entry = cfg.plan[e];
    const std::uint64_t count =
        (e + 1 == cfg.plan.size())
            ? cfg.shots - assigned
            : static_cast<std::uint64_t>(std::llround(entry.fraction * cfg.shots));
    assigned += count;

    // exact conditional distributions for both outcomes, precomputed
    struct Branch {
      double prob;
      std::vector<double> support;
      std::vector<double> cdf;
    };
    std::vector<Branch> branches;
    for (int outcome : {+1, -1}) {
      const auto [prob, cond] = ghz::alice_condition(psi, entry.alice_setting, outcome);
      Branch b;
      b.prob = prob;
      if (entry.bob_observable == "sz_b") {
        const auto dist = ghz::collective_sz_dist(cond);
        b.support = dist.support;
        double acc = 0.0;
        for (double p : dist.probabilities) b.cdf.push_back(acc += p);
      } else if (entry.bob_observable == "pr_y") {
        const double mean = ghz::pr_y(cond).mean;
        b.support = {-1.0, +1.0};
        b.cdf = {0.5 * (1.0 - mean), 1.0};
      } else {
        throw std::invalid_argument("unknown Bob observable " +
                                    entry.bob_observable);
      }
      branches.push_back(std::move(b));
    }

    const std::string setting_label =
        std::string("sigma_") + to_string(entry.alice_setting);
    for (std::uint64_t block = 0; block * kShotBlock < count; ++block) {
      auto rng = stream_engine(cfg.seed, e, block);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      const std::uint64_t hi = std::min(count, (block + 1) * kShotBlock);
      for (std::uint64_t shot = block * kShotBlock; shot < hi; ++shot) {
        const double u = unif(rng);
        const int idx = (u < branches[0].prob) ? 0 : 1;
        const auto& b = branches[idx];
        const double v = unif(rng);
        std::size_t j = 0;
        while (j + 1 < b.cdf.size() && v > b.cdf[j]) ++j;
        SampleRecord rec;
        rec.alice_setting = setting_label;
        rec.alice_outcome = (idx == 0) ? +1 : -1;
        rec.bob_observable = entry.bob_observable;
        rec.bob_value = b.support[j];
        out.push_back(std::move(rec));
      }
    }
  }
  return out;
}

struct EstimateReport {
  double witness_lhs = 0.0;
  double bound = 0.5;
  double stderr_lhs = 0.0;
  bool violated_at_3sigma = false;
  double var_inf_a = 0.0;
  double var_inf_b = 0.0;
};

struct EstimateOptions {
  double bound = 0.5;
  int bootstrap_resamples = 200;
  std::uint64_t bootstrap_seed = 0x626f6f74ULL;
  std::size_t min_cell = 10;
};

namespace detail {

struct Cell {
  std::vector<double> values;
};

using Groups = std::map<std::string, std::map<int, Cell>>;

inline double inference_variance_of_group(const std::map<int, Cell>& cells,
                                          std::size_t min_cell) {
  std::size_t total = 0;
  for (const auto& [outcome, cell] : cells) {
    if (cell.values.size() < min_cell)
      throw std::invalid_argument(
          "conditioning cell with fewer than " + std::to_string(min_cell) +
          " records");
    total += cell.values.size();
  }
  double v = 0.0;
  for (const auto& [outcome, cell] : cells) {
    const double w =
        static_cast<double>(cell.values.size()) / static_cast<double>(total);
    double m = 0.0;
    for (double x : cell.values) m += x;
    m /= cell.values.size();
    double s2 = 0.0;
    for (double x : cell.values) s2 += (x - m) * (x - m);
    s2 /= (cell.values.size() - 1);
    v += w * s2;
  }
  return v;
}

}  // namespace detail

// Plug-in witness estimate with nonparametric bootstrap standard error.
inline EstimateReport estimate_witness(const std::vector<SampleRecord>& records,
                                       const EstimateOptions& opts = {}) {
  detail::Groups groups;
  for (const auto& r : records)
    groups[r.alice_setting + "/" + r.bob_observable][r.alice_outcome]
        .values.push_back(r.bob_value);
  if (groups.size() != 2)
    throw std::invalid_argument(
        "estimate_witness needs exactly two setting/observable pairs, got " +
        std::to_string(groups.size()));

  const auto lhs_of = [&](const detail::Groups& g) {
    double prod = 1.0;
    for (const auto& [key, cells] : g)
      prod *= detail::inference_variance_of_group(cells, opts.min_cell);
    return std::sqrt(prod);
  };

  EstimateReport rep;
  rep.bound = opts.bound;
  {
    std::vector<double> vars;
    for (const auto& [key, cells] : groups)
      vars.push_back(detail::inference_variance_of_group(cells, opts.min_cell));
    rep.var_inf_a = vars[0];
    rep.var_inf_b = vars[1];
    rep.witness_lhs = std::sqrt(vars[0] * vars[1]);
  }

  // stratified bootstrap: resample within each conditioning cell
  std::mt19937_64 rng(splitmix64(opts.bootstrap_seed));
  std::vector<double> boots;
  boots.reserve(opts.bootstrap_resamples);
  for (int b = 0; b < opts.bootstrap_resamples; ++b) {
    detail::Groups resampled;
    for (const auto& [key, cells] : groups)
      for (const auto& [outcome, cell] : cells) {
        auto& target = resampled[key][outcome].values;
        target.resize(cell.values.size());
        std::uniform_int_distribution<std::size_t> pick(0,
                                                        cell.values.size() - 1);
        for (auto& v : target) v = cell.values[pick(rng)];
      }
    boots.push_back(lhs_of(resampled));
  }
  double bm = 0.0;
  for (double x : boots) bm += x;
  bm /= boots.size();
  double bs = 0.0;
  for (double x : boots) bs += (x - bm) * (x - bm);
  rep.stderr_lhs = std::sqrt(bs / (boots.size() - 1));
  rep.violated_at_3sigma =
      rep.witness_lhs + 3.0 * rep.stderr_lhs < rep.bound;
  return rep;
}

}  // namespace mc
}  // namespace catsteer
