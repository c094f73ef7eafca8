#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "catsteer/analytic_cat.hpp"
#include "catsteer/common.hpp"
#include "catsteer/sampler.hpp"
#include "catsteer/steering.hpp"

namespace catsteer {
namespace io {

inline constexpr const char* kToolVersion = "0.1.0";

// Round-trip decimal formatting, locale-independent ('.' separator; the
// process never installs a locale).
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Atomic write: temp file in the target directory, then rename.
inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

inline nlohmann::json manifest(const std::string& command,
                               const nlohmann::json& parameters) {
  const auto now = std::chrono::system_clock::now();
  const auto secs =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
          .count();
  return nlohmann::json{{"command", command},
                        {"parameters", parameters},
                        {"tool_version", kToolVersion},
                        {"timestamp_unix", secs}};
}

// Data files themselves are deterministic given the flag set; the wall-clock
// timestamp lives only in the manifest sidecar.
inline void write_manifest(const std::filesystem::path& data_path,
                           const std::string& command,
                           const nlohmann::json& parameters) {
  write_file(data_path.string() + ".manifest.json",
             manifest(command, parameters).dump(2) + "\n");
}

inline std::string dist_csv(const ConditionalDist& d) {
  std::string s = "coordinate,density\n";
  for (std::size_t i = 0; i < d.densities.size(); ++i)
    s += fmt(d.grid.point(i)) + "," + fmt(d.densities[i]) + "\n";
  return s;
}

inline nlohmann::json dist_json(const ConditionalDist& d) {
  nlohmann::json j;
  j["basis"] = to_string(d.basis);
  j["alice_setting"] = to_string(d.alice_setting);
  j["alice_outcome"] = d.alice_outcome;
  j["grid"] = {{"min", d.grid.min}, {"max", d.grid.max}, {"step", d.grid.step}};
  j["coordinate"] = d.grid.points();
  j["density"] = d.densities;
  return j;
}

inline nlohmann::json report_json(const SteeringReport& r) {
  return nlohmann::json{{"lhs", r.lhs},
                        {"bound", r.bound},
                        {"violated", r.violated},
                        {"margin", r.margin}};
}

inline std::string records_csv(const std::vector<mc::SampleRecord>& records) {
  std::string s = "alice_setting,alice_outcome,bob_observable,bob_value\n";
  for (const auto& r : records) {
    s += r.alice_setting;
    s += ',';
    s += (r.alice_outcome > 0 ? "1" : "-1");
    s += ',';
    s += r.bob_observable;
    s += ',';
    s += fmt(r.bob_value);
    s += '\n';
  }
  return s;
}

// ---- figure data emission (shared by the CLI and the acceptance suite) ----

struct Fig1Defaults {
  // X panels span +-(sqrt2 alpha + 8); P panels span +-8 with 8 samples per
  // fringe period.
  static QuadratureGrid grid_x(double alpha) {
    return QuadratureGrid::symmetric(kSqrt2 * alpha + 8.0,
                                     0.01 * std::min(1.0, 1.0 / std::max(alpha, 1e-12)));
  }
  static QuadratureGrid grid_p(double alpha) {
    const double step = alpha > 0.0 ? fringe_period(alpha) / 8.0 : 0.05;
    return QuadratureGrid::symmetric(8.0, std::min(step, 0.05));
  }
};

inline std::vector<std::filesystem::path> emit_fig1(
    double alpha, const std::filesystem::path& dir) {
  const CatState cat(alpha);
  const auto gx = Fig1Defaults::grid_x(alpha);
  const auto gp = Fig1Defaults::grid_p(alpha);
  std::vector<std::filesystem::path> written;
  for (int lz : {+1, -1})
    for (int lx : {+1, -1}) {
      const auto pred = analytic_cat::element_of_reality_predictions(
          cat, {lz, lx}, gx, gp);
      const auto tag = [](int v) { return v > 0 ? std::string("p1") : std::string("m1"); };
      const auto base = "eor_lz" + tag(lz) + "_lx" + tag(lx);
      const auto fx = dir / (base + "_x.csv");
      const auto fp = dir / (base + "_p.csv");
      write_file(fx, dist_csv(pred.first));
      write_file(fp, dist_csv(pred.second));
      written.push_back(fx);
      written.push_back(fp);
    }
  return written;
}

struct Fig2Grids {
  QuadratureGrid gx;
  QuadratureGrid gp;
};

// The x panel brackets the single hill of the lambda_z = +1 state; the p
// panel places 32 samples per fringe period: with n samples the worst-case
// sampled fringe contrast is cos(pi/n)-limited, and n = 32 keeps it > 0.99.
inline Fig2Grids fig2_grids(double alpha) {
  const double cx = kSqrt2 * alpha;
  QuadratureGrid gx(cx - 6.0, cx + 6.0, 0.05);
  const double step =
      alpha > 0.0 ? std::min(0.05, fringe_period(alpha) / 32.0) : 0.05;
  QuadratureGrid gp = QuadratureGrid::symmetric(3.0, step);
  return {gx, gp};
}

inline std::string fig2_csv(const QuadratureGrid& gx, const QuadratureGrid& gp,
                            const std::vector<std::vector<double>>& m) {
  // rows indexed by p, columns by x; header row carries the x coordinates
  std::string s = "p";
  for (std::size_t i = 0; i < gx.size(); ++i) s += ",x=" + fmt(gx.point(i));
  s += '\n';
  for (std::size_t j = 0; j < gp.size(); ++j) {
    s += fmt(gp.point(j));
    for (std::size_t i = 0; i < gx.size(); ++i) s += "," + fmt(m[i][j]);
    s += '\n';
  }
  return s;
}

inline std::filesystem::path emit_fig2_panel(double alpha,
                                             const std::filesystem::path& dir) {
  const CatState cat(alpha);
  const auto g = fig2_grids(alpha);
  const auto m = analytic_cat::fig2_density_grid(cat, {+1, +1}, g.gx, g.gp);
  const auto path = dir / ("fig2_alpha" + fmt(alpha) + ".csv");
  write_file(path, fig2_csv(g.gx, g.gp, m));
  return path;
}

}  // namespace io
}  // namespace catsteer
