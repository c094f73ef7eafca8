// catsteer: command-line front end for the cat-state EPR-steering toolkit.
// Emits machine-readable data only (CSV / JSON); no plotting.
//
// Exit codes: 0 success, 2 usage error, 3 numerical-validity error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "catsteer/analytic_cat.hpp"
#include "catsteer/coarse_grain.hpp"
#include "catsteer/common.hpp"
#include "catsteer/ghz.hpp"
#include "catsteer/io.hpp"
#include "catsteer/parallel.hpp"
#include "catsteer/sampler.hpp"
#include "catsteer/steering.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace catsteer;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

QuadratureGrid parse_grid(const std::string& spec) {
  std::istringstream in(spec);
  std::string part;
  std::vector<double> v;
  while (std::getline(in, part, ':')) v.push_back(std::stod(part));
  if (v.size() != 3) throw std::invalid_argument("grid must be min:max:step");
  return QuadratureGrid(v[0], v[1], v[2]);
}

int parse_outcome(const std::string& s) {
  if (s == "+1" || s == "1") return +1;
  if (s == "-1") return -1;
  throw std::invalid_argument("outcome must be +1 or -1");
}

void emit(const fs::path& out, const std::string& content,
          const std::string& command, const json& params) {
  io::write_file(out, content);
  io::write_manifest(out, command, params);
}

int cmd_dist(double alpha, const std::string& setting,
             const std::string& outcome_s, const std::string& basis,
             const std::string& grid_s, const std::string& out,
             const std::string& format) {
  const int outcome = parse_outcome(outcome_s);
  const QuadratureGrid grid = parse_grid(grid_s);
  const CatState cat(alpha);
  ConditionalDist d;
  if (setting == "z" && basis == "x")
    d = analytic_cat::tabulate_x(cat, outcome, grid);
  else if (setting == "x" && basis == "p")
    d = analytic_cat::tabulate_p(cat, outcome, grid);
  else
    throw std::invalid_argument(
        "supported pairings: --setting z --basis x, --setting x --basis p");
  const json params = {{"alpha", alpha},       {"setting", setting},
                       {"outcome", outcome},   {"basis", basis},
                       {"grid", grid_s},       {"format", format}};
  if (format == "csv") {
    emit(out, io::dist_csv(d), "dist", params);
  } else {
    json j = io::dist_json(d);
    j["manifest"] = io::manifest("dist", params);
    io::write_file(out, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_fig1(double alpha, const std::string& out_dir) {
  const auto files = io::emit_fig1(alpha, out_dir);
  for (const auto& f : files)
    io::write_manifest(f, "fig1", {{"alpha", alpha}, {"out", out_dir}});
  std::cout << files.size() << " files written to " << out_dir << "\n";
  return 0;
}

int cmd_fig2(const std::vector<double>& alphas, const std::string& out_dir) {
  std::vector<fs::path> files(alphas.size());
  parallel_for(alphas.size(), [&](std::size_t i) {
    files[i] = io::emit_fig2_panel(alphas[i], out_dir);
  });
  for (std::size_t i = 0; i < files.size(); ++i)
    io::write_manifest(files[i], "fig2",
                       {{"alpha", alphas[i]}, {"out", out_dir}});
  std::cout << files.size() << " files written to " << out_dir << "\n";
  return 0;
}

int cmd_steer(const std::string& realisation, double alpha, int n,
              const std::string& out) {
  SteeringReport report;
  json params;
  if (realisation == "coherent") {
    report = analytic_cat::quadrature_witness(CatState(alpha));
    params = {{"realisation", realisation}, {"alpha", alpha}};
  } else if (realisation == "ghz") {
    report = ghz::ghz_steering_witness(n);
    params = {{"realisation", realisation}, {"n", n}};
  } else {
    throw std::invalid_argument("realisation must be coherent or ghz");
  }
  json j = io::report_json(report);
  j["manifest"] = io::manifest("steer", params);
  const std::string text = j.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    io::write_file(out, text);
  return 0;
}

int cmd_delta_scan(double alpha, const std::string& delta_grid,
                   bool find_critical, double tol, const std::string& out) {
  const CatState cat(alpha);
  if (find_critical) {
    const auto numeric = coarse_grain::critical_delta(cat, tol);
    const auto closed = coarse_grain::critical_delta_closed_form(cat);
    json j;
    j["alpha"] = alpha;
    j["tol"] = tol;
    if (numeric) {
      j["delta_star"] = *numeric;
      j["delta_star_closed_form"] = *closed;
    } else {
      j["delta_star"] = nullptr;
      j["note"] = "no steering signature at delta -> 0";
    }
    j["manifest"] = io::manifest("delta-scan", {{"alpha", alpha}, {"tol", tol}});
    const std::string text = j.dump(2) + "\n";
    if (out.empty())
      std::cout << text;
    else
      io::write_file(out, text);
    return 0;
  }
  const QuadratureGrid dg = parse_grid(delta_grid);
  std::string csv = "delta,var_inf_p,product,violated\n";
  std::vector<std::string> rows(dg.size());
  parallel_for(dg.size(), [&](std::size_t i) {
    const double delta = dg.point(i);
    const auto cv =
        coarse_grain::coarse_inference_variances_closed_form(cat, delta);
    const auto rep = product_witness(cv.var_inf_x, cv.var_inf_p, 0.5);
    rows[i] = io::fmt(delta) + "," + io::fmt(cv.var_inf_p) + "," +
              io::fmt(rep.lhs) + "," + (rep.violated ? "true" : "false") + "\n";
  });
  for (const auto& r : rows) csv += r;
  if (out.empty())
    std::cout << csv;
  else
    emit(out, csv, "delta-scan", {{"alpha", alpha}, {"delta", delta_grid}});
  return 0;
}

int cmd_falsifiability(double Delta, double delta, double c,
                       const std::string& out) {
  const bool signifiable = falsifiability_2b(Delta, delta, c);
  json j = {{"Delta", Delta},
            {"delta", delta},
            {"c", c},
            {"signifiable", signifiable}};
  j["manifest"] = io::manifest(
      "falsifiability", {{"Delta", Delta}, {"delta", delta}, {"c", c}});
  const std::string text = j.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    io::write_file(out, text);
  return 0;
}

int cmd_sample(const std::string& realisation, double alpha, int n,
               std::uint64_t shots, std::uint64_t seed,
               const std::string& out_prefix) {
  std::vector<mc::SampleRecord> records;
  mc::EstimateOptions opts;
  json params = {{"realisation", realisation}, {"shots", shots}, {"seed", seed}};
  if (realisation == "coherent") {
    records = mc::sample_coherent_cat(
        CatState(alpha), mc::SampleConfig::coherent_default(shots, seed));
    params["alpha"] = alpha;
  } else if (realisation == "ghz") {
    records = mc::sample_ghz(n, mc::SampleConfig::ghz_default(shots, seed));
    // for GHZ records the bound comes from the exact witness construction
    opts.bound = ghz::ghz_steering_witness(n).bound;
    params["n"] = n;
  } else {
    throw std::invalid_argument("realisation must be coherent or ghz");
  }
  const fs::path csv_path = out_prefix + ".csv";
  emit(csv_path, io::records_csv(records), "sample", params);

  const auto est = mc::estimate_witness(records, opts);
  json j = {{"witness_lhs", est.witness_lhs},
            {"bound", est.bound},
            {"stderr_lhs", est.stderr_lhs},
            {"violated_at_3sigma", est.violated_at_3sigma}};
  j["manifest"] = io::manifest("sample", params);
  io::write_file(out_prefix + ".report.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cat-state EPR-steering toolkit"};
  app.require_subcommand(1);

  // dist
  double alpha = 2.0;
  std::string setting = "z", outcome = "+1", basis = "x";
  std::string grid_s, out, format = "csv";
  auto* dist = app.add_subcommand("dist", "tabulate a conditional density");
  dist->add_option("--alpha", alpha)->required();
  dist->add_option("--setting", setting)->check(CLI::IsMember({"z", "x"}));
  dist->add_option("--outcome", outcome);
  dist->add_option("--basis", basis)->check(CLI::IsMember({"x", "p"}));
  dist->add_option("--grid", grid_s)->required();
  dist->add_option("--out", out)->required();
  dist->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  // fig1 / fig2
  double f1_alpha = 2.0;
  std::string f1_out;
  auto* fig1 = app.add_subcommand("fig1", "hidden-state prediction panels");
  fig1->add_option("--alpha", f1_alpha);
  fig1->add_option("--out", f1_out)->required();

  std::vector<double> f2_alphas = {2.0, 10.0, 100.0};
  std::string f2_out;
  auto* fig2 = app.add_subcommand("fig2", "x-p product density matrices");
  fig2->add_option("--alphas", f2_alphas)->delimiter(',');
  fig2->add_option("--out", f2_out)->required();

  // steer
  std::string st_real = "coherent", st_out;
  double st_alpha = 1.0;
  int st_n = 3;
  auto* steer = app.add_subcommand("steer", "evaluate a steering witness");
  steer->add_option("--realisation", st_real)->required();
  steer->add_option("--alpha", st_alpha);
  steer->add_option("--n", st_n);
  steer->add_option("--out", st_out);

  // delta-scan
  double ds_alpha = 2.0, ds_tol = 1e-6;
  std::string ds_grid, ds_out;
  bool ds_find = false;
  auto* dscan = app.add_subcommand("delta-scan", "coarse-graining scan");
  dscan->add_option("--alpha", ds_alpha)->required();
  dscan->add_option("--delta", ds_grid);
  dscan->add_flag("--find-critical", ds_find);
  dscan->add_option("--tol", ds_tol);
  dscan->add_option("--out", ds_out);

  // falsifiability
  double fb_Delta = 1.0, fb_delta = 0.5, fb_c = 0.5;
  std::string fb_out;
  auto* falsi = app.add_subcommand("falsifiability",
                                   "Delta*delta < c signifiability check");
  falsi->add_option("--Delta", fb_Delta)->required();
  falsi->add_option("--delta", fb_delta)->required();
  falsi->add_option("--c", fb_c);
  falsi->add_option("--out", fb_out);

  // sample
  std::string sm_real = "coherent", sm_out;
  double sm_alpha = 2.0;
  int sm_n = 3;
  std::uint64_t sm_shots = 0, sm_seed = 1;
  auto* sample = app.add_subcommand("sample", "finite-shot simulated runs");
  sample->add_option("--realisation", sm_real)->required();
  sample->add_option("--alpha", sm_alpha);
  sample->add_option("--n", sm_n);
  sample->add_option("--shots", sm_shots)->required();
  sample->add_option("--seed", sm_seed);
  sample->add_option("--out", sm_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*dist) return cmd_dist(alpha, setting, outcome, basis, grid_s, out, format);
    if (*fig1) return cmd_fig1(f1_alpha, f1_out);
    if (*fig2) return cmd_fig2(f2_alphas, f2_out);
    if (*steer) return cmd_steer(st_real, st_alpha, st_n, st_out);
    if (*dscan) {
      if (!ds_find && ds_grid.empty())
        throw std::invalid_argument("need --delta grid or --find-critical");
      return cmd_delta_scan(ds_alpha, ds_grid, ds_find, ds_tol, ds_out);
    }
    if (*falsi) return cmd_falsifiability(fb_Delta, fb_delta, fb_c, fb_out);
    if (*sample) {
      if (sm_shots == 0) throw std::invalid_argument("shots must be > 0");
      return cmd_sample(sm_real, sm_alpha, sm_n, sm_shots, sm_seed, sm_out);
    }
  } catch (const GridResolutionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ImpossibleOutcomeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
