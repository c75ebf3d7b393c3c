// ippopt: experiment runner for the inexact proximal point solvers.
//
//   ippopt bench      --config run.json [--seed N] [--max-evals N] [--solver NAME] [--out DIR]
//   ippopt prox-study --config study.json [--seed N] [--out DIR]
//   ippopt tt-demo    --config demo.json [--seed N] [--out DIR]
//   ippopt hj         --config hj.json [--seed N] [--max-evals N] [--solver NAME] [--out DIR]
//
// Flags override config fields, config fields override defaults. The output
// directory falls back to IPPOPT_OUT_DIR, then ./ippopt-out.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ippopt/experiments.hpp"

namespace {

using ippopt::json;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> max_evals;
  std::optional<std::string> solver;
  std::optional<std::string> out;
  int jobs = 0;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream is(path);
  if (!is) throw ippopt::ConfigError("config", "cannot open '" + path + "'");
  try {
    return json::parse(is, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ippopt::ConfigError("config", std::string("parse error: ") + e.what());
  }
}

std::string out_dir(const CommonFlags& flags, const std::string& from_config) {
  if (flags.out) return *flags.out;
  if (!from_config.empty()) return from_config;
  return ippopt::default_out_dir();
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path);
  os << j.dump(2) << '\n';
}

int run_bench(const CommonFlags& flags) {
  json j = load_config(flags.config);
  if (flags.seed) j["seeds"] = json::array({*flags.seed});
  if (flags.max_evals) j["max_evals"] = *flags.max_evals;
  if (flags.solver) j["solver"] = *flags.solver;
  const ippopt::RunConfig config = ippopt::run_config_from_json(j);
  const std::string dir = out_dir(flags, config.out_dir);
  const auto results = ippopt::run_bench(config, flags.jobs);
  ippopt::write_bench_artifacts(config, results, dir);
  ippopt::write_summary_header(std::cout);
  for (const auto& r : results) ippopt::write_summary_row(std::cout, r.row);
  return 0;
}

int run_prox_study(const CommonFlags& flags) {
  json j = load_config(flags.config);
  if (flags.seed) j["seed"] = *flags.seed;
  const ippopt::ProxStudyConfig config = ippopt::prox_study_config_from_json(j);
  const auto rows = ippopt::prox_study(config);
  const std::filesystem::path dir = out_dir(flags, "");
  std::filesystem::create_directories(dir);
  write_json(dir / "prox_study_config.json", ippopt::to_json(config));
  std::ofstream os(dir / "prox_study.csv");
  ippopt::write_prox_study_csv(os, rows);
  ippopt::write_prox_study_csv(std::cout, rows);
  return 0;
}

int run_tt_demo(const CommonFlags& flags) {
  json j = load_config(flags.config);
  if (flags.seed) j["seed"] = *flags.seed;
  const ippopt::TTDemoConfig config = ippopt::tt_demo_config_from_json(j);
  const auto result = ippopt::tt_demo(config);
  const std::filesystem::path dir = out_dir(flags, "");
  std::filesystem::create_directories(dir);
  json report = ippopt::to_json(result);
  report["config"] = ippopt::to_json(config);
  write_json(dir / "tt_demo.json", report);
  ippopt::save_tt(result.tt, (dir / "psi_tt.json").string());
  std::cout << ippopt::to_json(result).dump(2) << '\n';
  return 0;
}

int run_hj(const CommonFlags& flags) {
  json j = load_config(flags.config);
  if (flags.seed) j["seed"] = *flags.seed;
  if (flags.solver) j["inner_solver"] = *flags.solver;
  if (flags.max_evals) {
    if (!j.contains("inner")) j["inner"] = json::object();
    j["inner"]["max_evals"] = *flags.max_evals;
  }
  const ippopt::HJRunConfig config = ippopt::hj_run_config_from_json(j);
  const auto result = ippopt::run_hj(config, flags.jobs);
  const std::filesystem::path dir = out_dir(flags, "");
  std::filesystem::create_directories(dir);
  write_json(dir / "hj_config.json", ippopt::to_json(config));
  std::ofstream os(dir / "hj.csv");
  ippopt::write_hj_csv(os, result);
  std::cout << "points," << result.samples.size() << "\nl2_residual,"
            << ippopt::format_double(result.l2_residual) << '\n';
  return 0;
}

void add_common(CLI::App* sub, CommonFlags& flags, bool budget_and_solver) {
  sub->add_option("--config", flags.config, "JSON config file");
  sub->add_option("--seed", flags.seed, "Seed (bench: replaces the seed list)");
  sub->add_option("--out", flags.out, "Output directory");
  sub->add_option("--jobs", flags.jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  if (budget_and_solver) {
    sub->add_option("--max-evals", flags.max_evals, "Objective evaluation budget (hj: per inner solve)");
    sub->add_option("--solver", flags.solver, "bench: tt-ipp, mc-ipp or prs-baseline; hj: inner tt-ipp or mc-ipp");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inexact proximal point global optimization experiments"};
  app.require_subcommand(1);
  CommonFlags flags;
  auto* bench = app.add_subcommand("bench", "Run a solver on a catalog function over several seeds");
  auto* prox = app.add_subcommand("prox-study", "Compare MC, TT and dense prox estimates");
  auto* demo = app.add_subcommand("tt-demo", "Cross-approximate a Gibbs density and report ranks");
  auto* hj = app.add_subcommand("hj", "Hopf-Lax solves with residuals at random points");
  add_common(bench, flags, true);
  add_common(prox, flags, false);
  add_common(demo, flags, false);
  add_common(hj, flags, true);
  CLI11_PARSE(app, argc, argv);

  try {
    if (bench->parsed()) return run_bench(flags);
    if (prox->parsed()) return run_prox_study(flags);
    if (demo->parsed()) return run_tt_demo(flags);
    return run_hj(flags);
  } catch (const ippopt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
