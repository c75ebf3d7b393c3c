#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ippopt/hj.hpp"
#include "ippopt/io.hpp"

namespace ippopt {

struct BenchResult {
  RunReport report;
  SummaryRow row;
  Vector shift;
};

/// One run per seed, `jobs` at a time (0 = hardware concurrency). Results are
/// sorted by seed.
std::vector<BenchResult> run_bench(const RunConfig& config, int jobs = 0);

/// Writes config.json, one <function>_d<d>_<solver>_seed<s>.jsonl trace per
/// seed (a "run" header line, one "iter" line per record, a closing "report"
/// line) and summary.csv into `dir`, creating it if needed.
void write_bench_artifacts(const RunConfig& config, const std::vector<BenchResult>& results,
                           const std::string& dir);

struct ProxStudyConfig {
  std::string function = "ackley";
  int dim = 2;
  /// Benchmark shift seed; unset means unshifted.
  std::optional<std::uint64_t> shift_seed;
  /// Anchor points; when empty, anchor_count uniform points in the box.
  std::vector<Vector> anchors;
  int anchor_count = 4;
  double t = 2.0;
  std::vector<double> deltas{0.4, 0.2, 0.1, 0.05};
  /// Any of "mc", "tt", "dense".
  std::vector<std::string> methods{"mc", "tt", "dense"};
  int mc_samples = 10000;
  /// Mesh spacing used by "tt" and "dense".
  double h = 0.05;
  /// Spacing of the dense reference mesh.
  double reference_h = 0.01;
  CrossConfig cross;
  std::uint64_t seed = 1;
};

ProxStudyConfig prox_study_config_from_json(const json& j);
json to_json(const ProxStudyConfig& c);

struct ProxStudyRow {
  Vector x;
  double t = 0.0;
  double delta = 0.0;
  std::string method;
  Vector estimate;
  /// ||estimate - dense Gibbs mean on the reference mesh||_2.
  double error = 0.0;
  /// ||estimate - prox node on the reference mesh||_2.
  double prox_error = 0.0;
};

/// Throws std::invalid_argument when d > 3 (dense reference).
std::vector<ProxStudyRow> prox_study(const ProxStudyConfig& config);
void write_prox_study_csv(std::ostream& os, const std::vector<ProxStudyRow>& rows);

struct TTDemoConfig {
  std::string function = "ackley";
  int dim = 2;
  std::optional<std::uint64_t> shift_seed;
  double delta = 0.1;
  double h = 0.1;
  CrossConfig cross;
  int probes = 1000;
  std::uint64_t seed = 1;
};

TTDemoConfig tt_demo_config_from_json(const json& j);
json to_json(const TTDemoConfig& c);

struct TTDemoResult {
  TensorTrain tt;
  std::vector<int> ranks;
  bool converged = false;
  bool rank_capped = false;
  int sweeps = 0;
  std::uint64_t oracle_calls = 0;
  /// Relative l2 error over random probe entries.
  double probe_error = 0.0;
  double seconds = 0.0;
};

/// Cross-approximates exp(-(f - min probe f) / delta) on the mesh and probes it.
TTDemoResult tt_demo(const TTDemoConfig& config);
json to_json(const TTDemoResult& r);

struct HJRunConfig {
  /// "f1", "f2" or "quadratic".
  std::string initial_condition = "f2";
  int dim = 4;
  double p = 2.0;
  double t = 1.0;
  int points = 100;
  /// Sample points are uniform on [-radius, radius]^d.
  double radius = 2.0;
  double fd_step = 1e-3;
  std::string inner_solver;
  /// Overrides applied on top of hj_inner_defaults.
  json inner = json::object();
  std::uint64_t seed = 1;
};

HJRunConfig hj_run_config_from_json(const json& j);
json to_json(const HJRunConfig& c);

/// The problem described by the config (inner overrides applied).
HJProblem make_hj_problem(const HJRunConfig& c);

struct HJRunResult {
  std::vector<HJSample> samples;
  /// sqrt(mean r^2).
  double l2_residual = 0.0;
};

HJRunResult run_hj(const HJRunConfig& config, int jobs = 0);
void write_hj_csv(std::ostream& os, const HJRunResult& r);

/// Directory from IPPOPT_OUT_DIR, else "ippopt-out".
std::string default_out_dir();

}  // namespace ippopt
