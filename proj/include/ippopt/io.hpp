#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ippopt/benchfns.hpp"
#include "ippopt/ipp.hpp"
#include "ippopt/tensor_train.hpp"

namespace ippopt {

using json = nlohmann::json;

/// Thrown for malformed configs; field() names the offending key path.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

json to_json(const IPPParams& p);

/// Applies the keys of `j` on top of `base`. Unknown keys, wrong types and
/// out-of-range values throw ConfigError with the key path prefixed by `path`.
IPPParams params_from_json(const json& j, const IPPParams& base, const std::string& path = "params");

json to_json(const IterRecord& r);
json to_json(const RunReport& r);

std::string to_string(ShiftMode m);
ShiftMode shift_mode_from_string(const std::string& s);

struct RunConfig {
  std::string function = "ackley";
  int dim = 2;
  /// Explicit benchmark shift; when empty the shift is drawn by random_shift
  /// from shift_seed, or from each run seed if shift_seed is unset.
  std::vector<double> shift;
  std::optional<std::uint64_t> shift_seed;
  ShiftMode shift_mode = ShiftMode::kLattice;
  std::string solver = "tt-ipp";
  IPPParams params = IPPParams::tt_defaults();
  std::vector<std::uint64_t> seeds{1};
  /// Empty means the CLI default (IPPOPT_OUT_DIR or ./ippopt-out).
  std::string out_dir;
};

/// Solver defaults for "tt-ipp" (tt_defaults), "mc-ipp" and "prs-baseline"
/// (mc_defaults); throws ConfigError for anything else.
IPPParams solver_defaults(const std::string& solver);

/// Keys: function, dim, shift, shift_seed, shift_mode, solver, params,
/// max_evals, k_max, seeds, out_dir. Top-level max_evals / k_max override the
/// same fields in params. Throws ConfigError naming the bad key.
RunConfig run_config_from_json(const json& j);
json to_json(const RunConfig& c);

/// Shift used for the run with `seed`.
Vector config_shift(const RunConfig& c, std::uint64_t seed);

/// Catalog objective of the config for the run with `seed`.
Objective make_config_objective(const RunConfig& c, std::uint64_t seed);

/// Fixed column order of the benchmark summary.
const std::vector<std::string>& summary_columns();

struct SummaryRow {
  std::string name;
  int dim = 0;
  std::string solver;
  std::uint64_t seed = 0;
  double final_error_inf = 0.0;
  std::uint64_t evals = 0;
  std::string termination;
  double wallclock = 0.0;
};

void write_summary_header(std::ostream& os);
void write_summary_row(std::ostream& os, const SummaryRow& r);

/// Versioned JSON container: {"format": "ippopt-tt", "version": 1,
/// "mode_sizes": [...], "ranks": [...], "cores": [[row-major data], ...]}.
json tt_to_json(const TensorTrain& tt);
TensorTrain tt_from_json(const json& j);
void save_tt(const TensorTrain& tt, const std::string& path);
TensorTrain load_tt(const std::string& path);

/// Shortest decimal that round-trips the double.
std::string format_double(double v);

}  // namespace ippopt
