#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "ippopt/gibbs.hpp"
#include "ippopt/objective.hpp"
#include "ippopt/quadrature.hpp"
#include "ippopt/tt_cross.hpp"

namespace ippopt {

struct IPPParams {
  // Shared schedule.
  double delta0 = 0.1;
  double eta_minus = 0.5;
  double eta_plus = 2.0;
  double theta1 = 0.25;
  double theta2 = 0.75;
  double eps_bar = 0.2;
  double eta = 1e-3;
  double T = 20.0;
  double tau = 0.5;
  double t0 = 1.0;
  int m = 4;
  int k_max = 1000;
  double eps_stop = 1e-5;
  double delta_floor = 1e-8;
  /// 0 means unlimited.
  std::uint64_t max_evals = 0;
  /// When > 0 and the objective has a known minimizer, stop as soon as
  /// ||x - x*||_inf <= target_error.
  double target_error = 0.0;

  // TT-IPP.
  double h0 = 0.1;
  double gamma = 1.1;
  double C_mesh = 1e3;
  double round_tol = 1e-4;
  /// Refinement is skipped once a mode would exceed this many nodes.
  int max_mesh_points = 4097;
  /// Latin-hypercube points used to pick the energy shift.
  int shift_probe = 1000;
  CrossConfig cross;

  // MC-IPP.
  double alpha0 = 0.3;
  double alpha_min = 0.2;
  double alpha_max = 0.3;
  double p_reject = 0.8;
  /// 0 means 40 d.
  int N0 = 0;
  double C_growth = 1.1;
  double c_decay = 0.9;
  /// Warm-start samples are uniform on [-warm_radius, warm_radius]^d.
  double warm_radius = 3.0;
  int reject_cap = 10;

  static IPPParams tt_defaults();
  static IPPParams mc_defaults();

  /// Throws std::invalid_argument naming the first violated bound.
  void validate_common() const;
  void validate_tt() const;
  void validate_mc() const;
};

enum class Termination { kEpsStop, kBudget, kKMax, kTarget, kFailure };

std::string to_string(Termination t);
Termination termination_from_string(const std::string& s);

struct IterRecord {
  int k = 0;
  Vector x;
  double f_x = 0.0;
  double t = 0.0;
  double delta = 0.0;
  double q = 0.0;
  /// MC sample size (0 for TT).
  int N = 0;
  /// Mesh size (0 for MC).
  double h = 0.0;
  double alpha = 0.0;
  int tt_rank = 0;
  std::uint64_t evals = 0;
  bool delta_halved = false;
  bool mesh_refined = false;
  int rejected = 0;
};

struct RunReport {
  std::string solver;
  Vector x;
  double f = 0.0;
  std::vector<IterRecord> trace;
  std::uint64_t evals = 0;
  Termination termination = Termination::kKMax;
  std::string message;
  std::uint64_t seed = 0;
  IPPParams params;
};

/// Proximal step-size rule. `q_prev` is empty at k = 0.
double t_update(double q_k, std::optional<double> q_prev, double t_k, const IPPParams& p);

/// True when the decrease is insufficient: k >= m - 1 and
/// f_new > max(window) - eta / max(k, 1).
bool decrease_check(double f_new, const std::deque<double>& window, int k, double eta, int m);

/// Self-normalized mean of uniform samples on `box` weighted by
/// exp(-(f - min f) / delta0).
Vector warm_start_mc(const Objective& f, double delta0, int samples, const Box& box, Rng& rng);

/// Weighted mean of the mesh under psi (Gaussian factor dropped).
Vector warm_start_tt(const TensorTrain& psi, const MeshGrid& mesh);

/// exp(-(f - shift) / delta) on a mesh, stored as a TT normalized to unit
/// Frobenius norm; the true values are tt * exp(log_scale).
struct GibbsTT {
  TensorTrain tt;
  MeshGrid mesh;
  double delta = 0.0;
  double shift = 0.0;
  double log_scale = 0.0;
  CrossIndexSets index_sets;
  CrossResult cross_info;
};

/// Cross-approximates the Gibbs density. `seed_sets` (if any) must index the
/// same mesh.
GibbsTT build_gibbs_tt(const Objective& f, const MeshGrid& mesh, double delta, double shift,
                       const CrossConfig& cfg, Rng& rng,
                       const CrossIndexSets* seed_sets = nullptr);

/// Halves delta by squaring the train and rounding; no objective calls.
GibbsTT square_gibbs_tt(const GibbsTT& g, double round_tol);

/// Maps interpolation sets from a mesh to its `factor`-fold refinement
/// (index i becomes i * factor).
CrossIndexSets refine_index_sets(const CrossIndexSets& sets, int factor);

struct ProbeResult {
  double f_min = 0.0;
  Vector x_min;
};

/// Best of a Latin-hypercube sample of `count` points in the box.
ProbeResult latin_hypercube_probe(const Objective& f, int count, Rng& rng);
double latin_hypercube_min(const Objective& f, int count, Rng& rng);

/// Index sets holding the single multi-index `idx` at every bond.
CrossIndexSets index_sets_through(const std::vector<int>& idx);

RunReport tt_ipp(const Objective& f, const IPPParams& params, std::uint64_t seed);
RunReport mc_ipp(const Objective& f, const IPPParams& params, std::uint64_t seed);

/// Pure random search over the objective's box; max_evals must be set.
RunReport prs_baseline(const Objective& f, const IPPParams& params, std::uint64_t seed);

/// Dispatch on "tt-ipp", "mc-ipp" or "prs-baseline".
RunReport run_solver(const std::string& solver, const Objective& f, const IPPParams& params,
                     std::uint64_t seed);

}  // namespace ippopt
