#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "ippopt/ipp.hpp"
#include "ippopt/objective.hpp"

namespace ippopt {

/// u_t + H(grad u) = 0, u(x, 0) = f(x), with H(v) = ||v||_p^p / p.
struct HJProblem {
  Objective f;
  double p = 2.0;
  /// Conjugate exponent, 1/p + 1/q = 1.
  double q = 2.0;
  IPPParams inner{};
  /// "tt-ipp", "mc-ipp", or empty for TT-IPP when d <= 16 and MC-IPP above.
  std::string inner_solver{};
  /// Inner TT-IPP searches [-inner_radius, inner_radius]^d.
  double inner_radius = 5.0;
  double fd_step = 1e-3;
  std::uint64_t seed = 0;

  /// Sets q from p and hj_inner_defaults; throws for p <= 1.
  static HJProblem make(Objective f, double p, std::uint64_t seed = 0);
  void validate() const;
  std::string resolved_solver() const;
};

struct HJSample {
  Vector x;
  double t = 0.0;
  double u_tilde = 0.0;
  Vector y_tilde;
  double residual = 0.0;
  std::uint64_t inner_evals = 0;
};

/// Inner-driver defaults. TT-IPP: tt_defaults() with delta halved down to
/// 1e-3, no step-size stop and 60 iterations, so every solve ends at the same
/// temperature and y~ settles on the best mesh node. MC-IPP: mc_defaults().
IPPParams hj_inner_defaults(const std::string& solver);

/// H*(v) = sum_i |v_i|^q / q.
double conjugate_value(const Vector& v, double q);

/// H(v) = sum_i |v_i|^p / p.
double hamiltonian_value(const Vector& v, double p);

/// Seed of the inner solve at (x, t), mixed with the master seed.
std::uint64_t hj_inner_seed(const Vector& x, double t, std::uint64_t master);

/// Minimizes y -> f(y) + t H*((x - y) / t) with the inner driver and returns
/// u~ = f(y~) + t H*((y~ - x) / t). `seed` overrides hj_inner_seed(x, t).
HJSample hopf_lax(const HJProblem& prob, const Vector& x, double t,
                  std::optional<std::uint64_t> seed = std::nullopt);

using HJValue = std::function<double(const Vector& x, double t)>;

/// |du/dt + H(grad u)| by central differences of step h in t and each x_i.
double residual_of(const HJValue& u, const Vector& x, double t, double p, double h);

/// Residual of the Hopf-Lax approximation: 2d + 2 extra inner solves, all
/// seeded like the solve at (x, t).
double residual(const HJProblem& prob, const Vector& x, double t);

/// Same as hopf_lax with the residual filled in.
HJSample hopf_lax_with_residual(const HJProblem& prob, const Vector& x, double t);

/// f1(x) = ||x||_{1/2}^{1/2} = sum_i |x_i|^{1/2} on [-5, 5]^d.
Objective hj_f1(int dim);

/// f2(x) = sum_i (sin(pi x_i) + 1) on [-5, 5]^d.
Objective hj_f2(int dim);

/// f by name: "f1", "f2" or "quadratic".
Objective hj_initial_condition(const std::string& name, int dim);

}  // namespace ippopt
