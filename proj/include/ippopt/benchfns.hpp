#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ippopt/objective.hpp"

namespace ippopt {

/// Names accepted by make_benchmark, in catalog order.
const std::vector<std::string>& benchmark_names();

/// Standard test function, recentred so its minimizer sits at `shift` with
/// value 0: f(x) = g(x - shift + m) - g(m), where g is the library form and m
/// its minimizer. Domain is [-5, 5]^d.
///
/// Throws std::invalid_argument for an unknown name, a dimension the function
/// does not support, or a shift outside [-1, 1]^d.
Objective make_benchmark(const std::string& name, int dim, const Vector& shift);

/// Unshifted variant (minimizer at the origin).
Objective make_benchmark(const std::string& name, int dim);

/// How random shifts are drawn.
enum class ShiftMode {
  kContinuous,  ///< uniform on [-1, 1]^d
  kLattice,     ///< uniform on the 0.1-spaced lattice {-1, -0.9, ..., 1}^d
};

/// Reproducible shift for (name, dim, seed).
Vector random_shift(const std::string& name, int dim, std::uint64_t seed,
                    ShiftMode mode = ShiftMode::kLattice);

/// Risk-parity portfolio objective on [0, 1]^d with covariance
/// S_ij = exp(-|i - j|^2 / 4):
///   f(w) = sum_i (w_i (S w)_i - sqrt(w' S w) / d)^2 + penalty (sum w - 1)^2.
/// The attached known minimum comes from risk_parity_reference().
Objective make_risk_parity(int dim, double penalty_weight = 10.0);

Eigen::MatrixXd risk_parity_covariance(int dim);
double risk_parity_value(const Eigen::MatrixXd& cov, const Vector& w,
                         double penalty_weight);

/// Reference minimizer of the penalized risk-parity objective: best point of a
/// seeded simplex sample, polished by a shrinking compass search.
KnownMinimum risk_parity_reference(int dim, double penalty_weight,
                                   int samples = 20000, std::uint64_t seed = 7);

/// Per-site double well V(s) = (s^2 - 1)^2 + 0.05 (1 + s) of the separable
/// DNA-chain surrogate. The deeper well is near s = -1.
double dna_site_potential(double s);

/// Global 1-D minimizer of dna_site_potential (Newton on V' = 0 from s = -1).
double dna_site_minimizer();

/// Separable surrogate f(x) = sum_i V(x_i) - d V(s*) on [-2, 2]^d; 2^d local
/// minima, global minimizer (s*, ..., s*).
Objective make_dna_chain(int dim);

/// 1-D double well (z^2 - 1)^2 on [-3, 3]; two global minimizers at +-1.
Objective make_double_well();

/// ||x||^2 / 2 on [-5, 5]^d.
Objective make_quadratic(int dim);

/// Any catalog name: the benchmark list plus "risk_parity", "dna_chain",
/// "double_well" and "quadratic". Shift applies to benchmarks only.
Objective make_objective(const std::string& name, int dim, const Vector& shift);

}  // namespace ippopt
