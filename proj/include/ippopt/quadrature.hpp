#pragma once

#include <vector>

#include "ippopt/gibbs.hpp"
#include "ippopt/objective.hpp"
#include "ippopt/tensor_train.hpp"

namespace ippopt {

/// Uniform tensor mesh on a box with trapezoidal weights.
class MeshGrid {
 public:
  /// Nodes lo_j + k h_j, k = 0..n_j-1, with n_j = round((hi_j - lo_j) / h) + 1
  /// and h_j adjusted so the last node is hi_j.
  static MeshGrid uniform(const Box& box, double h);
  static MeshGrid uniform(const Box& box, std::vector<int> nodes_per_dim);

  /// Same box with every spacing divided by `factor` (old nodes are kept,
  /// old index i maps to i * factor).
  MeshGrid refined(int factor) const;

  int dim() const { return static_cast<int>(nodes_.size()); }
  const Box& box() const { return box_; }
  /// Largest per-dimension spacing.
  double h() const { return h_; }
  const Eigen::VectorXd& nodes(int j) const { return nodes_[static_cast<std::size_t>(j)]; }
  const Eigen::VectorXd& weights(int j) const {
    return weights_[static_cast<std::size_t>(j)];
  }
  std::vector<int> mode_sizes() const;
  Vector point(std::span<const int> index) const;
  /// Index of the node closest to z (z is clamped to the box).
  std::vector<int> nearest_index(const Vector& z) const;

 private:
  Box box_;
  double h_ = 0.0;
  std::vector<Eigen::VectorXd> nodes_;
  std::vector<Eigen::VectorXd> weights_;
};

/// u_j(k) = exp(-(z_{j,k} - x_j)^2 / (2 t delta)) for every dimension j.
std::vector<Eigen::VectorXd> gaussian_factors(const MeshGrid& mesh, const Vector& x,
                                              double t, double delta);

/// Trapezoidal approximation of the integral of psi(z) exp(-|z-x|^2/(2 t delta))
/// where psi is given in TT format on the mesh. Throws std::overflow_error if
/// the chained product is not finite.
double tt_integrate(const TensorTrain& psi, const MeshGrid& mesh, const Vector& x,
                    double t, double delta);

/// Ratio of the TT quadratures of z psi(z) eta(z) and psi(z) eta(z), with eta
/// the Gaussian factor of the query. A constant factor in psi (the energy
/// shift) cancels. Throws std::runtime_error if the denominator is not
/// positive and representable.
Vector tt_prox(const TensorTrain& psi, const MeshGrid& mesh, const ProxQuery& q);

/// Same ratio without the Gaussian factor: the weighted mean of the mesh under
/// psi. Used as a warm start.
Vector tt_weighted_mean(const TensorTrain& psi, const MeshGrid& mesh);

/// Gibbs mean of exp(-phi / delta), phi(z) = f(z) + |z - x|^2 / (2 t), by
/// trapezoidal quadrature over every node of the mesh (log-sum-exp
/// stabilized). Throws std::invalid_argument above 3 dimensions or 2e7 nodes.
Vector dense_gibbs_mean(const Objective& f, const ProxQuery& q, const MeshGrid& mesh);

/// Node of the mesh minimizing phi; same limits as dense_gibbs_mean.
Vector dense_prox_node(const Objective& f, const Vector& x, double t, const MeshGrid& mesh);

}  // namespace ippopt
