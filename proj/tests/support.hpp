#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "ippopt/gibbs.hpp"
#include "ippopt/tensor_train.hpp"

namespace ippopt::testing {

// Hand-rolled generators for property tests.

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Vector uniform_vector(Rng& rng, int d, double lo, double hi) {
  Vector v(d);
  for (auto& x : v) x = uniform(rng, lo, hi);
  return v;
}

// Uniform direction scaled to `radius`.
inline Vector sphere_point(Rng& rng, int d, double radius) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(d);
  for (auto& x : v) x = n(rng);
  return radius * v / v.norm();
}

inline TensorTrain random_tt(Rng& rng, const std::vector<int>& n, const std::vector<int>& ranks) {
  std::vector<Core> cores;
  for (std::size_t j = 0; j < n.size(); ++j) {
    Core c(ranks[j], n[j], ranks[j + 1]);
    for (int a = 0; a < c.r_left(); ++a)
      for (int i = 0; i < c.n(); ++i)
        for (int b = 0; b < c.r_right(); ++b) c(a, i, b) = uniform(rng, -1.0, 1.0);
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores));
}

inline MultiIndex random_index(Rng& rng, const std::vector<int>& n) {
  MultiIndex idx(n.size());
  for (std::size_t j = 0; j < n.size(); ++j) idx[j] = uniform_int(rng, 0, n[j] - 1);
  return idx;
}

// Entry by explicit slice products, independent of TensorTrain::operator().
inline double slice_product(const TensorTrain& tt, const MultiIndex& idx) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Ones(1, 1);
  for (int j = 0; j < tt.dim(); ++j) acc = acc * tt.core(j).slice(idx[static_cast<std::size_t>(j)]);
  return acc(0, 0);
}

inline double dense_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// 1-D trapezoid Gibbs mean of exp(-(f(z) + (z - x)^2 / (2t)) / delta) on
// [lo, hi] with n nodes.
template <class F>
double gibbs_mean_1d(F&& f, double x, double t, double delta, double lo, double hi, int n) {
  const double h = (hi - lo) / (n - 1);
  std::vector<double> phi(static_cast<std::size_t>(n));
  double pmin = INFINITY;
  for (int k = 0; k < n; ++k) {
    const double z = lo + k * h;
    phi[static_cast<std::size_t>(k)] = f(z) + (z - x) * (z - x) / (2.0 * t);
    pmin = std::min(pmin, phi[static_cast<std::size_t>(k)]);
  }
  double num = 0.0, den = 0.0;
  for (int k = 0; k < n; ++k) {
    const double z = lo + k * h;
    const double w = (k == 0 || k == n - 1 ? 0.5 : 1.0) *
                     std::exp(-(phi[static_cast<std::size_t>(k)] - pmin) / delta);
    num += w * z;
    den += w;
  }
  return num / den;
}

}  // namespace ippopt::testing
