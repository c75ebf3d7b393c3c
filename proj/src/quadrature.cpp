#include "ippopt/quadrature.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <stdexcept>

namespace ippopt {

MeshGrid MeshGrid::uniform(const Box& box, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("MeshGrid: h must be positive");
  std::vector<int> n;
  for (Eigen::Index j = 0; j < box.dim(); ++j) {
    const double cells = std::round((box.hi[j] - box.lo[j]) / h);
    n.push_back(static_cast<int>(std::max(1.0, cells)) + 1);
  }
  return uniform(box, std::move(n));
}

MeshGrid MeshGrid::uniform(const Box& box, std::vector<int> nodes_per_dim) {
  if (static_cast<Eigen::Index>(nodes_per_dim.size()) != box.dim()) {
    throw std::invalid_argument("MeshGrid: node counts do not match box dimension");
  }
  MeshGrid mesh;
  mesh.box_ = box;
  for (Eigen::Index j = 0; j < box.dim(); ++j) {
    const int n = nodes_per_dim[static_cast<std::size_t>(j)];
    if (n < 2) throw std::invalid_argument("MeshGrid: need at least 2 nodes per dimension");
    const double hj = (box.hi[j] - box.lo[j]) / (n - 1);
    Eigen::VectorXd z(n);
    for (int k = 0; k < n; ++k) z[k] = box.lo[j] + k * hj;
    z[n - 1] = box.hi[j];
    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, hj);
    w[0] = w[n - 1] = 0.5 * hj;
    mesh.nodes_.push_back(std::move(z));
    mesh.weights_.push_back(std::move(w));
    mesh.h_ = std::max(mesh.h_, hj);
  }
  return mesh;
}

MeshGrid MeshGrid::refined(int factor) const {
  if (factor < 1) throw std::invalid_argument("MeshGrid: refinement factor must be >= 1");
  std::vector<int> n;
  for (const auto& z : nodes_) n.push_back(static_cast<int>(z.size() - 1) * factor + 1);
  return uniform(box_, std::move(n));
}

std::vector<int> MeshGrid::mode_sizes() const {
  std::vector<int> n;
  for (const auto& z : nodes_) n.push_back(static_cast<int>(z.size()));
  return n;
}

Vector MeshGrid::point(std::span<const int> index) const {
  Vector p(dim());
  for (int j = 0; j < dim(); ++j) p[j] = nodes_[static_cast<std::size_t>(j)][index[j]];
  return p;
}

std::vector<int> MeshGrid::nearest_index(const Vector& z) const {
  if (z.size() != dim()) throw std::invalid_argument("nearest_index: wrong dimension");
  std::vector<int> idx(static_cast<std::size_t>(dim()));
  for (int j = 0; j < dim(); ++j) {
    const Eigen::VectorXd& nd = nodes_[static_cast<std::size_t>(j)];
    Eigen::Index k = 0;
    (nd.array() - z[j]).abs().minCoeff(&k);
    idx[static_cast<std::size_t>(j)] = static_cast<int>(k);
  }
  return idx;
}

std::vector<Eigen::VectorXd> gaussian_factors(const MeshGrid& mesh, const Vector& x,
                                              double t, double delta) {
  if (!(t > 0.0) || !(delta > 0.0)) {
    throw std::invalid_argument("gaussian_factors: t and delta must be positive");
  }
  const double inv = 1.0 / (2.0 * t * delta);
  std::vector<Eigen::VectorXd> u;
  for (int j = 0; j < mesh.dim(); ++j) {
    u.push_back((-(mesh.nodes(j).array() - x[j]).square() * inv).exp().matrix());
  }
  return u;
}

namespace {

void check_mesh(const TensorTrain& psi, const MeshGrid& mesh) {
  if (psi.mode_sizes() != mesh.mode_sizes()) {
    throw std::invalid_argument("TT mode sizes do not match the mesh");
  }
}

// Sum over i of v(i) G(:, i, :).
Eigen::MatrixXd weighted_slice_sum(const Core& c, const Eigen::VectorXd& v) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(c.r_left(), c.r_right());
  for (int a = 0; a < c.r_left(); ++a) {
    for (int i = 0; i < c.n(); ++i) {
      const double vi = v[i];
      if (vi == 0.0) continue;
      for (int b = 0; b < c.r_right(); ++b) m(a, b) += vi * c(a, i, b);
    }
  }
  return m;
}

// Component-wise ratio of the first-moment and zeroth-moment quadratures of
// psi against per-dimension weights. Prefix/suffix products are normalized as
// they are formed; the common scale cancels in each ratio.
Vector moment_ratio(const TensorTrain& psi, const MeshGrid& mesh,
                    const std::vector<Eigen::VectorXd>& weights) {
  const int d = psi.dim();
  std::vector<Eigen::MatrixXd> m0(static_cast<std::size_t>(d));
  std::vector<Eigen::MatrixXd> m1(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const auto& v = weights[static_cast<std::size_t>(j)];
    m0[static_cast<std::size_t>(j)] = weighted_slice_sum(psi.core(j), v);
    m1[static_cast<std::size_t>(j)] =
        weighted_slice_sum(psi.core(j), (v.array() * mesh.nodes(j).array()).matrix());
  }
  auto normalized = [](Eigen::MatrixXd v) {
    const double s = v.cwiseAbs().maxCoeff();
    if (s > 0.0 && std::isfinite(s)) v /= s;
    return v;
  };
  std::vector<Eigen::MatrixXd> prefix(static_cast<std::size_t>(d) + 1);
  std::vector<Eigen::MatrixXd> suffix(static_cast<std::size_t>(d) + 1);
  prefix[0] = Eigen::MatrixXd::Ones(1, 1);
  for (int j = 0; j < d; ++j) {
    prefix[static_cast<std::size_t>(j) + 1] =
        normalized(prefix[static_cast<std::size_t>(j)] * m0[static_cast<std::size_t>(j)]);
  }
  suffix[static_cast<std::size_t>(d)] = Eigen::MatrixXd::Ones(1, 1);
  for (int j = d - 1; j >= 0; --j) {
    suffix[static_cast<std::size_t>(j)] =
        normalized(m0[static_cast<std::size_t>(j)] * suffix[static_cast<std::size_t>(j) + 1]);
  }
  Vector out(d);
  for (int j = 0; j < d; ++j) {
    const auto& l = prefix[static_cast<std::size_t>(j)];
    const auto& r = suffix[static_cast<std::size_t>(j) + 1];
    const double den = (l * m0[static_cast<std::size_t>(j)] * r)(0, 0);
    const double num = (l * m1[static_cast<std::size_t>(j)] * r)(0, 0);
    if (!(den > 0.0) || !std::isfinite(den) || !std::isfinite(num)) {
      throw std::runtime_error(
          "TT quadrature denominator is not positive (" + std::to_string(den) +
          "); the Gibbs weights underflowed on this mesh, refresh the energy "
          "shift or refine the mesh");
    }
    out[j] = num / den;
  }
  return out;
}

}  // namespace

double tt_integrate(const TensorTrain& psi, const MeshGrid& mesh, const Vector& x,
                    double t, double delta) {
  check_mesh(psi, mesh);
  const auto u = gaussian_factors(mesh, x, t, delta);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Ones(1, 1);
  for (int j = 0; j < psi.dim(); ++j) {
    const Eigen::VectorXd v =
        (u[static_cast<std::size_t>(j)].array() * mesh.weights(j).array()).matrix();
    acc = acc * weighted_slice_sum(psi.core(j), v);
  }
  const double value = acc(0, 0);
  if (!std::isfinite(value)) {
    throw std::overflow_error("tt_integrate: product is not finite; delta is too small "
                              "for the current energy shift");
  }
  return value;
}

Vector tt_prox(const TensorTrain& psi, const MeshGrid& mesh, const ProxQuery& q) {
  check_mesh(psi, mesh);
  if (!(q.t > 0.0) || !(q.delta > 0.0)) {
    throw std::invalid_argument("tt_prox: t and delta must be positive");
  }
  if (q.x.size() != mesh.dim()) throw std::invalid_argument("tt_prox: anchor dimension");
  // Per-dimension Gaussian factors shifted so the largest entry is 1; the
  // shift is a constant per dimension and cancels in the ratio.
  const double inv = 1.0 / (2.0 * q.t * q.delta);
  std::vector<Eigen::VectorXd> weights;
  for (int j = 0; j < mesh.dim(); ++j) {
    const Eigen::ArrayXd e = (mesh.nodes(j).array() - q.x[j]).square() * inv;
    const Eigen::ArrayXd u = (-(e - e.minCoeff())).exp();
    weights.push_back((u * mesh.weights(j).array()).matrix());
  }
  return moment_ratio(psi, mesh, weights);
}

Vector tt_weighted_mean(const TensorTrain& psi, const MeshGrid& mesh) {
  check_mesh(psi, mesh);
  std::vector<Eigen::VectorXd> weights;
  for (int j = 0; j < mesh.dim(); ++j) weights.push_back(mesh.weights(j));
  return moment_ratio(psi, mesh, weights);
}

namespace {

// Calls fn(index, point, weight) for every mesh node, last index fastest.
template <class Fn>
void for_each_node(const MeshGrid& mesh, const char* who, Fn&& fn) {
  const int d = mesh.dim();
  if (d > 3) throw std::invalid_argument(std::string(who) + ": dense quadrature needs d <= 3");
  double total = 1.0;
  for (int n : mesh.mode_sizes()) total *= n;
  if (total > 2e7) throw std::invalid_argument(std::string(who) + ": mesh has too many nodes");
  const auto n = mesh.mode_sizes();
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Vector z(d);
  for (;;) {
    double w = 1.0;
    for (int j = 0; j < d; ++j) {
      z[j] = mesh.nodes(j)[idx[static_cast<std::size_t>(j)]];
      w *= mesh.weights(j)[idx[static_cast<std::size_t>(j)]];
    }
    fn(z, w);
    int j = d - 1;
    while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == n[static_cast<std::size_t>(j)]) {
      idx[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
  }
}

}  // namespace

Vector dense_gibbs_mean(const Objective& f, const ProxQuery& q, const MeshGrid& mesh) {
  if (!(q.t > 0.0) || !(q.delta > 0.0)) {
    throw std::invalid_argument("dense_gibbs_mean: t and delta must be positive");
  }
  // Two passes: the minimum of phi first, then shifted weights.
  double phi_min = std::numeric_limits<double>::infinity();
  std::vector<double> phi;
  for_each_node(mesh, "dense_gibbs_mean", [&](const Vector& z, double) {
    const double v = f(z) + (z - q.x).squaredNorm() / (2.0 * q.t);
    phi.push_back(v);
    phi_min = std::min(phi_min, v);
  });
  Vector num = Vector::Zero(mesh.dim());
  double den = 0.0;
  std::size_t k = 0;
  for_each_node(mesh, "dense_gibbs_mean", [&](const Vector& z, double w) {
    const double e = w * std::exp(-(phi[k++] - phi_min) / q.delta);
    num += e * z;
    den += e;
  });
  return num / den;
}

Vector dense_prox_node(const Objective& f, const Vector& x, double t, const MeshGrid& mesh) {
  if (!(t > 0.0)) throw std::invalid_argument("dense_prox_node: t must be positive");
  double best = std::numeric_limits<double>::infinity();
  Vector arg;
  for_each_node(mesh, "dense_prox_node", [&](const Vector& z, double) {
    const double v = f(z) + (z - x).squaredNorm() / (2.0 * t);
    if (v < best) {
      best = v;
      arg = z;
    }
  });
  return arg;
}

}  // namespace ippopt
