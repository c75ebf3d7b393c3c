#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace ippopt {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MultiIndex = std::vector<int>;

/// Three-axis array of shape r_left x n x r_right, stored row-major, i.e.
/// element (a, i, b) lives at (a * n + i) * r_right + b.
class Core {
 public:
  Core() = default;
  Core(int r_left, int n, int r_right);
  Core(int r_left, int n, int r_right, std::vector<double> data);

  int r_left() const { return r_left_; }
  int n() const { return n_; }
  int r_right() const { return r_right_; }

  double operator()(int a, int i, int b) const {
    return data_[(static_cast<std::size_t>(a) * n_ + i) * r_right_ + b];
  }
  double& operator()(int a, int i, int b) {
    return data_[(static_cast<std::size_t>(a) * n_ + i) * r_right_ + b];
  }

  /// (r_left * n) x r_right view with rows ordered (a, i).
  Eigen::Map<RowMatrix> left_unfolding() {
    return {data_.data(), static_cast<Eigen::Index>(r_left_) * n_, r_right_};
  }
  Eigen::Map<const RowMatrix> left_unfolding() const {
    return {data_.data(), static_cast<Eigen::Index>(r_left_) * n_, r_right_};
  }
  /// r_left x (n * r_right) view with columns ordered (i, b).
  Eigen::Map<RowMatrix> right_unfolding() {
    return {data_.data(), r_left_, static_cast<Eigen::Index>(n_) * r_right_};
  }
  Eigen::Map<const RowMatrix> right_unfolding() const {
    return {data_.data(), r_left_, static_cast<Eigen::Index>(n_) * r_right_};
  }
  /// r_left x r_right matrix G(:, i, :).
  Eigen::MatrixXd slice(int i) const;

  const std::vector<double>& data() const { return data_; }

 private:
  int r_left_ = 0;
  int n_ = 0;
  int r_right_ = 0;
  std::vector<double> data_;
};

/// Tensor train: entry(i_1..i_d) = G_1(i_1) G_2(i_2) ... G_d(i_d).
class TensorTrain {
 public:
  TensorTrain() = default;
  /// Throws std::invalid_argument if boundary ranks are not 1 or adjacent
  /// cores do not chain.
  explicit TensorTrain(std::vector<Core> cores);

  static TensorTrain ones(std::span<const int> mode_sizes);
  static TensorTrain rank_one(const std::vector<Eigen::VectorXd>& factors);

  int dim() const { return static_cast<int>(cores_.size()); }
  std::vector<int> mode_sizes() const;
  /// (r_0, ..., r_d) with r_0 = r_d = 1.
  std::vector<int> ranks() const;
  int max_rank() const;
  std::size_t parameter_count() const;

  const Core& core(int j) const { return cores_[static_cast<std::size_t>(j)]; }
  Core& core(int j) { return cores_[static_cast<std::size_t>(j)]; }
  const std::vector<Core>& cores() const { return cores_; }

  /// Entry at a multi-index; throws std::out_of_range on a bad index.
  double operator()(std::span<const int> index) const;
  double operator()(const MultiIndex& index) const {
    return (*this)(std::span<const int>(index));
  }

  /// Full tensor in row-major (last index fastest) order. Small tensors only.
  std::vector<double> dense() const;

 private:
  std::vector<Core> cores_;
};

/// Entrywise product; cores are slice-wise Kronecker products.
TensorTrain hadamard(const TensorTrain& a, const TensorTrain& b);

/// Entrywise sum (block-diagonal cores, ranks add).
TensorTrain add(const TensorTrain& a, const TensorTrain& b);

TensorTrain scale(TensorTrain tt, double factor);

/// a - b.
TensorTrain subtract(const TensorTrain& a, const TensorTrain& b);

/// Frobenius norm. Uses an orthogonalization sweep so that norms of
/// differences of nearly equal trains stay accurate.
double norm(const TensorTrain& tt);

/// Frobenius inner product by core-wise Gram contraction.
double dot(const TensorTrain& a, const TensorTrain& b);

/// Right-to-left orthogonalization followed by truncated SVDs. Result has
/// ranks <= input ranks and ||round(tt) - tt||_F <= tol ||tt||_F. Cores
/// 1..d-1 of the result are left-orthonormal, so the norm sits in the last
/// core.
TensorTrain round(const TensorTrain& tt, double tol, int max_rank = 0);

}  // namespace ippopt
