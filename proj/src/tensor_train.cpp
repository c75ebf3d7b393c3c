#include "ippopt/tensor_train.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace ippopt {

Core::Core(int r_left, int n, int r_right)
    : Core(r_left, n, r_right,
           std::vector<double>(static_cast<std::size_t>(r_left) * n * r_right, 0.0)) {}

Core::Core(int r_left, int n, int r_right, std::vector<double> data)
    : r_left_(r_left), n_(n), r_right_(r_right), data_(std::move(data)) {
  if (r_left < 1 || n < 1 || r_right < 1) {
    throw std::invalid_argument("Core: all dimensions must be positive");
  }
  if (data_.size() != static_cast<std::size_t>(r_left) * n * r_right) {
    throw std::invalid_argument("Core: data size does not match shape");
  }
}

Eigen::MatrixXd Core::slice(int i) const {
  Eigen::MatrixXd s(r_left_, r_right_);
  for (int a = 0; a < r_left_; ++a) {
    for (int b = 0; b < r_right_; ++b) s(a, b) = (*this)(a, i, b);
  }
  return s;
}

TensorTrain::TensorTrain(std::vector<Core> cores) : cores_(std::move(cores)) {
  if (cores_.empty()) throw std::invalid_argument("TensorTrain: no cores");
  if (cores_.front().r_left() != 1 || cores_.back().r_right() != 1) {
    throw std::invalid_argument("TensorTrain: boundary ranks must be 1");
  }
  for (std::size_t j = 0; j + 1 < cores_.size(); ++j) {
    if (cores_[j].r_right() != cores_[j + 1].r_left()) {
      throw std::invalid_argument("TensorTrain: rank mismatch between cores " +
                                  std::to_string(j) + " and " + std::to_string(j + 1));
    }
  }
}

TensorTrain TensorTrain::ones(std::span<const int> mode_sizes) {
  std::vector<Core> cores;
  for (int n : mode_sizes) {
    cores.emplace_back(1, n, 1, std::vector<double>(static_cast<std::size_t>(n), 1.0));
  }
  return TensorTrain(std::move(cores));
}

TensorTrain TensorTrain::rank_one(const std::vector<Eigen::VectorXd>& factors) {
  std::vector<Core> cores;
  for (const auto& u : factors) {
    cores.emplace_back(1, static_cast<int>(u.size()), 1,
                       std::vector<double>(u.data(), u.data() + u.size()));
  }
  return TensorTrain(std::move(cores));
}

std::vector<int> TensorTrain::mode_sizes() const {
  std::vector<int> n;
  for (const auto& c : cores_) n.push_back(c.n());
  return n;
}

std::vector<int> TensorTrain::ranks() const {
  std::vector<int> r{1};
  for (const auto& c : cores_) r.push_back(c.r_right());
  return r;
}

int TensorTrain::max_rank() const {
  const auto r = ranks();
  return *std::max_element(r.begin(), r.end());
}

std::size_t TensorTrain::parameter_count() const {
  std::size_t total = 0;
  for (const auto& c : cores_) total += c.data().size();
  return total;
}

double TensorTrain::operator()(std::span<const int> index) const {
  if (index.size() != cores_.size()) {
    throw std::out_of_range("TensorTrain: index has wrong length");
  }
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
  for (std::size_t j = 0; j < cores_.size(); ++j) {
    const Core& c = cores_[j];
    const int i = index[j];
    if (i < 0 || i >= c.n()) {
      throw std::out_of_range("TensorTrain: index " + std::to_string(i) +
                              " out of range for mode " + std::to_string(j));
    }
    Eigen::RowVectorXd next = Eigen::RowVectorXd::Zero(c.r_right());
    for (int a = 0; a < c.r_left(); ++a) {
      if (v[a] == 0.0) continue;
      for (int b = 0; b < c.r_right(); ++b) next[b] += v[a] * c(a, i, b);
    }
    v = std::move(next);
  }
  return v[0];
}

std::vector<double> TensorTrain::dense() const {
  RowMatrix partial = RowMatrix::Ones(1, 1);
  for (const auto& c : cores_) {
    RowMatrix expanded = partial * c.right_unfolding();
    const Eigen::Index rows = partial.rows() * c.n();
    partial = Eigen::Map<RowMatrix>(expanded.data(), rows, c.r_right());
  }
  return {partial.data(), partial.data() + partial.size()};
}

TensorTrain hadamard(const TensorTrain& a, const TensorTrain& b) {
  if (a.mode_sizes() != b.mode_sizes()) {
    throw std::invalid_argument("hadamard: mode sizes differ");
  }
  std::vector<Core> cores;
  for (int j = 0; j < a.dim(); ++j) {
    const Core& x = a.core(j);
    const Core& y = b.core(j);
    Core c(x.r_left() * y.r_left(), x.n(), x.r_right() * y.r_right());
    for (int a1 = 0; a1 < x.r_left(); ++a1) {
      for (int a2 = 0; a2 < y.r_left(); ++a2) {
        for (int i = 0; i < x.n(); ++i) {
          for (int b1 = 0; b1 < x.r_right(); ++b1) {
            const double xv = x(a1, i, b1);
            for (int b2 = 0; b2 < y.r_right(); ++b2) {
              c(a1 * y.r_left() + a2, i, b1 * y.r_right() + b2) = xv * y(a2, i, b2);
            }
          }
        }
      }
    }
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores));
}

TensorTrain add(const TensorTrain& a, const TensorTrain& b) {
  if (a.mode_sizes() != b.mode_sizes()) {
    throw std::invalid_argument("add: mode sizes differ");
  }
  const int d = a.dim();
  if (d == 1) {
    Core c(1, a.core(0).n(), 1);
    for (int i = 0; i < c.n(); ++i) c(0, i, 0) = a.core(0)(0, i, 0) + b.core(0)(0, i, 0);
    return TensorTrain({c});
  }
  std::vector<Core> cores;
  for (int j = 0; j < d; ++j) {
    const Core& x = a.core(j);
    const Core& y = b.core(j);
    const bool first = j == 0;
    const bool last = j == d - 1;
    const int rl = first ? 1 : x.r_left() + y.r_left();
    const int rr = last ? 1 : x.r_right() + y.r_right();
    Core c(rl, x.n(), rr);
    for (int i = 0; i < x.n(); ++i) {
      for (int p = 0; p < x.r_left(); ++p) {
        for (int q = 0; q < x.r_right(); ++q) c(p, i, q) = x(p, i, q);
      }
      const int off_l = first ? 0 : x.r_left();
      const int off_r = last ? 0 : x.r_right();
      for (int p = 0; p < y.r_left(); ++p) {
        for (int q = 0; q < y.r_right(); ++q) c(off_l + p, i, off_r + q) = y(p, i, q);
      }
    }
    cores.push_back(std::move(c));
  }
  return TensorTrain(std::move(cores));
}

TensorTrain scale(TensorTrain tt, double factor) {
  Core& last = tt.core(tt.dim() - 1);
  last.left_unfolding() *= factor;
  return tt;
}

TensorTrain subtract(const TensorTrain& a, const TensorTrain& b) {
  return add(a, scale(b, -1.0));
}

double norm(const TensorTrain& tt) {
  // Carry the R factor of a left-to-right QR sweep.
  Eigen::MatrixXd r = Eigen::MatrixXd::Ones(1, 1);
  for (int j = 0; j < tt.dim(); ++j) {
    const Core& c = tt.core(j);
    RowMatrix carried = r * c.right_unfolding();
    const Eigen::Index rows = r.rows() * c.n();
    Eigen::MatrixXd stacked = Eigen::Map<RowMatrix>(carried.data(), rows, c.r_right());
    if (j == tt.dim() - 1) return stacked.norm();
    if (stacked.rows() <= stacked.cols()) {
      r = stacked;  // no compression possible; keep the full block
      continue;
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked);
    r = qr.matrixQR().topRows(stacked.cols()).triangularView<Eigen::Upper>();
  }
  return r.norm();
}

double dot(const TensorTrain& a, const TensorTrain& b) {
  if (a.mode_sizes() != b.mode_sizes()) {
    throw std::invalid_argument("dot: mode sizes differ");
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(1, 1);
  for (int j = 0; j < a.dim(); ++j) {
    const Core& x = a.core(j);
    const Core& y = b.core(j);
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(x.r_right(), y.r_right());
    for (int i = 0; i < x.n(); ++i) {
      next.noalias() += x.slice(i).transpose() * w * y.slice(i);
    }
    w = std::move(next);
  }
  return w(0, 0);
}

TensorTrain round(const TensorTrain& tt, double tol, int max_rank) {
  if (!(tol >= 0.0)) throw std::invalid_argument("round: tolerance must be >= 0");
  const int d = tt.dim();
  std::vector<Core> cores = tt.cores();
  if (d == 1) return TensorTrain(std::move(cores));

  // Right-to-left: make cores 2..d right-orthonormal.
  for (int j = d - 1; j >= 1; --j) {
    Core& c = cores[static_cast<std::size_t>(j)];
    const Eigen::MatrixXd unf_t = c.right_unfolding().transpose();  // (n r) x r_left
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(unf_t);
    const Eigen::Index k = std::min(unf_t.rows(), unf_t.cols());
    const Eigen::MatrixXd q =
        qr.householderQ() * Eigen::MatrixXd::Identity(unf_t.rows(), k);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    Core next(static_cast<int>(k), c.n(), c.r_right());
    next.right_unfolding() = q.transpose();
    Core& prev = cores[static_cast<std::size_t>(j - 1)];
    Core merged(prev.r_left(), prev.n(), static_cast<int>(k));
    merged.left_unfolding() = prev.left_unfolding() * r.transpose();
    c = std::move(next);
    prev = std::move(merged);
  }

  const double total = cores[0].left_unfolding().norm();
  const double eps = tol * total / std::sqrt(static_cast<double>(d - 1));

  // Left-to-right truncated SVDs.
  for (int j = 0; j + 1 < d; ++j) {
    Core& c = cores[static_cast<std::size_t>(j)];
    const Eigen::MatrixXd unf = c.left_unfolding();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(unf, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    Eigen::Index keep = s.size();
    double tail = 0.0;
    while (keep > 1) {
      const double next_tail = tail + s[keep - 1] * s[keep - 1];
      if (std::sqrt(next_tail) > eps) break;
      tail = next_tail;
      --keep;
    }
    if (max_rank > 0) keep = std::min<Eigen::Index>(keep, max_rank);
    Core left(c.r_left(), c.n(), static_cast<int>(keep));
    left.left_unfolding() = svd.matrixU().leftCols(keep);
    const Eigen::MatrixXd sv =
        s.head(keep).asDiagonal() * svd.matrixV().leftCols(keep).transpose();
    Core& nxt = cores[static_cast<std::size_t>(j + 1)];
    Core merged(static_cast<int>(keep), nxt.n(), nxt.r_right());
    merged.right_unfolding() = sv * nxt.right_unfolding();
    c = std::move(left);
    nxt = std::move(merged);
  }
  return TensorTrain(std::move(cores));
}

}  // namespace ippopt
