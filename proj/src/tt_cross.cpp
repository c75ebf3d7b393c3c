#include "ippopt/tt_cross.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace ippopt {

EntryOracle::EntryOracle(Function fn, std::vector<int> mode_sizes)
    : fn_(std::move(fn)), mode_sizes_(std::move(mode_sizes)) {
  if (mode_sizes_.empty()) throw std::invalid_argument("EntryOracle: no modes");
  for (int n : mode_sizes_) {
    if (n < 1) throw std::invalid_argument("EntryOracle: mode sizes must be positive");
  }
}

double EntryOracle::operator()(const MultiIndex& index) {
  if (auto it = cache_.find(index); it != cache_.end()) return it->second;
  const double v = fn_(index);
  ++calls_;
  cache_.emplace(index, v);
  return v;
}

std::vector<int> maxvol(const Eigen::MatrixXd& a, double tol, int max_swaps) {
  const Eigen::Index m = a.rows();
  const Eigen::Index r = a.cols();
  if (r == 0 || m < r) throw std::invalid_argument("maxvol: need a tall matrix");

  // Greedy row-pivoted elimination seeds the selection.
  Eigen::MatrixXd w = a;
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  for (Eigen::Index k = 0; k < r; ++k) {
    Eigen::Index p = k;
    w.col(k).tail(m - k).cwiseAbs().maxCoeff(&p);
    p += k;
    if (p != k) {
      w.row(k).swap(w.row(p));
      std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(p)]);
    }
    const double piv = w(k, k);
    if (piv == 0.0) continue;
    if (k + 1 < r && k + 1 < m) {
      w.bottomRightCorner(m - k - 1, r - k - 1).noalias() -=
          (w.col(k).tail(m - k - 1) / piv) * w.row(k).tail(r - k - 1);
    }
  }
  std::vector<int> sel(perm.begin(), perm.begin() + r);
  if (m == r) return sel;

  Eigen::MatrixXd sub(r, r);
  for (Eigen::Index k = 0; k < r; ++k) sub.row(k) = a.row(sel[static_cast<std::size_t>(k)]);
  // B = A A(I)^{-1}, i.e. B^T = A(I)^{-T} A^T.
  Eigen::FullPivLU<Eigen::MatrixXd> lu(sub.transpose());
  if (!lu.isInvertible()) return sel;
  Eigen::MatrixXd b = lu.solve(a.transpose()).transpose();

  for (int it = 0; it < max_swaps; ++it) {
    Eigen::Index i = 0;
    Eigen::Index j = 0;
    const double big = b.cwiseAbs().maxCoeff(&i, &j);
    if (big <= tol) break;
    sel[static_cast<std::size_t>(j)] = static_cast<int>(i);
    // Sherman-Morrison update of A A(I)^{-1} after replacing row j of A(I).
    const Eigen::VectorXd col = b.col(j);
    Eigen::RowVectorXd row = b.row(i);
    row[j] -= 1.0;
    b.noalias() -= (col / b(i, j)) * row;
  }
  return sel;
}

namespace {

// Orthonormal basis of the dominant column space of c, truncated so that the
// dropped Frobenius tail is at most tol * ||c||_F and at most r_max columns
// remain.
Eigen::MatrixXd truncated_basis(const Eigen::MatrixXd& c, double tol, int r_max,
                                bool& capped) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeThinU);
  const Eigen::VectorXd& s = svd.singularValues();
  const double total = s.norm();
  Eigen::Index keep = s.size();
  double tail = 0.0;
  while (keep > 1) {
    const double next = tail + s[keep - 1] * s[keep - 1];
    if (std::sqrt(next) > tol * total) break;
    tail = next;
    --keep;
  }
  if (keep > r_max) {
    keep = r_max;
    capped = true;
  }
  return svd.matrixU().leftCols(keep);
}

// Q * Q(sel)^{-1}, with a conditioning guard on the pivot block.
Eigen::MatrixXd interpolating_factor(const Eigen::MatrixXd& q, const std::vector<int>& sel) {
  const Eigen::Index k = q.cols();
  Eigen::MatrixXd block(k, k);
  for (Eigen::Index i = 0; i < k; ++i) block.row(i) = q.row(sel[static_cast<std::size_t>(i)]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(block.transpose());
  const auto& rdiag = qr.matrixQR().diagonal().cwiseAbs();
  const double cond = rdiag.maxCoeff() / std::max(rdiag.minCoeff(), 1e-300);
  if (cond > 1e14) {
    block += 1e-14 * block.norm() * Eigen::MatrixXd::Identity(k, k);
    qr.compute(block.transpose());
  }
  // X = Q B^{-1}  <=>  B^T X^T = Q^T.
  return qr.solve(q.transpose()).transpose();
}

MultiIndex random_prefix(int len, const std::vector<int>& n, Rng& rng) {
  MultiIndex idx(static_cast<std::size_t>(len));
  for (int p = 0; p < len; ++p) {
    std::uniform_int_distribution<int> pick(0, n[static_cast<std::size_t>(p)] - 1);
    idx[static_cast<std::size_t>(p)] = pick(rng);
  }
  return idx;
}

MultiIndex random_suffix(int start, const std::vector<int>& n, Rng& rng) {
  const int d = static_cast<int>(n.size());
  MultiIndex idx(static_cast<std::size_t>(d - start));
  for (int p = start; p < d; ++p) {
    std::uniform_int_distribution<int> pick(0, n[static_cast<std::size_t>(p)] - 1);
    idx[static_cast<std::size_t>(p - start)] = pick(rng);
  }
  return idx;
}

// Append `count` random indices not already present.
template <typename Gen>
void extend(std::vector<MultiIndex>& set, int count, Gen gen) {
  std::set<MultiIndex> seen(set.begin(), set.end());
  int added = 0;
  for (int attempt = 0; added < count && attempt < 20 * count; ++attempt) {
    MultiIndex idx = gen();
    if (seen.insert(idx).second) {
      set.push_back(std::move(idx));
      ++added;
    }
  }
}

MultiIndex join(const MultiIndex& left, int i, const MultiIndex& right) {
  MultiIndex full;
  full.reserve(left.size() + 1 + right.size());
  full.insert(full.end(), left.begin(), left.end());
  full.push_back(i);
  full.insert(full.end(), right.begin(), right.end());
  return full;
}

class CrossSweeper {
 public:
  CrossSweeper(EntryOracle& oracle, const CrossConfig& config)
      : oracle_(oracle), config_(config), n_(oracle.mode_sizes()),
        d_(static_cast<int>(n_.size())) {
    tol_ = config.truncation_tol > 0.0 ? config.truncation_tol : config.tau_stop;
  }

  bool capped() const { return capped_; }

  // Uses sets.right, rebuilds sets.left.
  TensorTrain left_to_right(CrossIndexSets& sets) {
    std::vector<Core> cores;
    for (int j = 0; j + 1 < d_; ++j) {
      const auto& lset = sets.left[static_cast<std::size_t>(j)];
      const auto& rset = sets.right[static_cast<std::size_t>(j) + 1];
      const int nj = n_[static_cast<std::size_t>(j)];
      const auto rows = static_cast<Eigen::Index>(lset.size()) * nj;
      Eigen::MatrixXd c(rows, static_cast<Eigen::Index>(rset.size()));
      for (std::size_t a = 0; a < lset.size(); ++a) {
        for (int i = 0; i < nj; ++i) {
          for (std::size_t b = 0; b < rset.size(); ++b) {
            c(static_cast<Eigen::Index>(a) * nj + i, static_cast<Eigen::Index>(b)) =
                oracle_(join(lset[a], i, rset[b]));
          }
        }
      }
      const Eigen::MatrixXd q = truncated_basis(c, tol_, config_.r_max, capped_);
      const auto sel = maxvol(q, config_.maxvol_tol, config_.maxvol_max_swaps);
      Core core(static_cast<int>(lset.size()), nj, static_cast<int>(q.cols()));
      core.left_unfolding() = interpolating_factor(q, sel);
      cores.push_back(std::move(core));

      std::vector<MultiIndex> next;
      for (int row : sel) {
        MultiIndex idx = lset[static_cast<std::size_t>(row / nj)];
        idx.push_back(row % nj);
        next.push_back(std::move(idx));
      }
      sets.left[static_cast<std::size_t>(j) + 1] = std::move(next);
    }
    const auto& lset = sets.left[static_cast<std::size_t>(d_) - 1];
    const int nl = n_.back();
    Core last(static_cast<int>(lset.size()), nl, 1);
    for (std::size_t a = 0; a < lset.size(); ++a) {
      for (int i = 0; i < nl; ++i) last(static_cast<int>(a), i, 0) = oracle_(join(lset[a], i, {}));
    }
    cores.push_back(std::move(last));
    return TensorTrain(std::move(cores));
  }

  // Uses sets.left, rebuilds sets.right.
  TensorTrain right_to_left(CrossIndexSets& sets) {
    std::vector<Core> cores(static_cast<std::size_t>(d_));
    for (int j = d_ - 1; j >= 1; --j) {
      const auto& lset = sets.left[static_cast<std::size_t>(j)];
      const auto& rset = sets.right[static_cast<std::size_t>(j) + 1];
      const int nj = n_[static_cast<std::size_t>(j)];
      const auto rr = static_cast<Eigen::Index>(rset.size());
      Eigen::MatrixXd c(nj * rr, static_cast<Eigen::Index>(lset.size()));
      for (int i = 0; i < nj; ++i) {
        for (Eigen::Index b = 0; b < rr; ++b) {
          for (std::size_t a = 0; a < lset.size(); ++a) {
            c(i * rr + b, static_cast<Eigen::Index>(a)) =
                oracle_(join(lset[a], i, rset[static_cast<std::size_t>(b)]));
          }
        }
      }
      const Eigen::MatrixXd q = truncated_basis(c, tol_, config_.r_max, capped_);
      const auto sel = maxvol(q, config_.maxvol_tol, config_.maxvol_max_swaps);
      Core core(static_cast<int>(q.cols()), nj, static_cast<int>(rr));
      core.right_unfolding() = interpolating_factor(q, sel).transpose();
      cores[static_cast<std::size_t>(j)] = std::move(core);

      std::vector<MultiIndex> next;
      for (int row : sel) {
        MultiIndex idx{row / static_cast<int>(rr)};
        const auto& tail = rset[static_cast<std::size_t>(row % rr)];
        idx.insert(idx.end(), tail.begin(), tail.end());
        next.push_back(std::move(idx));
      }
      sets.right[static_cast<std::size_t>(j)] = std::move(next);
    }
    const auto& rset = sets.right[1];
    Core first(1, n_[0], static_cast<int>(rset.size()));
    for (int i = 0; i < n_[0]; ++i) {
      for (std::size_t b = 0; b < rset.size(); ++b) {
        first(0, i, static_cast<int>(b)) = oracle_(join({}, i, rset[b]));
      }
    }
    cores[0] = std::move(first);
    return TensorTrain(std::move(cores));
  }

 private:
  EntryOracle& oracle_;
  const CrossConfig& config_;
  std::vector<int> n_;
  int d_;
  double tol_;
  bool capped_ = false;
};

}  // namespace

CrossResult tt_cross(EntryOracle& oracle, const CrossConfig& config, Rng& rng,
                     const CrossIndexSets* seed) {
  if (!(config.tau_stop > 0.0)) throw std::invalid_argument("tt_cross: tau_stop must be > 0");
  if (config.r_init < 1 || config.r_max < 1 || config.rank_increment < 0) {
    throw std::invalid_argument("tt_cross: invalid rank configuration");
  }
  const auto& n = oracle.mode_sizes();
  const int d = oracle.dim();
  const std::uint64_t calls_before = oracle.calls();
  CrossResult result;

  if (d == 1) {
    Core c(1, n[0], 1);
    for (int i = 0; i < n[0]; ++i) c(0, i, 0) = oracle(MultiIndex{i});
    result.tt = TensorTrain({c});
    result.converged = true;
    result.oracle_calls = oracle.calls() - calls_before;
    result.index_sets.left = {{MultiIndex{}}};
    result.index_sets.right = {{MultiIndex{}}};
    return result;
  }

  CrossIndexSets sets;
  sets.left.assign(static_cast<std::size_t>(d) + 1, {});
  sets.right.assign(static_cast<std::size_t>(d) + 1, {});
  sets.left[0] = {MultiIndex{}};
  sets.right[static_cast<std::size_t>(d)] = {MultiIndex{}};
  for (int j = 1; j < d; ++j) {
    auto& rset = sets.right[static_cast<std::size_t>(j)];
    if (seed != nullptr && seed->right.size() == static_cast<std::size_t>(d) + 1) {
      for (const auto& idx : seed->right[static_cast<std::size_t>(j)]) {
        if (idx.size() == static_cast<std::size_t>(d - j)) rset.push_back(idx);
      }
    }
    const int missing = config.r_init - static_cast<int>(rset.size());
    if (missing > 0) extend(rset, missing, [&] { return random_suffix(j, n, rng); });
  }

  CrossSweeper sweeper(oracle, config);
  TensorTrain g = sweeper.left_to_right(sets);
  double rel = std::numeric_limits<double>::infinity();
  int sweeps = 0;
  while (sweeps < config.max_sweeps) {
    ++sweeps;
    for (int j = 1; j < d; ++j) {
      extend(sets.left[static_cast<std::size_t>(j)], config.rank_increment,
             [&] { return random_prefix(j, n, rng); });
    }
    const TensorTrain h = sweeper.right_to_left(sets);
    for (int j = 1; j < d; ++j) {
      extend(sets.right[static_cast<std::size_t>(j)], config.rank_increment,
             [&] { return random_suffix(j, n, rng); });
    }
    g = sweeper.left_to_right(sets);
    const double gnorm = norm(g);
    rel = gnorm > 0.0 ? norm(subtract(h, g)) / gnorm : 0.0;
    if (rel < config.tau_stop) break;
  }

  result.tt = std::move(g);
  result.converged = rel < config.tau_stop;
  result.rank_capped = sweeper.capped();
  result.sweeps = sweeps;
  result.relative_change = rel;
  result.oracle_calls = oracle.calls() - calls_before;
  result.index_sets = std::move(sets);
  return result;
}

}  // namespace ippopt
