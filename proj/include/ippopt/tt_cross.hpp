#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "ippopt/gibbs.hpp"
#include "ippopt/tensor_train.hpp"

namespace ippopt {

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& idx) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (int v : idx) {
      h ^= static_cast<std::size_t>(v) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// Black-box tensor with memoized entries. `calls()` counts distinct indices
/// that reached the underlying function.
class EntryOracle {
 public:
  using Function = std::function<double(std::span<const int>)>;

  EntryOracle(Function fn, std::vector<int> mode_sizes);

  double operator()(const MultiIndex& index);

  const std::vector<int>& mode_sizes() const { return mode_sizes_; }
  int dim() const { return static_cast<int>(mode_sizes_.size()); }
  std::uint64_t calls() const { return calls_; }

 private:
  Function fn_;
  std::vector<int> mode_sizes_;
  std::unordered_map<MultiIndex, double, MultiIndexHash> cache_;
  std::uint64_t calls_ = 0;
};

struct CrossConfig {
  double tau_stop = 1e-4;
  int r_init = 2;
  /// Random multi-indices added to each index set before every sweep.
  int rank_increment = 2;
  int r_max = 20;
  /// Cap on right-to-left + left-to-right sweep pairs after the first sweep.
  int max_sweeps = 12;
  /// Relative Frobenius tail dropped from each fiber matrix; <= 0 means
  /// tau_stop.
  double truncation_tol = -1.0;
  double maxvol_tol = 1.01;
  int maxvol_max_swaps = 100;
};

/// Interpolation sets: left[j] holds r_j prefixes (i_1..i_j), right[j] holds
/// r_j suffixes (i_{j+1}..i_d); left[0] and right[d] hold one empty index.
struct CrossIndexSets {
  std::vector<std::vector<MultiIndex>> left;
  std::vector<std::vector<MultiIndex>> right;
};

struct CrossResult {
  TensorTrain tt;
  bool converged = false;
  /// Set when some fiber matrix needed more than r_max components.
  bool rank_capped = false;
  int sweeps = 0;
  double relative_change = 0.0;
  /// Distinct oracle calls made by this run.
  std::uint64_t oracle_calls = 0;
  CrossIndexSets index_sets;
};

/// Rows of a tall m x r matrix whose r x r submatrix has (locally) maximal
/// volume: greedy row-pivoted LU, then single-row swaps while some
/// coefficient of A A(I)^{-1} exceeds `tol` in magnitude.
std::vector<int> maxvol(const Eigen::MatrixXd& a, double tol = 1.01, int max_swaps = 100);

/// Randomized alternating-sweep TT cross approximation. Starts from random
/// right (column) index sets, or from `seed` when given, and stops once
/// consecutive sweeps agree to tau_stop in relative Frobenius norm.
CrossResult tt_cross(EntryOracle& oracle, const CrossConfig& config, Rng& rng,
                     const CrossIndexSets* seed = nullptr);

}  // namespace ippopt
