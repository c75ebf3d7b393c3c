#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace ippopt {

using Vector = Eigen::VectorXd;

/// Axis-aligned box [lo_i, hi_i]^d.
struct Box {
  Vector lo;
  Vector hi;

  static Box cube(Eigen::Index dim, double lo, double hi) {
    return {Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
  }
  Eigen::Index dim() const { return lo.size(); }
  Vector center() const { return 0.5 * (lo + hi); }
  bool contains(const Vector& x) const {
    return ((x.array() >= lo.array()) && (x.array() <= hi.array())).all();
  }
};

struct KnownMinimum {
  Vector x;
  double value = 0.0;
};

/// Thrown when an evaluation budget would be exceeded.
class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted() : std::runtime_error("evaluation budget exhausted") {}
};

/// Black-box scalar field with an evaluation counter.
///
/// Copies share the counter, so a copy handed to a solver reports its
/// evaluations back to the owner. The counter is atomic; everything else is
/// immutable after construction.
class Objective {
 public:
  using Function = std::function<double(const Vector&)>;

  Objective(std::string name, Box domain, Function fn,
            std::optional<KnownMinimum> known_min = std::nullopt);

  double operator()(const Vector& x) const;

  const std::string& name() const { return name_; }
  Eigen::Index dim() const { return domain_.dim(); }
  const Box& domain() const { return domain_; }
  const std::optional<KnownMinimum>& known_min() const { return known_min_; }

  std::uint64_t eval_count() const { return counter_->load(); }
  void reset_count() const { counter_->store(0); }

  /// Error ||x - x*||_inf against the known minimizer; throws when unknown.
  double error_inf(const Vector& x) const;

 private:
  std::string name_;
  Box domain_;
  Function fn_;
  std::optional<KnownMinimum> known_min_;
  std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

/// Wraps an objective so that evaluations beyond `max_evals` (counted on the
/// wrapped objective) throw BudgetExhausted instead of running.
Objective with_budget(const Objective& f, std::uint64_t max_evals);

}  // namespace ippopt
