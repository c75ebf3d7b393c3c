#include "ippopt/objective.hpp"

#include <utility>

namespace ippopt {

Objective::Objective(std::string name, Box domain, Function fn,
                     std::optional<KnownMinimum> known_min)
    : name_(std::move(name)),
      domain_(std::move(domain)),
      fn_(std::move(fn)),
      known_min_(std::move(known_min)),
      counter_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  if (domain_.lo.size() == 0 || domain_.lo.size() != domain_.hi.size()) {
    throw std::invalid_argument("objective '" + name_ + "': malformed domain box");
  }
  if ((domain_.hi.array() <= domain_.lo.array()).any()) {
    throw std::invalid_argument("objective '" + name_ + "': empty domain box");
  }
}

double Objective::operator()(const Vector& x) const {
  if (x.size() != dim()) {
    throw std::invalid_argument("objective '" + name_ + "': expected dimension " +
                                std::to_string(dim()) + ", got " +
                                std::to_string(x.size()));
  }
  counter_->fetch_add(1, std::memory_order_relaxed);
  return fn_(x);
}

double Objective::error_inf(const Vector& x) const {
  if (!known_min_) {
    throw std::logic_error("objective '" + name_ + "' has no known minimizer");
  }
  return (x - known_min_->x).lpNorm<Eigen::Infinity>();
}

Objective with_budget(const Objective& f, std::uint64_t max_evals) {
  auto used = std::make_shared<std::atomic<std::uint64_t>>(0);
  auto fn = [f, used, max_evals](const Vector& x) {
    if (used->fetch_add(1) >= max_evals) {
      used->fetch_sub(1);
      throw BudgetExhausted();
    }
    return f(x);
  };
  return Objective(f.name(), f.domain(), fn, f.known_min());
}

}  // namespace ippopt
