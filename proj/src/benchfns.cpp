#include "ippopt/benchfns.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ippopt {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

using RawFn = std::function<double(const Vector&)>;

struct CatalogEntry {
  std::string name;
  int min_dim;
  RawFn raw;
  // Minimizer of the raw (library) form for a given dimension.
  std::function<Vector(int)> raw_minimizer;
};

Vector zeros(int d) { return Vector::Zero(d); }

double ackley(const Vector& x) {
  const double d = static_cast<double>(x.size());
  const double s2 = x.squaredNorm() / d;
  const double sc = (2.0 * kPi * x.array()).cos().sum() / d;
  return -20.0 * std::exp(-0.2 * std::sqrt(s2)) - std::exp(sc) + 20.0 + kE;
}

double griewank(const Vector& x) {
  double prod = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return 1.0 + x.squaredNorm() / 4000.0 - prod;
}

double rastrigin(const Vector& x) {
  return 10.0 * static_cast<double>(x.size()) +
         (x.array().square() - 10.0 * (2.0 * kPi * x.array()).cos()).sum();
}

// Levy No. 3 in the y = 1 + (x - 1) / 4 form; minimizer x = 1.
double levy3(const Vector& x) {
  const Eigen::ArrayXd y = 1.0 + (x.array() - 1.0) / 4.0;
  const Eigen::Index d = y.size();
  double v = std::pow(std::sin(kPi * y[0]), 2);
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    v += (y[i] - 1.0) * (y[i] - 1.0) *
         (1.0 + 10.0 * std::pow(std::sin(kPi * y[i + 1]), 2));
  }
  v += (y[d - 1] - 1.0) * (y[d - 1] - 1.0);
  return v;
}

double rosenbrock(const Vector& x) {
  double v = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    v += 100.0 * std::pow(x[i + 1] - x[i] * x[i], 2) + std::pow(x[i] - 1.0, 2);
  }
  return v;
}

double zakharov(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += 0.5 * static_cast<double>(i + 1) * x[i];
  return x.squaredNorm() + s * s + s * s * s * s;
}

double brown(const Vector& x) {
  double v = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i] * x[i];
    const double b = x[i + 1] * x[i + 1];
    v += std::pow(a, b + 1.0) + std::pow(b, a + 1.0);
  }
  return v;
}

double exponential(const Vector& x) { return -std::exp(-0.5 * x.squaredNorm()); }

double trid(const Vector& x) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) v += (x[i] - 1.0) * (x[i] - 1.0);
  for (Eigen::Index i = 1; i < x.size(); ++i) v -= x[i] * x[i - 1];
  return v;
}

Vector trid_minimizer(int d) {
  Vector m(d);
  for (int i = 0; i < d; ++i) m[i] = static_cast<double>((i + 1) * (d - i));
  return m;
}

// Schaffer functions are two-dimensional; higher dimensions sum the pair form
// over consecutive coordinates.
double schaffer_pairs(const Vector& x, bool second) {
  double v = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i] * x[i];
    const double b = x[i + 1] * x[i + 1];
    const double arg = second ? (a - b) : (a + b);
    const double den = std::pow(1.0 + 0.001 * (a + b), 2);
    v += 0.5 + (std::pow(std::sin(arg), 2) - 0.5) / den;
  }
  return v;
}

// Corrugated spring with its centre moved to the origin.
double corrugated(const Vector& x) {
  const double r2 = x.squaredNorm();
  return -std::cos(5.0 * std::sqrt(r2)) + 0.1 * r2;
}

double cosine_mixture(const Vector& x) {
  return x.squaredNorm() - 0.1 * (5.0 * kPi * x.array()).cos().sum();
}

double alpine1(const Vector& x) {
  return (x.array() * x.array().sin() + 0.1 * x.array()).abs().sum();
}

double dropwave(const Vector& x) {
  const double r2 = x.squaredNorm();
  return -(1.0 + std::cos(12.0 * std::sqrt(r2))) / (0.5 * r2 + 2.0);
}

double sphere(const Vector& x) { return x.squaredNorm(); }

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"ackley", 1, ackley, zeros},
      {"griewank", 1, griewank, zeros},
      {"rastrigin", 1, rastrigin, zeros},
      {"levy3", 1, levy3, [](int d) { return Vector::Ones(d).eval(); }},
      {"rosenbrock", 2, rosenbrock, [](int d) { return Vector::Ones(d).eval(); }},
      {"zakharov", 1, zakharov, zeros},
      {"brown", 2, brown, zeros},
      {"exponential", 1, exponential, zeros},
      {"trid", 2, trid, trid_minimizer},
      {"schaffer1", 2, [](const Vector& x) { return schaffer_pairs(x, false); }, zeros},
      {"schaffer2", 2, [](const Vector& x) { return schaffer_pairs(x, true); }, zeros},
      {"corrugated", 1, corrugated, zeros},
      {"cosine_mixture", 1, cosine_mixture, zeros},
      {"alpine1", 1, alpine1, zeros},
      {"dropwave", 1, dropwave, zeros},
      {"sphere", 1, sphere, zeros},
  };
  return entries;
}

const CatalogEntry& lookup(const std::string& name) {
  for (const auto& e : catalog()) {
    if (e.name == name) return e;
  }
  throw std::invalid_argument("unknown function name '" + name + "'");
}

}  // namespace

const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : catalog()) out.push_back(e.name);
    return out;
  }();
  return names;
}

Objective make_benchmark(const std::string& name, int dim, const Vector& shift) {
  const CatalogEntry& entry = lookup(name);
  if (dim < entry.min_dim) {
    throw std::invalid_argument("function '" + name + "' requires d >= " +
                                std::to_string(entry.min_dim) + ", got " +
                                std::to_string(dim));
  }
  if (shift.size() != dim) {
    throw std::invalid_argument("shift has dimension " + std::to_string(shift.size()) +
                                ", expected " + std::to_string(dim));
  }
  if ((shift.array().abs() > 1.0).any()) {
    throw std::invalid_argument("shift must lie in [-1, 1]^d");
  }
  const Vector m = entry.raw_minimizer(dim);
  // Evaluated at exactly m so that f(shift) is exactly zero.
  const double fmin = entry.raw(m);
  RawFn raw = entry.raw;
  auto fn = [raw, shift, m, fmin](const Vector& x) {
    return raw((x - shift + m).eval()) - fmin;
  };
  return Objective(name, Box::cube(dim, -5.0, 5.0), fn, KnownMinimum{shift, 0.0});
}

Objective make_benchmark(const std::string& name, int dim) {
  return make_benchmark(name, dim, Vector::Zero(dim));
}

Vector random_shift(const std::string& name, int dim, std::uint64_t seed,
                    ShiftMode mode) {
  // Stream keyed by (name, dim, seed).
  std::uint64_t key = seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(dim);
  for (char c : name) key = key * 131 + static_cast<unsigned char>(c);
  std::mt19937_64 rng(key);
  Vector s(dim);
  if (mode == ShiftMode::kLattice) {
    std::uniform_int_distribution<int> pick(-10, 10);
    for (int i = 0; i < dim; ++i) s[i] = pick(rng) / 10.0;
  } else {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < dim; ++i) s[i] = u(rng);
  }
  return s;
}

Eigen::MatrixXd risk_parity_covariance(int dim) {
  Eigen::MatrixXd cov(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      cov(i, j) = std::exp(-static_cast<double>((i - j) * (i - j)) / 4.0);
    }
  }
  return cov;
}

double risk_parity_value(const Eigen::MatrixXd& cov, const Vector& w,
                         double penalty_weight) {
  const Vector sw = cov * w;
  const double sigma = std::sqrt(std::max(0.0, w.dot(sw)));
  const double d = static_cast<double>(w.size());
  const double risk = (w.array() * sw.array() - sigma / d).square().sum();
  const double residual = w.sum() - 1.0;
  return risk + penalty_weight * residual * residual;
}

KnownMinimum risk_parity_reference(int dim, double penalty_weight, int samples,
                                   std::uint64_t seed) {
  const Eigen::MatrixXd cov = risk_parity_covariance(dim);
  auto value = [&](const Vector& w) { return risk_parity_value(cov, w, penalty_weight); };

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  Vector best = Vector::Constant(dim, 1.0 / dim);
  double best_f = value(best);
  Vector w(dim);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < dim; ++i) w[i] = expo(rng);
    w /= w.sum();
    const double fw = value(w);
    if (fw < best_f) {
      best_f = fw;
      best = w;
    }
  }

  // Compass search restricted to [0, 1]^d.
  double step = 0.05;
  while (step > 1e-12) {
    bool improved = false;
    for (int i = 0; i < dim; ++i) {
      for (double sign : {1.0, -1.0}) {
        Vector trial = best;
        trial[i] = std::clamp(trial[i] + sign * step, 0.0, 1.0);
        const double ft = value(trial);
        if (ft < best_f) {
          best_f = ft;
          best = trial;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {best, best_f};
}

Objective make_risk_parity(int dim, double penalty_weight) {
  if (dim < 2) throw std::invalid_argument("risk_parity requires d >= 2");
  if (!(penalty_weight > 0.0)) {
    throw std::invalid_argument("risk_parity penalty_weight must be positive");
  }
  const Eigen::MatrixXd cov = risk_parity_covariance(dim);
  auto fn = [cov, penalty_weight](const Vector& w) {
    return risk_parity_value(cov, w, penalty_weight);
  };
  return Objective("risk_parity", Box::cube(dim, 0.0, 1.0), fn,
                   risk_parity_reference(dim, penalty_weight));
}

double dna_site_potential(double s) {
  const double a = s * s - 1.0;
  return a * a + 0.05 * (1.0 + s);
}

double dna_site_minimizer() {
  double s = -1.0;
  for (int it = 0; it < 50; ++it) {
    const double g = 4.0 * s * s * s - 4.0 * s + 0.05;
    const double h = 12.0 * s * s - 4.0;
    const double step = g / h;
    s -= step;
    if (std::abs(step) < 1e-16) break;
  }
  return s;
}

Objective make_dna_chain(int dim) {
  if (dim < 1) throw std::invalid_argument("dna_chain requires d >= 1");
  const double s_star = dna_site_minimizer();
  double fmin = 0.0;
  for (int i = 0; i < dim; ++i) fmin += dna_site_potential(s_star);
  auto fn = [fmin](const Vector& x) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) v += dna_site_potential(x[i]);
    return v - fmin;
  };
  return Objective("dna_chain", Box::cube(dim, -2.0, 2.0), fn,
                   KnownMinimum{Vector::Constant(dim, s_star), 0.0});
}

Objective make_double_well() {
  auto fn = [](const Vector& z) {
    const double a = z[0] * z[0] - 1.0;
    return a * a;
  };
  return Objective("double_well", Box::cube(1, -3.0, 3.0), fn);
}

Objective make_quadratic(int dim) {
  if (dim < 1) throw std::invalid_argument("quadratic requires d >= 1");
  auto fn = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  return Objective("quadratic", Box::cube(dim, -5.0, 5.0), fn,
                   KnownMinimum{Vector::Zero(dim), 0.0});
}

Objective make_objective(const std::string& name, int dim, const Vector& shift) {
  if (name == "risk_parity") return make_risk_parity(dim);
  if (name == "dna_chain") return make_dna_chain(dim);
  if (name == "double_well") {
    if (dim != 1) throw std::invalid_argument("double_well is one-dimensional");
    return make_double_well();
  }
  if (name == "quadratic") return make_quadratic(dim);
  return make_benchmark(name, dim, shift);
}

}  // namespace ippopt
