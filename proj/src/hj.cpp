#include "ippopt/hj.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

#include "ippopt/benchfns.hpp"

namespace ippopt {

HJProblem HJProblem::make(Objective f, double p, std::uint64_t seed) {
  if (!(p > 1.0)) throw std::invalid_argument("HJProblem: p must be > 1");
  HJProblem prob{.f = std::move(f)};
  prob.p = p;
  prob.q = p / (p - 1.0);
  prob.seed = seed;
  prob.inner = hj_inner_defaults(prob.resolved_solver());
  return prob;
}

IPPParams hj_inner_defaults(const std::string& solver) {
  if (solver == "mc-ipp") return IPPParams::mc_defaults();
  IPPParams p = IPPParams::tt_defaults();
  p.delta_floor = 1e-3;
  p.eps_stop = 0.0;
  p.k_max = 60;
  return p;
}

void HJProblem::validate() const {
  if (!(p > 1.0) || !(q > 1.0)) throw std::invalid_argument("HJProblem: need p, q > 1");
  if (std::abs(1.0 / p + 1.0 / q - 1.0) > 1e-12) {
    throw std::invalid_argument("HJProblem: 1/p + 1/q must equal 1");
  }
  if (!(fd_step > 0.0)) throw std::invalid_argument("HJProblem: fd_step must be > 0");
  if (!(inner_radius > 0.0)) throw std::invalid_argument("HJProblem: inner_radius must be > 0");
}

std::string HJProblem::resolved_solver() const {
  if (!inner_solver.empty()) return inner_solver;
  return f.dim() <= 16 ? "tt-ipp" : "mc-ipp";
}

double conjugate_value(const Vector& v, double q) {
  if (!(q > 1.0)) throw std::invalid_argument("conjugate_value: q must be > 1");
  return v.array().abs().pow(q).sum() / q;
}

double hamiltonian_value(const Vector& v, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("hamiltonian_value: p must be > 1");
  return v.array().abs().pow(p).sum() / p;
}

std::uint64_t hj_inner_seed(const Vector& x, double t, std::uint64_t master) {
  // splitmix64 over the bit patterns of (master, t, x).
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  auto bits = [](double v) {
    std::uint64_t b = 0;
    std::memcpy(&b, &v, sizeof b);
    return b;
  };
  std::uint64_t h = mix(master);
  h = mix(h ^ bits(t));
  for (Eigen::Index i = 0; i < x.size(); ++i) h = mix(h ^ bits(x[i]));
  return h;
}

HJSample hopf_lax(const HJProblem& prob, const Vector& x, double t,
                  std::optional<std::uint64_t> seed) {
  prob.validate();
  if (!(t > 0.0)) throw std::invalid_argument("hopf_lax: t must be > 0");
  const Eigen::Index d = prob.f.dim();
  if (x.size() != d) throw std::invalid_argument("hopf_lax: x has the wrong dimension");

  const Objective& f = prob.f;
  const double q = prob.q;
  const std::string solver = prob.resolved_solver();
  const Box box = solver == "tt-ipp" ? Box::cube(d, -prob.inner_radius, prob.inner_radius)
                                     : f.domain();
  Objective inner("hopf_lax_inner", box, [f, x, t, q](const Vector& y) {
    return f(y) + t * conjugate_value((x - y) / t, q);
  });

  const std::uint64_t s = seed ? *seed : hj_inner_seed(x, t, prob.seed);
  RunReport rep;
  try {
    rep = run_solver(solver, inner, prob.inner, s);
  } catch (const std::exception& e) {
    throw std::runtime_error("hopf_lax at t = " + std::to_string(t) + ": " + e.what());
  }
  if (rep.termination == Termination::kFailure) {
    throw std::runtime_error("hopf_lax at t = " + std::to_string(t) +
                             ": inner solver failed: " + rep.message);
  }
  HJSample out;
  out.x = x;
  out.t = t;
  out.y_tilde = rep.x;
  out.u_tilde = f(rep.x) + t * conjugate_value((rep.x - x) / t, q);
  out.inner_evals = rep.evals;
  return out;
}

double residual_of(const HJValue& u, const Vector& x, double t, double p, double h) {
  if (!(h > 0.0) || !(t > h)) throw std::invalid_argument("residual: need 0 < fd_step < t");
  const double ut = (u(x, t + h) - u(x, t - h)) / (2.0 * h);
  Vector grad(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x;
    Vector xm = x;
    xp[i] += h;
    xm[i] -= h;
    grad[i] = (u(xp, t) - u(xm, t)) / (2.0 * h);
  }
  return std::abs(ut + hamiltonian_value(grad, p));
}

double residual(const HJProblem& prob, const Vector& x, double t) {
  const std::uint64_t s = hj_inner_seed(x, t, prob.seed);
  return residual_of(
      [&](const Vector& y, double tt) { return hopf_lax(prob, y, tt, s).u_tilde; }, x, t,
      prob.p, prob.fd_step);
}

HJSample hopf_lax_with_residual(const HJProblem& prob, const Vector& x, double t) {
  HJSample s = hopf_lax(prob, x, t);
  s.residual = residual(prob, x, t);
  return s;
}

Objective hj_f1(int dim) {
  if (dim < 1) throw std::invalid_argument("hj_f1: dimension must be >= 1");
  return Objective("f1", Box::cube(dim, -5.0, 5.0),
                   [](const Vector& x) { return x.array().abs().sqrt().sum(); },
                   KnownMinimum{Vector::Zero(dim), 0.0});
}

Objective hj_f2(int dim) {
  if (dim < 1) throw std::invalid_argument("hj_f2: dimension must be >= 1");
  return Objective("f2", Box::cube(dim, -5.0, 5.0), [](const Vector& x) {
    return (x.array() * std::numbers::pi).sin().sum() + static_cast<double>(x.size());
  });
}

Objective hj_initial_condition(const std::string& name, int dim) {
  if (name == "f1") return hj_f1(dim);
  if (name == "f2") return hj_f2(dim);
  if (name == "quadratic") return make_quadratic(dim);
  throw std::invalid_argument("unknown initial condition '" + name +
                              "' (expected f1, f2 or quadratic)");
}

}  // namespace ippopt
