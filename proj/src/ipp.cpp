#include "ippopt/ipp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ippopt {

IPPParams IPPParams::tt_defaults() {
  IPPParams p;
  p.cross.tau_stop = 1e-3;
  return p;
}

IPPParams IPPParams::mc_defaults() {
  IPPParams p;
  p.eta_minus = 0.9;
  return p;
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("IPPParams: ") + what);
}

}  // namespace

void IPPParams::validate_common() const {
  require(delta0 > 0.0 && delta0 < 1.0, "delta0 must lie in (0, 1)");
  require(eta_minus > 0.0 && eta_minus < 1.0, "eta_minus must lie in (0, 1)");
  require(eta_plus > 1.0, "eta_plus must be > 1");
  require(theta1 > 0.0 && theta1 <= theta2 && theta2 < 1.0,
          "need 0 < theta1 <= theta2 < 1");
  require(eps_bar > 0.0, "eps_bar must be > 0");
  require(eta > 0.0 && eta < 1.0, "eta must lie in (0, 1)");
  require(T > 0.0 && tau > 0.0 && tau <= T, "need 0 < tau <= T");
  require(t0 >= tau && t0 <= T, "t0 must lie in [tau, T]");
  require(m >= 1, "m must be >= 1");
  require(k_max >= 1, "k_max must be >= 1");
  require(eps_stop >= 0.0, "eps_stop must be >= 0");
  require(delta_floor > 0.0, "delta_floor must be > 0");
  require(target_error >= 0.0, "target_error must be >= 0");
}

void IPPParams::validate_tt() const {
  validate_common();
  require(h0 > 0.0, "h0 must be > 0");
  require(gamma > 1.0, "gamma must be > 1");
  require(C_mesh > 0.0, "C_mesh must be > 0");
  require(max_mesh_points >= 2, "max_mesh_points must be >= 2");
  require(round_tol >= 0.0, "round_tol must be >= 0");
  require(shift_probe >= 1, "shift_probe must be >= 1");
}

void IPPParams::validate_mc() const {
  validate_common();
  require(alpha_min > 0.0 && alpha_min <= alpha0 && alpha0 <= alpha_max && alpha_max <= 1.0,
          "need 0 < alpha_min <= alpha0 <= alpha_max <= 1");
  require(alpha_min > 1.0 - eta_minus, "alpha_min must exceed 1 - eta_minus");
  require(p_reject > 0.0 && p_reject < 1.0, "p_reject must lie in (0, 1)");
  require(N0 >= 0, "N0 must be >= 0");
  require(C_growth > 1.0, "C_growth must be > 1");
  require(c_decay > 0.0 && c_decay < 1.0, "c_decay must lie in (0, 1)");
  require(warm_radius > 0.0, "warm_radius must be > 0");
  require(reject_cap >= 0, "reject_cap must be >= 0");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kEpsStop: return "eps_stop";
    case Termination::kBudget: return "budget";
    case Termination::kKMax: return "k_max";
    case Termination::kTarget: return "target";
    case Termination::kFailure: return "failure";
  }
  return "unknown";
}

Termination termination_from_string(const std::string& s) {
  for (auto t : {Termination::kEpsStop, Termination::kBudget, Termination::kKMax,
                 Termination::kTarget, Termination::kFailure}) {
    if (to_string(t) == s) return t;
  }
  throw std::invalid_argument("unknown termination '" + s + "'");
}

double t_update(double q_k, std::optional<double> q_prev, double t_k, const IPPParams& p) {
  if (!q_prev) return t_k;
  if (q_k <= p.theta1 * *q_prev + p.eps_bar) return std::min(p.eta_plus * t_k, p.T);
  if (q_k > p.theta2 * *q_prev + p.eps_bar) return std::max(p.eta_minus * t_k, p.tau);
  return t_k;
}

bool decrease_check(double f_new, const std::deque<double>& window, int k, double eta, int m) {
  if (window.empty()) throw std::invalid_argument("decrease_check: empty window");
  if (k < m - 1) return false;
  const double top = *std::max_element(window.begin(), window.end());
  return f_new > top - eta / std::max(k, 1);
}

Vector warm_start_mc(const Objective& f, double delta0, int samples, const Box& box, Rng& rng) {
  if (samples < 1) throw std::invalid_argument("warm_start_mc: need at least one sample");
  const Eigen::Index d = box.dim();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd z(d, samples);
  for (int i = 0; i < samples; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) z(j, i) = box.lo[j] + (box.hi[j] - box.lo[j]) * unit(rng);
  }
  std::vector<double> fz(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) fz[static_cast<std::size_t>(i)] = f(z.col(i));
  const double fmin = *std::min_element(fz.begin(), fz.end());
  Vector num = Vector::Zero(d);
  double den = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double w = std::exp(-(fz[static_cast<std::size_t>(i)] - fmin) / delta0);
    num += w * z.col(i);
    den += w;
  }
  return num / den;
}

Vector warm_start_tt(const TensorTrain& psi, const MeshGrid& mesh) {
  return tt_weighted_mean(psi, mesh);
}

namespace {

// Keeps exp() finite when the mesh holds points well below the shift.
constexpr double kMaxExponent = 700.0;

double gibbs_entry(double fz, double shift, double delta) {
  return std::exp(std::min(-(fz - shift) / delta, kMaxExponent));
}

void normalize(GibbsTT& g) {
  const double s = norm(g.tt);
  if (s > 0.0 && std::isfinite(s)) {
    g.tt = scale(std::move(g.tt), 1.0 / s);
    g.log_scale += std::log(s);
  }
}

}  // namespace

GibbsTT build_gibbs_tt(const Objective& f, const MeshGrid& mesh, double delta, double shift,
                       const CrossConfig& cfg, Rng& rng, const CrossIndexSets* seed_sets) {
  EntryOracle oracle(
      [&](std::span<const int> idx) { return gibbs_entry(f(mesh.point(idx)), shift, delta); },
      mesh.mode_sizes());
  CrossResult res = tt_cross(oracle, cfg, rng, seed_sets);
  GibbsTT g;
  g.tt = res.tt;
  g.mesh = mesh;
  g.delta = delta;
  g.shift = shift;
  g.index_sets = res.index_sets;
  res.index_sets = {};
  g.cross_info = std::move(res);
  normalize(g);
  return g;
}

GibbsTT square_gibbs_tt(const GibbsTT& g, double round_tol) {
  GibbsTT out = g;
  // Round first so the Kronecker ranks stay manageable.
  const TensorTrain base = round(g.tt, round_tol);
  out.tt = round(hadamard(base, base), round_tol);
  out.delta = g.delta / 2.0;
  out.log_scale = 2.0 * g.log_scale;
  normalize(out);
  return out;
}

CrossIndexSets refine_index_sets(const CrossIndexSets& sets, int factor) {
  CrossIndexSets out = sets;
  for (auto* group : {&out.left, &out.right}) {
    for (auto& set : *group) {
      for (auto& idx : set) {
        for (int& i : idx) i *= factor;
      }
    }
  }
  return out;
}

ProbeResult latin_hypercube_probe(const Objective& f, int count, Rng& rng) {
  if (count < 1) throw std::invalid_argument("latin_hypercube_probe: count must be >= 1");
  const Box& box = f.domain();
  const Eigen::Index d = box.dim();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<int>> strata(static_cast<std::size_t>(d));
  for (auto& s : strata) {
    s.resize(static_cast<std::size_t>(count));
    std::iota(s.begin(), s.end(), 0);
    std::shuffle(s.begin(), s.end(), rng);
  }
  ProbeResult best{std::numeric_limits<double>::infinity(), Vector()};
  Vector z(d);
  for (int i = 0; i < count; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double u = (strata[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] +
                        unit(rng)) / count;
      z[j] = box.lo[j] + (box.hi[j] - box.lo[j]) * u;
    }
    const double fz = f(z);
    if (fz < best.f_min || best.x_min.size() == 0) best = {fz, z};
  }
  return best;
}

double latin_hypercube_min(const Objective& f, int count, Rng& rng) {
  return latin_hypercube_probe(f, count, rng).f_min;
}

CrossIndexSets index_sets_through(const std::vector<int>& idx) {
  const std::size_t d = idx.size();
  CrossIndexSets sets;
  sets.left.resize(d + 1);
  sets.right.resize(d + 1);
  for (std::size_t j = 0; j <= d; ++j) {
    sets.left[j] = {MultiIndex(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(j))};
    sets.right[j] = {MultiIndex(idx.begin() + static_cast<std::ptrdiff_t>(j), idx.end())};
  }
  return sets;
}

namespace {

// Shared bookkeeping of the two drivers.
class Driver {
 public:
  Driver(const Objective& f, const IPPParams& p, std::uint64_t seed, std::string solver)
      : base_(f), p_(p), start_(f.eval_count()) {
    g_ = p.max_evals > 0 ? with_budget(f, p.max_evals) : f;
    report_.solver = std::move(solver);
    report_.seed = seed;
    report_.params = p;
    t_ = p.t0;
  }

  const Objective& g() const { return g_; }
  std::uint64_t evals() const { return base_.eval_count() - start_; }
  std::uint64_t remaining() const {
    if (p_.max_evals == 0) return std::numeric_limits<std::uint64_t>::max();
    return p_.max_evals > evals() ? p_.max_evals - evals() : 0;
  }

  bool target_reached(const Vector& x) const {
    return p_.target_error > 0.0 && base_.known_min() &&
           base_.error_inf(x) <= p_.target_error;
  }

  void start(const Vector& x, double fx, IterRecord rec) {
    x_ = x;
    fx_ = fx;
    window_.assign(1, fx);
    rec.k = 0;
    fill(rec);
    report_.trace.push_back(std::move(rec));
  }

  /// Accepts x^{k+1}; returns true when the run should stop.
  bool advance(int k, const Vector& x_new, double f_new, IterRecord rec) {
    const double step = (x_new - x_).norm();
    const double q = step / t_;
    t_ = t_update(q, q_prev_, t_, p_);
    q_prev_ = q;
    x_ = x_new;
    fx_ = f_new;
    window_.push_front(f_new);
    while (static_cast<int>(window_.size()) > p_.m) window_.pop_back();
    rec.k = k + 1;
    rec.q = q;
    fill(rec);
    report_.trace.push_back(std::move(rec));
    if (target_reached(x_)) return finish(Termination::kTarget);
    if (step < p_.eps_stop) return finish(Termination::kEpsStop);
    if (k + 1 >= p_.k_max) return finish(Termination::kKMax);
    return false;
  }

  bool finish(Termination why, std::string message = {}) {
    report_.termination = why;
    report_.message = std::move(message);
    return true;
  }

  RunReport done(std::optional<Vector> fallback = std::nullopt) {
    if (x_.size() == 0) {
      x_ = fallback ? *fallback : base_.domain().center();
      fx_ = std::numeric_limits<double>::quiet_NaN();
    }
    report_.x = x_;
    report_.f = fx_;
    report_.evals = evals();
    return std::move(report_);
  }

  double t() const { return t_; }
  const Vector& x() const { return x_; }
  double fx() const { return fx_; }
  const std::deque<double>& window() const { return window_; }

 private:
  void fill(IterRecord& rec) const {
    rec.x = x_;
    rec.f_x = fx_;
    rec.t = t_;
    rec.evals = evals();
  }

  const Objective& base_;
  Objective g_{"", Box::cube(1, 0, 1), nullptr};
  IPPParams p_;
  std::uint64_t start_;
  RunReport report_;
  Vector x_;
  double fx_ = 0.0;
  double t_ = 1.0;
  std::optional<double> q_prev_;
  std::deque<double> window_;
};

}  // namespace

namespace {

bool fits_mesh_cap(const MeshGrid& mesh, int factor, int cap) {
  for (int n : mesh.mode_sizes()) {
    if (static_cast<long long>(n - 1) * factor + 1 > cap) return false;
  }
  return true;
}

}  // namespace

RunReport tt_ipp(const Objective& f, const IPPParams& p, std::uint64_t seed) {
  p.validate_tt();
  Driver drv(f, p, seed, "tt-ipp");
  const Objective& g = drv.g();
  Rng rng(seed);
  GibbsTT psi;
  std::optional<Vector> probe_best;
  try {
    const ProbeResult probe = latin_hypercube_probe(g, p.shift_probe, rng);
    probe_best = probe.x_min;
    double shift = probe.f_min;
    const MeshGrid mesh0 = MeshGrid::uniform(f.domain(), p.h0);
    const CrossIndexSets probe_sets = index_sets_through(mesh0.nearest_index(probe.x_min));
    psi = build_gibbs_tt(g, mesh0, p.delta0, shift, p.cross, rng, &probe_sets);
    const Vector x0 = warm_start_tt(psi.tt, psi.mesh);
    const double f0 = g(x0);
    IterRecord rec;
    rec.delta = psi.delta;
    rec.h = psi.mesh.h();
    rec.tt_rank = psi.tt.max_rank();
    drv.start(x0, f0, rec);
    if (drv.target_reached(x0)) {
      drv.finish(Termination::kTarget);
      return drv.done();
    }

    const int refine_factor = 1 << static_cast<int>(std::floor(p.gamma));
    for (int k = 0;; ++k) {
      Vector x_new;
      try {
        x_new = tt_prox(psi.tt, psi.mesh, {drv.x(), drv.t(), psi.delta});
      } catch (const std::runtime_error&) {
        // Squared trains can lose the mass near the anchor; rebuild once at
        // the current temperature and retry.
        psi = build_gibbs_tt(g, psi.mesh, psi.delta, shift, p.cross, rng, &psi.index_sets);
        x_new = tt_prox(psi.tt, psi.mesh, {drv.x(), drv.t(), psi.delta});
      }
      const double f_new = g(x_new);
      shift = std::min(shift, f_new);
      IterRecord rec;
      if (decrease_check(f_new, drv.window(), k, p.eta, p.m) &&
          psi.delta / 2.0 >= p.delta_floor) {
        psi = square_gibbs_tt(psi, p.round_tol);
        rec.delta_halved = true;
        const double h = psi.mesh.h();
        if (h > p.C_mesh * std::pow(psi.delta, p.gamma) &&
            fits_mesh_cap(psi.mesh, refine_factor, p.max_mesh_points)) {
          const MeshGrid fine = psi.mesh.refined(refine_factor);
          const CrossIndexSets seed_sets = refine_index_sets(psi.index_sets, refine_factor);
          psi = build_gibbs_tt(g, fine, psi.delta, shift, p.cross, rng, &seed_sets);
          rec.mesh_refined = true;
        }
      }
      rec.delta = psi.delta;
      rec.h = psi.mesh.h();
      rec.tt_rank = psi.tt.max_rank();
      if (drv.advance(k, x_new, f_new, rec)) break;
    }
  } catch (const BudgetExhausted&) {
    drv.finish(Termination::kBudget);
  } catch (const std::exception& e) {
    drv.finish(Termination::kFailure, e.what());
  }
  return drv.done(probe_best);
}

RunReport mc_ipp(const Objective& f, const IPPParams& p, std::uint64_t seed) {
  p.validate_mc();
  Driver drv(f, p, seed, "mc-ipp");
  const Objective& g = drv.g();
  Rng rng(seed);
  const int d = static_cast<int>(f.dim());
  double n_real = p.N0 > 0 ? p.N0 : 40.0 * d;
  int N = static_cast<int>(std::ceil(n_real));
  double alpha = p.alpha0;
  double delta = p.delta0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  try {
    const Vector x0 =
        warm_start_mc(g, p.delta0, N, Box::cube(d, -p.warm_radius, p.warm_radius), rng);
    const double f0 = g(x0);
    IterRecord rec;
    rec.delta = delta;
    rec.N = N;
    rec.alpha = alpha;
    drv.start(x0, f0, rec);
    if (drv.target_reached(x0)) {
      drv.finish(Termination::kTarget);
      return drv.done();
    }

    for (int k = 0;; ++k) {
      Vector y;
      double fy = 0.0;
      bool insufficient = false;
      int rejected = 0;
      for (;;) {
        if (drv.remaining() < static_cast<std::uint64_t>(N) + 1) throw BudgetExhausted();
        const ProxEstimate est = prox_mc(g, {drv.x(), drv.t(), delta}, N, rng);
        y = ewma_combine(est.point, drv.x(), alpha);
        fy = g(y);
        insufficient = decrease_check(fy, drv.window(), k, p.eta, p.m);
        const double top = *std::max_element(drv.window().begin(), drv.window().end());
        if (insufficient && fy >= top && rejected < p.reject_cap && unit(rng) < p.p_reject) {
          ++rejected;
          continue;
        }
        break;
      }
      IterRecord rec;
      rec.rejected = rejected;
      if (insufficient) {
        delta = std::max(p.c_decay * delta, p.delta_floor);
        alpha = std::max(p.alpha_min, p.c_decay * alpha);
        n_real *= p.C_growth;
        N = std::max(N, static_cast<int>(std::ceil(n_real - 1e-9)));
        rec.delta_halved = true;
      } else {
        alpha = std::min(alpha / p.c_decay, p.alpha_max);
      }
      rec.delta = delta;
      rec.N = N;
      rec.alpha = alpha;
      if (drv.advance(k, y, fy, rec)) break;
    }
  } catch (const BudgetExhausted&) {
    drv.finish(Termination::kBudget);
  } catch (const std::exception& e) {
    drv.finish(Termination::kFailure, e.what());
  }
  return drv.done(Box::cube(d, -p.warm_radius, p.warm_radius).center());
}

RunReport prs_baseline(const Objective& f, const IPPParams& p, std::uint64_t seed) {
  if (p.max_evals == 0) throw std::invalid_argument("prs_baseline: max_evals must be set");
  RunReport report;
  report.solver = "prs-baseline";
  report.seed = seed;
  report.params = p;
  Rng rng(seed);
  const Box& box = f.domain();
  const std::uint64_t start = f.eval_count();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector z(box.dim());
  report.f = std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < p.max_evals; ++i) {
    for (Eigen::Index j = 0; j < box.dim(); ++j) {
      z[j] = box.lo[j] + (box.hi[j] - box.lo[j]) * unit(rng);
    }
    const double v = f(z);
    if (v < report.f) {
      report.f = v;
      report.x = z;
      IterRecord rec;
      rec.k = static_cast<int>(report.trace.size());
      rec.x = z;
      rec.f_x = v;
      rec.evals = i + 1;
      report.trace.push_back(std::move(rec));
      if (p.target_error > 0.0 && f.known_min() && f.error_inf(z) <= p.target_error) {
        report.termination = Termination::kTarget;
        report.evals = f.eval_count() - start;
        return report;
      }
    }
  }
  report.termination = Termination::kBudget;
  report.evals = f.eval_count() - start;
  return report;
}

RunReport run_solver(const std::string& solver, const Objective& f, const IPPParams& params,
                     std::uint64_t seed) {
  if (solver == "tt-ipp") return tt_ipp(f, params, seed);
  if (solver == "mc-ipp") return mc_ipp(f, params, seed);
  if (solver == "prs-baseline") return prs_baseline(f, params, seed);
  throw std::invalid_argument("unknown solver '" + solver +
                              "' (expected tt-ipp, mc-ipp or prs-baseline)");
}

}  // namespace ippopt
