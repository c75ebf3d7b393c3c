#include "ippopt/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

namespace ippopt {

namespace {

// Runs body(i) for i in [0, count) on up to `jobs` threads.
template <class Body>
void parallel_for(std::size_t count, int jobs, Body&& body) {
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void check_keys(const json& j, const std::set<std::string>& known, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError(it.key(), "unknown key");
  }
}

template <class T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(key, "wrong type");
  }
}

std::optional<std::uint64_t> optional_seed(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number_unsigned()) throw ConfigError(key, "expected a non-negative integer");
  return j.at(key).get<std::uint64_t>();
}

Objective study_objective(const std::string& name, int dim,
                          const std::optional<std::uint64_t>& shift_seed) {
  try {
    const Vector shift =
        shift_seed ? random_shift(name, dim, *shift_seed) : Vector::Zero(dim).eval();
    return make_objective(name, dim, shift);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("function", e.what());
  }
}

CrossConfig cross_from_json(const json& j, const CrossConfig& base) {
  IPPParams p;
  p.cross = base;
  return params_from_json(json{{"cross", j}}, p, "").cross;
}

std::string join_doubles(const Vector& v, char sep) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += format_double(v[i]);
  }
  return s;
}

}  // namespace

std::string default_out_dir() {
  const char* env = std::getenv("IPPOPT_OUT_DIR");
  return env != nullptr && *env != '\0' ? std::string(env) : std::string("ippopt-out");
}

std::vector<BenchResult> run_bench(const RunConfig& config, int jobs) {
  std::vector<BenchResult> results(config.seeds.size());
  parallel_for(config.seeds.size(), jobs, [&](std::size_t i) {
    const std::uint64_t seed = config.seeds[i];
    BenchResult& out = results[i];
    out.shift = config_shift(config, seed);
    const Objective f = make_objective(config.function, config.dim, out.shift);
    const auto start = std::chrono::steady_clock::now();
    out.report = run_solver(config.solver, f, config.params, seed);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.row.name = config.function;
    out.row.dim = config.dim;
    out.row.solver = config.solver;
    out.row.seed = seed;
    out.row.final_error_inf = f.known_min() ? f.error_inf(out.report.x)
                                            : std::numeric_limits<double>::quiet_NaN();
    out.row.evals = out.report.evals;
    out.row.termination = to_string(out.report.termination);
    out.row.wallclock = secs;
  });
  std::sort(results.begin(), results.end(),
            [](const BenchResult& a, const BenchResult& b) { return a.row.seed < b.row.seed; });
  return results;
}

void write_bench_artifacts(const RunConfig& config, const std::vector<BenchResult>& results,
                           const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream os(fs::path(dir) / "config.json");
    os << to_json(config).dump(2) << '\n';
  }
  for (const auto& r : results) {
    const std::string name = config.function + "_d" + std::to_string(config.dim) + "_" +
                             config.solver + "_seed" + std::to_string(r.row.seed) + ".jsonl";
    std::ofstream os(fs::path(dir) / name);
    json header{{"type", "run"},
                {"function", config.function},
                {"dim", config.dim},
                {"solver", config.solver},
                {"seed", r.row.seed},
                {"shift", std::vector<double>(r.shift.data(), r.shift.data() + r.shift.size())},
                {"params", to_json(r.report.params)}};
    os << header.dump() << '\n';
    for (const auto& rec : r.report.trace) {
      json line = to_json(rec);
      line["type"] = "iter";
      os << line.dump() << '\n';
    }
    json tail = to_json(r.report);
    tail.erase("trace");
    tail.erase("params");
    tail["type"] = "report";
    tail["final_error_inf"] = r.row.final_error_inf;
    os << tail.dump() << '\n';
  }
  std::ofstream os(fs::path(dir) / "summary.csv");
  write_summary_header(os);
  for (const auto& r : results) write_summary_row(os, r.row);
}

ProxStudyConfig prox_study_config_from_json(const json& j) {
  check_keys(j, {"function", "dim", "shift_seed", "anchors", "anchor_count", "t", "deltas",
                 "methods", "mc_samples", "h", "reference_h", "cross", "seed"},
             "prox-study config");
  ProxStudyConfig c;
  c.function = field(j, "function", c.function);
  c.dim = field(j, "dim", c.dim);
  c.shift_seed = optional_seed(j, "shift_seed");
  if (j.contains("anchors")) {
    for (const auto& a : j.at("anchors")) {
      const auto v = a.get<std::vector<double>>();
      if (static_cast<int>(v.size()) != c.dim) throw ConfigError("anchors", "wrong dimension");
      c.anchors.push_back(Eigen::Map<const Vector>(v.data(), c.dim));
    }
  }
  c.anchor_count = field(j, "anchor_count", c.anchor_count);
  c.t = field(j, "t", c.t);
  c.deltas = field(j, "deltas", c.deltas);
  c.methods = field(j, "methods", c.methods);
  c.mc_samples = field(j, "mc_samples", c.mc_samples);
  c.h = field(j, "h", c.h);
  c.reference_h = field(j, "reference_h", c.reference_h);
  if (j.contains("cross")) c.cross = cross_from_json(j.at("cross"), c.cross);
  c.seed = field(j, "seed", c.seed);
  if (c.dim < 1) throw ConfigError("dim", "must be >= 1");
  if (!(c.t > 0.0)) throw ConfigError("t", "must be > 0");
  if (c.deltas.empty()) throw ConfigError("deltas", "must not be empty");
  for (double d : c.deltas) {
    if (!(d > 0.0)) throw ConfigError("deltas", "must be > 0");
  }
  for (const auto& m : c.methods) {
    if (m != "mc" && m != "tt" && m != "dense") {
      throw ConfigError("methods", "unknown method '" + m + "' (expected mc, tt or dense)");
    }
  }
  if (c.mc_samples < 1) throw ConfigError("mc_samples", "must be >= 1");
  if (!(c.h > 0.0)) throw ConfigError("h", "must be > 0");
  if (!(c.reference_h > 0.0)) throw ConfigError("reference_h", "must be > 0");
  if (c.anchors.empty() && c.anchor_count < 1) throw ConfigError("anchor_count", "must be >= 1");
  return c;
}

json to_json(const ProxStudyConfig& c) {
  json anchors = json::array();
  for (const auto& a : c.anchors) anchors.push_back(std::vector<double>(a.data(), a.data() + a.size()));
  IPPParams p;
  p.cross = c.cross;
  json j{{"function", c.function}, {"dim", c.dim},       {"anchors", anchors},
         {"anchor_count", c.anchor_count}, {"t", c.t},   {"deltas", c.deltas},
         {"methods", c.methods},   {"mc_samples", c.mc_samples}, {"h", c.h},
         {"reference_h", c.reference_h}, {"cross", to_json(p)["cross"]}, {"seed", c.seed}};
  if (c.shift_seed) j["shift_seed"] = *c.shift_seed;
  return j;
}

std::vector<ProxStudyRow> prox_study(const ProxStudyConfig& config) {
  if (config.dim > 3) {
    throw std::invalid_argument("prox_study: the dense reference needs d <= 3, got d = " +
                                std::to_string(config.dim));
  }
  const Objective f = study_objective(config.function, config.dim, config.shift_seed);
  Rng rng(config.seed);
  std::vector<Vector> anchors = config.anchors;
  if (anchors.empty()) {
    const Box& box = f.domain();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int a = 0; a < config.anchor_count; ++a) {
      Vector x(config.dim);
      for (int j = 0; j < config.dim; ++j) x[j] = box.lo[j] + (box.hi[j] - box.lo[j]) * unit(rng);
      anchors.push_back(x);
    }
  }
  const MeshGrid mesh = MeshGrid::uniform(f.domain(), config.h);
  const MeshGrid ref_mesh = MeshGrid::uniform(f.domain(), config.reference_h);
  const double shift = latin_hypercube_min(f, 1000, rng);

  std::vector<ProxStudyRow> rows;
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    const Vector& x = anchors[a];
    const Vector prox_node = dense_prox_node(f, x, config.t, ref_mesh);
    for (std::size_t k = 0; k < config.deltas.size(); ++k) {
      const ProxQuery q{x, config.t, config.deltas[k]};
      const Vector reference = dense_gibbs_mean(f, q, ref_mesh);
      for (const auto& method : config.methods) {
        Vector est;
        if (method == "mc") {
          Rng mc_rng(config.seed * 1000003ULL + a * 1009ULL + k);
          est = prox_mc(f, q, config.mc_samples, mc_rng).point;
        } else if (method == "tt") {
          Rng tt_rng(config.seed * 1000003ULL + a * 1009ULL + k);
          const GibbsTT psi = build_gibbs_tt(f, mesh, q.delta, shift, config.cross, tt_rng);
          est = tt_prox(psi.tt, psi.mesh, q);
        } else {
          est = dense_gibbs_mean(f, q, mesh);
        }
        rows.push_back({x, q.t, q.delta, method, est, (est - reference).norm(),
                        (est - prox_node).norm()});
      }
    }
  }
  return rows;
}

void write_prox_study_csv(std::ostream& os, const std::vector<ProxStudyRow>& rows) {
  os << "x,t,delta,method,estimate,error,prox_error\n";
  for (const auto& r : rows) {
    os << '"' << join_doubles(r.x, ' ') << "\"," << format_double(r.t) << ','
       << format_double(r.delta) << ',' << r.method << ",\"" << join_doubles(r.estimate, ' ')
       << "\"," << format_double(r.error) << ',' << format_double(r.prox_error) << '\n';
  }
}

TTDemoConfig tt_demo_config_from_json(const json& j) {
  check_keys(j, {"function", "dim", "shift_seed", "delta", "h", "cross", "probes", "seed"},
             "tt-demo config");
  TTDemoConfig c;
  c.function = field(j, "function", c.function);
  c.dim = field(j, "dim", c.dim);
  c.shift_seed = optional_seed(j, "shift_seed");
  c.delta = field(j, "delta", c.delta);
  c.h = field(j, "h", c.h);
  if (j.contains("cross")) c.cross = cross_from_json(j.at("cross"), c.cross);
  c.probes = field(j, "probes", c.probes);
  c.seed = field(j, "seed", c.seed);
  if (c.dim < 1) throw ConfigError("dim", "must be >= 1");
  if (!(c.delta > 0.0)) throw ConfigError("delta", "must be > 0");
  if (!(c.h > 0.0)) throw ConfigError("h", "must be > 0");
  if (c.probes < 1) throw ConfigError("probes", "must be >= 1");
  return c;
}

json to_json(const TTDemoConfig& c) {
  IPPParams p;
  p.cross = c.cross;
  json j{{"function", c.function}, {"dim", c.dim},       {"delta", c.delta}, {"h", c.h},
         {"cross", to_json(p)["cross"]}, {"probes", c.probes}, {"seed", c.seed}};
  if (c.shift_seed) j["shift_seed"] = *c.shift_seed;
  return j;
}

TTDemoResult tt_demo(const TTDemoConfig& config) {
  const Objective f = study_objective(config.function, config.dim, config.shift_seed);
  Rng rng(config.seed);
  const MeshGrid mesh = MeshGrid::uniform(f.domain(), config.h);
  const ProbeResult probe = latin_hypercube_probe(f, 1000, rng);
  const CrossIndexSets sets = index_sets_through(mesh.nearest_index(probe.x_min));
  const auto start = std::chrono::steady_clock::now();
  const GibbsTT psi = build_gibbs_tt(f, mesh, config.delta, probe.f_min, config.cross, rng, &sets);
  TTDemoResult r;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  // The stored train is normalized; undo it so probes compare raw entries.
  r.tt = scale(psi.tt, std::exp(psi.log_scale));
  r.ranks = r.tt.ranks();
  r.converged = psi.cross_info.converged;
  r.rank_capped = psi.cross_info.rank_capped;
  r.sweeps = psi.cross_info.sweeps;
  r.oracle_calls = psi.cross_info.oracle_calls;
  const auto n = mesh.mode_sizes();
  double err2 = 0.0;
  double ref2 = 0.0;
  MultiIndex idx(n.size());
  for (int s = 0; s < config.probes; ++s) {
    for (std::size_t j = 0; j < n.size(); ++j) {
      idx[j] = std::uniform_int_distribution<int>(0, n[j] - 1)(rng);
    }
    const double exact =
        std::exp(std::min(-(f(mesh.point(idx)) - probe.f_min) / config.delta, 700.0));
    const double approx = r.tt(idx);
    err2 += (approx - exact) * (approx - exact);
    ref2 += exact * exact;
  }
  r.probe_error = ref2 > 0.0 ? std::sqrt(err2 / ref2) : std::sqrt(err2);
  return r;
}

json to_json(const TTDemoResult& r) {
  return json{{"ranks", r.ranks},
              {"max_rank", r.tt.max_rank()},
              {"converged", r.converged},
              {"rank_capped", r.rank_capped},
              {"sweeps", r.sweeps},
              {"oracle_calls", r.oracle_calls},
              {"probe_error", r.probe_error},
              {"seconds", r.seconds}};
}

HJRunConfig hj_run_config_from_json(const json& j) {
  check_keys(j, {"initial_condition", "dim", "p", "t", "points", "radius", "fd_step",
                 "inner_solver", "inner", "seed"},
             "hj config");
  HJRunConfig c;
  c.initial_condition = field(j, "initial_condition", c.initial_condition);
  c.dim = field(j, "dim", c.dim);
  c.p = field(j, "p", c.p);
  c.t = field(j, "t", c.t);
  c.points = field(j, "points", c.points);
  c.radius = field(j, "radius", c.radius);
  c.fd_step = field(j, "fd_step", c.fd_step);
  c.inner_solver = field(j, "inner_solver", c.inner_solver);
  if (j.contains("inner")) c.inner = j.at("inner");
  c.seed = field(j, "seed", c.seed);
  if (c.dim < 1) throw ConfigError("dim", "must be >= 1");
  if (!(c.p > 1.0)) throw ConfigError("p", "must be > 1");
  if (!(c.fd_step > 0.0)) throw ConfigError("fd_step", "must be > 0");
  if (!(c.t > c.fd_step)) throw ConfigError("t", "must exceed fd_step");
  if (c.points < 1) throw ConfigError("points", "must be >= 1");
  if (!(c.radius > 0.0)) throw ConfigError("radius", "must be > 0");
  if (!c.inner_solver.empty() && c.inner_solver != "tt-ipp" && c.inner_solver != "mc-ipp") {
    throw ConfigError("inner_solver", "expected tt-ipp or mc-ipp");
  }
  make_hj_problem(c);
  return c;
}

json to_json(const HJRunConfig& c) {
  return json{{"initial_condition", c.initial_condition},
              {"dim", c.dim},
              {"p", c.p},
              {"t", c.t},
              {"points", c.points},
              {"radius", c.radius},
              {"fd_step", c.fd_step},
              {"inner_solver", c.inner_solver},
              {"inner", c.inner},
              {"seed", c.seed}};
}

HJProblem make_hj_problem(const HJRunConfig& c) {
  Objective f = [&] {
    try {
      return hj_initial_condition(c.initial_condition, c.dim);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("initial_condition", e.what());
    }
  }();
  HJProblem prob = HJProblem::make(std::move(f), c.p, c.seed);
  prob.fd_step = c.fd_step;
  prob.inner_solver = c.inner_solver;
  prob.inner = hj_inner_defaults(prob.resolved_solver());
  prob.inner = params_from_json(c.inner, prob.inner, "inner");
  try {
    if (prob.resolved_solver() == "tt-ipp") {
      prob.inner.validate_tt();
    } else {
      prob.inner.validate_mc();
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("inner", e.what());
  }
  return prob;
}

HJRunResult run_hj(const HJRunConfig& config, int jobs) {
  const HJProblem prob = make_hj_problem(config);
  Rng rng(config.seed);
  std::uniform_real_distribution<double> coord(-config.radius, config.radius);
  std::vector<Vector> xs;
  for (int i = 0; i < config.points; ++i) {
    Vector x(config.dim);
    for (auto& v : x) v = coord(rng);
    xs.push_back(x);
  }
  HJRunResult out;
  out.samples.resize(xs.size());
  parallel_for(xs.size(), jobs, [&](std::size_t i) {
    out.samples[i] = hopf_lax_with_residual(prob, xs[i], config.t);
  });
  double ss = 0.0;
  for (const auto& s : out.samples) ss += s.residual * s.residual;
  out.l2_residual = std::sqrt(ss / static_cast<double>(out.samples.size()));
  return out;
}

void write_hj_csv(std::ostream& os, const HJRunResult& r) {
  os << "x,t,u_tilde,residual,y_tilde,inner_evals\n";
  for (const auto& s : r.samples) {
    os << '"' << join_doubles(s.x, ' ') << "\"," << format_double(s.t) << ','
       << format_double(s.u_tilde) << ',' << format_double(s.residual) << ",\""
       << join_doubles(s.y_tilde, ' ') << "\"," << s.inner_evals << '\n';
  }
}

}  // namespace ippopt
