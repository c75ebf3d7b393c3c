#include "ippopt/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

namespace ippopt {

namespace {

template <class T>
struct Field {
  const char* key;
  T IPPParams::*member;
};

const Field<double> kDoubleFields[] = {
    {"delta0", &IPPParams::delta0},       {"eta_minus", &IPPParams::eta_minus},
    {"eta_plus", &IPPParams::eta_plus},   {"theta1", &IPPParams::theta1},
    {"theta2", &IPPParams::theta2},       {"eps_bar", &IPPParams::eps_bar},
    {"eta", &IPPParams::eta},             {"T", &IPPParams::T},
    {"tau", &IPPParams::tau},             {"t0", &IPPParams::t0},
    {"eps_stop", &IPPParams::eps_stop},   {"delta_floor", &IPPParams::delta_floor},
    {"target_error", &IPPParams::target_error},
    {"h0", &IPPParams::h0},               {"gamma", &IPPParams::gamma},
    {"C_mesh", &IPPParams::C_mesh},       {"round_tol", &IPPParams::round_tol},
    {"alpha0", &IPPParams::alpha0},       {"alpha_min", &IPPParams::alpha_min},
    {"alpha_max", &IPPParams::alpha_max}, {"p_reject", &IPPParams::p_reject},
    {"C_growth", &IPPParams::C_growth},   {"c_decay", &IPPParams::c_decay},
    {"warm_radius", &IPPParams::warm_radius},
};

const Field<int> kIntFields[] = {
    {"m", &IPPParams::m},
    {"k_max", &IPPParams::k_max},
    {"max_mesh_points", &IPPParams::max_mesh_points},
    {"shift_probe", &IPPParams::shift_probe},
    {"N0", &IPPParams::N0},
    {"reject_cap", &IPPParams::reject_cap},
};

template <class T>
struct CrossField {
  const char* key;
  T CrossConfig::*member;
};

const CrossField<double> kCrossDoubles[] = {
    {"tau_stop", &CrossConfig::tau_stop},
    {"truncation_tol", &CrossConfig::truncation_tol},
    {"maxvol_tol", &CrossConfig::maxvol_tol},
};

const CrossField<int> kCrossInts[] = {
    {"r_init", &CrossConfig::r_init},
    {"rank_increment", &CrossConfig::rank_increment},
    {"r_max", &CrossConfig::r_max},
    {"max_sweeps", &CrossConfig::max_sweeps},
    {"maxvol_max_swaps", &CrossConfig::maxvol_max_swaps},
};

double get_double(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
  return x;
}

std::int64_t get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t get_uint(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const std::int64_t x = v.get<std::int64_t>();
  if (x < 0) throw ConfigError(path, "must be >= 0");
  return static_cast<std::uint64_t>(x);
}

int get_int32(const json& v, const std::string& path) {
  const std::int64_t x = get_int(v, path);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw ConfigError(path, "out of range");
  }
  return static_cast<int>(x);
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

// Key path of the first parameter named in a validation message.
std::string params_error_field(const std::string& what) {
  const std::string msg = what.substr(what.find(':') + 1);
  std::size_t best = std::string::npos;
  std::string key;
  auto consider = [&](const char* k) {
    const std::string name(k);
    for (std::size_t pos = msg.find(name); pos != std::string::npos; pos = msg.find(name, pos + 1)) {
      const bool left = pos == 0 || !(std::isalnum(static_cast<unsigned char>(msg[pos - 1])) || msg[pos - 1] == '_');
      const std::size_t end = pos + name.size();
      const bool right = end == msg.size() || !(std::isalnum(static_cast<unsigned char>(msg[end])) || msg[end] == '_');
      if (left && right) {
        if (pos < best) best = pos, key = name;
        break;
      }
    }
  };
  for (const auto& f : kDoubleFields) consider(f.key);
  for (const auto& f : kIntFields) consider(f.key);
  consider("max_evals");
  return key.empty() ? "params" : "params." + key;
}

}  // namespace

json to_json(const IPPParams& p) {
  json j = json::object();
  for (const auto& f : kDoubleFields) j[f.key] = p.*(f.member);
  for (const auto& f : kIntFields) j[f.key] = p.*(f.member);
  j["max_evals"] = p.max_evals;
  json c = json::object();
  for (const auto& f : kCrossDoubles) c[f.key] = p.cross.*(f.member);
  for (const auto& f : kCrossInts) c[f.key] = p.cross.*(f.member);
  j["cross"] = c;
  return j;
}

IPPParams params_from_json(const json& j, const IPPParams& base, const std::string& path) {
  require_object(j, path);
  IPPParams p = base;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const std::string sub = path + "." + key;
    bool done = false;
    for (const auto& f : kDoubleFields) {
      if (key == f.key) {
        p.*(f.member) = get_double(it.value(), sub);
        done = true;
      }
    }
    for (const auto& f : kIntFields) {
      if (key == f.key) {
        p.*(f.member) = get_int32(it.value(), sub);
        done = true;
      }
    }
    if (key == "max_evals") {
      p.max_evals = get_uint(it.value(), sub);
      done = true;
    }
    if (key == "cross") {
      require_object(it.value(), sub);
      for (auto c = it.value().begin(); c != it.value().end(); ++c) {
        const std::string csub = sub + "." + c.key();
        bool cdone = false;
        for (const auto& f : kCrossDoubles) {
          if (c.key() == f.key) {
            p.cross.*(f.member) = get_double(c.value(), csub);
            cdone = true;
          }
        }
        for (const auto& f : kCrossInts) {
          if (c.key() == f.key) {
            p.cross.*(f.member) = get_int32(c.value(), csub);
            cdone = true;
          }
        }
        if (!cdone) throw ConfigError(csub, "unknown key");
      }
      done = true;
    }
    if (!done) throw ConfigError(sub, "unknown key");
  }
  return p;
}

json to_json(const IterRecord& r) {
  return json{{"k", r.k},
              {"x", vector_json(r.x)},
              {"f", r.f_x},
              {"t", r.t},
              {"delta", r.delta},
              {"q", r.q},
              {"N", r.N},
              {"h", r.h},
              {"alpha", r.alpha},
              {"tt_rank", r.tt_rank},
              {"evals", r.evals},
              {"delta_halved", r.delta_halved},
              {"mesh_refined", r.mesh_refined},
              {"rejected", r.rejected}};
}

json to_json(const RunReport& r) {
  json trace = json::array();
  for (const auto& rec : r.trace) trace.push_back(to_json(rec));
  return json{{"solver", r.solver},
              {"x", vector_json(r.x)},
              {"f", r.f},
              {"evals", r.evals},
              {"termination", to_string(r.termination)},
              {"message", r.message},
              {"seed", r.seed},
              {"params", to_json(r.params)},
              {"trace", trace}};
}

std::string to_string(ShiftMode m) {
  return m == ShiftMode::kLattice ? "lattice" : "continuous";
}

ShiftMode shift_mode_from_string(const std::string& s) {
  if (s == "lattice") return ShiftMode::kLattice;
  if (s == "continuous") return ShiftMode::kContinuous;
  throw ConfigError("shift_mode", "expected 'lattice' or 'continuous', got '" + s + "'");
}

IPPParams solver_defaults(const std::string& solver) {
  if (solver == "tt-ipp") return IPPParams::tt_defaults();
  if (solver == "mc-ipp" || solver == "prs-baseline") return IPPParams::mc_defaults();
  throw ConfigError("solver",
                    "unknown solver '" + solver + "' (expected tt-ipp, mc-ipp or prs-baseline)");
}

RunConfig run_config_from_json(const json& j) {
  require_object(j, "config");
  static const std::set<std::string> known = {
      "function", "dim",   "shift", "shift_seed", "shift_mode", "solver",
      "params",   "max_evals", "k_max", "seeds", "out_dir"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError(it.key(), "unknown key");
  }
  RunConfig c;
  if (j.contains("solver")) c.solver = get_string(j["solver"], "solver");
  c.params = solver_defaults(c.solver);
  if (j.contains("function")) c.function = get_string(j["function"], "function");
  if (j.contains("dim")) {
    c.dim = get_int32(j["dim"], "dim");
    if (c.dim < 1) throw ConfigError("dim", "must be >= 1");
  }
  if (j.contains("shift")) {
    const json& s = j["shift"];
    if (!s.is_array()) throw ConfigError("shift", "expected an array");
    for (std::size_t i = 0; i < s.size(); ++i) {
      c.shift.push_back(get_double(s[i], "shift[" + std::to_string(i) + "]"));
    }
    if (static_cast<int>(c.shift.size()) != c.dim) {
      throw ConfigError("shift", "length " + std::to_string(c.shift.size()) +
                                     " does not match dim " + std::to_string(c.dim));
    }
  }
  if (j.contains("shift_seed") && !j["shift_seed"].is_null()) {
    c.shift_seed = get_uint(j["shift_seed"], "shift_seed");
  }
  if (j.contains("shift_mode")) {
    c.shift_mode = shift_mode_from_string(get_string(j["shift_mode"], "shift_mode"));
  }
  if (j.contains("params")) c.params = params_from_json(j["params"], c.params);
  if (j.contains("max_evals")) c.params.max_evals = get_uint(j["max_evals"], "max_evals");
  if (j.contains("k_max")) c.params.k_max = get_int32(j["k_max"], "k_max");
  if (j.contains("seeds")) {
    const json& s = j["seeds"];
    if (!s.is_array() || s.empty()) throw ConfigError("seeds", "expected a non-empty array");
    c.seeds.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      c.seeds.push_back(get_uint(s[i], "seeds[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("out_dir")) c.out_dir = get_string(j["out_dir"], "out_dir");

  const auto& names = benchmark_names();
  const bool is_benchmark = std::find(names.begin(), names.end(), c.function) != names.end();
  static const std::set<std::string> extras = {"risk_parity", "dna_chain", "double_well",
                                               "quadratic"};
  if (!is_benchmark && !extras.count(c.function)) {
    throw ConfigError("function", "unknown function '" + c.function + "'");
  }
  try {
    if (c.solver == "tt-ipp") {
      c.params.validate_tt();
    } else if (c.solver == "mc-ipp") {
      c.params.validate_mc();
    } else {
      c.params.validate_common();
      if (c.params.max_evals == 0) throw std::invalid_argument("max_evals must be set");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(params_error_field(e.what()), e.what());
  }
  try {
    make_config_objective(c, c.seeds.front());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("function", e.what());
  }
  return c;
}

json to_json(const RunConfig& c) {
  json j{{"function", c.function},
         {"dim", c.dim},
         {"shift_mode", to_string(c.shift_mode)},
         {"solver", c.solver},
         {"params", to_json(c.params)},
         {"seeds", c.seeds},
         {"out_dir", c.out_dir}};
  if (!c.shift.empty()) j["shift"] = c.shift;
  if (c.shift_seed) j["shift_seed"] = *c.shift_seed;
  return j;
}

Vector config_shift(const RunConfig& c, std::uint64_t seed) {
  if (!c.shift.empty()) return Eigen::Map<const Vector>(c.shift.data(), c.dim);
  return random_shift(c.function, c.dim, c.shift_seed ? *c.shift_seed : seed, c.shift_mode);
}

Objective make_config_objective(const RunConfig& c, std::uint64_t seed) {
  return make_objective(c.function, c.dim, config_shift(c, seed));
}

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols = {
      "name", "d", "solver", "seed", "final_error_inf", "evals", "termination", "wallclock"};
  return cols;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_summary_header(std::ostream& os) {
  const auto& cols = summary_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

void write_summary_row(std::ostream& os, const SummaryRow& r) {
  os << r.name << ',' << r.dim << ',' << r.solver << ',' << r.seed << ','
     << format_double(r.final_error_inf) << ',' << r.evals << ',' << r.termination << ','
     << format_double(r.wallclock) << '\n';
}

json tt_to_json(const TensorTrain& tt) {
  json cores = json::array();
  for (const auto& c : tt.cores()) cores.push_back(c.data());
  return json{{"format", "ippopt-tt"},
              {"version", 1},
              {"mode_sizes", tt.mode_sizes()},
              {"ranks", tt.ranks()},
              {"cores", cores}};
}

TensorTrain tt_from_json(const json& j) {
  require_object(j, "tt");
  if (!j.contains("format") || j["format"] != "ippopt-tt") {
    throw ConfigError("format", "not an ippopt-tt document");
  }
  if (!j.contains("version") || get_int(j["version"], "version") != 1) {
    throw ConfigError("version", "unsupported version");
  }
  if (!j.contains("mode_sizes") || !j.contains("ranks") || !j.contains("cores")) {
    throw ConfigError("tt", "missing mode_sizes, ranks or cores");
  }
  const auto n = j["mode_sizes"].get<std::vector<int>>();
  const auto r = j["ranks"].get<std::vector<int>>();
  const json& cj = j["cores"];
  if (r.size() != n.size() + 1 || cj.size() != n.size()) {
    throw ConfigError("ranks", "inconsistent with mode_sizes");
  }
  std::vector<Core> cores;
  for (std::size_t k = 0; k < n.size(); ++k) {
    auto data = cj[k].get<std::vector<double>>();
    const std::size_t want = static_cast<std::size_t>(r[k]) * n[k] * r[k + 1];
    if (data.size() != want) {
      throw ConfigError("cores[" + std::to_string(k) + "]", "wrong number of entries");
    }
    cores.emplace_back(r[k], n[k], r[k + 1], std::move(data));
  }
  return TensorTrain(std::move(cores));
}

void save_tt(const TensorTrain& tt, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << tt_to_json(tt).dump() << '\n';
}

TensorTrain load_tt(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return tt_from_json(json::parse(is));
}

}  // namespace ippopt
