#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::stringstream ss(s);
  for (std::string l; std::getline(ss, l);) {
    if (!l.empty()) v.push_back(l);
  }
  return v;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> v;
  std::stringstream ss(s);
  for (std::string c; std::getline(ss, c, ',');) v.push_back(c);
  return v;
}

class Sandbox {
 public:
  Sandbox() : dir_(fs::temp_directory_path() / ("ippopt_cli_" + std::to_string(counter_++))) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Sandbox() { fs::remove_all(dir_); }
  const fs::path& dir() const { return dir_; }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  Run run(const std::string& args, const std::string& env = "") const {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = env + " \"" IPPOPT_CLI "\" " + args + " >\"" + out.string() +
                            "\" 2>\"" + err.string() + "\"";
    Run r;
    const int raw = std::system(cmd.c_str());
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

 private:
  static inline int counter_ = 0;
  fs::path dir_;
};

std::size_t column(const std::string& header, const std::string& name) {
  const auto cols = split(header);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == name) return i;
  }
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_CASE("bench on ackley d = 5 writes a populated summary row") {
  Sandbox sb;
  const auto cfg = sb.write("a.json", R"({"function": "ackley", "dim": 5, "solver": "tt-ipp", "seeds": [1]})");
  const Run r = sb.run("bench --config " + cfg.string() + " --out " + (sb.dir() / "out").string());
  REQUIRE(r.status == 0);
  const auto rows = lines(slurp(sb.dir() / "out" / "summary.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "name,d,solver,seed,final_error_inf,evals,termination,wallclock");
  const auto cells = split(rows[1]);
  CHECK(cells[0] == "ackley");
  CHECK(cells[1] == "5");
  CHECK(std::stod(cells[column(rows[0], "final_error_inf")]) >= 0.0);
  CHECK(std::stoull(cells[column(rows[0], "evals")]) > 0);
  CHECK(r.out == slurp(sb.dir() / "out" / "summary.csv"));
}

TEST_CASE("unknown function exits nonzero and names the field") {
  Sandbox sb;
  const auto cfg = sb.write("bad.json", R"({"function": "nope", "dim": 2})");
  const Run r = sb.run("bench --config " + cfg.string() + " --out " + sb.dir().string());
  CHECK(r.status != 0);
  CHECK(r.err.find("function") != std::string::npos);
  const auto typo = sb.write("typo.json", R"({"function": "ackley", "dimm": 2})");
  const Run t = sb.run("bench --config " + typo.string() + " --out " + sb.dir().string());
  CHECK(t.status != 0);
  CHECK(t.err.find("dimm") != std::string::npos);
  CHECK(sb.run("bench --config " + (sb.dir() / "missing.json").string()).status != 0);
  CHECK(sb.run("nosuchcommand").status != 0);
}

TEST_CASE("griewank d = 4 with five seeds: five traces and one summary") {
  Sandbox sb;
  const auto cfg = sb.write("g.json", R"({"function": "griewank", "dim": 4, "solver": "tt-ipp",
                                         "max_evals": 30000, "seeds": [1, 2, 3, 4, 5]})");
  const fs::path out = sb.dir() / "out";
  REQUIRE(sb.run("bench --config " + cfg.string() + " --out " + out.string()).status == 0);
  int traces = 0, csvs = 0;
  for (const auto& e : fs::directory_iterator(out)) {
    traces += e.path().extension() == ".jsonl";
    csvs += e.path().extension() == ".csv";
  }
  CHECK(traces == 5);
  CHECK(csvs == 1);
  const auto rows = lines(slurp(out / "summary.csv"));
  REQUIRE(rows.size() == 6);
  const std::size_t ev = column(rows[0], "evals");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(split(rows[i])[3] == std::to_string(i));
    CHECK(std::stoull(split(rows[i])[ev]) <= 30000u);
  }
  const auto trace = lines(slurp(out / "griewank_d4_tt-ipp_seed2.jsonl"));
  REQUIRE(trace.size() >= 2);
  CHECK(trace.front().find("\"run\"") != std::string::npos);
  CHECK(trace.back().find("\"report\"") != std::string::npos);
}

TEST_CASE("flags override the config") {
  Sandbox sb;
  const auto cfg = sb.write("c.json", R"({"function": "sphere", "dim": 3, "solver": "tt-ipp",
                                         "max_evals": 50000, "seeds": [7]})");
  const Run r = sb.run("bench --config " + cfg.string() + " --solver mc-ipp --seed 3 --max-evals 2000 --out " +
                       (sb.dir() / "o").string());
  REQUIRE(r.status == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 2);
  const auto cells = split(rows[1]);
  CHECK(cells[2] == "mc-ipp");
  CHECK(cells[3] == "3");
  CHECK(std::stoull(cells[column(rows[0], "evals")]) <= 2000u);
}

TEST_CASE("IPPOPT_OUT_DIR sets the default output directory") {
  Sandbox sb;
  const auto cfg = sb.write("c.json", R"({"function": "sphere", "dim": 2, "seeds": [1]})");
  const fs::path env_dir = sb.dir() / "from_env";
  REQUIRE(sb.run("bench --config " + cfg.string(), "IPPOPT_OUT_DIR=\"" + env_dir.string() + "\"").status == 0);
  CHECK(fs::exists(env_dir / "summary.csv"));
  const fs::path flag_dir = sb.dir() / "from_flag";
  REQUIRE(sb.run("bench --config " + cfg.string() + " --out " + flag_dir.string(),
                 "IPPOPT_OUT_DIR=\"" + env_dir.string() + "2\"")
              .status == 0);
  CHECK(fs::exists(flag_dir / "summary.csv"));
  CHECK(!fs::exists(sb.dir() / "from_env2"));
}

TEST_CASE("prox-study emits one row per anchor and delta") {
  Sandbox sb;
  const auto cfg = sb.write("p.json", R"({"function": "ackley", "dim": 2, "t": 2.0,
                                         "deltas": [0.4, 0.2, 0.1, 0.05], "anchor_count": 3,
                                         "methods": ["dense"]})");
  const fs::path out = sb.dir() / "out";
  REQUIRE(sb.run("prox-study --config " + cfg.string() + " --out " + out.string()).status == 0);
  const auto rows = lines(slurp(out / "prox_study.csv"));
  REQUIRE(rows.size() == 1 + 4 * 3);
  CHECK(rows[0] == "x,t,delta,method,estimate,error,prox_error");
  CHECK(fs::exists(out / "prox_study_config.json"));
  const auto bad = sb.write("b.json", R"({"function": "ackley", "dim": 4})");
  CHECK(sb.run("prox-study --config " + bad.string() + " --out " + out.string()).status != 0);
}

TEST_CASE("tt-demo and hj subcommands") {
  Sandbox sb;
  const fs::path out = sb.dir() / "out";
  const auto demo = sb.write("d.json", R"({"function": "rastrigin", "dim": 3, "delta": 0.2})");
  REQUIRE(sb.run("tt-demo --config " + demo.string() + " --out " + out.string()).status == 0);
  CHECK(fs::exists(out / "tt_demo.json"));
  CHECK(fs::exists(out / "psi_tt.json"));

  const auto hj = sb.write("h.json", R"({"initial_condition": "quadratic", "dim": 2, "points": 5})");
  const Run r = sb.run("hj --config " + hj.string() + " --out " + out.string());
  REQUIRE(r.status == 0);
  CHECK(r.out.find("points,5") != std::string::npos);
  CHECK(r.out.find("l2_residual,") != std::string::npos);
  const auto rows = lines(slurp(out / "hj.csv"));
  CHECK(rows.size() == 6u);
  CHECK(rows[0] == "x,t,u_tilde,residual,y_tilde,inner_evals");
}
