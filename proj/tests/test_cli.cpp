#include "cornerlab/config.hpp"
#include "cornerlab/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace cornerlab;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "cornerlab_cli_test";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string out;
  std::string err;
  fs::path dir;
};

// Writes the config, runs the CLI into a fresh directory and captures both streams.
Run run(const std::string& name, const std::string& config, const std::string& cmd, const std::string& extra = "") {
  const fs::path dir = kRoot / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "config.json";
  io::write_text(cfg, config);
  const fs::path out = dir / "out";
  const std::string line = std::string("\"") + CORNERLAB_CLI_PATH + "\" --config \"" + cfg.string() + "\" --out \"" +
                           out.string() + "\" --cmd " + cmd + " " + extra + " >\"" + (dir / "stdout").string() +
                           "\" 2>\"" + (dir / "stderr").string() + "\"";
  const int status = std::system(line.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(dir / "stdout"), slurp(dir / "stderr"), out};
}

const char* kZero = R"j({"triples": [{"name": "z", "u0": "0", "g": "0", "N": 64, "M": 64}],
                         "solve": {"N": 64, "M": 64}})j";
const char* kToyExp = R"j({"triples": [{"name": "e", "u0": "exp(-x)", "g": "exp(-t)", "N": 64, "M": 64}]})j";
const char* kToySin = R"j({"triples": [{"name": "s", "u0": "sin(x)", "g": "-sin(t)", "N": 64, "M": 64}],
                           "solve": {"N": 64, "M": 64}})j";

double verified(const Run& r) {
  const json j = json::parse(slurp(r.dir / "compat.json"));
  return j.at(0).at("verified_order").get<double>();
}

}  // namespace

TEST_CASE("check-compat on zero data reaches s_max") {
  const Run r = run("compat_zero", kZero, "check-compat");
  REQUIRE(r.code == 0);
  CHECK(verified(r) == 3.0);
  CHECK(json::parse(r.out) == json::parse(slurp(r.dir / "compat.json")));
  const Run r2 = run("compat_zero_smax", R"j({"triples": [{"u0": "0", "g": "0"}], "compat": {"s_max": 2.5}})j",
                     "check-compat");
  REQUIRE(r2.code == 0);
  CHECK(verified(r2) == 2.5);
}

TEST_CASE("check-compat on exponential data stops at order one") {
  const Run r = run("compat_exp", kToyExp, "check-compat");
  REQUIRE(r.code == 0);
  CHECK(verified(r) == 1.0);
}

TEST_CASE("missing jet depth is a data error") {
  const Run r = run("underflow", R"j({"triples": [{"u0": "sin(x)", "g": "-sin(t)", "jet_order": 1}]})j", "check-compat");
  CHECK(r.code == 2);
  CHECK(r.err.find("jet underflow at order") != std::string::npos);
}

TEST_CASE("solve writes a field whose spot value is the closed form") {
  const Run r = run("solve_sin", kToySin, "solve");
  REQUIRE(r.code == 0);
  const Field2D u = io::load_field(r.dir, "field_s");
  REQUIRE(u.N() == 64);
  const int i = static_cast<int>(std::lround(1.0 / u.h)), j = static_cast<int>(std::lround(0.5 / u.k));
  CHECK(u.components[0](i, j) == doctest::Approx(std::sin(0.5)).epsilon(1e-12));
  CHECK(u.components[0](i, j) == doctest::Approx(0.47943).epsilon(1e-5));
  CHECK(fs::exists(r.dir / "trace_initial_s.csv"));
  const std::string bnd = slurp(r.dir / "trace_boundary_s.csv");
  CHECK(bnd.rfind("t,u0\n0,0\n", 0) == 0);
}

TEST_CASE("solve on zero data dumps zeros") {
  const Run r = run("solve_zero", kZero, "solve");
  REQUIRE(r.code == 0);
  CHECK(io::load_field(r.dir, "field_z").components[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("exit codes") {
  const Run lop = run("lopatinskii",
                      R"j({"system": {"A": [[1, 0], [0, -1]], "B": [[1, 0]]},
                           "triples": [{"u0": ["exp(-x)", "0"], "g": "0", "X": 4, "N": 64, "M": 64}],
                           "solve": {"N": 32, "M": 32, "X": 2, "T": 2}})j",
                      "solve");
  CHECK(lop.code == 3);
  CHECK(lop.err.find("Lopatinskii failure") != std::string::npos);

  const Run unknown = run("unknown_key", R"j({"bogus": 1})j", "solve");
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("bogus") != std::string::npos);

  const Run malformed = run("malformed", "{\n  \"seed\":\n}", "solve");
  CHECK(malformed.code == 1);
  CHECK(malformed.err.find("line 3") != std::string::npos);

  CHECK(run("no_triples", "{}", "solve").code == 1);
  CHECK(run("bad_cmd", "{}", "plot").code == 1);
  CHECK(run("bad_levels", kToyExp, "sweep", "--levels 2").code == 1);
  CHECK(run("guard", R"j({"lift": {"half_width": 2}})j", "lift").code == 4);
}

TEST_CASE("sweep on a single cell") {
  const char* cfg = R"j({"triples": [{"name": "e", "u0": "exp(-x)", "g": "exp(-t)"}],
                         "sweep": {"s_grid": [1.0], "levels": 3}})j";
  const Run r = run("sweep_one", cfg, "sweep");
  REQUIRE(r.code == 0);
  const std::string csv = slurp(r.dir / "sweep.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv.find(",bounded,bounded,yes\n") != std::string::npos);
  const std::string plot = slurp(r.dir / "plot_e_s1.csv");
  CHECK(plot.rfind("level,proxy\n", 0) == 0);
  CHECK(std::count(plot.begin(), plot.end(), '\n') == 5);
  const json summary = json::parse(slurp(r.dir / "sweep_summary.json"));
  CHECK(summary.at("cells") == 1);
  CHECK(summary.at("matched") == 1);

  const Run four = run("sweep_levels", cfg, "sweep", "--levels 4");
  REQUIRE(four.code == 0);
  CHECK(slurp(four.dir / "sweep.csv").find("proxy_L4") != std::string::npos);
}

TEST_CASE("identical configs give byte-identical CSV") {
  const char* cfg = R"j({"triples": [{"name": "e", "u0": "exp(-x)*cos(x)", "g": "exp(-t)", "N": 128, "M": 128}],
                         "solve": {"N": 128, "M": 128}, "sweep": {"s_grid": [0.5, 1.5], "levels": 3},
                         "seed": 3})j";
  for (const char* cmd : {"sweep", "estimate", "norms", "solve"}) {
    const Run a = run(std::string("det_a_") + cmd, cfg, cmd);
    const Run b = run(std::string("det_b_") + cmd, cfg, cmd);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    for (const auto& e : fs::directory_iterator(a.dir)) {
      const std::string ext = e.path().extension().string();
      if (ext != ".csv" && ext != ".bin") continue;
      CAPTURE(e.path().filename().string());
      CHECK(slurp(e.path()) == slurp(b.dir / e.path().filename()));
    }
  }
}

TEST_CASE("every output directory carries a manifest with the config hash") {
  const std::string cfg = kToySin;
  const std::string hash = io::fnv1a_hex(parse_config(cfg).canonical);
  for (const char* cmd : {"check-compat", "solve", "estimate", "norms"}) {
    const Run r = run(std::string("manifest_") + cmd, cfg, cmd);
    REQUIRE(r.code == 0);
    const json m = json::parse(slurp(r.dir / "manifest.json"));
    CHECK(m.at("config_hash") == hash);
    CHECK(m.at("command") == cmd);
    CHECK(m.at("tool_version") == io::kToolVersion);
    CHECK(!m.at("started").get<std::string>().empty());
    CHECK(!m.at("finished").get<std::string>().empty());
    CHECK(m.at("tolerances").size() == io::active_tolerances().size());
  }
  const Run seeded = run("manifest_seed", cfg, "solve", "--seed 17");
  CHECK(json::parse(slurp(seeded.dir / "manifest.json")).at("seed") == 17);
}

TEST_CASE("lift and synthesize passthroughs") {
  const Run lift = run("lift", R"j({"lift": {"m": 1, "lambdas": [1, 2]}})j", "lift");
  REQUIRE(lift.code == 0);
  std::istringstream rows(slurp(lift.dir / "lift.csv"));
  std::string line;
  std::getline(rows, line);
  CHECK(line == "lambda,m,trace_error,max_zero_jet,norm_lift,bound_ratio");
  int n = 0;
  while (std::getline(rows, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    CHECK(v[2] <= 1e-6);
    CHECK(v[3] <= 1e-6);
    ++n;
  }
  CHECK(n == 2);
  CHECK(fs::exists(lift.dir / "lift_m1_lambda2.json"));

  const Run syn = run("synthesize",
                      R"j({"triples": [{"name": "e", "u0": "exp(-x)", "g": "exp(-t)", "X": 4, "T": 4}],
                           "synthesize": {"k": 1, "m": 3, "lambdas": [4]}})j",
                      "synthesize");
  REQUIRE(syn.code == 0);
  CHECK(slurp(syn.dir / "synthesize.csv").find(",1,3\n") != std::string::npos);
}
