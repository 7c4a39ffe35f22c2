#include "cornerlab/config.hpp"

#include "cornerlab/expr.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace cornerlab {

namespace {

using json = nlohmann::json;

template <typename T>
T get(const json& j, const std::string& key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path + "." + key, e.what());
  }
}

Eigen::MatrixXd matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError(path, "expected a nested array");
  const auto rows = j.size(), cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw ConfigError(path, "ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw ConfigError(path, "non-numeric entry");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

std::vector<std::string> strings(const json& j, const std::string& path) {
  if (j.is_string()) return {j.get<std::string>()};
  if (!j.is_array()) throw ConfigError(path, "expected a string or an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw ConfigError(path, "expected strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

SystemSpec parse_system(const json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "toy") return SystemSpec::toy();
    throw ConfigError(path, "unknown system '" + j.get<std::string>() + "'");
  }
  if (!j.is_object() || !j.contains("A") || !j.contains("B")) throw ConfigError(path, "needs A and B");
  return SystemSpec::constant(matrix(j["A"], path + ".A"), matrix(j["B"], path + ".B"));
}

ForcingSpec parse_forcing(const json& j, const std::string& path, int q) {
  ForcingSpec f;
  if (j.is_null()) return f;
  if (!j.is_array()) throw ConfigError(path, "expected an array of terms");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const json& t = j[i];
    ForcingTerm term;
    term.coeff = Eigen::VectorXd::Ones(q);
    if (t.contains("coeff")) {
      const auto c = get<std::vector<double>>(t, "coeff", p, {});
      if (static_cast<int>(c.size()) != q) throw ConfigError(p + ".coeff", "needs q entries");
      term.coeff = Eigen::Map<const Eigen::VectorXd>(c.data(), q);
    }
    try {
      term.fx = parse_function(get<std::string>(t, "fx", p, "1"), "x");
      term.ft = parse_function(get<std::string>(t, "ft", p, "1"), "t");
    } catch (const std::invalid_argument& e) {
      throw ConfigError(p, e.what());
    }
    f.terms.push_back(term);
  }
  return f;
}

NamedTriple parse_triple(const json& j, const std::string& path, const SystemSpec& fallback) {
  static const std::set<std::string> keys{"name", "system", "u0", "g", "f", "X", "T", "N", "M", "jet_order",
                                          "expected_order"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!keys.count(it.key())) throw ConfigError(path + "." + it.key(), "unknown key");
  NamedTriple t;
  t.name = get<std::string>(j, "name", path, "triple");
  t.spec = j.contains("system") ? parse_system(j["system"], path + ".system") : fallback;
  if (!j.contains("u0") || !j.contains("g")) throw ConfigError(path, "needs u0 and g");
  const auto u0 = strings(j["u0"], path + ".u0");
  const auto g = strings(j["g"], path + ".g");
  if (static_cast<int>(u0.size()) != t.spec.q()) throw ConfigError(path + ".u0", "needs q components");
  if (static_cast<int>(g.size()) != t.spec.b()) throw ConfigError(path + ".g", "needs b components");
  const double X = get<double>(j, "X", path, 2.0), T = get<double>(j, "T", path, 2.0);
  const int N = get<int>(j, "N", path, 512), M = get<int>(j, "M", path, 512);
  const int jets = get<int>(j, "jet_order", path, 6);
  if (!(X > 0.0) || !(T > 0.0) || N < 8 || M < 8 || jets < 0)
    throw ConfigError(path, "X, T must be positive, N, M >= 8, jet_order >= 0");
  const ForcingSpec f = parse_forcing(j.value("f", json()), path + ".f", t.spec.q());
  try {
    t.data = make_triple(u0, g, f, X, T, N, M, jets);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  t.expected_order = get<double>(j, "expected_order", path, -1.0);
  return t;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON at byte ") + std::to_string(e.byte) + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("", "top level must be an object");
  static const std::set<std::string> keys{"system", "triples", "corpus", "solve", "compat", "sweep",
                                          "estimate", "lift", "synthesize", "norms", "seed"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!keys.count(it.key())) throw ConfigError(it.key(), "unknown key");

  ExperimentConfig c;
  c.canonical = j.dump();
  c.seed = get<std::uint64_t>(j, "seed", "", 0);
  const SystemSpec base = j.contains("system") ? parse_system(j["system"], "system") : SystemSpec::toy();

  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    c.s_grid = get<std::vector<double>>(s, "s_grid", "sweep", c.s_grid);
    c.levels = get<int>(s, "levels", "sweep", c.levels);
    c.sweep.base_N = get<int>(s, "base_N", "sweep", c.sweep.base_N);
    c.sweep.X = get<double>(s, "X", "sweep", c.sweep.X);
    c.sweep.T = get<double>(s, "T", "sweep", c.sweep.T);
    if (c.levels < 3) throw ConfigError("sweep.levels", "must be >= 3");
    if (c.s_grid.empty()) throw ConfigError("sweep.s_grid", "must not be empty");
  }

  if (j.contains("triples")) {
    const json& t = j["triples"];
    if (!t.is_array()) throw ConfigError("triples", "expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < t.size(); ++i) {
      NamedTriple nt = parse_triple(t[i], "triples[" + std::to_string(i) + "]", base);
      if (!names.insert(nt.name).second) throw ConfigError("triples[" + std::to_string(i) + "].name", "duplicate name");
      c.triples.push_back(std::move(nt));
    }
  }
  if (get<bool>(j, "corpus", "", false)) {
    for (auto& e : sweep_corpus(c.sweep)) c.triples.push_back({e.name, e.spec, e.data, e.expected_order});
  }

  if (j.contains("solve")) {
    const json& s = j["solve"];
    c.solve.N = get<int>(s, "N", "solve", c.solve.N);
    c.solve.M = get<int>(s, "M", "solve", c.solve.M);
    c.solve.X = get<double>(s, "X", "solve", c.solve.X);
    c.solve.T = get<double>(s, "T", "solve", c.solve.T);
    c.solve.duhamel_steps = get<int>(s, "duhamel_steps", "solve", c.solve.duhamel_steps);
    const std::string mode = get<std::string>(s, "mode", "solve", "exact_characteristics");
    if (mode == "exact_characteristics") c.solve.mode = SolveConfig::Mode::exact_characteristics;
    else if (mode == "toy_closed_form") c.solve.mode = SolveConfig::Mode::toy_closed_form;
    else throw ConfigError("solve.mode", "unknown mode '" + mode + "'");
    try {
      c.solve.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("solve", e.what());
    }
  }
  if (j.contains("compat")) c.compat_s_max = get<double>(j["compat"], "s_max", "compat", c.compat_s_max);
  if (j.contains("estimate")) {
    const json& e = j["estimate"];
    c.gammas = get<std::vector<double>>(e, "gammas", "estimate", c.gammas);
    if (e.contains("kinds")) c.estimate_kinds = strings(e["kinds"], "estimate.kinds");
    c.estimate_s = get<int>(e, "s", "estimate", c.estimate_s);
    for (const auto& k : c.estimate_kinds) {
      try {
        parse_estimate_kind(k);
      } catch (const std::invalid_argument& ex) {
        throw ConfigError("estimate.kinds", ex.what());
      }
    }
  }
  if (j.contains("lift")) {
    const json& l = j["lift"];
    c.lift.g = get<std::string>(l, "g", "lift", c.lift.g);
    c.lift.half_width = get<double>(l, "half_width", "lift", c.lift.half_width);
    c.lift.h = get<double>(l, "h", "lift", c.lift.h);
    c.lift.m = get<int>(l, "m", "lift", c.lift.m);
    c.lift.lambdas = get<std::vector<double>>(l, "lambdas", "lift", c.lift.lambdas);
    c.lift.s = get<double>(l, "s", "lift", c.lift.s);
  }
  if (j.contains("synthesize")) {
    const json& s = j["synthesize"];
    c.synthesize.k = get<int>(s, "k", "synthesize", c.synthesize.k);
    c.synthesize.m = get<int>(s, "m", "synthesize", c.synthesize.m);
    c.synthesize.lambdas = get<std::vector<double>>(s, "lambdas", "synthesize", c.synthesize.lambdas);
  }
  if (j.contains("norms")) c.norm_thetas = get<std::vector<double>>(j["norms"], "thetas", "norms", c.norm_thetas);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace cornerlab
