#include "cornerlab/io.hpp"

#include "cornerlab/sobolev_norms.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cornerlab::io {

using json = nlohmann::json;

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::map<std::string, double> active_tolerances() {
  const VerdictPolicy& p = default_policy();
  return {
      {"verdict.finite_slope", p.finite_slope},
      {"verdict.divergent_slope", p.divergent_slope},
      {"verdict.negligible", p.negligible},
      {"verdict.fit_window", static_cast<double>(p.fit_window)},
      {"norms.window_decay", kWindowTolerance},
      {"compat.exact_jet_rel", 1e-8},
      {"lift.aliasing_tail", 1e-8},
      {"lift.window_decay", 1e-8},
      {"solver.horizon_slack", 1e-12},
  };
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
  out << text;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  json j;
  j["tool_version"] = m.tool_version;
  j["config_hash"] = m.config_hash;
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["tolerances"] = m.tolerances;
  write_text(dir / "manifest.json", j.dump(2) + "\n");
}

namespace {

void write_bin(const std::filesystem::path& file, const std::vector<const Eigen::MatrixXd*>& blocks) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
  for (const auto* b : blocks)
    out.write(reinterpret_cast<const char*>(b->data()), static_cast<std::streamsize>(b->size() * sizeof(double)));
}

}  // namespace

void dump_field(const std::filesystem::path& dir, const std::string& stem, const Field2D& u) {
  json j;
  j["kind"] = "Field2D";
  j["layout"] = "column-major float64, rows x_i = i*h, cols t_j = j*k, components consecutive";
  j["rows"] = u.N() + 1;
  j["cols"] = u.M() + 1;
  j["components"] = u.q();
  j["h"] = u.h;
  j["k"] = u.k;
  j["X"] = u.X;
  j["T"] = u.T;
  j["metadata"] = u.metadata;
  j["data"] = stem + ".bin";
  write_text(dir / (stem + ".json"), j.dump(2) + "\n");
  std::vector<const Eigen::MatrixXd*> blocks;
  for (const auto& c : u.components) blocks.push_back(&c);
  write_bin(dir / (stem + ".bin"), blocks);
}

void dump_plane(const std::filesystem::path& dir, const std::string& stem, const PlaneFn& p) {
  json j;
  j["kind"] = "PlaneFn";
  j["layout"] = "column-major float64, rows x'_i = x0 + i*h, cols t_j = t0 + j*k";
  j["rows"] = p.samples.rows();
  j["cols"] = p.samples.cols();
  j["h"] = p.h;
  j["k"] = p.k;
  j["x0"] = p.x0;
  j["t0"] = p.t0;
  j["provenance"] = p.provenance;
  json d = json::object();
  for (const auto& [key, v] : p.diagnostics) d[key] = std::isfinite(v) ? json(v) : json(num(v));
  j["diagnostics"] = d;
  j["data"] = stem + ".bin";
  write_text(dir / (stem + ".json"), j.dump(2) + "\n");
  write_bin(dir / (stem + ".bin"), {&p.samples});
}

Field2D load_field(const std::filesystem::path& dir, const std::string& stem) {
  std::ifstream hin(dir / (stem + ".json"));
  if (!hin) throw std::runtime_error("cannot read field header '" + stem + "'");
  const json j = json::parse(hin);
  Field2D u;
  const int rows = j.at("rows"), cols = j.at("cols"), q = j.at("components");
  u.h = j.at("h");
  u.k = j.at("k");
  u.X = j.at("X");
  u.T = j.at("T");
  u.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
  std::ifstream bin(dir / j.at("data").get<std::string>(), std::ios::binary);
  for (int c = 0; c < q; ++c) {
    Eigen::MatrixXd m(rows, cols);
    bin.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!bin) throw std::runtime_error("truncated field data '" + stem + "'");
    u.components.push_back(std::move(m));
  }
  return u;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw std::invalid_argument("csv row width mismatch");
  rows_.push_back(cells);
}

std::string CsvWriter::str() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << "\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

void CsvWriter::save(const std::filesystem::path& file) const { write_text(file, str()); }

std::string compat_json(const std::string& name, const CompatReport& r) {
  auto number = [](double v) { return std::isfinite(v) ? json(v) : json(num(v)); };
  json j;
  j["triple"] = name;
  j["verified_order"] = number(r.verified_order);
  j["s_max"] = number(r.s_max);
  j["limited_by"] = r.limited_by;
  j["hierarchy_consistent"] = r.hierarchy_consistent;
  j["tol_cc"] = r.tol_cc;
  j["data_regularity"] = {{"value", number(r.data_regularity.value)}, {"exclusive", r.data_regularity.exclusive}};
  json orders = json::array();
  for (std::size_t i = 0; i < r.orders_checked.size(); ++i) {
    json o;
    o["order"] = r.orders_checked[i];
    o["pass"] = static_cast<bool>(r.order_pass[i]);
    std::vector<double> res(r.residuals[i].data(), r.residuals[i].data() + r.residuals[i].size());
    json arr = json::array();
    for (double v : res) arr.push_back(number(v));
    o["residual"] = arr;
    orders.push_back(o);
  }
  j["orders"] = orders;
  json half = json::array();
  for (const auto& [k, n] : r.half_orders)
    half.push_back({{"k", k}, {"verdict", to_string(n.verdict)}, {"slope", number(n.slope)}, {"value", number(n.value)}});
  j["half_orders"] = half;
  return j.dump(2) + "\n";
}

}  // namespace cornerlab::io
