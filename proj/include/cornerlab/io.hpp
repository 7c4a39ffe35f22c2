#pragma once

#include "cornerlab/compatibility.hpp"
#include "cornerlab/estimates_harness.hpp"
#include "cornerlab/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cornerlab::io {

inline constexpr const char* kToolVersion = "0.3.0";

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string config_hash;
  std::string command;
  std::uint64_t seed = 0;
  std::string started;
  std::string finished;
  std::map<std::string, double> tolerances;
};

/// Tolerances in effect for every module.
std::map<std::string, double> active_tolerances();

void write_manifest(const std::filesystem::path& dir, const RunManifest& m);

/// Column-major float64 grid with a JSON header: <stem>.json + <stem>.bin.
void dump_field(const std::filesystem::path& dir, const std::string& stem, const Field2D& u);
void dump_plane(const std::filesystem::path& dir, const std::string& stem, const PlaneFn& p);
Field2D load_field(const std::filesystem::path& dir, const std::string& stem);

/// Minimal CSV writer with fixed formatting so runs are byte-reproducible.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(const std::vector<std::string>& cells);
  void save(const std::filesystem::path& file) const;
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string num(double v);

/// JSON text of a compatibility report.
std::string compat_json(const std::string& name, const CompatReport& r);

void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace cornerlab::io
