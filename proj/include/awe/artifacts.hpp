#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace awe::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

// Column-oriented time series container shared by the simulator and CLI.
struct TimeSeries {
  std::vector<std::string> names;          // one per column
  std::vector<std::vector<double>> cols;   // same length each
  std::size_t rows() const { return cols.empty() ? 0 : cols[0].size(); }
  int col(const std::string& name) const;  // -1 if absent
};

void write_csv(const TimeSeries& ts, const std::string& path);
TimeSeries read_csv(const std::string& path);

void write_json(const json& j, const std::string& path);
json read_json(const std::string& path);

// Minimal standalone SHA-256 (FIPS 180-4), used for artifact manifests.
std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& s);
std::string sha256_file(const std::string& path);

// Polyline plot of selected columns against the first column (time).
struct PlotSpec {
  std::string title;
  std::string x_label = "t [s]";
  std::string y_label;
  std::vector<std::string> series;  // column names
  int width = 900, height = 420;
};
void write_svg_plot(const TimeSeries& ts, const PlotSpec& spec,
                    const std::string& path);

// Run manifest written next to every CLI artifact set.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> artifacts;  // name -> sha256
  json to_json() const;
};
void write_manifest(const RunManifest& m, const std::string& path);

json matrix_to_json(const Eigen::MatrixXd& M);
Eigen::MatrixXd matrix_from_json(const json& j);

// Applies "a.b.c=value" style overrides onto a JSON config in place.
void apply_override(json& cfg, const std::string& dotted,
                    const json& value);

}  // namespace awe::io
