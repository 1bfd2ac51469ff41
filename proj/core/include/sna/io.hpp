#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sna/errors.hpp"

// Deterministic, diff-able artifact output: two-column CSV with exact
// round-trip formatting, a minimal self-contained SVG polyline renderer,
// FNV-1a checksums for the run manifest, and the flat key=value config
// format shared by files and command-line overrides.

namespace sna {

// Shortest representation with up to 17 significant digits: parses back to
// the identical double.
std::string format_real(double v);

struct CsvTable {
  std::string header = "theta,value";
  std::vector<std::array<double, 2>> rows;
};

void write_csv_file(const std::string& path, const CsvTable& table);
CsvTable read_csv_file(const std::string& path);

struct SvgSeries {
  std::vector<std::array<double, 2>> points;
  std::string color = "#1f77b4";
};

// Polyline plot with fixed margins and light axes.  Series longer than a few
// thousand points are envelope-decimated (per-bucket min and max survive, so
// the narrow peaks the dynamics produces stay visible).
void write_svg_polylines(const std::string& path, const std::vector<SvgSeries>& series,
                         std::array<double, 2> x_range, std::array<double, 2> y_range,
                         int width = 960, int height = 600);

std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t fnv1a64_file(const std::string& path);

using ConfigMap = std::map<std::string, std::string>;

// key = value lines; '#' starts a comment; blank lines ignored; later keys
// overwrite earlier ones.
ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_file(const std::string& path);

// Typed getters: a present-but-malformed value is a ConfigError naming the key.
double cfg_real(const ConfigMap& cfg, const std::string& key, double def);
long long cfg_int(const ConfigMap& cfg, const std::string& key, long long def);
std::string cfg_str(const ConfigMap& cfg, const std::string& key, const std::string& def);
bool cfg_flag(const ConfigMap& cfg, const std::string& key, bool def);

} // namespace sna
