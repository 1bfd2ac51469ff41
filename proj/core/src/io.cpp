#include "sna/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sna {

std::string format_real(double v) {
  char buf[40];
  // %.17g round-trips every double; try shorter forms first so common values
  // stay readable, falling back as soon as re-parsing loses bits.
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

void write_csv_file(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot open for writing: " + path);
  out << table.header << "\n";
  for (const auto& row : table.rows) {
    out << format_real(row[0]) << ',' << format_real(row[1]) << "\n";
  }
  if (!out) throw Error(ErrorCode::ConfigError, "write failed: " + path);
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open for reading: " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::ConfigError, "empty csv: " + path);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::ConfigError, "csv row without comma in " + path);
    }
    char* end = nullptr;
    const double a = std::strtod(line.c_str(), &end);
    const double b = std::strtod(line.c_str() + comma + 1, &end);
    table.rows.push_back({a, b});
  }
  return table;
}

namespace {

// Keep per-bucket extremes so decimation cannot erase narrow peaks.
std::vector<std::array<double, 2>> envelope_decimate(
    const std::vector<std::array<double, 2>>& pts, std::size_t max_points) {
  if (pts.size() <= max_points) return pts;
  const std::size_t buckets = max_points / 2;
  std::vector<std::array<double, 2>> out;
  out.reserve(max_points + 2);
  for (std::size_t b = 0; b < buckets; ++b) {
    const std::size_t lo = b * pts.size() / buckets;
    const std::size_t hi = std::max(lo + 1, (b + 1) * pts.size() / buckets);
    std::size_t imin = lo, imax = lo;
    for (std::size_t i = lo; i < hi; ++i) {
      if (pts[i][1] < pts[imin][1]) imin = i;
      if (pts[i][1] > pts[imax][1]) imax = i;
    }
    if (imin <= imax) {
      out.push_back(pts[imin]);
      if (imax != imin) out.push_back(pts[imax]);
    } else {
      out.push_back(pts[imax]);
      out.push_back(pts[imin]);
    }
  }
  return out;
}

} // namespace

void write_svg_polylines(const std::string& path, const std::vector<SvgSeries>& series,
                         std::array<double, 2> x_range, std::array<double, 2> y_range,
                         int width, int height) {
  if (!(x_range[1] > x_range[0]) || !(y_range[1] > y_range[0])) {
    throw Error(ErrorCode::ConfigError, "svg ranges must be increasing");
  }
  const double margin = 40.0;
  const double plot_w = width - 2 * margin;
  const double plot_h = height - 2 * margin;
  auto px = [&](double x) {
    return margin + (x - x_range[0]) / (x_range[1] - x_range[0]) * plot_w;
  };
  auto py = [&](double y) {
    return height - margin - (y - y_range[0]) / (y_range[1] - y_range[0]) * plot_h;
  };
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  for (const SvgSeries& s : series) {
    const auto pts = envelope_decimate(s.points, 4000);
    if (pts.empty()) continue;
    svg << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1\" points=\"";
    char buf[64];
    for (const auto& p : pts) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(p[0]), py(p[1]));
      svg << buf;
    }
    svg << "\"/>\n";
  }
  svg << "<text x=\"" << (width / 2) << "\" y=\"" << (height - 10)
      << "\" font-size=\"12\" text-anchor=\"middle\">theta</text>\n";
  svg << "</svg>\n";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot open for writing: " + path);
  out << svg.str();
}

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& bytes) { return fnv1a64(bytes.data(), bytes.size()); }

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open for hashing: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a64(ss.str());
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

} // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError,
                  "config line " + std::to_string(line_no) + " has no '='");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorCode::ConfigError,
                  "config line " + std::to_string(line_no) + " has empty key");
    }
    cfg[key] = value;
  }
  return cfg;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

double cfg_real(const ConfigMap& cfg, const std::string& key, double def) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return def;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0') {
    throw Error(ErrorCode::ConfigError, "config key '" + key + "' is not a number");
  }
  return v;
}

long long cfg_int(const ConfigMap& cfg, const std::string& key, long long def) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return def;
  char* end = nullptr;
  const long long v = std::strtoll(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0') {
    throw Error(ErrorCode::ConfigError, "config key '" + key + "' is not an integer");
  }
  return v;
}

std::string cfg_str(const ConfigMap& cfg, const std::string& key, const std::string& def) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? def : it->second;
}

bool cfg_flag(const ConfigMap& cfg, const std::string& key, bool def) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return def;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error(ErrorCode::ConfigError, "config key '" + key + "' is not a boolean");
}

} // namespace sna
