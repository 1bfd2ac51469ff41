#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "sna/io.hpp"

using namespace sna;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / "snalab_io_tests";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

} // namespace

TEST_CASE("format_real round-trips every double it prints") {
  const double cases[] = {0.0,      1.0,         -1.0,     0.1,
                          1.0 / 3.0, 1e300,       5e-324,   -2.5e-7,
                          3.141592653589793, 123456789.0, 0.8043185611171579};
  for (double v : cases) {
    const std::string s = format_real(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  // integers print without an exponent or trailing zeros
  CHECK(format_real(5.0) == "5");
  CHECK(format_real(0.0) == "0");
  // negative zero keeps its sign bit through the round trip
  const std::string nz = format_real(-0.0);
  CHECK(std::signbit(std::strtod(nz.c_str(), nullptr)));
}

TEST_CASE("csv writes round-trip bitwise") {
  const fs::path path = scratch_dir() / "table.csv";
  CsvTable t;
  t.header = "theta,value";
  t.rows = {{0.0, 5.0}, {0.1, 1.0 / 3.0}, {0.8043185611171579, 5e-324}};
  write_csv_file(path.string(), t);

  const CsvTable back = read_csv_file(path.string());
  CHECK(back.header == t.header);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(back.rows[i][0] == t.rows[i][0]);
    CHECK(back.rows[i][1] == t.rows[i][1]);
  }

  // byte-identical on rewrite
  const std::string first = slurp(path);
  write_csv_file(path.string(), t);
  CHECK(slurp(path) == first);
}

TEST_CASE("csv reader rejects damaged input") {
  const fs::path missing = scratch_dir() / "no_such.csv";
  std::error_code ec;
  fs::remove(missing, ec);
  CHECK_THROWS_AS(read_csv_file(missing.string()), Error);

  const fs::path bad = scratch_dir() / "bad.csv";
  spit(bad, "theta,value\n0.5 no comma here\n");
  CHECK_THROWS_AS(read_csv_file(bad.string()), Error);
  try {
    read_csv_file(bad.string());
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::ConfigError);
  }

  const fs::path empty = scratch_dir() / "empty.csv";
  spit(empty, "");
  CHECK_THROWS_AS(read_csv_file(empty.string()), Error);
}

TEST_CASE("config text: comments, trimming, overwrite, errors") {
  const ConfigMap cfg = parse_config_text(
      "# leading comment\n"
      "alpha = 5.0\n"
      "\n"
      "  grid_n=1024   # trailing comment\n"
      "alpha = 32\n"
      "name = tanh family\n");
  CHECK(cfg.at("alpha") == "32"); // later assignment wins
  CHECK(cfg.at("grid_n") == "1024");
  CHECK(cfg.at("name") == "tanh family");
  CHECK(cfg.size() == 3);

  CHECK_THROWS_AS(parse_config_text("alpha 5"), Error);
  CHECK_THROWS_AS(parse_config_text("= 5"), Error);
  try {
    parse_config_text("line without equals");
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::ConfigError);
  }
}

TEST_CASE("typed config accessors") {
  const ConfigMap cfg = parse_config_text(
      "alpha = 2.5\nn = 42\nlabel = split\nflag_on = true\nflag_off = 0\nbad = soup\n");
  CHECK(cfg_real(cfg, "alpha", 1.0) == 2.5);
  CHECK(cfg_real(cfg, "missing", 7.5) == 7.5);
  CHECK(cfg_int(cfg, "n", 0) == 42);
  CHECK(cfg_int(cfg, "missing", -3) == -3);
  CHECK(cfg_str(cfg, "label", "x") == "split");
  CHECK(cfg_str(cfg, "missing", "x") == "x");
  CHECK(cfg_flag(cfg, "flag_on", false));
  CHECK_FALSE(cfg_flag(cfg, "flag_off", true));
  CHECK(cfg_flag(cfg, "missing", true));

  auto naming = [](auto fn, const std::string& key) {
    try {
      fn();
      FAIL("expected ConfigError");
    } catch (const Error& e) {
      CHECK(e.code == ErrorCode::ConfigError);
      CHECK(std::string(e.what()).find(key) != std::string::npos);
    }
  };
  naming([&] { cfg_real(cfg, "bad", 0.0); }, "bad");
  naming([&] { cfg_int(cfg, "alpha", 0); }, "alpha");
  naming([&] { cfg_flag(cfg, "bad", false); }, "bad");
}

TEST_CASE("fnv-1a 64-bit reference vectors") {
  CHECK(fnv1a64(std::string("")) == 14695981039346656037ULL);
  CHECK(fnv1a64(std::string("a")) == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64(std::string("foobar")) == 0x85944171f73967e8ULL);

  const fs::path p = scratch_dir() / "hash.bin";
  spit(p, "foobar");
  CHECK(fnv1a64_file(p.string()) == 0x85944171f73967e8ULL);
  CHECK_THROWS_AS(fnv1a64_file((scratch_dir() / "gone.bin").string()), Error);
}

TEST_CASE("svg output is self-contained and deterministic") {
  const fs::path p = scratch_dir() / "plot.svg";
  SvgSeries line;
  for (int k = 0; k <= 10000; ++k) {
    const double t = k / 10000.0;
    line.points.push_back({t, 0.5 + 0.4 * std::sin(40.0 * t)});
  }
  SvgSeries dots;
  dots.points = {{0.1, 0.1}, {0.9, 0.9}};
  dots.color = "#d62728";
  write_svg_polylines(p.string(), {line, dots}, {0.0, 1.0}, {0.0, 1.0});

  const std::string body = slurp(p);
  CHECK(body.find("<svg") != std::string::npos);
  CHECK(body.find("polyline") != std::string::npos);
  CHECK(body.find("#d62728") != std::string::npos);
  CHECK(body.size() < 400000); // long series are envelope-decimated

  write_svg_polylines(p.string(), {line, dots}, {0.0, 1.0}, {0.0, 1.0});
  CHECK(slurp(p) == body);
}
