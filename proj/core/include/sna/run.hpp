#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sna/io.hpp"

// Run orchestration: a RunConfig is the complete, hashable description of a
// run; each cmd_* builds the system, computes, writes CSV/JSON/SVG artifacts
// plus a manifest listing every output with its checksum, and returns the
// process exit code (0 ok, 1 conditions failed, 2 config, 3 numeric,
// 4 not converged with partial output retained).

namespace sna {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct RunConfig {
  // system
  std::string family = "tanh"; // tanh | split | reference | counterexample
  double alpha = 5.0;          // tanh slope-height parameter
  double alpha_l = 0.0;        // split factors (family = split)
  double alpha_r = 0.0;
  double ref_a = 0.0;          // reference minorant parameters
  double ref_b = 0.0;
  std::string ce_rule = "squares"; // counterexample coefficient rule
  double ce_a = 3.0;
  int ce_depth = 25;
  bool ce_smooth = false;      // also run the smooth-cap variant

  // rotation number: "golden", "rule:<name>[:depth]", or a numeric literal.
  // Required for every family except counterexample (whose rule defines it).
  std::string omega;

  // shared knobs
  int grid_n = 1024;
  int n_max = 50;
  double tol = 1e-6;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool svg = false;

  // check extras
  long dio_horizon = 100000;
  bool find_alpha0 = false;
  double alpha_lo = 16.0;
  double alpha_hi = 128.0;
  int alpha_steps = 4;
  std::optional<double> compare_a;     // fixed-constant comparison block
  std::optional<double> compare_b;
  std::optional<double> compare_gamma;
  std::optional<int> compare_m;

  // probe extras
  int probe_samples = 200;
  double probe_delta = 5e-3;
  double probe_eps = 5e-3;
};

// Strict translation: unknown keys and malformed values are ConfigErrors.
RunConfig config_from_map(const ConfigMap& map);
// Canonical full serialization (stable key order; includes defaults).
ConfigMap config_to_map(const RunConfig& cfg);
// FNV-1a over the canonical serialization, excluding the output directory
// (two runs of the same experiment hash equal wherever they land).
std::uint64_t config_hash(const RunConfig& cfg);

struct ManifestEntry {
  std::string file;
  std::uint64_t fnv64 = 0;
};

struct RunManifest {
  std::uint64_t config_hash = 0;
  std::string version;
  double wall_ms = 0.0; // excluded from determinism comparisons
  std::vector<ManifestEntry> outputs;
};

int cmd_boundary(const RunConfig& cfg);
int cmd_attractor(const RunConfig& cfg);
int cmd_check(const RunConfig& cfg);
int cmd_counterexample(const RunConfig& cfg);
int cmd_probe(const RunConfig& cfg);

} // namespace sna
