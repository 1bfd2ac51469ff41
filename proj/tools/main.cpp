// Command-line front end: boundary / attractor / check / counterexample /
// probe.  Settings resolve in layers: subcommand defaults, then a flat
// key=value config file, then repeatable --set overrides, then explicit
// flags.  Every run writes its artifacts plus a manifest.json into --out.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sna/errors.hpp"
#include "sna/io.hpp"
#include "sna/run.hpp"

namespace {

struct SubOpts {
  CLI::App* sub = nullptr;
  sna::ConfigMap base; // lowest-priority layer (subcommand defaults)

  std::string config_path;
  std::vector<std::string> sets;

  std::string family, omega, rule, out;
  double alpha = 0, alpha_l = 0, alpha_r = 0, ref_a = 0, ref_b = 0;
  double base_a = 0, tol = 0, alpha_lo = 0, alpha_hi = 0;
  double compare_a = 0, compare_b = 0, compare_gamma = 0;
  double delta = 0, eps = 0;
  int depth_k = 0, grid_n = 0, n_max = 0, alpha_steps = 0, compare_m = 0, samples = 0;
  long long seed = 0, dio_horizon = 0;
  bool smooth = false, svg = false, find_alpha0 = false;
};

void add_common(SubOpts& o) {
  CLI::App* s = o.sub;
  s->add_option("--config", o.config_path, "flat key=value config file");
  s->add_option("--set", o.sets, "override one key=value (repeatable)");

  s->add_option("--family", o.family, "tanh | split | reference | counterexample");
  s->add_option("--alpha", o.alpha, "tanh family strength");
  s->add_option("--alpha-l", o.alpha_l, "split family forcing factor");
  s->add_option("--alpha-r", o.alpha_r, "split family fibre factor");
  s->add_option("--ref-a", o.ref_a, "reference system a");
  s->add_option("--ref-b", o.ref_b, "reference system b");
  s->add_option("--omega", o.omega, "rotation number: golden | rule:<name>[:depth] | literal");
  s->add_option("--rule", o.rule, "coefficient rule for the step-ladder forcing");
  s->add_option("--base-a", o.base_a, "step-ladder base a");
  s->add_option("--depth-k", o.depth_k, "step-ladder depth K");
  s->add_flag("--smooth", o.smooth, "also run the smooth-cap variant");

  s->add_option("--grid-n", o.grid_n, "angle grid resolution");
  s->add_option("--n-max", o.n_max, "iteration depth / cap");
  s->add_option("--tol", o.tol, "convergence tolerance");
  s->add_option("--seed", o.seed, "random seed");
  s->add_option("--out", o.out, "output directory");
  s->add_flag("--svg", o.svg, "also write SVG plots");
  s->add_option("--dio-horizon", o.dio_horizon, "orbit length for the arithmetic fit");

  s->add_flag("--find-alpha0", o.find_alpha0, "search the alpha ladder for a passing split");
  s->add_option("--alpha-lo", o.alpha_lo, "alpha search lower bound");
  s->add_option("--alpha-hi", o.alpha_hi, "alpha search upper bound");
  s->add_option("--alpha-steps", o.alpha_steps, "alpha search grid points");
  s->add_option("--compare-a", o.compare_a, "re-check with this a override");
  s->add_option("--compare-b", o.compare_b, "re-check with this b override");
  s->add_option("--compare-gamma", o.compare_gamma, "re-check with this gamma override");
  s->add_option("--compare-m", o.compare_m, "re-check with this m override");

  s->add_option("--samples", o.samples, "probe sample count");
  s->add_option("--delta", o.delta, "probe box half-width in theta");
  s->add_option("--eps", o.eps, "probe box half-height in x");
}

// defaults < config file < --set < explicit flags
sna::ConfigMap resolve_map(const SubOpts& o) {
  sna::ConfigMap m = o.base;
  if (!o.config_path.empty()) {
    for (const auto& [k, v] : sna::load_config_file(o.config_path)) m[k] = v;
  }
  for (const std::string& kv : o.sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw sna::Error(sna::ErrorCode::ConfigError, "--set expects key=value, got '" + kv + "'");
    }
    m[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  const CLI::App* s = o.sub;
  auto real = [](double v) { return sna::format_real(v); };
  if (s->count("--family")) m["family"] = o.family;
  if (s->count("--alpha")) m["alpha"] = real(o.alpha);
  if (s->count("--alpha-l")) m["alpha_l"] = real(o.alpha_l);
  if (s->count("--alpha-r")) m["alpha_r"] = real(o.alpha_r);
  if (s->count("--ref-a")) m["ref_a"] = real(o.ref_a);
  if (s->count("--ref-b")) m["ref_b"] = real(o.ref_b);
  if (s->count("--omega")) m["omega"] = o.omega;
  if (s->count("--rule")) m["ce_rule"] = o.rule;
  if (s->count("--base-a")) m["ce_a"] = real(o.base_a);
  if (s->count("--depth-k")) m["ce_depth"] = std::to_string(o.depth_k);
  if (s->count("--smooth")) m["ce_smooth"] = "1";
  if (s->count("--grid-n")) m["grid_n"] = std::to_string(o.grid_n);
  if (s->count("--n-max")) m["n_max"] = std::to_string(o.n_max);
  if (s->count("--tol")) m["tol"] = real(o.tol);
  if (s->count("--seed")) m["seed"] = std::to_string(o.seed);
  if (s->count("--out")) m["out"] = o.out;
  if (s->count("--svg")) m["svg"] = "1";
  if (s->count("--dio-horizon")) m["dio_horizon"] = std::to_string(o.dio_horizon);
  if (s->count("--find-alpha0")) m["find_alpha0"] = "1";
  if (s->count("--alpha-lo")) m["alpha_lo"] = real(o.alpha_lo);
  if (s->count("--alpha-hi")) m["alpha_hi"] = real(o.alpha_hi);
  if (s->count("--alpha-steps")) m["alpha_steps"] = std::to_string(o.alpha_steps);
  if (s->count("--compare-a")) m["compare_a"] = real(o.compare_a);
  if (s->count("--compare-b")) m["compare_b"] = real(o.compare_b);
  if (s->count("--compare-gamma")) m["compare_gamma"] = real(o.compare_gamma);
  if (s->count("--compare-m")) m["compare_m"] = std::to_string(o.compare_m);
  if (s->count("--samples")) m["probe_samples"] = std::to_string(o.samples);
  if (s->count("--delta")) m["probe_delta"] = real(o.delta);
  if (s->count("--eps")) m["probe_eps"] = real(o.eps);
  return m;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for pinched quasiperiodically forced interval maps"};
  app.set_version_flag("--version", sna::kArtifactVersion);
  app.require_subcommand(1);

  SubOpts boundary, attractor, check, counterexample, probe;

  boundary.sub = app.add_subcommand("boundary", "iterate upper boundary lines phi_0..phi_n");
  boundary.base = {{"n_max", "30"}};
  add_common(boundary);

  attractor.sub = app.add_subcommand("attractor", "iterate to the upper bounding graph phi+");
  attractor.base = {{"n_max", "2000"}};
  add_common(attractor);

  check.sub = app.add_subcommand("check", "verify the contraction/decay condition set");
  add_common(check);

  counterexample.sub =
      app.add_subcommand("counterexample", "build the step-ladder forcing and verify its claims");
  counterexample.base = {{"family", "counterexample"}, {"n_max", "500"}, {"grid_n", "2000"}};
  add_common(counterexample);

  probe.sub = app.add_subcommand("probe", "sample boxes below phi+ for closure density");
  probe.base = {{"n_max", "2000"}};
  add_common(probe);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (boundary.sub->parsed()) return sna::cmd_boundary(sna::config_from_map(resolve_map(boundary)));
    if (attractor.sub->parsed()) return sna::cmd_attractor(sna::config_from_map(resolve_map(attractor)));
    if (check.sub->parsed()) return sna::cmd_check(sna::config_from_map(resolve_map(check)));
    if (counterexample.sub->parsed())
      return sna::cmd_counterexample(sna::config_from_map(resolve_map(counterexample)));
    if (probe.sub->parsed()) return sna::cmd_probe(sna::config_from_map(resolve_map(probe)));
  } catch (const sna::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", sna::error_code_name(e.code), e.what());
    return e.code == sna::ErrorCode::ConfigError ? 2 : 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
