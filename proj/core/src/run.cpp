#include "sna/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sna/analysis.hpp"
#include "sna/boundary.hpp"
#include "sna/circle.hpp"
#include "sna/counterexample.hpp"
#include "sna/systems.hpp"

namespace sna {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

template <typename Body>
int run_guarded(Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", error_code_name(e.code), e.what());
    switch (e.code) {
      case ErrorCode::ConfigError: return 2;
      case ErrorCode::NotConverged: return 4;
      default: return 3;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

double resolve_omega(const RunConfig& cfg) {
  if (cfg.omega.empty()) {
    throw Error(ErrorCode::ConfigError,
                "omega is required: golden | rule:<name>[:depth] | numeric literal");
  }
  if (cfg.omega == "golden") return golden_mean();
  if (cfg.omega.rfind("rule:", 0) == 0) {
    std::string rest = cfg.omega.substr(5);
    int depth = 29;
    const std::size_t colon = rest.find(':');
    if (colon != std::string::npos) {
      depth = std::atoi(rest.c_str() + colon + 1);
      rest.erase(colon);
      if (depth < 3) throw Error(ErrorCode::ConfigError, "omega rule depth must be >= 3");
    }
    return cf_from_rule(coeff_rule(rest), depth).omega;
  }
  char* end = nullptr;
  const double v = std::strtod(cfg.omega.c_str(), &end);
  if (end == cfg.omega.c_str() || *end != '\0') {
    throw Error(ErrorCode::ConfigError, "cannot parse omega '" + cfg.omega + "'");
  }
  const double w = wrap01(v);
  if (w == 0.0) throw Error(ErrorCode::ConfigError, "omega must not be an integer");
  return w;
}

struct BuiltSystem {
  PinchedSystem sys;
  double omega = 0.0;
};

BuiltSystem build_system(const RunConfig& cfg) {
  BuiltSystem out;
  if (cfg.family == "tanh") {
    if (!(cfg.alpha > 0.0)) throw Error(ErrorCode::ConfigError, "alpha must be > 0");
    out.omega = resolve_omega(cfg);
    out.sys = make_system(tanh_family(cfg.alpha), out.omega);
  } else if (cfg.family == "split") {
    if (!(cfg.alpha_l > 0.0) || !(cfg.alpha_r > 0.0)) {
      throw Error(ErrorCode::ConfigError, "split family needs alpha_l > 0 and alpha_r > 0");
    }
    out.omega = resolve_omega(cfg);
    out.sys = make_system(scaled_tanh_family(cfg.alpha_l, cfg.alpha_r), out.omega);
  } else if (cfg.family == "reference") {
    out.omega = resolve_omega(cfg);
    out.sys = make_reference_system(ReferenceSpec{cfg.ref_a, cfg.ref_b}, out.omega);
  } else if (cfg.family == "counterexample") {
    const GFunction g = build_g(CounterexampleSpec{cfg.ce_rule, cfg.ce_a, cfg.ce_depth});
    out.omega = g.omega;
    out.sys = make_counterexample_system(g);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown family '" + cfg.family + "'");
  }
  return out;
}

class ArtifactDir {
 public:
  ArtifactDir(const RunConfig& cfg) : cfg_(cfg), dir_(cfg.out_dir) {
    fs::create_directories(dir_);
    start_ = std::chrono::steady_clock::now();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void record(const std::string& name) { files_.push_back(name); }
  void write_table(const std::string& name, const CsvTable& table) {
    write_csv_file(path(name), table);
    record(name);
  }
  void write_text(const std::string& name, const std::string& text) {
    std::ofstream out(path(name), std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot open for writing: " + path(name));
    out << text;
    if (!out) throw Error(ErrorCode::ConfigError, "write failed: " + path(name));
    record(name);
  }
  void write_json(const std::string& name, const json& j) {
    write_text(name, j.dump(2) + "\n");
  }
  // Writes manifest.json (itself excluded from the output list).
  void finish() {
    const auto wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_);
    json j;
    j["config_hash"] = config_hash(cfg_);
    j["version"] = kArtifactVersion;
    j["wall_ms"] = wall.count();
    j["outputs"] = json::array();
    for (const std::string& f : files_) {
      j["outputs"].push_back({{"file", f}, {"fnv64", fnv1a64_file(path(f))}});
    }
    std::ofstream out(path("manifest.json"), std::ios::binary);
    out << j.dump(2) << "\n";
  }

 private:
  RunConfig cfg_;
  fs::path dir_;
  std::vector<std::string> files_;
  std::chrono::steady_clock::time_point start_;
};

CsvTable graph_csv(const GraphSample& phi) {
  CsvTable t;
  t.rows.reserve(static_cast<std::size_t>(phi.grid_n));
  for (int k = 0; k < phi.grid_n; ++k) {
    t.rows.push_back({static_cast<double>(k) / phi.grid_n, phi.at(k)});
  }
  return t;
}

std::vector<std::array<double, 2>> graph_points(const GraphSample& phi) {
  std::vector<std::array<double, 2>> pts;
  pts.reserve(static_cast<std::size_t>(phi.grid_n));
  for (int k = 0; k < phi.grid_n; ++k) {
    pts.push_back({static_cast<double>(k) / phi.grid_n, phi.at(k)});
  }
  return pts;
}

json check_json(const ConditionCheck& chk) {
  return json{{"pass", chk.pass},
              {"margin", chk.margin},
              {"witness_theta", chk.witness_theta},
              {"witness_x", chk.witness_x}};
}

json condition_report_json(const ConditionReport& rep) {
  json j;
  j["alpha"] = rep.alpha;
  j["beta"] = rep.beta;
  j["gamma"] = rep.gamma;
  j["m"] = rep.m;
  j["a"] = rep.a;
  j["b"] = rep.b;
  j["c"] = rep.c;
  j["d"] = rep.d;
  j["lambda_decay"] = rep.lambda_decay;
  j["overall_pass"] = rep.overall_pass();
  json conds;
  for (const auto& [id, chk] : rep.per_condition) conds[id] = check_json(chk);
  j["conditions"] = conds;
  return j;
}

int digits(int v) {
  int d = 1;
  while (v >= 10) {
    v /= 10;
    ++d;
  }
  return d;
}

} // namespace

RunConfig config_from_map(const ConfigMap& map) {
  static const std::set<std::string> known = {
      "family",     "alpha",       "alpha_l",     "alpha_r",      "ref_a",
      "ref_b",      "ce_rule",     "ce_a",        "ce_depth",     "ce_smooth",
      "omega",      "grid_n",      "n_max",       "tol",          "seed",
      "out",        "svg",         "dio_horizon", "find_alpha0",  "alpha_lo",
      "alpha_hi",   "alpha_steps", "compare_a",   "compare_b",    "compare_gamma",
      "compare_m",  "probe_samples", "probe_delta", "probe_eps"};
  for (const auto& [key, value] : map) {
    if (!known.count(key)) {
      throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
    }
  }
  RunConfig cfg;
  cfg.family = cfg_str(map, "family", cfg.family);
  cfg.alpha = cfg_real(map, "alpha", cfg.alpha);
  cfg.alpha_l = cfg_real(map, "alpha_l", cfg.alpha_l);
  cfg.alpha_r = cfg_real(map, "alpha_r", cfg.alpha_r);
  cfg.ref_a = cfg_real(map, "ref_a", cfg.ref_a);
  cfg.ref_b = cfg_real(map, "ref_b", cfg.ref_b);
  cfg.ce_rule = cfg_str(map, "ce_rule", cfg.ce_rule);
  cfg.ce_a = cfg_real(map, "ce_a", cfg.ce_a);
  cfg.ce_depth = static_cast<int>(cfg_int(map, "ce_depth", cfg.ce_depth));
  cfg.ce_smooth = cfg_flag(map, "ce_smooth", cfg.ce_smooth);
  cfg.omega = cfg_str(map, "omega", cfg.omega);
  cfg.grid_n = static_cast<int>(cfg_int(map, "grid_n", cfg.grid_n));
  cfg.n_max = static_cast<int>(cfg_int(map, "n_max", cfg.n_max));
  cfg.tol = cfg_real(map, "tol", cfg.tol);
  cfg.seed = static_cast<std::uint64_t>(cfg_int(map, "seed", static_cast<long long>(cfg.seed)));
  cfg.out_dir = cfg_str(map, "out", cfg.out_dir);
  cfg.svg = cfg_flag(map, "svg", cfg.svg);
  cfg.dio_horizon = static_cast<long>(cfg_int(map, "dio_horizon", cfg.dio_horizon));
  cfg.find_alpha0 = cfg_flag(map, "find_alpha0", cfg.find_alpha0);
  cfg.alpha_lo = cfg_real(map, "alpha_lo", cfg.alpha_lo);
  cfg.alpha_hi = cfg_real(map, "alpha_hi", cfg.alpha_hi);
  cfg.alpha_steps = static_cast<int>(cfg_int(map, "alpha_steps", cfg.alpha_steps));
  if (map.count("compare_a")) cfg.compare_a = cfg_real(map, "compare_a", 0.0);
  if (map.count("compare_b")) cfg.compare_b = cfg_real(map, "compare_b", 0.0);
  if (map.count("compare_gamma")) cfg.compare_gamma = cfg_real(map, "compare_gamma", 0.0);
  if (map.count("compare_m")) cfg.compare_m = static_cast<int>(cfg_int(map, "compare_m", 0));
  cfg.probe_samples = static_cast<int>(cfg_int(map, "probe_samples", cfg.probe_samples));
  cfg.probe_delta = cfg_real(map, "probe_delta", cfg.probe_delta);
  cfg.probe_eps = cfg_real(map, "probe_eps", cfg.probe_eps);

  if (cfg.grid_n < 2) throw Error(ErrorCode::ConfigError, "grid_n must be >= 2");
  if (cfg.n_max < 0) throw Error(ErrorCode::ConfigError, "n_max must be >= 0");
  if (!(cfg.tol > 0.0)) throw Error(ErrorCode::ConfigError, "tol must be > 0");
  if (cfg.probe_samples < 0) throw Error(ErrorCode::ConfigError, "probe_samples must be >= 0");
  if (!(cfg.probe_delta > 0.0) || !(cfg.probe_eps > 0.0)) {
    throw Error(ErrorCode::ConfigError, "probe_delta and probe_eps must be > 0");
  }
  return cfg;
}

ConfigMap config_to_map(const RunConfig& cfg) {
  ConfigMap map;
  map["family"] = cfg.family;
  map["alpha"] = format_real(cfg.alpha);
  map["alpha_l"] = format_real(cfg.alpha_l);
  map["alpha_r"] = format_real(cfg.alpha_r);
  map["ref_a"] = format_real(cfg.ref_a);
  map["ref_b"] = format_real(cfg.ref_b);
  map["ce_rule"] = cfg.ce_rule;
  map["ce_a"] = format_real(cfg.ce_a);
  map["ce_depth"] = std::to_string(cfg.ce_depth);
  map["ce_smooth"] = cfg.ce_smooth ? "1" : "0";
  map["omega"] = cfg.omega;
  map["grid_n"] = std::to_string(cfg.grid_n);
  map["n_max"] = std::to_string(cfg.n_max);
  map["tol"] = format_real(cfg.tol);
  map["seed"] = std::to_string(cfg.seed);
  map["out"] = cfg.out_dir;
  map["svg"] = cfg.svg ? "1" : "0";
  map["dio_horizon"] = std::to_string(cfg.dio_horizon);
  map["find_alpha0"] = cfg.find_alpha0 ? "1" : "0";
  map["alpha_lo"] = format_real(cfg.alpha_lo);
  map["alpha_hi"] = format_real(cfg.alpha_hi);
  map["alpha_steps"] = std::to_string(cfg.alpha_steps);
  if (cfg.compare_a) map["compare_a"] = format_real(*cfg.compare_a);
  if (cfg.compare_b) map["compare_b"] = format_real(*cfg.compare_b);
  if (cfg.compare_gamma) map["compare_gamma"] = format_real(*cfg.compare_gamma);
  if (cfg.compare_m) map["compare_m"] = std::to_string(*cfg.compare_m);
  map["probe_samples"] = std::to_string(cfg.probe_samples);
  map["probe_delta"] = format_real(cfg.probe_delta);
  map["probe_eps"] = format_real(cfg.probe_eps);
  return map;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::string canon;
  for (const auto& [key, value] : config_to_map(cfg)) {
    if (key == "out") continue; // location does not change the experiment
    canon += key;
    canon += '=';
    canon += value;
    canon += '\n';
  }
  return fnv1a64(canon);
}

int cmd_boundary(const RunConfig& cfg) {
  return run_guarded([&]() -> int {
    const BuiltSystem built = build_system(cfg);
    ArtifactDir dir(cfg);
    // n_max = 0 asks for the single constant-L line, below the sequence
    // routine's domain
    const std::vector<GraphSample> lines =
        cfg.n_max == 0
            ? std::vector<GraphSample>{boundary_line(built.sys, 0, cfg.grid_n)}
            : boundary_sequence(built.sys, cfg.n_max, cfg.grid_n);
    const int width = std::max(3, digits(cfg.n_max));
    char name[64];
    for (std::size_t n = 0; n < lines.size(); ++n) {
      std::snprintf(name, sizeof name, "phi_%0*d.csv", width, static_cast<int>(n));
      dir.write_table(name, graph_csv(lines[n]));
    }
    if (cfg.svg) {
      std::vector<SvgSeries> series;
      for (std::size_t n = 0; n < lines.size(); ++n) {
        series.push_back(SvgSeries{graph_points(lines[n]),
                                   kPalette[n % (sizeof kPalette / sizeof *kPalette)]});
      }
      write_svg_polylines(dir.path("phi_overlay.svg"), series, {0.0, 1.0},
                          {0.0, built.sys.L});
      dir.record("phi_overlay.svg");
    }
    dir.finish();
    return 0;
  });
}

int cmd_attractor(const RunConfig& cfg) {
  return run_guarded([&]() -> int {
    const BuiltSystem built = build_system(cfg);
    ArtifactDir dir(cfg);
    const AttractorResult res =
        upper_bounding_graph(built.sys, cfg.grid_n, cfg.n_max, cfg.tol);
    dir.write_table("phi_plus.csv", graph_csv(res.phi));

    std::vector<double> sorted = res.phi.values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t h = sorted.size() / 2;
    const double median =
        sorted.empty() ? 0.0
                       : (sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]));

    json j;
    j["converged"] = res.converged;
    j["iterations"] = res.iterations;
    j["restricted_diff"] = res.restricted_diff;
    j["unrestricted_diff"] = res.unrestricted_diff;
    j["exclusion_b0"] = res.exclusion_b0;
    j["exclusion_half_width"] = res.exclusion_half_width;
    j["measure_points"] = res.measure_points;
    j["grid_n"] = cfg.grid_n;
    j["tol"] = cfg.tol;
    j["median_value"] = median;
    dir.write_json("attractor.json", j);

    if (cfg.svg) {
      write_svg_polylines(dir.path("phi_plus.svg"),
                          {SvgSeries{graph_points(res.phi), kPalette[0]}}, {0.0, 1.0},
                          {0.0, built.sys.L});
      dir.record("phi_plus.svg");
    }
    dir.finish();
    if (!res.converged) {
      std::fprintf(stderr,
                   "not converged: off-peak diff %.3e after %d iterations (tol %.3e); "
                   "partial output retained\n",
                   res.restricted_diff, res.iterations, cfg.tol);
      return 4;
    }
    return 0;
  });
}

int cmd_check(const RunConfig& cfg) {
  return run_guarded([&]() -> int {
    const BuiltSystem built = build_system(cfg);
    ArtifactDir dir(cfg);
    const DiophantineEstimate est = diophantine_fit(built.omega, cfg.dio_horizon);
    const ConditionOptions opt;

    json j;
    j["omega"] = built.omega;
    j["system"] = built.sys.name;
    j["diophantine"] = {{"c", est.c}, {"d", est.d}, {"horizon", est.horizon},
                        {"floor", est.floor}};

    const ConditionReport computed = check_conditions(built.sys, est, {}, opt);
    j["computed"] = condition_report_json(computed);

    if (cfg.compare_a || cfg.compare_b || cfg.compare_gamma || cfg.compare_m) {
      ConditionOverrides ov;
      ov.a = cfg.compare_a;
      ov.b = cfg.compare_b;
      ov.gamma = cfg.compare_gamma;
      ov.m = cfg.compare_m;
      const ConditionReport cmp = check_conditions(built.sys, est, ov, opt);
      j["comparison"] = condition_report_json(cmp);
    }

    const double alpha4 = std::pow(computed.alpha, -4.0);
    j["facts"] = {{"machine_scale", 2e-16},
                  {"alpha_to_minus4", alpha4},
                  {"machine_below_alpha4", 2e-16 < alpha4}};

    if (cfg.find_alpha0) {
      const Alpha0Result a0 =
          find_alpha0([](double al, double ar) { return scaled_tanh_family(al, ar); },
                      built.omega, est, cfg.alpha_lo, cfg.alpha_hi, cfg.alpha_steps, opt);
      json ja;
      ja["found"] = a0.found;
      ja["alpha0"] = a0.alpha0;
      ja["alpha_l"] = a0.alpha_l;
      ja["alpha_r"] = a0.alpha_r;
      ja["diagnostic"] = a0.diagnostic;
      ja["report"] = condition_report_json(a0.report);
      j["alpha0_search"] = ja;
    }

    dir.write_json("check.json", j);
    dir.finish();
    return computed.overall_pass() ? 0 : 1;
  });
}

int cmd_counterexample(const RunConfig& cfg) {
  return run_guarded([&]() -> int {
    const CounterexampleSpec spec{cfg.ce_rule, cfg.ce_a, cfg.ce_depth};
    const GFunction g = build_g(spec);
    ArtifactDir dir(cfg);

    // Forcing-function export: a coarse uniform sweep plus every ladder
    // landmark (uniform sampling alone would miss all deep rungs).
    {
      std::set<double> thetas;
      for (int k = 0; k < 1024; ++k) thetas.insert(static_cast<double>(k) / 1024.0);
      thetas.insert(0.0);
      auto add = [&](double signed_pos) { thetas.insert(wrap01(signed_pos)); };
      for (const LadderRung& r : g.ladder.rungs) {
        add(r.outer_lo);
        add(0.5 * (r.outer_lo + r.inner_lo));
        add(r.inner_lo);
        add(0.5 * (r.inner_lo + r.inner_hi));
        add(r.inner_hi);
        add(0.5 * (r.inner_hi + r.outer_hi));
        add(r.outer_hi);
      }
      add(0.5 * (g.ladder.residual_lo + g.ladder.residual_hi));
      CsvTable t;
      for (double theta : thetas) t.rows.push_back({theta, g.eval(theta)});
      dir.write_table("g.csv", t);
    }

    const Claim1Report c1 = verify_claim1(g, cfg.n_max);
    {
      json j;
      j["n_max"] = c1.n_max;
      j["all_exact_one"] = c1.all_exact_one;
      j["max_deviation"] = c1.max_deviation;
      j["first_bad_n"] = c1.first_bad_n;
      j["diagnostic_pass"] = c1.diagnostic_pass;
      j["worst_diagnostic_slack"] = c1.worst_diagnostic_slack;
      j["pass"] = c1.all_exact_one && c1.diagnostic_pass;
      dir.write_json("claim1.json", j);
    }

    const Claim2Report c2 = verify_claim2(g, cfg.n_max, cfg.grid_n);
    const double integral = g.abs_log_integral();
    const double integral_bound = 0.5 * std::log(g.base_a);
    const SnaCriterionResult sna = sna_criterion(counterexample_family(g), 4096);
    {
      json j;
      j["n_iter"] = c2.n_iter;
      j["grid_n"] = c2.grid_n;
      j["bound"] = c2.bound;
      j["max_main"] = c2.max_main;
      j["phi_at_zero"] = c2.phi_at_zero;
      j["certified_outer_radius"] = c2.certified_outer_radius;
      j["certified_inner_radius"] = c2.certified_inner_radius;
      j["pass"] = c2.pass;
      json shells = json::array();
      for (const Claim2Shell& s : c2.shells) {
        shells.push_back({{"n", s.n},
                          {"q", s.q},
                          {"lo", s.lo},
                          {"hi", s.hi},
                          {"max_value", s.max_value},
                          {"samples", s.samples}});
      }
      j["shells"] = shells;
      j["ladder"] = {{"n1", g.n1},
                     {"depth_K", g.depth_K},
                     {"omega", g.omega},
                     {"union_lo", g.ladder.union_lo},
                     {"union_hi", g.ladder.union_hi},
                     {"abs_log_integral", integral},
                     {"integral_bound", integral_bound},
                     {"integral_ok", integral <= integral_bound}};
      j["sna"] = {{"lambda0", sna.lambda0}, {"exists_sna", sna.exists_sna}};
      dir.write_json("claim2.json", j);
    }

    const PinchedSystem sys = make_counterexample_system(g);
    dir.write_table("phi_plus_ce.csv", graph_csv(boundary_line(sys, cfg.n_max, cfg.grid_n)));

    bool variant_ok = true;
    if (cfg.ce_smooth) {
      const auto [vsys, vrep] = smooth_variant(g, smooth_cap(g.base_a), cfg.n_max,
                                               std::max(16, cfg.grid_n / 2));
      json j;
      j["match_defect"] = vrep.match_defect;
      j["cap_value"] = vrep.cap_value;
      j["phi0_min"] = vrep.phi0_min;
      j["phi0_ok"] = vrep.phi0_ok;
      j["bound"] = vrep.bound;
      j["max_on_certified"] = vrep.max_on_certified;
      j["bound_ok"] = vrep.bound_ok;
      j["pass"] = vrep.pass;
      dir.write_json("variant.json", j);
      variant_ok = vrep.pass;
    }

    dir.finish();
    const bool ok = c1.all_exact_one && c1.diagnostic_pass && c2.pass &&
                    integral <= integral_bound && variant_ok;
    return ok ? 0 : 1;
  });
}

int cmd_probe(const RunConfig& cfg) {
  return run_guarded([&]() -> int {
    const BuiltSystem built = build_system(cfg);
    ArtifactDir dir(cfg);
    const AttractorResult res =
        upper_bounding_graph(built.sys, cfg.grid_n, cfg.n_max, cfg.tol);
    const DensityProbeReport rep = density_probe(
        built.sys, res.phi, cfg.probe_samples, cfg.probe_delta, cfg.probe_eps, cfg.seed);
    json j;
    j["samples"] = rep.samples;
    j["hits"] = rep.hits;
    j["hit_fraction"] = rep.hit_fraction();
    j["delta"] = rep.delta;
    j["epsilon"] = rep.epsilon;
    j["seed"] = rep.seed;
    j["attractor_converged"] = res.converged;
    json misses = json::array();
    for (const auto& [theta, x] : rep.miss_locations) {
      misses.push_back({{"theta", theta}, {"x", x}});
    }
    j["misses"] = misses;
    dir.write_json("probe.json", j);
    dir.finish();
    return 0;
  });
}

} // namespace sna
