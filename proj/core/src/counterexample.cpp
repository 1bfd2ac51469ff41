#include "sna/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sna/boundary.hpp"

namespace sna {

namespace {

constexpr double kEndpointTol = 1e-14;
constexpr double kMeasureTol = 1e-12;
// Deepest return time whose shell is still sampled point-by-point.
constexpr double kMaxShellDepth = 1.0e6;

// Where a signed displacement lands in the ladder.
struct Locate {
  enum Kind { Outside, Pinch, Residual, Plateau, Collar } kind = Outside;
  int idx = -1;
  double t = 0.0; // collar parameter: 0 at the plateau edge, 1 at the outer edge
};

Locate locate(const GFunction& gf, double theta) {
  Locate loc;
  const double s = signed_displacement(theta);
  if (s == 0.0) {
    loc.kind = Locate::Pinch;
    return loc;
  }
  const IntervalLadder& lad = gf.ladder;
  if (s < lad.union_lo || s > lad.union_hi) {
    loc.kind = Locate::Outside;
    return loc;
  }
  for (int i = 0; i < static_cast<int>(lad.rungs.size()); ++i) {
    const LadderRung& r = lad.rungs[static_cast<std::size_t>(i)];
    if (s < r.outer_lo || s > r.outer_hi) continue;
    loc.idx = i;
    if (s >= r.inner_lo && s <= r.inner_hi) {
      loc.kind = Locate::Plateau;
      return loc;
    }
    loc.kind = Locate::Collar;
    if (s < r.inner_lo) {
      loc.t = (r.inner_lo - s) / (r.inner_lo - r.outer_lo);
    } else {
      loc.t = (s - r.inner_hi) / (r.outer_hi - r.inner_hi);
    }
    return loc;
  }
  if (s > lad.residual_lo && s < lad.residual_hi) {
    loc.kind = Locate::Residual;
    return loc;
  }
  loc.kind = Locate::Outside; // between-rung gap below tolerance
  return loc;
}

// int_0^1 |log((1-t) e^{l1} + t e^{l2})| dt  *  w: the exact integral of
// |log g| across one linear-in-g ramp between two (possibly underflowing)
// log levels.
double ramp_abs_log_integral(double w, double l1, double l2) {
  const double lh = std::max(l1, l2);
  const double u = std::exp(std::min(l1, l2) - lh); // in [0, 1]
  double ex; // int_0^1 log(t + (1-t) u) dt, in [-1, 0]
  if (1.0 - u < 1e-9) {
    ex = -(1.0 - u) / 2.0;
  } else {
    const double ulogu = (u > 0.0) ? u * std::log(u) : 0.0;
    ex = (u - 1.0 - ulogu) / (1.0 - u);
  }
  return w * (-lh - ex);
}

// Scan phi over the certified shells: the mirror image (through 0) of each
// rung interval, certified at depth q_n.  Shells with q_n <= n_iter are also
// covered by a dense grid at depth n_iter (monotonicity: deeper lines only
// lie lower).
struct ShellScanResult {
  double max_main = 0.0;
  std::vector<Claim2Shell> shells;
};

std::vector<double> log_spaced(double lo, double hi, int count) {
  // Midpoints, log-spaced in |coordinate|; lo/hi same sign, 0 < |lo| < or > |hi|.
  std::vector<double> out;
  const double sgn = (lo < 0.0) ? -1.0 : 1.0;
  const double llo = std::log(std::min(std::fabs(lo), std::fabs(hi)));
  const double lhi = std::log(std::max(std::fabs(lo), std::fabs(hi)));
  for (int s = 0; s < count; ++s) {
    const double r = std::exp(llo + (lhi - llo) * (s + 0.5) / count);
    out.push_back(sgn * r);
  }
  return out;
}

ShellScanResult scan_certified(const PinchedSystem& sys, const GFunction& gf,
                               int n_iter, int grid_n) {
  ShellScanResult res;
  const IntervalLadder& lad = gf.ladder;
  for (int i = 0; i < static_cast<int>(lad.rungs.size()); ++i) {
    const LadderRung& r = lad.rungs[static_cast<std::size_t>(i)];
    const double q = gf.rung_q[static_cast<std::size_t>(i)];
    if (q > kMaxShellDepth) break; // deeper shells are beyond point sampling
    Claim2Shell shell;
    shell.n = r.n;
    shell.q = static_cast<long long>(q);
    shell.lo = -r.outer_hi; // mirror of the rung interval
    shell.hi = -r.outer_lo;
    const int depth = static_cast<int>(q);
    for (double theta : log_spaced(shell.lo, shell.hi, 8)) {
      shell.max_value =
          std::max(shell.max_value, boundary_value(sys, wrap01(theta), depth));
      ++shell.samples;
    }
    res.shells.push_back(shell);
  }
  // Dense arms at depth n_iter over the shells already certified at q_n <= n_iter.
  const int per_arm = std::max(8, grid_n / 2);
  for (const Claim2Shell& shell : res.shells) {
    if (shell.q > n_iter) continue;
    for (double theta : log_spaced(shell.lo, shell.hi, per_arm)) {
      res.max_main =
          std::max(res.max_main, boundary_value(sys, wrap01(theta), n_iter));
    }
    // Outer endpoint of the certified set (midpoints above exclude it).
    const double edge = std::fabs(shell.lo) > std::fabs(shell.hi) ? shell.lo : shell.hi;
    res.max_main =
        std::max(res.max_main, boundary_value(sys, wrap01(edge), n_iter));
  }
  return res;
}

} // namespace

int choose_n1(const ContinuedFraction& cf) {
  if (cf.rule_name.empty()) {
    throw Error(ErrorCode::ConfigError,
                "choose_n1 needs a rule-built expansion (tail bound required)");
  }
  const CoeffRule rule = coeff_rule(cf.rule_name);
  const int depth = cf.depth();
  const double tail = rule.tail_inv_sum(depth + 1); // sum_{i >= depth} q_i/q_{i+1} bound
  if (!std::isfinite(tail)) {
    throw Error(ErrorCode::DepthInsufficient,
                "ratio series q_n/q_{n+1} does not converge for rule " + cf.rule_name);
  }
  // Suffix sums of the exact convergent ratios.
  std::vector<double> suffix(static_cast<std::size_t>(depth) + 1, tail);
  for (int i = depth - 1; i >= 0; --i) {
    suffix[static_cast<std::size_t>(i)] =
        suffix[static_cast<std::size_t>(i) + 1] + cf.q_double(i) / cf.q_double(i + 1);
  }
  for (int n1 = 0; n1 <= depth - 2; ++n1) {
    if (suffix[static_cast<std::size_t>(n1)] < 0.5 && cf.sigma(n1) > 0.0) return n1;
  }
  throw Error(ErrorCode::DepthInsufficient,
              "no starting index meets the half-sum condition at this depth");
}

IntervalLadder build_intervals(const ContinuedFraction& cf, int n1, int K) {
  if (n1 < 0 || K < n1 + 2) {
    throw Error(ErrorCode::ConfigError, "build_intervals: need K >= n1 + 2");
  }
  if (cf.depth() < K + 4) {
    throw Error(ErrorCode::DepthInsufficient,
                "expansion depth " + std::to_string(cf.depth()) +
                    " cannot place rungs to index " + std::to_string(K));
  }
  IntervalLadder lad;
  lad.n1 = n1;
  lad.depth_K = K;
  for (int n = n1; n <= K; ++n) {
    const double s = cf.sigma(n);
    const double t = cf.sigma(n + 2);
    if (!(std::fabs(t) < std::fabs(s))) {
      throw Error(ErrorCode::LadderInconsistent,
                  "return displacements fail to shrink at index " + std::to_string(n));
    }
    LadderRung r;
    r.n = n;
    r.outer_lo = std::min(-s, -t);
    r.outer_hi = std::max(-s, -t);
    r.inner_lo = std::min(-s + t, -t);
    r.inner_hi = std::max(-s + t, -t);
    if (r.inner_lo < r.outer_lo || r.inner_hi > r.outer_hi) {
      throw Error(ErrorCode::LadderInconsistent,
                  "plateau interval escapes its rung at index " + std::to_string(n));
    }
    lad.rungs.push_back(r);
  }
  const double s1 = cf.sigma(n1);
  const double s2 = cf.sigma(n1 + 1);
  lad.union_lo = std::min(-s1, -s2);
  lad.union_hi = std::max(-s1, -s2);

  // Same-side rungs n and n-2 must share the endpoint -sigma_n exactly.
  for (std::size_t i = 2; i < lad.rungs.size(); ++i) {
    const LadderRung& outerRung = lad.rungs[i - 2];
    const LadderRung& innerRung = lad.rungs[i];
    const double shared_from_outer =
        std::fabs(outerRung.outer_lo) < std::fabs(outerRung.outer_hi)
            ? outerRung.outer_lo
            : outerRung.outer_hi; // endpoint of rung n-2 nearer 0
    const double shared_from_inner =
        std::fabs(innerRung.outer_lo) > std::fabs(innerRung.outer_hi)
            ? innerRung.outer_lo
            : innerRung.outer_hi; // endpoint of rung n farther from 0
    if (std::fabs(shared_from_outer - shared_from_inner) > kEndpointTol) {
      throw Error(ErrorCode::LadderInconsistent,
                  "adjacent rungs do not meet at index " +
                      std::to_string(innerRung.n));
    }
  }

  // Residual core: between the near endpoints of the two deepest rungs.
  double res_lo = lad.union_lo, res_hi = lad.union_hi;
  for (const LadderRung& r : lad.rungs) {
    const double near =
        std::fabs(r.outer_lo) < std::fabs(r.outer_hi) ? r.outer_lo : r.outer_hi;
    if (near < 0.0) res_lo = std::max(res_lo, near);
    if (near > 0.0) res_hi = std::min(res_hi, near);
  }
  if (!(res_lo < 0.0 && res_hi > 0.0)) {
    throw Error(ErrorCode::LadderInconsistent, "residual core does not straddle 0");
  }
  lad.residual_lo = res_lo;
  lad.residual_hi = res_hi;

  double covered = res_hi - res_lo;
  for (const LadderRung& r : lad.rungs) covered += r.outer_hi - r.outer_lo;
  if (std::fabs(covered - (lad.union_hi - lad.union_lo)) > kMeasureTol) {
    throw Error(ErrorCode::LadderInconsistent,
                "rungs plus residual do not tile the ladder interval");
  }
  return lad;
}

double GFunction::eval(double theta) const {
  const Locate loc = locate(*this, theta);
  switch (loc.kind) {
    case Locate::Pinch: return 0.0;
    case Locate::Outside: return 1.0;
    case Locate::Residual: return std::exp(residual_log);
    case Locate::Plateau: return std::exp(level_log[static_cast<std::size_t>(loc.idx)]);
    case Locate::Collar: {
      const double gl = std::exp(level_log[static_cast<std::size_t>(loc.idx)]);
      const double gj = std::exp(join_log[static_cast<std::size_t>(loc.idx)]);
      if (loc.t == 0.0) return gl;
      if (loc.t == 1.0) return gj;
      return (1.0 - loc.t) * gl + loc.t * gj;
    }
  }
  return 1.0;
}

double GFunction::log_eval(double theta) const {
  const Locate loc = locate(*this, theta);
  switch (loc.kind) {
    case Locate::Pinch: return -std::numeric_limits<double>::infinity();
    case Locate::Outside: return 0.0;
    case Locate::Residual: return residual_log;
    case Locate::Plateau: return level_log[static_cast<std::size_t>(loc.idx)];
    case Locate::Collar: {
      const double ll = level_log[static_cast<std::size_t>(loc.idx)];
      const double lj = join_log[static_cast<std::size_t>(loc.idx)];
      if (loc.t == 0.0) return ll;
      if (loc.t == 1.0) return lj;
      // g = e^{lj} (t + (1-t) e^{ll - lj}), with ll <= lj.
      return lj + std::log(loc.t + (1.0 - loc.t) * std::exp(ll - lj));
    }
  }
  return 0.0;
}

double GFunction::abs_log_integral() const {
  double total = 0.0;
  for (std::size_t i = 0; i < ladder.rungs.size(); ++i) {
    const LadderRung& r = ladder.rungs[i];
    total += (r.inner_hi - r.inner_lo) * (-level_log[i]);
    const double collar_w = (r.outer_hi - r.outer_lo) - (r.inner_hi - r.inner_lo);
    total += ramp_abs_log_integral(collar_w, level_log[i], join_log[i]);
  }
  total += (ladder.residual_hi - ladder.residual_lo) * (-residual_log);
  return total;
}

GFunction build_g(const CounterexampleSpec& spec) {
  if (!(spec.base_a > 2.0)) {
    throw Error(ErrorCode::ConfigError, "counterexample needs base_a > 2");
  }
  if (spec.depth_K < 4) {
    throw Error(ErrorCode::ConfigError, "counterexample needs depth_K >= 4");
  }
  const ContinuedFraction cf = cf_from_rule(coeff_rule(spec.rule), spec.depth_K + 4);
  const int n1 = choose_n1(cf);
  if (spec.depth_K < n1 + 2) {
    throw Error(ErrorCode::DepthInsufficient,
                "depth_K " + std::to_string(spec.depth_K) +
                    " below the starting index " + std::to_string(n1) + " + 2");
  }
  GFunction gf;
  gf.base_a = spec.base_a;
  gf.omega = cf.omega;
  gf.n1 = n1;
  gf.depth_K = spec.depth_K;
  gf.ladder = build_intervals(cf, n1, spec.depth_K);
  const double loga = std::log(spec.base_a);
  for (const LadderRung& r : gf.ladder.rungs) {
    const double q = cf.q_double(r.n);
    gf.rung_q.push_back(q);
    gf.level_log.push_back(-q * loga);
  }
  for (std::size_t i = 0; i < gf.ladder.rungs.size(); ++i) {
    gf.join_log.push_back(i >= 2 ? gf.level_log[i - 2] : 0.0);
  }
  for (std::size_t i = 1; i < gf.rung_q.size(); ++i) {
    if (!(gf.rung_q[i] > gf.rung_q[i - 1])) {
      throw Error(ErrorCode::LadderInconsistent, "plateau levels fail to decrease");
    }
  }
  gf.residual_log = -cf.q_double(spec.depth_K) * loga;
  return gf;
}

FgFamilySpec counterexample_family(const GFunction& g) {
  FgFamilySpec fam;
  const double a = g.base_a;
  fam.alpha = 1.0;
  fam.f = [a](double x) { return std::min(1.0, a * x); };
  fam.f_deriv = [a](double x) { return a * x < 1.0 ? a : 0.0; };
  fam.f_deriv0 = a;
  fam.g = [g](double theta) { return g.eval(theta); };
  fam.log_g = [g](double theta) { return g.log_eval(theta); };
  fam.mean_log_g = -g.abs_log_integral();
  fam.pinch_point = 0.0;
  fam.L = 1.0;
  fam.label = "ladder(a=" + std::to_string(a) + ",K=" + std::to_string(g.depth_K) + ")";
  return fam;
}

PinchedSystem make_counterexample_system(const GFunction& g) {
  PinchedSystem sys = make_system(counterexample_family(g), g.omega);
  sys.kind = SystemKind::Counterexample;
  return sys;
}

Claim1Report verify_claim1(const GFunction& g, int n_max) {
  if (n_max < 1) throw Error(ErrorCode::ConfigError, "verify_claim1: n_max >= 1");
  const double a = g.base_a;
  Claim1Report rep;
  rep.n_max = n_max;
  rep.all_exact_one = true;
  for (int n = 1; n <= n_max; ++n) {
    double x = 1.0;
    for (int j = n; j >= 1; --j) {
      const double ang = wrap01(0.0 - static_cast<double>(j) * g.omega);
      x = g.eval(ang) * std::min(1.0, a * x);
    }
    const double dev = std::fabs(x - 1.0);
    rep.max_deviation = std::max(rep.max_deviation, dev);
    if (x != 1.0 && rep.first_bad_n < 0) {
      rep.all_exact_one = false;
      rep.first_bad_n = n;
    }
  }
  // Visit-cost diagnostic along the backward orbit of the pinch point.
  const double loga = std::log(a);
  double cost = 0.0; // -sum log_a g(tau_{-j}), nonnegative
  double worst = std::numeric_limits<double>::infinity();
  rep.diagnostic_pass = true;
  for (int j = 1; j <= n_max; ++j) {
    const double ang = wrap01(0.0 - static_cast<double>(j) * g.omega);
    cost -= g.log_eval(ang) / loga;
    const double slack = 0.5 * j - cost;
    worst = std::min(worst, slack);
    if (slack < -1e-9) rep.diagnostic_pass = false;
  }
  rep.worst_diagnostic_slack = worst;
  return rep;
}

Claim2Report verify_claim2(const GFunction& g, int n_iter, int grid_n) {
  if (n_iter < 1 || grid_n < 16) {
    throw Error(ErrorCode::ConfigError, "verify_claim2: need n_iter >= 1, grid_n >= 16");
  }
  const PinchedSystem sys = make_counterexample_system(g);
  Claim2Report rep;
  rep.n_iter = n_iter;
  rep.grid_n = grid_n;
  rep.bound = 1.0 / g.base_a + 1e-10;
  const ShellScanResult scan = scan_certified(sys, g, n_iter, grid_n);
  rep.max_main = scan.max_main;
  rep.shells = scan.shells;
  rep.phi_at_zero = boundary_value(sys, 0.0, n_iter);

  rep.certified_outer_radius = 0.0;
  rep.certified_inner_radius = std::numeric_limits<double>::infinity();
  bool shells_ok = true;
  for (const Claim2Shell& shell : rep.shells) {
    rep.certified_outer_radius = std::max(
        rep.certified_outer_radius, std::max(std::fabs(shell.lo), std::fabs(shell.hi)));
    rep.certified_inner_radius = std::min(
        rep.certified_inner_radius, std::min(std::fabs(shell.lo), std::fabs(shell.hi)));
    if (shell.max_value > rep.bound) shells_ok = false;
  }
  rep.pass = shells_ok && rep.max_main <= rep.bound &&
             rep.phi_at_zero >= 1.0 - 1e-12;
  return rep;
}

std::function<double(double)> smooth_cap(double a) {
  if (!(a > 2.0)) throw Error(ErrorCode::ConfigError, "smooth_cap needs a > 2");
  return [a](double x) {
    const double knee = 1.0 / a;
    if (x <= knee) return a * x;
    return 2.0 - std::exp(-a * (x - knee));
  };
}

std::pair<PinchedSystem, VariantReport> smooth_variant(
    const GFunction& g, const std::function<double(double)>& ftilde, int n_max,
    int grid_n) {
  if (n_max < 1 || grid_n < 16) {
    throw Error(ErrorCode::ConfigError, "smooth_variant: need n_max >= 1, grid_n >= 16");
  }
  const double a = g.base_a;
  const double knee = 1.0 / a;

  VariantReport rep;
  for (int k = 0; k <= 1000; ++k) {
    const double x = knee * k / 1000.0;
    rep.match_defect = std::max(rep.match_defect, std::fabs(ftilde(x) - a * x));
  }
  if (rep.match_defect > 1e-12) {
    throw Error(ErrorCode::VariantPrecondition,
                "ftilde must match a*x on [0, 1/a]; defect " +
                    std::to_string(rep.match_defect));
  }
  double prev = ftilde(0.0);
  for (int k = 1; k <= 2000; ++k) {
    const double x = 2.0 * k / 2000.0;
    const double v = ftilde(x);
    if (!(v > prev)) {
      throw Error(ErrorCode::VariantPrecondition,
                  "ftilde must be strictly increasing; flat near x = " +
                      std::to_string(x));
    }
    prev = v;
  }
  rep.cap_value = ftilde(2.0);
  if (rep.cap_value > 2.0 + 1e-12) {
    throw Error(ErrorCode::VariantPrecondition, "ftilde(2) must be <= 2");
  }

  FgFamilySpec fam;
  fam.alpha = 1.0;
  fam.f = ftilde;
  fam.f_deriv0 = a;
  fam.g = [g](double theta) { return g.eval(theta); };
  fam.log_g = [g](double theta) { return g.log_eval(theta); };
  fam.mean_log_g = -g.abs_log_integral();
  fam.pinch_point = 0.0;
  fam.L = 2.0;
  fam.label = "ladder-smooth(a=" + std::to_string(a) + ")";
  PinchedSystem sys = make_system(fam, g.omega);
  sys.kind = SystemKind::Counterexample;

  rep.phi0_min = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    double x = 2.0;
    for (int j = n; j >= 1; --j) {
      const double ang = wrap01(0.0 - static_cast<double>(j) * g.omega);
      x = g.eval(ang) * ftilde(x);
    }
    rep.phi0_min = std::min(rep.phi0_min, x);
  }
  rep.phi0_ok = rep.phi0_min >= 1.0 - 1e-12;

  rep.bound = 2.0 / a + 1e-10;
  const ShellScanResult scan = scan_certified(sys, g, n_max, grid_n);
  rep.max_on_certified = scan.max_main;
  for (const Claim2Shell& shell : scan.shells) {
    rep.max_on_certified = std::max(rep.max_on_certified, shell.max_value);
  }
  rep.bound_ok = rep.max_on_certified <= rep.bound;
  rep.pass = rep.phi0_ok && rep.bound_ok;
  return {std::move(sys), rep};
}

Claim1Report verify_claim1(const CounterexampleSpec& spec, int n_max) {
  return verify_claim1(build_g(spec), n_max);
}

Claim2Report verify_claim2(const CounterexampleSpec& spec, int n_iter, int grid_n) {
  return verify_claim2(build_g(spec), n_iter, grid_n);
}

} // namespace sna
