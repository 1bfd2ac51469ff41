#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sna/circle.hpp"
#include "sna/errors.hpp"
#include "sna/systems.hpp"

namespace sna {

// System with an isolated attractor point: T(theta, x) = (theta + omega,
// g(theta) * min{1, a x}) where g is a step ladder whose plateau levels
// a^{-q_n} sit over intervals accumulating at the pinch point.
struct CounterexampleSpec {
  std::string rule = "squares"; // continued-fraction coefficient rule name
  double base_a = 3.0;          // slope of f(x) = min{1, a x}; also the level base
  int depth_K = 25;             // deepest ladder rung index
};

// Smallest n1 such that sum_{i >= n1} q_i / q_{i+1} < 1/2 (exact prefix
// ratios plus the rule's tail bound sum 1/a_{i+1}) and the return
// displacement sigma_{n1} lies to the right of 0.  Throws DepthInsufficient
// when no index qualifies within the expansion (e.g. the all-ones rule,
// whose ratio series diverges).
int choose_n1(const ContinuedFraction& cf);

// One ladder rung: the inner interval carries a constant level, the collar
// outer \ inner carries the monotone ramp joining two adjacent levels.  All
// coordinates are signed displacements from the pinch point, in (-1/2, 1/2].
struct LadderRung {
  int n = 0;
  double inner_lo = 0.0, inner_hi = 0.0; // plateau interval
  double outer_lo = 0.0, outer_hi = 0.0; // shares the endpoint nearer 0
};

struct IntervalLadder {
  int n1 = 0;
  int depth_K = 0;
  std::vector<LadderRung> rungs;             // n = n1 .. K, alternating sides
  double union_lo = 0.0, union_hi = 0.0;     // [-sigma_{n1}, -sigma_{n1+1}]
  double residual_lo = 0.0, residual_hi = 0.0; // uncovered core around 0
};

// Builds rungs n = n1..K from the signed return displacements: outer
// interval between -sigma_n and -sigma_{n+2}, inner interval between
// -sigma_n + sigma_{n+2} and -sigma_{n+2}.  Even and odd rungs alternate
// sides of 0 and consecutive same-side rungs share an endpoint exactly, so
// the union (plus the residual core) telescopes to [union_lo, union_hi].
// Throws LadderInconsistent if the telescoping identity or disjointness
// fails beyond 1e-14, DepthInsufficient if the expansion is too shallow.
IntervalLadder build_intervals(const ContinuedFraction& cf, int n1, int K);

// Evaluable forcing function.  Levels are carried in log form: deep rungs
// underflow double range (a^{-q_n} with q_n astronomically large), so eval()
// may return exact 0 while log_eval() stays finite and exact on plateaus.
struct GFunction {
  double base_a = 3.0;
  double omega = 0.0;
  int n1 = 0;
  int depth_K = 0;
  IntervalLadder ladder;
  std::vector<double> rung_q;    // return time q_n per rung (exact for shallow n)
  std::vector<double> level_log; // log of the rung plateau value, -q_n log a
  std::vector<double> join_log;  // log of the level the collar ramps up to
  double residual_log = 0.0;     // truncation plateau level, -q_K log a

  double eval(double theta) const;     // g, with g(pinch) = 0, g = 1 off ladder
  double log_eval(double theta) const; // log g; -inf at the pinch point
  // Piece-aligned closed-form integral of |log g| over the circle (exact
  // plateau terms plus the analytic ramp integral).
  double abs_log_integral() const;
};

// Assembles the expansion (depth K+4), picks n1, builds the ladder, and
// attaches levels.  Throws ConfigError unless base_a > 2.
GFunction build_g(const CounterexampleSpec& spec);

// Family wrapper: alpha = 1, f = min{1, a x}, L = 1, with stable log g and
// the exact forcing average (so the vertical-exponent criterion bypasses
// uniform quadrature that could never resolve the deep rungs).
FgFamilySpec counterexample_family(const GFunction& g);
PinchedSystem make_counterexample_system(const GFunction& g);

struct Claim1Report {
  int n_max = 0;
  bool all_exact_one = false;  // phi_n(0) == 1.0 bitwise for every n <= n_max
  double max_deviation = 0.0;  // max_n |phi_n(0) - 1|
  int first_bad_n = -1;        // smallest n with phi_n(0) != 1, or -1
  // Running visit-cost diagnostic: -sum_{j<=n} log_a g(tau_{-j}) <= n/2.
  bool diagnostic_pass = false;
  double worst_diagnostic_slack = 0.0; // min_n (n/2 - cost_n)
};

// Exact backward-orbit check that the upper bounding graph keeps height 1
// over the pinch point.
Claim1Report verify_claim1(const GFunction& g, int n_max);

struct Claim2Shell {
  int n = 0;            // ladder index whose return time certifies the shell
  long long q = 0;      // iteration depth used (q_n)
  double lo = 0.0, hi = 0.0; // signed shell interval (mirror side of rung n)
  double max_value = 0.0;
  int samples = 0;
};

struct Claim2Report {
  int n_iter = 0;
  int grid_n = 0;
  double bound = 0.0;          // 1/a plus tolerance
  double max_main = 0.0;       // max phi_{n_iter} over the main certified arms
  double phi_at_zero = 0.0;    // should be exactly 1
  std::vector<Claim2Shell> shells;
  double certified_outer_radius = 0.0;
  double certified_inner_radius = 0.0;
  bool pass = false;           // every max <= bound and phi_at_zero = 1
};

// Certifies phi^+ <= 1/a on the punctured neighbourhood of the pinch point:
// a dense grid at depth n_iter over the shells whose return times q_n are
// <= n_iter, plus per-shell sampling at depth q_n for deeper shells.
// Together with claim 1 this exhibits (0, 1) as an isolated point of the
// attractor closure.
Claim2Report verify_claim2(const GFunction& g, int n_iter = 500, int grid_n = 2000);

struct VariantReport {
  double match_defect = 0.0;   // max |ftilde(x) - a x| on [0, 1/a]
  double cap_value = 0.0;      // ftilde(2)
  double phi0_min = 0.0;       // min_n phi_n(0), must stay >= 1
  bool phi0_ok = false;
  double bound = 0.0;          // 2/a plus tolerance
  double max_on_certified = 0.0;
  bool bound_ok = false;
  bool pass = false;
};

// Strictly increasing replacement for the capped slope: a x up to the knee
// 1/a, then a C1 exponential saturation toward 2.
std::function<double(double)> smooth_cap(double a);

// Builds Ttilde(theta, x) = (theta + omega, g(theta) ftilde(x)) on [0, 2]
// and verifies the variant keeps the isolated-point picture: phi_n(0) >= 1
// for n <= n_max and phi^+ <= 2/a on the certified shells.  Throws
// VariantPrecondition naming the violated clause (match on [0,1/a], strict
// increase, ftilde(2) <= 2).
std::pair<PinchedSystem, VariantReport> smooth_variant(
    const GFunction& g, const std::function<double(double)>& ftilde,
    int n_max = 500, int grid_n = 1000);

// Convenience wrappers running from a fresh spec.
Claim1Report verify_claim1(const CounterexampleSpec& spec, int n_max);
Claim2Report verify_claim2(const CounterexampleSpec& spec, int n_iter = 500,
                           int grid_n = 2000);

} // namespace sna
