#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sna/systems.hpp"

// Iterated upper boundary lines phi_n(theta) = T^n_{theta - n omega}(L) and
// everything built on them: the monotone approach to the upper bounding
// graph phi+, peak-interval bookkeeping, slope and difference-decay bounds,
// and the sampled density probe of the filled-in-closure property.

namespace sna {

struct GraphSample {
  int grid_n = 0;                 // value k is the graph at theta = k / grid_n
  std::vector<double> values;
  std::string system_id;
  int iter_n = -1;                // boundary-line index n; -1 for synthetic graphs

  double at(int k) const { return values[static_cast<std::size_t>(k)]; }
  // Value at the grid point nearest to theta (no interpolation: boundary
  // lines are exponentially steep near peaks and interpolating would invent
  // values the dynamics never produced).
  double nearest(double theta) const;
};

// phi_n at a single angle by the exact n-step backward orbit: start at L on
// the fibre over theta - n*omega and apply the fibre maps forward.  Each
// backward angle is formed as wrap01(theta - j*omega) with one product and
// one fmod, which keeps orbit points bit-identical to rotation_orbit and
// makes the pinch propagate to exact zeros.
double boundary_value(const PinchedSystem& sys, double theta, int n);

GraphSample boundary_line(const PinchedSystem& sys, int n, int grid_n);

// phi_0 ... phi_{n_max}, each line computed independently per grid point
// (cost O(n_max^2 * grid_n / 2); no cross-line interpolation error).
std::vector<GraphSample> boundary_sequence(const PinchedSystem& sys, int n_max,
                                           int grid_n);

struct PeakParams {
  double a = 0.0;
  double b = 0.0;
  int m = 1;
  double omega = 0.0;
};

struct PeakInterval {
  int n = 0;          // resolution index
  int j = 0;          // orbit index of the centre
  double center = 0.0;    // tau_j
  double half_width = 0.0;// (b/2) * a^{-n/m}
};

// Shrinking windows around tau_1..tau_jmax inside which boundary-line
// differences are not controlled at resolution n.
std::vector<PeakInterval> peak_intervals(const PeakParams& p, int n, int j_max);

// Peak half-width used when no verified (a, b, m) constants are available:
// b0 * 2^{-n/8} / 2 with b0 = min_{1<=j<=8} d(tau_j, 0).  Conservative enough
// to keep newborn peaks out of the convergence measurement for every family
// this laboratory ships.
double default_peak_half_width(double omega, int n);

// True when theta avoids every window of half-width `half_width` centred at
// tau_j, j_lo <= j <= j_hi.
bool off_peak(double omega, double theta, int j_lo, int j_hi, double half_width);

struct AttractorResult {
  GraphSample phi;
  bool converged = false;
  int iterations = 0;             // index n of the returned line
  double restricted_diff = 0.0;   // last sup |phi_n - phi_{n-1}| off-peak
  double unrestricted_diff = 0.0; // same sup without the peak exclusion
  double exclusion_b0 = 0.0;      // constants behind the exclusion windows
  double exclusion_half_width = 0.0;
  int measure_points = 0;
};

// Iterates boundary lines until the off-peak sup-difference falls below tol
// (the unrestricted difference never converges uniformly: each step creates a
// fresh peak).  Convergence is measured along moving angles theta_k + n*omega
// where consecutive lines satisfy a one-step recurrence, so the whole scan
// costs O(n) fibre evaluations per measure point; the returned graph is then
// a single backward-anchored pass over the full grid.  With strict = true,
// reaching n_max with the unrestricted difference above tol signals
// NotConverged; otherwise the flags in the result tell the story.
AttractorResult upper_bounding_graph(const PinchedSystem& sys, int grid_n,
                                     int n_max, double tol, bool strict = false,
                                     int measure_points = 2048);

struct SlopeReport {
  int n = 0;
  double observed = 0.0;  // max |phi(theta_{k+1}) - phi(theta_k)| * grid_n
  double bound = 0.0;     // beta * alpha^n
  bool pass = false;
};

// Finite-difference slope of the n-th boundary line against beta * alpha^n.
SlopeReport slope_check(const GraphSample& phi, double beta, double alpha, int n);

struct DecayRow {
  int n = 0;
  double observed = 0.0;
  double bound = 0.0;       // L * alpha^{-(n-1) lambda}
  long restricted_count = 0;// grid points that survived the peak exclusion
  bool vacuous = false;
  bool pass = false;
};

struct DecayParams {
  double omega = 0.0;
  double a = 0.0;
  double b = 0.0;
  int m = 1;
  double alpha = 0.0;
  double gamma = 0.0;
  double L = 0.0;
  int q = 1;                // exclusion starts at tau_q
};

struct DecayReport {
  double lambda_decay = 0.0; // gamma (1 - 4/m) - 4/m
  std::vector<DecayRow> rows;
  bool all_pass() const;
};

// For each consecutive pair in the sequence, restricts the grid to angles
// outside the union of peak windows J^{n-1}_j, j = q..n, and compares the
// sup-difference against the exponential decay bound.  Rows start at
// n = max(1, q*m + 1): earlier steps sit outside the regime where the bound
// applies, so they carry no information either way.
DecayReport difference_decay_check(const std::vector<GraphSample>& seq,
                                   const DecayParams& p);

// Sup over sampled off-peak angles of |T_theta(phi_n(theta)) - phi_n(theta+omega)|,
// both values recomputed by exact backward orbits.  For an exactly invariant
// graph this is zero; for a boundary line it equals the local one-step
// difference, so it doubles as a convergence certificate.
double invariance_defect(const PinchedSystem& sys, int n, int n_samples,
                         double exclusion_radius);

struct DensityProbeReport {
  int samples = 0;
  int hits = 0;
  double delta = 0.0;      // box half-width in theta
  double epsilon = 0.0;    // box half-height in x
  std::uint64_t seed = 0;
  std::vector<std::pair<double, double>> miss_locations;
  double hit_fraction() const {
    return samples == 0 ? 0.0 : static_cast<double>(hits) / samples;
  }
};

// Samples boxes below the graph and asks whether each one is approached by
// the graph itself: draw (theta, x) with 3 eps <= x <= phi+(theta) - 3 eps
// (rejection sampling; angles with phi+ < 6 eps are redrawn), then count a
// hit when some grid angle theta' within delta of theta has
// |phi+(theta') - x| < eps.  Deterministic per seed: sample i derives its
// own generator from seed + i.  Signals GridTooCoarse when delta spans
// fewer than 10 grid cells.
DensityProbeReport density_probe(const PinchedSystem& sys, const GraphSample& phi_plus,
                                 int n_samples, double delta, double epsilon,
                                 std::uint64_t seed);

} // namespace sna
