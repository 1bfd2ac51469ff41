#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sna/errors.hpp"

// Circle rotation arithmetic: angles on T^1 = R/Z, continued fractions with
// exact integer convergents, closest-return displacements, and empirical
// diophantine (c,d) fits.  Everything downstream (boundary lines, the interval
// ladder of the counterexample) keys off the quantities computed here.

namespace sna {

using BigInt = boost::multiprecision::cpp_int;

// Representative of x in [0,1).
double wrap01(double x);

// Arc-length metric on T^1; result in [0, 1/2].
double circle_dist(double a, double b);

// Fold x into (-1/2, 1/2]: displacement of the point x from 0.
double signed_displacement(double x);

// (sqrt(5)-1)/2, the canonical badly-approximable rotation number.
double golden_mean();

// tau_k = k*omega mod 1, computed per entry (one product + one fmod) so that
// no rounding accumulates along the orbit.  k may be negative.
double orbit_point(double omega, long long k);

// [tau_0, ..., tau_n] starting from 0.
std::vector<double> rotation_orbit(double omega, int n);

// Prescribed partial-quotient rules a_1, a_2, ... with an analytic bound for
// the tail sum  sum_{i>=M} 1/a_i  (infinity when the sum diverges).
struct CoeffRule {
  std::string name;
  std::function<std::int64_t(int)> a;           // i >= 1
  std::function<double(int)> tail_inv_sum;      // bound for sum_{i>=M} 1/a_i
};

// "ones" (a_i = 1), "squares" (a_i = i^2), "pow2" (a_i = 2^i).
CoeffRule coeff_rule(const std::string& name);

struct ContinuedFraction {
  double omega = 0.0;
  std::vector<std::int64_t> coeffs;   // a_1..a_K
  std::vector<BigInt> denominators;   // q_0..q_K,  q_{n+1} = a_{n+1} q_n + q_{n-1}
  std::vector<BigInt> numerators;     // p_0..p_K,  same recurrence, p_0=0, p_1=1
  // Signed displacements sigma_n = q_n*omega - p_n for n = 0..K-2.  Sign
  // alternates with n, sigma_0 = omega > 0, and 1/q_{n+2} <= |sigma_n| <= 1/q_{n+1}.
  std::vector<double> returns;
  std::string rule_name;              // non-empty when built from a CoeffRule

  int depth() const { return static_cast<int>(coeffs.size()); }
  double q_double(int n) const;
  double p_double(int n) const;
  // Exact conversion; throws PrecisionExhausted beyond 2^53.
  std::int64_t q_i64(int n) const;
  double sigma(int n) const;
};

// Expand a machine number by the Gauss map, keeping exact integer convergents.
// Signals DegenerateExpansion when the remainder underflows (omega is a
// machine rational) before k terms are produced.
ContinuedFraction cf_expand(double omega, int k);

// Value of the finite continued fraction [0; a_1, ..., a_k] as the correctly
// rounded ratio of the exact convergent integers.  Signals PrecisionExhausted
// once q_k leaves the exactly representable integer range.
double build_omega_from_coeffs(const std::vector<std::int64_t>& coeffs);

// Continued fraction for the (irrational) number defined by a rule, to depth k.
// omega is the double of the deepest convergent that is still exactly
// representable; further terms influence the value below one ulp.  Shallow
// sigma_n are computed through the same double omega the orbit code uses, so
// ladder endpoints coincide with orbit points; once q_n*q_{n+1} grows past the
// float-consistency horizon they switch to the tail formula
//   |sigma_n| = 1 / (zeta_{n+1} q_n + q_{n-1}),  zeta = complete quotient,
// which stays accurate to machine precision at any depth.
ContinuedFraction cf_from_rule(const CoeffRule& rule, int k);

struct DiophantineEstimate {
  double c = 0.0;        // largest lower-bound constant observed for the chosen d
  double d = 0.0;        // smallest exponent on the candidate ladder that fits
  long horizon = 0;      // orbit length scanned
  double floor = 0.0;    // acceptance floor used for c
};

// Fit d(tau_n, 0) >= c * n^{-d} over n = 1..horizon.  Candidates d = 1.0, 1.1,
// ..., 3.0; c is the observed minimum of d(tau_n,0) * n^d.  The smallest d
// whose c clears the floor wins; signals NoFit when none does (liouville-like
// behaviour at this horizon).
DiophantineEstimate diophantine_fit(double omega, long horizon, double floor = 0.05);

// Smallest n >= 1 with circle_dist(tau_n, center) <= radius; signals
// CapExceeded when the scan passes `cap` without entering the ball.
long long first_entry_time(double omega, double center, double radius,
                           long long cap = 2000000);

} // namespace sna
