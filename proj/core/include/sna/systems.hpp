#pragma once

#include <functional>
#include <optional>
#include <string>

#include "sna/errors.hpp"

// Pinched skew products over an irrational rotation: T(theta, x) =
// (theta + omega, T_theta(x)) on T^1 x [0, L], with an invariant 0-line
// (T_theta(0) = 0), a pinched fibre (T_{theta0} = 0), and monotone fibre
// maps.  Concrete families: alpha * g(theta) * f(x) with f = tanh and
// g = |sin(pi theta)|, the piecewise-linear reference minorant, and the
// step-ladder counterexample system assembled elsewhere.

namespace sna {

enum class SystemKind { FgFamily, Reference, Counterexample, Custom };

// One-sided derivative selection at kink points of piecewise families.
enum class Side { Auto, Left, Right };

struct PinchedSystem {
  std::string name;
  SystemKind kind = SystemKind::Custom;
  double omega = 0.0;
  double L = 1.0;              // fibre interval [0, L]
  double pinch_point = 0.0;    // theta_0
  // Raw fibre map (theta, x) -> T_theta(x); eval_fibre adds range checks
  // and clamping on top.
  std::function<double(double, double)> fibre;
  // Closed-form partials; empty => finite differences.  Implementations
  // signal NotDifferentiable for Side::Auto at exact kink points.
  std::function<double(double, double, Side)> dfdx;
  std::function<double(double, double, Side)> dfdtheta;
  // Optional natural log of dfdx for families whose derivative underflows a
  // double (the step-ladder system reaches levels like a^{-q} with q in the
  // hundreds); Lyapunov quadrature prefers this when present.
  std::function<double(double, double)> log_dfdx;
};

// Product family T_theta(x) = alpha * g(theta) * f(x).
struct FgFamilySpec {
  double alpha = 1.0;
  std::function<double(double)> f;        // monotone, f(0) = 0
  std::function<double(double)> f_deriv;
  double f_deriv0 = 1.0;                  // f'(0)
  std::function<double(double)> g;        // T^1 -> [0, inf), single zero
  std::function<double(double, Side)> g_deriv;
  // Optional stable log(g); used by the forcing-average quadrature when g
  // itself underflows.  Empty => log(g(theta)).
  std::function<double(double)> log_g;
  // Optional exact circle average of log g.  Piecewise constructions whose
  // plateaus are far below any uniform quadrature scale supply this from a
  // piece-aligned closed form; when present it replaces the quadrature.
  std::optional<double> mean_log_g;
  double pinch_point = 0.0;
  double L = 1.0;
  std::string label;
};

// alpha * |sin(pi theta)| * tanh(x) on [0, alpha].
FgFamilySpec tanh_family(double alpha);

// alpha_l * |sin(pi theta)| * tanh(alpha_r * x) on [0, alpha_l]: the
// rescaled coordinates in which the product alpha_l*alpha_r system is
// checked against the reference minorant.
FgFamilySpec scaled_tanh_family(double alpha_l, double alpha_r);

PinchedSystem make_system(const FgFamilySpec& fg, double omega);

// min{1, a x} * min{1, (2/b) d(theta, 0)} on [0, 1].
struct ReferenceSpec {
  double a = 0.0;   // > 2
  double b = 0.0;   // > 0, <= diophantine constant and early-return distances
};

double reference_eval(const ReferenceSpec& ref, double theta, double x);
PinchedSystem make_reference_system(const ReferenceSpec& ref, double omega);

// T_theta(x) with input validation (x within [0,L] up to `slack`) and the
// result clamped to [0, L].
double eval_fibre(const PinchedSystem& sys, double theta, double x,
                  double slack = 1e-9);

// Partial derivatives; closed form when the system carries one, otherwise a
// central difference with step h = 1e-5 * max(1, |x|) (O(h^2) truncation).
double fibre_deriv_x(const PinchedSystem& sys, double theta, double x,
                     Side side = Side::Auto);
double fibre_deriv_theta(const PinchedSystem& sys, double theta, double x,
                         Side side = Side::Auto);

struct StructureReport {
  int grid_n = 0;
  double max_zero_line_violation = 0.0;   // sup |T_theta(0)|
  double max_pinch_violation = 0.0;       // sup_x |T_{theta0}(x)|
  double max_monotonicity_violation = 0.0;// worst decrease over x-grid pairs
  double max_range_excess = 0.0;          // distance of raw values from [0,L]
  bool pass(double tol = 1e-12) const {
    return max_zero_line_violation <= tol && max_pinch_violation <= tol &&
           max_monotonicity_violation <= tol && max_range_excess <= tol;
  }
};

// Samples the structural identities (0-line, pinching, x-monotonicity,
// range containment) on a grid_n x grid_n product grid.
StructureReport check_structure(const PinchedSystem& sys, int grid_n);

struct DominationReport {
  bool pass = false;
  double worst_margin = 0.0;  // min over the grid of lower.fibre subtracted from upper.fibre
  double worst_theta = 0.0;
  double worst_x = 0.0;
};

// Checks upper >= lower pointwise on a product grid over the shared fibre
// interval [0, min(L)].  Requires matching rotation numbers.
DominationReport dominates(const PinchedSystem& upper, const PinchedSystem& lower,
                           int grid_theta, int grid_x);

// Scaling conjugacy between the product system alpha_l*alpha_r*g*f(x) and its
// rescaled form alpha_l*g*f(alpha_r y): h(theta, y) = (theta, alpha_r y)
// intertwines the two.  Returns the max defect
// |alpha_r * small(theta, y) - big(theta, alpha_r y)| over a grid.
double conjugation_defect(double alpha_l, double alpha_r, double omega, int grid_n);

} // namespace sna
