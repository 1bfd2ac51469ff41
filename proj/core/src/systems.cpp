#include "sna/systems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sna/circle.hpp"

namespace sna {

namespace {

double sin_pinch(double theta) { return std::fabs(std::sin(M_PI * theta)); }

// d/dtheta |sin(pi theta)|: smooth except at the zero theta = 0 (mod 1).
double sin_pinch_deriv(double theta, Side side) {
  const double t = wrap01(theta);
  if (t == 0.0) {
    switch (side) {
      case Side::Right: return M_PI;
      case Side::Left: return -M_PI;
      case Side::Auto:
        throw Error(ErrorCode::NotDifferentiable,
                    "|sin(pi theta)| has a kink at the pinch point");
    }
  }
  return M_PI * std::cos(M_PI * t); // sin(pi t) > 0 on (0,1)
}

double sech2(double x) {
  const double c = std::cosh(x);
  return 1.0 / (c * c);
}

} // namespace

FgFamilySpec tanh_family(double alpha) {
  if (alpha <= 0.0) throw Error(ErrorCode::ConfigError, "tanh family needs alpha > 0");
  FgFamilySpec fg;
  fg.alpha = alpha;
  fg.f = [](double x) { return std::tanh(x); };
  fg.f_deriv = [](double x) { return sech2(x); };
  fg.f_deriv0 = 1.0;
  fg.g = sin_pinch;
  fg.g_deriv = sin_pinch_deriv;
  fg.pinch_point = 0.0;
  fg.L = alpha; // sup T = alpha * 1 * 1
  fg.label = "tanh(alpha=" + std::to_string(alpha) + ")";
  return fg;
}

FgFamilySpec scaled_tanh_family(double alpha_l, double alpha_r) {
  if (alpha_l <= 0.0 || alpha_r <= 0.0) {
    throw Error(ErrorCode::ConfigError, "scaled tanh family needs positive factors");
  }
  FgFamilySpec fg;
  fg.alpha = alpha_l;
  fg.f = [alpha_r](double x) { return std::tanh(alpha_r * x); };
  fg.f_deriv = [alpha_r](double x) { return alpha_r * sech2(alpha_r * x); };
  fg.f_deriv0 = alpha_r;
  fg.g = sin_pinch;
  fg.g_deriv = sin_pinch_deriv;
  fg.pinch_point = 0.0;
  fg.L = alpha_l;
  fg.label = "tanh(split=" + std::to_string(alpha_l) + "x" + std::to_string(alpha_r) + ")";
  return fg;
}

PinchedSystem make_system(const FgFamilySpec& fg, double omega) {
  PinchedSystem sys;
  sys.name = fg.label;
  sys.kind = SystemKind::FgFamily;
  sys.omega = omega;
  sys.L = fg.L;
  sys.pinch_point = fg.pinch_point;
  sys.fibre = [fg](double theta, double x) { return fg.alpha * fg.g(theta) * fg.f(x); };
  if (fg.f_deriv) {
    sys.dfdx = [fg](double theta, double x, Side) {
      return fg.alpha * fg.g(theta) * fg.f_deriv(x);
    };
    if (fg.log_g) {
      sys.log_dfdx = [fg](double theta, double x) {
        return std::log(fg.alpha) + fg.log_g(theta) + std::log(fg.f_deriv(x));
      };
    }
  }
  if (fg.g_deriv) {
    sys.dfdtheta = [fg](double theta, double x, Side side) {
      const double fx = fg.f(x);
      if (fx == 0.0) return 0.0; // both one-sided limits vanish with f(x)
      return fg.alpha * fg.g_deriv(theta, side) * fx;
    };
  }
  return sys;
}

double reference_eval(const ReferenceSpec& ref, double theta, double x) {
  const double u = std::min(1.0, ref.a * x);
  const double v = std::min(1.0, (2.0 / ref.b) * circle_dist(theta, 0.0));
  return u * v;
}

PinchedSystem make_reference_system(const ReferenceSpec& ref, double omega) {
  if (!(ref.a > 2.0)) throw Error(ErrorCode::ConfigError, "reference system needs a > 2");
  if (!(ref.b > 0.0)) throw Error(ErrorCode::ConfigError, "reference system needs b > 0");
  PinchedSystem sys;
  sys.name = "reference(a=" + std::to_string(ref.a) + ",b=" + std::to_string(ref.b) + ")";
  sys.kind = SystemKind::Reference;
  sys.omega = omega;
  sys.L = 1.0;
  sys.pinch_point = 0.0;
  sys.fibre = [ref](double theta, double x) { return reference_eval(ref, theta, x); };
  sys.dfdx = [ref](double theta, double x, Side side) {
    const double v = std::min(1.0, (2.0 / ref.b) * circle_dist(theta, 0.0));
    const double knee = 1.0 / ref.a;
    if (x < knee) return ref.a * v;
    if (x > knee) return 0.0;
    switch (side) {
      case Side::Left: return ref.a * v;
      case Side::Right: return 0.0;
      default:
        throw Error(ErrorCode::NotDifferentiable, "reference slope kink at x = 1/a");
    }
  };
  sys.dfdtheta = [ref](double theta, double x, Side side) {
    const double u = std::min(1.0, ref.a * x);
    if (u == 0.0) return 0.0;
    const double s = signed_displacement(theta);
    const double half = ref.b / 2.0;
    const double ramp = u * 2.0 / ref.b;
    if (s == 0.0) {
      if (side == Side::Right) return ramp;
      if (side == Side::Left) return -ramp;
      throw Error(ErrorCode::NotDifferentiable, "reference pinch kink at theta = 0");
    }
    if (std::fabs(s) < half) return s > 0.0 ? ramp : -ramp;
    if (std::fabs(s) > half) return 0.0;
    // exactly on the plateau boundary
    if (side == Side::Auto) {
      throw Error(ErrorCode::NotDifferentiable, "reference plateau kink at d(theta,0) = b/2");
    }
    const bool inner_side = (s > 0.0) ? (side == Side::Left) : (side == Side::Right);
    if (!inner_side) return 0.0;
    return s > 0.0 ? ramp : -ramp;
  };
  return sys;
}

double eval_fibre(const PinchedSystem& sys, double theta, double x, double slack) {
  if (x < -slack || x > sys.L + slack) {
    throw Error(ErrorCode::OutOfRange,
                "fibre input x = " + std::to_string(x) + " outside [0, " +
                    std::to_string(sys.L) + "]");
  }
  const double xc = std::clamp(x, 0.0, sys.L);
  return std::clamp(sys.fibre(theta, xc), 0.0, sys.L);
}

double fibre_deriv_x(const PinchedSystem& sys, double theta, double x, Side side) {
  if (sys.dfdx) return sys.dfdx(theta, x, side);
  const double h = 1e-5 * std::max(1.0, std::fabs(x));
  const double lo = std::max(0.0, x - h);
  const double hi = std::min(sys.L, x + h);
  return (sys.fibre(theta, hi) - sys.fibre(theta, lo)) / (hi - lo);
}

double fibre_deriv_theta(const PinchedSystem& sys, double theta, double x, Side side) {
  if (sys.dfdtheta) return sys.dfdtheta(theta, x, side);
  const double h = 1e-7;
  return (sys.fibre(wrap01(theta + h), x) - sys.fibre(wrap01(theta - h), x)) / (2.0 * h);
}

StructureReport check_structure(const PinchedSystem& sys, int grid_n) {
  if (grid_n < 2) throw Error(ErrorCode::ConfigError, "check_structure needs grid_n >= 2");
  StructureReport rep;
  rep.grid_n = grid_n;
  for (int k = 0; k < grid_n; ++k) {
    const double theta = static_cast<double>(k) / grid_n;
    rep.max_zero_line_violation =
        std::max(rep.max_zero_line_violation, std::fabs(sys.fibre(theta, 0.0)));
    double prev = 0.0;
    for (int j = 0; j <= grid_n; ++j) {
      const double x = sys.L * static_cast<double>(j) / grid_n;
      const double v = sys.fibre(theta, x);
      rep.max_range_excess =
          std::max({rep.max_range_excess, -v, v - sys.L});
      if (j > 0) {
        rep.max_monotonicity_violation =
            std::max(rep.max_monotonicity_violation, prev - v);
      }
      prev = v;
    }
  }
  for (int j = 0; j <= grid_n; ++j) {
    const double x = sys.L * static_cast<double>(j) / grid_n;
    rep.max_pinch_violation =
        std::max(rep.max_pinch_violation, std::fabs(sys.fibre(sys.pinch_point, x)));
  }
  return rep;
}

DominationReport dominates(const PinchedSystem& upper, const PinchedSystem& lower,
                           int grid_theta, int grid_x) {
  if (grid_theta < 2 || grid_x < 2) {
    throw Error(ErrorCode::ConfigError, "dominates needs grids >= 2");
  }
  if (std::fabs(upper.omega - lower.omega) > 1e-15) {
    throw Error(ErrorCode::ConfigError, "dominates: rotation numbers differ");
  }
  const double Lx = std::min(upper.L, lower.L);
  DominationReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid_theta; ++k) {
    const double theta = static_cast<double>(k) / grid_theta;
    for (int j = 0; j <= grid_x; ++j) {
      const double x = Lx * static_cast<double>(j) / grid_x;
      const double margin = upper.fibre(theta, x) - lower.fibre(theta, x);
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_theta = theta;
        rep.worst_x = x;
      }
    }
  }
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

double conjugation_defect(double alpha_l, double alpha_r, double omega, int grid_n) {
  const PinchedSystem big = make_system(tanh_family(alpha_l * alpha_r), omega);
  const PinchedSystem small = make_system(scaled_tanh_family(alpha_l, alpha_r), omega);
  double defect = 0.0;
  for (int k = 0; k < grid_n; ++k) {
    const double theta = static_cast<double>(k) / grid_n;
    for (int j = 0; j <= grid_n; ++j) {
      const double y = small.L * static_cast<double>(j) / grid_n;
      const double lifted = alpha_r * small.fibre(theta, y);
      const double direct = big.fibre(theta, alpha_r * y);
      defect = std::max(defect, std::fabs(lifted - direct));
    }
  }
  return defect;
}

} // namespace sna
