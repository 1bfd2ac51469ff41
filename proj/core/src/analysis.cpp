#include "sna/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sna {

namespace {

constexpr double kLogFloor = -709.0; // log of the smallest normal double, roughly

double safe_deriv_x(const PinchedSystem& sys, double theta, double x) {
  try {
    return fibre_deriv_x(sys, theta, x);
  } catch (const Error& e) {
    if (e.code != ErrorCode::NotDifferentiable) throw;
    return std::max(fibre_deriv_x(sys, theta, x, Side::Left),
                    fibre_deriv_x(sys, theta, x, Side::Right));
  }
}

double safe_deriv_theta_abs(const PinchedSystem& sys, double theta, double x) {
  try {
    return std::fabs(fibre_deriv_theta(sys, theta, x));
  } catch (const Error& e) {
    if (e.code != ErrorCode::NotDifferentiable) throw;
    return std::max(std::fabs(fibre_deriv_theta(sys, theta, x, Side::Left)),
                    std::fabs(fibre_deriv_theta(sys, theta, x, Side::Right)));
  }
}

struct SupResult {
  double value = 0.0;
  double theta = 0.0;
  double x = 0.0;
};

// Sup of fn over [0,1) x [x_lo, x_hi]: coarse product grid, then one
// refinement pass on a finer sub-grid around the maximiser.
template <typename Fn>
SupResult grid_sup(Fn&& fn, int grid_n, double x_lo, double x_hi) {
  SupResult best;
  best.value = -std::numeric_limits<double>::infinity();
  const double dx = (x_hi - x_lo) / grid_n;
  for (int k = 0; k < grid_n; ++k) {
    const double theta = static_cast<double>(k) / grid_n;
    for (int j = 0; j <= grid_n; ++j) {
      const double x = x_lo + dx * j;
      const double v = fn(theta, x);
      if (v > best.value) best = SupResult{v, theta, x};
    }
  }
  const double th_step = 1.0 / grid_n;
  constexpr int kFine = 64;
  SupResult refined = best;
  for (int k = -kFine; k <= kFine; ++k) {
    const double theta = wrap01(best.theta + th_step * k / kFine);
    for (int j = -kFine; j <= kFine; ++j) {
      const double x = std::clamp(best.x + dx * j / kFine, x_lo, x_hi);
      const double v = fn(theta, x);
      if (v > refined.value) refined = SupResult{v, theta, x};
    }
  }
  return refined;
}

struct SupScan {
  SupResult expansion;    // sup DT over the full rectangle
  SupResult beta;         // sup |dT/dtheta|
  SupResult contracting;  // sup DT over x >= 1
};

SupScan sup_scan(const PinchedSystem& sys, int grid_n) {
  SupScan s;
  s.expansion = grid_sup(
      [&](double t, double x) { return safe_deriv_x(sys, t, x); }, grid_n, 0.0, sys.L);
  s.beta = grid_sup(
      [&](double t, double x) { return safe_deriv_theta_abs(sys, t, x); }, grid_n,
      0.0, sys.L);
  if (sys.L >= 1.0) {
    s.contracting = grid_sup(
        [&](double t, double x) { return safe_deriv_x(sys, t, x); }, grid_n, 1.0,
        sys.L);
  } else {
    s.contracting = SupResult{0.0, 0.0, 1.0}; // empty region: vacuous contraction
  }
  return s;
}

struct MidpointSum {
  double mean = 0.0;       // singular points contribute zero
  long singular = 0;
  double min_seen = 0.0;   // most negative finite integrand value
};

template <typename Fn>
MidpointSum midpoint_mean(long q_n, Fn&& fn) {
  MidpointSum out;
  double sum = 0.0;
  double min_seen = 0.0;
  for (long q = 0; q < q_n; ++q) {
    const double theta = (q + 0.5) / static_cast<double>(q_n);
    const double v = fn(theta);
    if (!std::isfinite(v)) {
      ++out.singular;
      continue;
    }
    sum += v;
    min_seen = std::min(min_seen, v);
  }
  out.mean = sum / static_cast<double>(q_n);
  out.min_seen = min_seen;
  return out;
}

} // namespace

LyapunovResult lyapunov_on_graph(const PinchedSystem& sys, const GraphSample& phi,
                                 long quad_n) {
  if (quad_n < 10) throw Error(ErrorCode::ConfigError, "lyapunov_on_graph: quad_n >= 10");
  if (phi.grid_n < 2) throw Error(ErrorCode::ConfigError, "lyapunov_on_graph: empty graph");

  // Invariance gate.
  double defect = 0.0;
  if (phi.iter_n >= 0) {
    const double excl =
        std::max(1e-4, default_peak_half_width(sys.omega, phi.iter_n));
    defect = invariance_defect(sys, phi.iter_n, 200, excl);
  } else {
    const int probes = std::min(phi.grid_n, 4096);
    for (int s = 0; s < probes; ++s) {
      const int k = static_cast<int>(
          (static_cast<long>(s) * phi.grid_n) / probes);
      const double theta = static_cast<double>(k) / phi.grid_n;
      const double image =
          std::clamp(sys.fibre(theta, phi.at(k)), 0.0, sys.L);
      defect = std::max(defect,
                        std::fabs(image - phi.nearest(theta + sys.omega)));
    }
  }
  if (defect > 1e-6) {
    throw Error(ErrorCode::NonInvariantGraph,
                "graph moves by " + std::to_string(defect) +
                    " under one step (tolerance 1e-6)");
  }

  auto integrand = [&](double theta) -> double {
    const double x = phi.nearest(theta);
    if (sys.log_dfdx) return sys.log_dfdx(theta, x);
    return std::log(safe_deriv_x(sys, theta, x));
  };

  const MidpointSum i1 = midpoint_mean(quad_n, integrand);
  const MidpointSum i2 = midpoint_mean(2 * quad_n, integrand);

  LyapunovResult res;
  res.quadrature_n = quad_n;
  res.value = 2.0 * i2.mean - i1.mean;
  res.stability = std::fabs(i2.mean - i1.mean);
  res.singular_correction = (i1.singular + i2.singular) > 0;
  if (res.singular_correction) {
    const double frac =
        static_cast<double>(i1.singular + i2.singular) / (3.0 * quad_n);
    const double corr =
        frac * std::max({std::fabs(i1.min_seen), std::fabs(i2.min_seen), -kLogFloor});
    if (corr > std::fabs(res.value)) {
      throw Error(ErrorCode::DivergentIntegral,
                  "excluded singular mass could outweigh the finite part");
    }
  }
  return res;
}

SnaCriterionResult sna_criterion(const FgFamilySpec& fg, long quad_n) {
  if (quad_n < 20) throw Error(ErrorCode::ConfigError, "sna_criterion: quad_n >= 20");
  if (!(fg.f_deriv0 > 0.0)) {
    throw Error(ErrorCode::ConfigError, "sna_criterion: f'(0) must be positive");
  }
  if (fg.mean_log_g) {
    if (!std::isfinite(*fg.mean_log_g)) {
      throw Error(ErrorCode::LogGNotIntegrable, "supplied forcing average is not finite");
    }
    SnaCriterionResult res;
    res.lambda0 = std::log(fg.f_deriv0) + std::log(fg.alpha) + *fg.mean_log_g;
    res.stability = 0.0;
    res.exists_sna = res.lambda0 > 1e-9;
    return res;
  }
  auto log_g = [&](double theta) -> double {
    if (fg.log_g) return fg.log_g(theta);
    return std::log(fg.g(theta));
  };
  const MidpointSum i0 = midpoint_mean(quad_n / 2, log_g);
  const MidpointSum i1 = midpoint_mean(quad_n, log_g);
  const MidpointSum i2 = midpoint_mean(2 * quad_n, log_g);
  const double d10 = std::fabs(i1.mean - i0.mean);
  const double d21 = std::fabs(i2.mean - i1.mean);
  const bool has_singular = (i0.singular + i1.singular + i2.singular) > 0;
  if (!std::isfinite(i2.mean) || has_singular ||
      (d21 > 1e-4 && d21 >= 0.9 * d10)) {
    throw Error(ErrorCode::LogGNotIntegrable,
                "forcing average does not settle under quadrature refinement");
  }
  SnaCriterionResult res;
  const double g_avg = 2.0 * i2.mean - i1.mean;
  res.lambda0 = std::log(fg.f_deriv0) + std::log(fg.alpha) + g_avg;
  res.stability = d21;
  res.exists_sna = res.lambda0 > 1e-9;
  return res;
}

GlobalConstants estimate_global_constants(const PinchedSystem& sys, int grid_n) {
  if (grid_n < 16) {
    throw Error(ErrorCode::ConfigError, "estimate_global_constants: grid_n >= 16");
  }
  const SupScan s = sup_scan(sys, grid_n);
  GlobalConstants gc;
  gc.alpha = s.expansion.value;
  gc.beta = s.beta.value;
  gc.sup_contracting = s.contracting.value;
  if (gc.sup_contracting >= 1.0 || gc.alpha <= 1.0) {
    throw Error(ErrorCode::NoContraction,
                "derivative does not contract on x >= 1 (sup = " +
                    std::to_string(gc.sup_contracting) + ")");
  }
  if (gc.sup_contracting <= 0.0) {
    gc.gamma_capped = true;
    gc.gamma = kGammaCap;
  } else {
    gc.gamma = std::min(kGammaCap,
                        -std::log(gc.sup_contracting) / std::log(gc.alpha));
    gc.gamma_capped = (gc.gamma == kGammaCap);
  }
  return gc;
}

bool ConditionReport::overall_pass() const {
  if (!(lambda_decay > 0.0)) return false;
  for (const auto& [id, check] : per_condition) {
    if (!check.pass) return false;
  }
  return !per_condition.empty();
}

ConditionReport check_conditions(const PinchedSystem& sys,
                                 const DiophantineEstimate& est,
                                 const ConditionOverrides& ov,
                                 const ConditionOptions& opt) {
  ConditionReport rep;
  rep.c = est.c;
  rep.d = est.d;

  const SupScan scan = sup_scan(sys, opt.const_grid);
  rep.alpha = ov.alpha.value_or(scan.expansion.value);
  rep.beta = ov.beta.value_or(scan.beta.value);
  const double sup_c = scan.contracting.value;
  if (ov.gamma) {
    rep.gamma = *ov.gamma;
  } else if (sup_c <= 0.0) {
    rep.gamma = kGammaCap;
  } else if (rep.alpha > 1.0 && sup_c < 1.0) {
    rep.gamma = std::min(kGammaCap, -std::log(sup_c) / std::log(rep.alpha));
  } else {
    rep.gamma = 0.0;
  }

  {
    ConditionCheck chk;
    chk.pass = rep.alpha > 2.0 && sup_c < 1.0 && rep.gamma > 0.0;
    chk.margin = std::min(rep.alpha - 2.0, 1.0 - sup_c);
    chk.witness_theta = scan.contracting.theta;
    chk.witness_x = scan.contracting.x;
    rep.per_condition["exp_contr"] = chk;
  }

  {
    // Re-scan the theta-derivative on an offset grid twice as dense: the
    // recorded beta must not be beaten.
    const int n2 = 2 * opt.const_grid + 1;
    double observed = 0.0;
    SupResult worst;
    for (int k = 0; k < n2; ++k) {
      const double theta = (k + 0.37) / n2;
      for (int j = 0; j <= 64; ++j) {
        const double x = sys.L * j / 64.0;
        const double v = safe_deriv_theta_abs(sys, theta, x);
        if (v > observed) {
          observed = v;
          worst = SupResult{v, theta, x};
        }
      }
    }
    ConditionCheck chk;
    chk.margin = rep.beta - observed;
    chk.pass = chk.margin >= -1e-9 * std::max(1.0, rep.beta);
    chk.witness_theta = worst.theta;
    chk.witness_x = worst.x;
    rep.per_condition["beta_bound"] = chk;
  }

  const double m_floor = 4.0 + 4.0 / std::max(rep.gamma, 1e-12);
  rep.m = ov.m.value_or(static_cast<int>(std::floor(m_floor)) + 1);
  {
    ConditionCheck chk;
    chk.margin = rep.m - m_floor;
    chk.pass = rep.gamma > 0.0 && chk.margin > 0.0;
    rep.per_condition["m_choice"] = chk;
  }

  double min_early = 0.5;
  for (int n = 1; n <= rep.m - 1; ++n) {
    min_early = std::min(min_early, circle_dist(orbit_point(sys.omega, n), 0.0));
  }
  rep.b = ov.b.value_or(std::min(est.c, min_early));
  {
    ConditionCheck chk;
    chk.margin = std::min(est.c, min_early) - rep.b;
    chk.pass = rep.b > 0.0 && chk.margin >= 0.0;
    rep.per_condition["b_bound"] = chk;
  }

  const double a_floor = std::pow(rep.m + 1.0, rep.d);
  rep.a = ov.a.value_or(std::ceil(a_floor));
  {
    ConditionCheck chk;
    chk.margin = rep.a - a_floor;
    chk.pass = chk.margin >= 0.0;
    rep.per_condition["a_bound"] = chk;
  }

  {
    ConditionCheck chk;
    if (rep.a > 2.0 && rep.b > 0.0) {
      const PinchedSystem ref =
          make_reference_system(ReferenceSpec{rep.a, rep.b}, sys.omega);
      const DominationReport dom =
          dominates(sys, ref, opt.dom_grid_theta, opt.dom_grid_x);
      chk.pass = dom.pass;
      chk.margin = dom.worst_margin;
      chk.witness_theta = dom.worst_theta;
      chk.witness_x = dom.worst_x;
    } else {
      chk.pass = false;
      chk.margin = -std::numeric_limits<double>::infinity();
    }
    rep.per_condition["reference_domination"] = chk;
  }

  {
    // Exhaustive re-verification of the orbit-distance lower bound.
    const long horizon = std::min(est.horizon, opt.dio_recheck);
    double worst = std::numeric_limits<double>::infinity();
    long worst_n = 1;
    for (long n = 1; n <= horizon; ++n) {
      const double v = circle_dist(orbit_point(sys.omega, n), 0.0) *
                       std::pow(static_cast<double>(n), rep.d);
      if (v < worst) {
        worst = v;
        worst_n = n;
      }
    }
    ConditionCheck chk;
    chk.margin = worst - est.c;
    chk.pass = chk.margin >= -1e-12;
    chk.witness_theta = orbit_point(sys.omega, worst_n);
    rep.per_condition["diophantine"] = chk;
  }

  rep.lambda_decay = rep.gamma * (1.0 - 4.0 / rep.m) - 4.0 / rep.m;
  return rep;
}

Alpha0Result find_alpha0(const SplitFamilyFactory& factory, double omega,
                         const DiophantineEstimate& est, double alpha_lo,
                         double alpha_hi, int steps, const ConditionOptions& opt) {
  if (steps < 1 || !(alpha_lo > 0.0) || alpha_hi < alpha_lo) {
    throw Error(ErrorCode::ConfigError, "find_alpha0: bad alpha range");
  }

  // Structural gate: a family that breaks the 0-line / pinching identities
  // cannot satisfy anything downstream.
  {
    const PinchedSystem sample = make_system(factory(2.0, alpha_lo / 2.0), omega);
    const StructureReport sr = check_structure(sample, 128);
    if (!sr.pass(1e-9)) {
      Alpha0Result res;
      res.diagnostic =
          "structural identities fail (0-line " +
          std::to_string(sr.max_zero_line_violation) + ", pinch " +
          std::to_string(sr.max_pinch_violation) + ", monotonicity " +
          std::to_string(sr.max_monotonicity_violation) + ")";
      return res;
    }
  }

  static const double kSplitLadder[] = {2, 3, 4, 5, 6, 8, 9, 10, 12, 16};
  Alpha0Result best;
  double best_margin = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < steps; ++i) {
    const double alpha =
        steps == 1 ? alpha_lo
                   : alpha_lo + (alpha_hi - alpha_lo) * i / (steps - 1);
    for (double al : kSplitLadder) {
      const double ar = alpha / al;
      if (ar <= 1.0) continue;
      const PinchedSystem sys = make_system(factory(al, ar), omega);
      ConditionReport rep = check_conditions(sys, est, {}, opt);
      double min_margin = std::numeric_limits<double>::infinity();
      for (const auto& [id, chk] : rep.per_condition) {
        min_margin = std::min(min_margin, chk.margin);
      }
      if (rep.overall_pass()) {
        Alpha0Result res;
        res.found = true;
        res.alpha0 = alpha;
        res.alpha_l = al;
        res.alpha_r = ar;
        res.report = std::move(rep);
        return res;
      }
      if (min_margin > best_margin) {
        best_margin = min_margin;
        best.alpha0 = alpha;
        best.alpha_l = al;
        best.alpha_r = ar;
        best.report = std::move(rep);
      }
    }
  }
  best.found = false;
  best.diagnostic = "no split on the ladder passes in the given range";
  return best;
}

} // namespace sna
