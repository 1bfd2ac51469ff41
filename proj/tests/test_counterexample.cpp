#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "sna/analysis.hpp"
#include "sna/circle.hpp"
#include "sna/counterexample.hpp"
#include "sna/systems.hpp"

using namespace sna;

namespace {

GFunction default_g() { return build_g(CounterexampleSpec{}); }

// Independently derived collar integral: the ramp is linear in g between the
// levels e^{ll} and e^{lj}, so per unit collar width
//   int_0^1 -log((1-t) e^{ll} + t e^{lj}) dt = -lh - (u - 1 - u log u)/(1 - u)
// with lh = max(ll, lj) and u = e^{min-max} in [0, 1].
double collar_unit_integral(double ll, double lj) {
  const double lh = std::max(ll, lj);
  const double u = std::exp(std::min(ll, lj) - lh);
  double ex;
  if (1.0 - u < 1e-9) {
    ex = -(1.0 - u) / 2.0;
  } else {
    ex = (u - 1.0 - (u > 0.0 ? u * std::log(u) : 0.0)) / (1.0 - u);
  }
  return -lh - ex;
}

} // namespace

TEST_CASE("starting index for the squares rule") {
  const ContinuedFraction cf = cf_from_rule(coeff_rule("squares"), 29);
  CHECK(choose_n1(cf) == 2);
  // the all-ones rule has a divergent ratio series: no index qualifies
  const ContinuedFraction ones = cf_from_rule(coeff_rule("ones"), 29);
  CHECK_THROWS_AS(choose_n1(ones), Error);
  try {
    choose_n1(ones);
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::DepthInsufficient);
  }
}

TEST_CASE("interval ladder geometry from the return displacements") {
  const ContinuedFraction cf = cf_from_rule(coeff_rule("squares"), 29);
  const IntervalLadder lad = build_intervals(cf, 2, 25);
  CHECK(lad.n1 == 2);
  CHECK(lad.depth_K == 25);
  REQUIRE(lad.rungs.size() == 24); // n = 2 .. 25

  // union interval [-sigma_{n1}, -sigma_{n1+1}]
  CHECK(lad.union_lo == -cf.sigma(2));
  CHECK(lad.union_hi == -cf.sigma(3));
  CHECK(lad.union_lo == -0.02159280558579013);
  CHECK(lad.union_hi == 0.001346188610732213);

  // first rung (negative side): outer spans -sigma_2 .. -sigma_4
  const LadderRung& r2 = lad.rungs[0];
  CHECK(r2.n == 2);
  CHECK(r2.outer_lo == -cf.sigma(2));
  CHECK(r2.outer_hi == -cf.sigma(4));
  CHECK(r2.inner_hi == r2.outer_hi); // shares the endpoint nearer 0
  CHECK(r2.inner_lo == doctest::Approx(-cf.sigma(2) + cf.sigma(4)).epsilon(1e-15));

  // second rung (positive side)
  const LadderRung& r3 = lad.rungs[1];
  CHECK(r3.n == 3);
  CHECK(r3.outer_hi == -cf.sigma(3));
  CHECK(r3.outer_lo == -cf.sigma(5));
  CHECK(r3.inner_lo == r3.outer_lo);

  // consecutive same-side rungs share an endpoint exactly
  for (std::size_t i = 0; i + 2 < lad.rungs.size(); ++i) {
    const LadderRung& a = lad.rungs[i];
    const LadderRung& b = lad.rungs[i + 2];
    if (a.outer_lo < 0.0) {
      CHECK(a.outer_hi == b.outer_lo);
    } else {
      CHECK(a.outer_lo == b.outer_hi);
    }
  }

  // well-formed nesting and a residual core strictly inside the union
  for (const LadderRung& r : lad.rungs) {
    CHECK(r.outer_lo < r.outer_hi);
    CHECK(r.outer_lo <= r.inner_lo);
    CHECK(r.inner_lo < r.inner_hi);
    CHECK(r.inner_hi <= r.outer_hi);
  }
  CHECK(lad.residual_lo < 0.0);
  CHECK(lad.residual_hi > 0.0);
  CHECK(lad.residual_lo > lad.union_lo);
  CHECK(lad.residual_hi < lad.union_hi);

  // too-shallow expansion is refused
  CHECK_THROWS_AS(build_intervals(cf, 2, 28), Error);
}

TEST_CASE("step function levels, plateaus, and edges") {
  const GFunction g = default_g();
  CHECK(g.base_a == 3.0);
  CHECK(g.omega == 0.8043185611171579);
  CHECK(g.n1 == 2);
  CHECK(g.depth_K == 25);
  REQUIRE(g.rung_q.size() == 24);
  CHECK(g.rung_q[0] == 5.0);   // q_2
  CHECK(g.rung_q[1] == 46.0);  // q_3
  CHECK(g.level_log[0] == -5.0 * std::log(3.0));
  CHECK(g.join_log[0] == 0.0); // first two rungs ramp up to the outside value 1
  CHECK(g.join_log[1] == 0.0);
  CHECK(g.join_log[2] == g.level_log[0]);
  CHECK(g.residual_log == -g.rung_q[23] * std::log(3.0)); // truncation level -q_K log a

  CHECK(g.eval(0.0) == 0.0); // pinched
  CHECK(std::isinf(g.log_eval(0.0)));
  CHECK(g.eval(0.5) == 1.0); // off the ladder
  CHECK(g.log_eval(0.5) == 0.0);

  // plateau of the first rung: level a^{-q_2} = 3^{-5}
  const double mid = 0.5 * (g.ladder.rungs[0].inner_lo + g.ladder.rungs[0].inner_hi);
  const double theta_mid = wrap01(mid);
  CHECK(g.log_eval(theta_mid) == -5.0 * std::log(3.0));
  CHECK(g.eval(theta_mid) == doctest::Approx(0.00411522633744856).epsilon(1e-15));

  // far edge of the ladder returns the outside value exactly
  CHECK(g.eval(wrap01(g.ladder.union_lo)) == 1.0);

  // deep plateaus underflow eval but keep an exact finite log; only the
  // positive side stays addressable (angles 1 - 1e-45 collapse to 1.0, so
  // the mirrored negative-side rung folds onto the pinch)
  const LadderRung& deep = g.ladder.rungs[21];
  REQUIRE(deep.inner_lo > 0.0);
  const double deep_mid = wrap01(0.5 * (deep.inner_lo + deep.inner_hi));
  CHECK(g.eval(deep_mid) == 0.0);
  CHECK(std::isfinite(g.log_eval(deep_mid)));
  CHECK(g.log_eval(deep_mid) < -1e20);
}

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(build_g({"squares", 2.0, 25}), Error);   // base_a must exceed 2
  CHECK_THROWS_AS(build_g({"squares", 3.0, 3}), Error);    // depth floor
  CHECK_THROWS_AS(build_g({"ones", 3.0, 25}), Error);      // no starting index
  try {
    build_g({"ones", 3.0, 25});
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::DepthInsufficient);
  }
}

TEST_CASE("absolute log integral: closed form vs piece quadrature") {
  const GFunction g = default_g();

  // route 1: frozen value of the closed form
  const double total = g.abs_log_integral();
  CHECK(total == 0.38731791713650005);

  // route 2: rebuild the total from the ladder pieces with the collar formula
  // derived above
  double rebuilt = 0.0;
  for (std::size_t i = 0; i < g.ladder.rungs.size(); ++i) {
    const LadderRung& r = g.ladder.rungs[i];
    rebuilt += (r.inner_hi - r.inner_lo) * (-g.level_log[i]);
    const double cw = (r.outer_hi - r.outer_lo) - (r.inner_hi - r.inner_lo);
    rebuilt += cw * collar_unit_integral(g.level_log[i], g.join_log[i]);
  }
  rebuilt += (g.ladder.residual_hi - g.ladder.residual_lo) * (-g.residual_log);
  CHECK(rebuilt == doctest::Approx(total).epsilon(1e-12));

  // route 3: midpoint quadrature of -log g over the shallow collars grounds
  // the analytic collar formula in actual function values
  for (std::size_t i = 0; i < 6; ++i) { // rungs n = 2..7: widths resolvable in theta
    const LadderRung& r = g.ladder.rungs[i];
    const bool neg = r.outer_lo < 0.0;
    const double c_lo = neg ? r.outer_lo : r.inner_hi;
    const double c_hi = neg ? r.inner_lo : r.outer_hi;
    const double w = c_hi - c_lo;
    REQUIRE(w > 0.0);
    const int M = i < 2 ? 200000 : 20000;
    double acc = 0.0;
    for (int k = 0; k < M; ++k) {
      const double s = c_lo + w * (k + 0.5) / M;
      acc += -g.log_eval(wrap01(s));
    }
    const double quad = acc / M;
    const double analytic = collar_unit_integral(g.level_log[i], g.join_log[i]);
    INFO("rung ", r.n, " quad ", quad, " analytic ", analytic);
    CHECK(quad == doctest::Approx(analytic).epsilon(2e-3));
  }
}

TEST_CASE("family wrapper and the vertical exponent") {
  const GFunction g = default_g();
  const FgFamilySpec fam = counterexample_family(g);
  CHECK(fam.alpha == 1.0);
  CHECK(fam.f_deriv0 == 3.0);
  CHECK(fam.f(0.1) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(fam.f(0.9) == 1.0);
  CHECK(fam.L == 1.0);
  REQUIRE(fam.mean_log_g.has_value());
  CHECK(*fam.mean_log_g == -g.abs_log_integral());

  const SnaCriterionResult sc = sna_criterion(fam, 4096);
  CHECK(sc.lambda0 == doctest::Approx(0.7112943715316098).epsilon(1e-12)); // log 3 - integral
  CHECK(sc.exists_sna);
  CHECK(sc.stability == 0.0); // exact average supplied, no quadrature

  const PinchedSystem sys = make_counterexample_system(g);
  CHECK(sys.omega == g.omega);
  CHECK(sys.L == 1.0);
  CHECK(sys.fibre(0.0, 0.7) == 0.0);
  CHECK(sys.fibre(0.5, 0.5) == 1.0); // g = 1, f saturates
}

TEST_CASE("claim 1: the boundary lines stay at height one over the pinch point") {
  const GFunction g = default_g();
  const Claim1Report rep = verify_claim1(g, 200);
  CHECK(rep.n_max == 200);
  CHECK(rep.all_exact_one);
  CHECK(rep.max_deviation == 0.0);
  CHECK(rep.first_bad_n == -1);
  CHECK(rep.diagnostic_pass);
  CHECK(rep.worst_diagnostic_slack == doctest::Approx(0.5).epsilon(1e-12));

  // convenience wrapper builds the same g
  const Claim1Report rep2 = verify_claim1(CounterexampleSpec{}, 60);
  CHECK(rep2.all_exact_one);
}

TEST_CASE("claim 2: the graph drops below 1/a off the pinch point") {
  const GFunction g = default_g();
  const Claim2Report rep = verify_claim2(g, 500, 400);
  CHECK(rep.n_iter == 500);
  CHECK(rep.grid_n == 400);
  CHECK(rep.bound == doctest::Approx(1.0 / 3.0 + 1e-10).epsilon(1e-15));
  CHECK(rep.phi_at_zero == 1.0);
  CHECK(rep.max_main <= rep.bound);
  CHECK(rep.pass);
  CHECK(rep.certified_outer_radius == 0.02159280558579013);
  CHECK(rep.certified_inner_radius == doctest::Approx(5.874872776920486e-12).epsilon(1e-12));
  REQUIRE(!rep.shells.empty());
  for (const Claim2Shell& s : rep.shells) {
    CHECK(s.max_value <= rep.bound);
    CHECK(s.lo < s.hi);
    CHECK(s.samples > 0);
    CHECK(s.q >= 5);
  }
}

TEST_CASE("smooth cap: linear knee, strict growth, frozen saturation value") {
  const auto cap = smooth_cap(3.0);
  CHECK(cap(0.1) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(cap(1.0 / 3.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cap(2.0) == doctest::Approx(1.9932620530009146).epsilon(1e-15));
  double prev = cap(0.0);
  for (int k = 1; k <= 100; ++k) {
    const double v = cap(2.0 * k / 100.0);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("smooth variant keeps the isolated-point picture") {
  const GFunction g = default_g();
  const auto [sys, rep] = smooth_variant(g, smooth_cap(3.0), 200, 200);
  CHECK(sys.L == 2.0);
  CHECK(rep.match_defect <= 1e-12);
  CHECK(rep.cap_value == doctest::Approx(1.9932620530009146).epsilon(1e-15));
  CHECK(rep.phi0_ok);
  CHECK(rep.phi0_min >= 1.0);
  CHECK(rep.bound == doctest::Approx(2.0 / 3.0 + 1e-10).epsilon(1e-15));
  CHECK(rep.bound_ok);
  CHECK(rep.max_on_certified <= rep.bound);
  CHECK(rep.pass);
}

TEST_CASE("smooth variant preconditions name the violated clause") {
  const GFunction g = default_g();
  auto check_clause = [&](const std::function<double(double)>& f, const char* phrase) {
    try {
      smooth_variant(g, f, 10, 50);
      FAIL("expected VariantPrecondition");
    } catch (const Error& e) {
      CHECK(e.code == ErrorCode::VariantPrecondition);
      CHECK(std::string(e.what()).find(phrase) != std::string::npos);
    }
  };
  check_clause([](double x) { return x; }, "match");
  check_clause([](double x) { return std::min(1.0, 3.0 * x); }, "strictly increasing");
  check_clause([](double x) { return 3.0 * x; }, "<= 2");
}
