#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sna/analysis.hpp"
#include "sna/boundary.hpp"
#include "sna/circle.hpp"
#include "sna/systems.hpp"

using namespace sna;

TEST_CASE("vertical exponent of the 0-line from family data") {
  // log f'(0) + log alpha + mean log |sin|: the midpoint product identity
  // makes the forcing average exact after one Richardson step, so these
  // values are tight to rounding.
  const SnaCriterionResult at2 = sna_criterion(tanh_family(2.0), 4096);
  CHECK(std::fabs(at2.lambda0) <= 1e-12);
  CHECK_FALSE(at2.exists_sna);

  const SnaCriterionResult at5 = sna_criterion(tanh_family(5.0), 4096);
  CHECK(at5.lambda0 == doctest::Approx(0.9162907318741551).epsilon(1e-13)); // log(5/2)
  CHECK(at5.exists_sna);
  // stability records the uncorrected quadrature movement, which scales
  // like 1/Q; measured 8.5e-5 at Q = 4096
  CHECK(at5.stability <= 2e-4);

  const SnaCriterionResult at32 = sna_criterion(tanh_family(32.0), 4096);
  CHECK(at32.lambda0 == doctest::Approx(std::log(16.0)).epsilon(1e-13));
  CHECK(at32.exists_sna);
}

TEST_CASE("criterion rejects non-integrable forcing") {
  FgFamilySpec fg = tanh_family(5.0);
  fg.g = [](double theta) { return std::max(0.0, std::sin(2.0 * M_PI * theta)); };
  fg.log_g = nullptr;
  CHECK_THROWS_AS(sna_criterion(fg, 512), Error);
  try {
    sna_criterion(fg, 512);
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::LogGNotIntegrable);
  }
  CHECK_THROWS_AS(sna_criterion(tanh_family(5.0), 8), Error); // quad floor
}

TEST_CASE("derivative-sweep exponent on the 0-line agrees with the family route") {
  // Dual route: lyapunov_on_graph walks fibre derivatives along an invariant
  // graph; on the exactly invariant 0-line it must reproduce log(alpha/2).
  const PinchedSystem sys = make_system(tanh_family(5.0), golden_mean());
  GraphSample zero;
  zero.grid_n = 2048;
  zero.values.assign(2048, 0.0);
  const LyapunovResult lr = lyapunov_on_graph(sys, zero, 4096);
  CHECK(lr.value == doctest::Approx(0.9162907318741551).epsilon(1e-8));
  CHECK(lr.quadrature_n == 4096);
}

TEST_CASE("exponent on the upper bounding graph is non-positive") {
  const PinchedSystem sys = make_system(tanh_family(5.0), golden_mean());
  const AttractorResult res = upper_bounding_graph(sys, 20000, 2000, 1e-6);
  REQUIRE(res.converged);
  const LyapunovResult lr = lyapunov_on_graph(sys, res.phi, 20000);
  CHECK(lr.value <= 0.05);
  CHECK(lr.value > -10.0);
}

TEST_CASE("non-invariant graphs are rejected") {
  const PinchedSystem sys = make_system(tanh_family(5.0), golden_mean());
  GraphSample fake;
  fake.grid_n = 512;
  fake.values.assign(512, 2.0); // constant is nowhere near invariant here
  CHECK_THROWS_AS(lyapunov_on_graph(sys, fake, 1024), Error);
  try {
    lyapunov_on_graph(sys, fake, 1024);
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::NonInvariantGraph);
  }
}

TEST_CASE("global constants of the rescaled split family") {
  const PinchedSystem sys = make_system(scaled_tanh_family(4.0, 8.0), golden_mean());
  const GlobalConstants gc = estimate_global_constants(sys, 1024);
  CHECK(gc.alpha == 32.0); // exact: theta = 1/2 and x = 0 are grid points
  CHECK(gc.beta == doctest::Approx(4.0 * M_PI).epsilon(1e-6));
  CHECK(gc.sup_contracting == doctest::Approx(1.4404499122039333e-05).epsilon(1e-9));
  CHECK(gc.gamma == doctest::Approx(3.2166241957862547).epsilon(1e-9));
  CHECK_FALSE(gc.gamma_capped);

  const GlobalConstants big =
      estimate_global_constants(make_system(scaled_tanh_family(8.0, 16.0), golden_mean()), 1024);
  CHECK(big.alpha == 128.0);
  CHECK(big.gamma == doctest::Approx(5.309463044063838).epsilon(1e-9));
}

TEST_CASE("raw tanh coordinates never contract near the origin") {
  const PinchedSystem sys = make_system(tanh_family(5.0), golden_mean());
  CHECK_THROWS_AS(estimate_global_constants(sys, 256), Error);
  try {
    estimate_global_constants(sys, 256);
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::NoContraction);
  }
}

TEST_CASE("condition checklist: split 4 x 8 fails, published constants explain how") {
  const DiophantineEstimate est = diophantine_fit(golden_mean(), 100000);
  CHECK(est.c == 0.3819660112501051);
  CHECK(est.d == 1.0);

  const PinchedSystem sys = make_system(scaled_tanh_family(4.0, 8.0), golden_mean());
  const ConditionReport computed = check_conditions(sys, est);
  CHECK(computed.m == 6);
  CHECK(computed.a == 7.0); // ceil((m+1)^d)
  CHECK(computed.b == 0.09016994374947451); // min early-return distance below c
  CHECK(computed.per_condition.at("exp_contr").pass);
  CHECK(computed.per_condition.at("m_choice").pass);
  CHECK(computed.per_condition.at("b_bound").pass);
  CHECK_FALSE(computed.per_condition.at("reference_domination").pass);
  CHECK_FALSE(computed.overall_pass());

  // replaying the fixed constants a = 8, b = omega^3: domination holds but
  // b violates the early-return bound
  ConditionOverrides ov;
  ov.a = 8.0;
  ov.b = 0.23606797749978975;
  const ConditionReport replay = check_conditions(sys, est, ov);
  CHECK(replay.per_condition.at("reference_domination").pass);
  CHECK_FALSE(replay.per_condition.at("b_bound").pass);
  CHECK_FALSE(replay.overall_pass());
}

TEST_CASE("condition checklist: split 8 x 16 passes everything") {
  const DiophantineEstimate est = diophantine_fit(golden_mean(), 100000);
  const PinchedSystem sys = make_system(scaled_tanh_family(8.0, 16.0), golden_mean());
  const ConditionReport rep = check_conditions(sys, est);
  CHECK(rep.alpha == 128.0);
  CHECK(rep.beta == doctest::Approx(8.0 * M_PI).epsilon(1e-5));
  CHECK(rep.gamma == doctest::Approx(5.309463044063838).epsilon(1e-9));
  CHECK(rep.m == 5);
  CHECK(rep.a == 6.0);
  CHECK(rep.b == 0.1458980337503153); // d(tau_3, 0) beats c here
  CHECK(rep.lambda_decay == doctest::Approx(0.2618926088127673).epsilon(1e-12));
  for (const auto& [id, chk] : rep.per_condition) {
    INFO("condition ", id, " margin ", chk.margin);
    CHECK(chk.pass);
  }
  CHECK(rep.overall_pass());
}

TEST_CASE("alpha0 search over the split ladder") {
  const DiophantineEstimate est = diophantine_fit(golden_mean(), 100000);
  const Alpha0Result res =
      find_alpha0(scaled_tanh_family, golden_mean(), est, 64.0, 128.0, 2);
  CHECK(res.found);
  // the grid {64, 128} already passes at its lower point, through the
  // 5 * 12.8 split (the 8 * 16 split at 128 also passes; the search stops
  // at the smallest passing alpha and the first passing split factor)
  CHECK(res.alpha0 == 64.0);
  CHECK(res.alpha_l == 5.0);
  CHECK(res.alpha_r == 12.800000000000001);
  CHECK(res.report.overall_pass());

  const Alpha0Result none =
      find_alpha0(scaled_tanh_family, golden_mean(), est, 16.0, 16.0, 1);
  CHECK_FALSE(none.found);
}
