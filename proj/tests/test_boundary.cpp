#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sna/boundary.hpp"
#include "sna/circle.hpp"
#include "sna/systems.hpp"

using namespace sna;

namespace {
PinchedSystem tanh_system(double alpha) {
  return make_system(tanh_family(alpha), golden_mean());
}
} // namespace

TEST_CASE("line zero is the constant upper edge") {
  const PinchedSystem sys = tanh_system(5.0);
  for (double theta : {0.0, 0.123, 0.5, 0.987}) {
    CHECK(boundary_value(sys, theta, 0) == 5.0);
  }
}

TEST_CASE("first line in closed form") {
  const PinchedSystem sys = tanh_system(5.0);
  for (double theta : {0.05, 0.3, 0.77}) {
    const double ang = wrap01(theta - golden_mean());
    const double expect = 5.0 * std::fabs(std::sin(M_PI * ang)) * std::tanh(5.0);
    CHECK(boundary_value(sys, theta, 1) == doctest::Approx(expect).epsilon(1e-15));
  }
}

TEST_CASE("pinch propagates to exact zeros along the orbit") {
  // phi_n(tau_n) = 0 bitwise: the backward orbit of tau_n lands on the pinch
  // point exactly because both sides reduce through the same product + fmod.
  const PinchedSystem sys = tanh_system(5.0);
  const double w = golden_mean();
  for (int n = 1; n <= 30; ++n) {
    CHECK(boundary_value(sys, wrap01(static_cast<double>(n) * w), n) == 0.0);
  }
}

TEST_CASE("boundary_line matches pointwise evaluation") {
  const PinchedSystem sys = tanh_system(5.0);
  const GraphSample phi = boundary_line(sys, 7, 100);
  CHECK(phi.grid_n == 100);
  CHECK(phi.iter_n == 7);
  REQUIRE(phi.values.size() == 100);
  for (int k : {0, 1, 13, 50, 99}) {
    CHECK(phi.at(k) == boundary_value(sys, k / 100.0, 7));
  }
}

TEST_CASE("nearest picks the closest grid point with wraparound") {
  GraphSample g;
  g.grid_n = 4;
  g.values = {10.0, 20.0, 30.0, 40.0};
  CHECK(g.nearest(0.0) == 10.0);
  CHECK(g.nearest(0.26) == 20.0);
  CHECK(g.nearest(0.5) == 30.0);
  CHECK(g.nearest(0.95) == 10.0); // wraps past the top
  CHECK(g.nearest(0.70) == 40.0);
}

TEST_CASE("lines decrease monotonically in n") {
  const PinchedSystem sys = tanh_system(5.0);
  const std::vector<GraphSample> seq = boundary_sequence(sys, 12, 1000);
  REQUIRE(seq.size() == 13);
  double worst = 0.0;
  for (std::size_t n = 1; n < seq.size(); ++n) {
    for (int k = 0; k < 1000; ++k) {
      worst = std::max(worst, seq[n].at(k) - seq[n - 1].at(k));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("upper bounding graph converges off-peak and stays an envelope") {
  const PinchedSystem sys = tanh_system(32.0);
  const AttractorResult res = upper_bounding_graph(sys, 2048, 200, 1e-8);
  CHECK(res.converged);
  CHECK(res.iterations < 80);
  CHECK(res.restricted_diff < 1e-8);
  CHECK(res.phi.grid_n == 2048);
  CHECK(res.phi.iter_n == res.iterations);
  // one more iteration can only go down (within rounding): the returned graph
  // bounds the true attractor from above
  for (int k = 0; k < 2048; k += 16) {
    const double next = boundary_value(sys, k / 2048.0, res.iterations + 1);
    CHECK(next <= res.phi.at(k) + 1e-12);
  }
}

TEST_CASE("below the vertical-exponent threshold the graph collapses to zero") {
  const PinchedSystem sys = tanh_system(1.5);
  const AttractorResult res = upper_bounding_graph(sys, 512, 400, 1e-10);
  CHECK(res.converged);
  double mx = 0.0;
  for (double v : res.phi.values) mx = std::max(mx, v);
  CHECK(mx < 1e-3);
}

TEST_CASE("slope of line n stays under beta alpha^n") {
  const PinchedSystem sys = tanh_system(5.0);
  const double beta = 15.706537051840924; // 5 pi tanh(5)
  for (int n : {2, 5, 8}) {
    const GraphSample phi = boundary_line(sys, n, 4096);
    const SlopeReport rep = slope_check(phi, beta, 5.0, n);
    CHECK(rep.n == n);
    CHECK(rep.bound == doctest::Approx(beta * std::pow(5.0, n)).epsilon(1e-13));
    CHECK(rep.observed > 0.0);
    CHECK(rep.pass);
  }
}

TEST_CASE("peak windows shrink geometrically with the resolution index") {
  const PeakParams p{8.0, 0.1458980337503153, 5, golden_mean()};
  const std::vector<PeakInterval> w5 = peak_intervals(p, 5, 7);
  REQUIRE(w5.size() == 7);
  for (int j = 1; j <= 7; ++j) {
    const PeakInterval& it = w5[static_cast<std::size_t>(j - 1)];
    CHECK(it.n == 5);
    CHECK(it.j == j);
    CHECK(it.center == orbit_point(golden_mean(), j));
    CHECK(it.half_width ==
          doctest::Approx(0.5 * p.b * std::pow(p.a, -5.0 / p.m)).epsilon(1e-14));
  }
  const std::vector<PeakInterval> w10 = peak_intervals(p, 10, 3);
  CHECK(w10[0].half_width ==
        doctest::Approx(w5[0].half_width * std::pow(p.a, -1.0)).epsilon(1e-13));
}

TEST_CASE("default peak half-width keys off the early return distances") {
  // min_{1<=j<=8} d(tau_j, 0) for the golden mean is at j = 8
  const double b0 = 0.05572809000084078;
  CHECK(default_peak_half_width(golden_mean(), 0) == doctest::Approx(0.5 * b0).epsilon(1e-13));
  CHECK(default_peak_half_width(golden_mean(), 8) ==
        doctest::Approx(0.25 * b0).epsilon(1e-13));
}

TEST_CASE("off_peak detects the exclusion windows") {
  const double w = golden_mean();
  const double h = 0.01;
  CHECK_FALSE(off_peak(w, orbit_point(w, 1), 1, 5, h));
  CHECK_FALSE(off_peak(w, wrap01(orbit_point(w, 3) + 0.005), 1, 5, h));
  CHECK(off_peak(w, wrap01(orbit_point(w, 1) + 0.02), 1, 1, h));
  CHECK(off_peak(w, 0.5, 1, 3, 1e-4));
}

TEST_CASE("difference decay report structure") {
  const PinchedSystem sys = tanh_system(5.0);
  const std::vector<GraphSample> seq = boundary_sequence(sys, 8, 512);
  DecayParams p;
  p.omega = golden_mean();
  p.a = 6.0;
  p.b = 0.1458980337503153;
  p.m = 5;
  p.alpha = 128.0;
  p.gamma = 5.309463044063838;
  p.L = 8.0;
  p.q = 1;
  const DecayReport rep = difference_decay_check(seq, p);
  CHECK(rep.lambda_decay == doctest::Approx(0.2618926088127673).epsilon(1e-15));
  REQUIRE(!rep.rows.empty());
  CHECK(rep.rows.front().n == 6); // rows start at q*m + 1
  bool conj = true;
  for (const DecayRow& r : rep.rows) {
    CHECK(r.bound ==
          doctest::Approx(8.0 * std::pow(128.0, -(r.n - 1) * rep.lambda_decay))
              .epsilon(1e-12));
    conj = conj && r.pass;
  }
  CHECK(rep.all_pass() == conj);
}

TEST_CASE("decay rows go vacuous when the windows swallow the grid") {
  const PinchedSystem sys = tanh_system(5.0);
  const std::vector<GraphSample> seq = boundary_sequence(sys, 7, 64);
  DecayParams p;
  p.omega = golden_mean();
  p.a = 1.0001; // windows barely shrink
  p.b = 0.9;    // and start absurdly wide
  p.m = 5;
  p.alpha = 5.0;
  p.gamma = 1.0;
  p.L = 5.0;
  p.q = 1;
  const DecayReport rep = difference_decay_check(seq, p);
  REQUIRE(!rep.rows.empty());
  for (const DecayRow& r : rep.rows) {
    CHECK(r.vacuous);
    CHECK(r.restricted_count == 0);
    CHECK(r.pass);
  }
  CHECK(rep.all_pass());
}

TEST_CASE("invariance defect doubles as a convergence certificate") {
  // strongly forced family saturates: consecutive lines coincide off-peak
  const PinchedSystem fast = tanh_system(32.0);
  const double f12 = invariance_defect(fast, 12, 500, 0.03);
  CHECK(f12 >= 0.0);
  CHECK(f12 < 1e-6);
  // moderately forced family decays visibly through the same range
  const PinchedSystem slow = tanh_system(3.0);
  const double s3 = invariance_defect(slow, 3, 500, 0.03);
  const double s12 = invariance_defect(slow, 12, 500, 0.03);
  CHECK(s12 < 1e-4);
  CHECK(s12 < s3);
}

TEST_CASE("density probe is deterministic per seed and validates its grid") {
  const PinchedSystem sys = tanh_system(2.2);
  const AttractorResult res = upper_bounding_graph(sys, 40000, 2000, 1e-6);
  REQUIRE(res.converged);
  const DensityProbeReport a = density_probe(sys, res.phi, 50, 1e-2, 5e-3, 7);
  const DensityProbeReport b = density_probe(sys, res.phi, 50, 1e-2, 5e-3, 7);
  CHECK(a.samples == b.samples);
  CHECK(a.hits == b.hits);
  REQUIRE(a.miss_locations.size() == b.miss_locations.size());
  for (std::size_t i = 0; i < a.miss_locations.size(); ++i) {
    CHECK(a.miss_locations[i].first == b.miss_locations[i].first);
    CHECK(a.miss_locations[i].second == b.miss_locations[i].second);
  }
  // sample i draws from generator seed + i, so adjacent seeds share all but
  // one generator; a far-apart seed gives a fully disjoint sample stream
  const DensityProbeReport c = density_probe(sys, res.phi, 50, 1e-2, 5e-3, 2000);
  CHECK(c.samples == 50);
  CHECK((c.hits != a.hits || c.miss_locations != a.miss_locations));

  // moderately forced family: a decent share of boxes is met by the graph
  CHECK(a.samples == 50);
  CHECK(a.hit_fraction() >= 0.4);

  CHECK_THROWS_AS(density_probe(sys, res.phi, 10, 1e-4, 5e-3, 1), Error);
  try {
    density_probe(sys, res.phi, 10, 1e-4, 5e-3, 1);
  } catch (const Error& e) {
    CHECK(e.code == ErrorCode::GridTooCoarse);
  }
}

TEST_CASE("density probe skips angles where the graph leaves no room") {
  const PinchedSystem sys = tanh_system(1.5);
  const AttractorResult res = upper_bounding_graph(sys, 4096, 400, 1e-10);
  const DensityProbeReport rep = density_probe(sys, res.phi, 20, 5e-3, 5e-3, 1);
  CHECK(rep.samples == 0);
  CHECK(rep.hits == 0);
  CHECK(rep.hit_fraction() == 0.0);
}
