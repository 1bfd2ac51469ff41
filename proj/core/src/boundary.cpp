#include "sna/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sna/circle.hpp"

namespace sna {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Portable uniform in [0,1): top 53 bits of the engine output.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

double GraphSample::nearest(double theta) const {
  const double t = wrap01(theta);
  const long k = std::lround(t * grid_n);
  return values[static_cast<std::size_t>(k % grid_n)];
}

double boundary_value(const PinchedSystem& sys, double theta, int n) {
  if (n < 0) throw Error(ErrorCode::ConfigError, "boundary_value: n must be >= 0");
  double x = sys.L;
  for (int j = n; j >= 1; --j) {
    // Backward angle via one product + one fmod: bit-identical with orbit
    // points, so fibres over tau_j are hit exactly and produce exact zeros.
    const double ang = wrap01(theta - static_cast<double>(j) * sys.omega);
    x = std::clamp(sys.fibre(ang, x), 0.0, sys.L);
  }
  return x;
}

GraphSample boundary_line(const PinchedSystem& sys, int n, int grid_n) {
  if (grid_n < 2) throw Error(ErrorCode::ConfigError, "boundary_line: grid_n >= 2");
  GraphSample g;
  g.grid_n = grid_n;
  g.system_id = sys.name;
  g.iter_n = n;
  g.values.resize(static_cast<std::size_t>(grid_n));
  for (int k = 0; k < grid_n; ++k) {
    g.values[static_cast<std::size_t>(k)] =
        boundary_value(sys, static_cast<double>(k) / grid_n, n);
  }
  return g;
}

std::vector<GraphSample> boundary_sequence(const PinchedSystem& sys, int n_max,
                                           int grid_n) {
  if (n_max < 1) throw Error(ErrorCode::ConfigError, "boundary_sequence: n_max >= 1");
  std::vector<GraphSample> seq;
  seq.reserve(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) seq.push_back(boundary_line(sys, n, grid_n));
  return seq;
}

std::vector<PeakInterval> peak_intervals(const PeakParams& p, int n, int j_max) {
  if (!(p.a > 1.0) || !(p.b > 0.0) || p.m < 1) {
    throw Error(ErrorCode::ConfigError, "peak_intervals: need a > 1, b > 0, m >= 1");
  }
  const double half =
      0.5 * p.b * std::pow(p.a, -static_cast<double>(n) / p.m);
  std::vector<PeakInterval> out;
  out.reserve(static_cast<std::size_t>(std::max(0, j_max)));
  for (int j = 1; j <= j_max; ++j) {
    out.push_back(PeakInterval{n, j, orbit_point(p.omega, j), half});
  }
  return out;
}

double default_peak_half_width(double omega, int n) {
  double b0 = 0.5;
  for (int j = 1; j <= 8; ++j) {
    b0 = std::min(b0, circle_dist(orbit_point(omega, j), 0.0));
  }
  return 0.5 * b0 * std::exp2(-static_cast<double>(n) / 8.0);
}

bool off_peak(double omega, double theta, int j_lo, int j_hi, double half_width) {
  for (int j = j_lo; j <= j_hi; ++j) {
    if (circle_dist(theta, orbit_point(omega, j)) <= half_width) return false;
  }
  return true;
}

AttractorResult upper_bounding_graph(const PinchedSystem& sys, int grid_n,
                                     int n_max, double tol, bool strict,
                                     int measure_points) {
  if (grid_n < 2 || n_max < 1 || !(tol > 0.0) || measure_points < 16) {
    throw Error(ErrorCode::ConfigError, "upper_bounding_graph: bad parameters");
  }
  const int M = measure_points;
  const double om = sys.omega;

  // Track u = phi_n and v = phi_{n+1} along the moving angles
  // psi_n = theta_k + n*omega, where both satisfy the same one-step
  // recurrence u <- T_{psi_n}(u).  One fibre evaluation per line per point
  // instead of a full backward orbit.
  std::vector<double> u(static_cast<std::size_t>(M), sys.L);
  std::vector<double> v(static_cast<std::size_t>(M));
  std::vector<double> base(static_cast<std::size_t>(M));
  // Running minimum over i = -1..n-1 of d(theta_k + i*omega, 0): the distance
  // from psi_n to the nearest peak centre tau_j, 1 <= j <= n+1.
  std::vector<double> dmin(static_cast<std::size_t>(M));
  for (int k = 0; k < M; ++k) {
    const double theta = (k + 0.5) / M; // offset dodges exact orbit points
    base[static_cast<std::size_t>(k)] = theta;
    v[static_cast<std::size_t>(k)] =
        std::clamp(sys.fibre(wrap01(theta - om), sys.L), 0.0, sys.L);
    dmin[static_cast<std::size_t>(k)] = circle_dist(wrap01(theta - om), 0.0);
  }

  int n = 0;
  bool converged = false;
  double restricted = std::numeric_limits<double>::infinity();
  double unrestricted = std::numeric_limits<double>::infinity();
  double half_width = default_peak_half_width(om, 1);
  while (true) {
    half_width = default_peak_half_width(om, n + 1);
    restricted = 0.0;
    unrestricted = 0.0;
    long kept = 0;
    for (int k = 0; k < M; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const double diff = u[ku] - v[ku]; // monotone: u >= v
      unrestricted = std::max(unrestricted, diff);
      if (dmin[ku] > half_width) {
        restricted = std::max(restricted, diff);
        ++kept;
      }
    }
    if (kept >= M / 8 && restricted < tol) {
      converged = true;
      break;
    }
    if (n + 1 >= n_max) break; // returned line below is phi_{n_max}
    for (int k = 0; k < M; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const double psi = wrap01(base[ku] + static_cast<double>(n) * om);
      u[ku] = std::clamp(sys.fibre(psi, u[ku]), 0.0, sys.L);
      v[ku] = std::clamp(sys.fibre(psi, v[ku]), 0.0, sys.L);
      dmin[ku] = std::min(dmin[ku], circle_dist(psi, 0.0));
    }
    ++n;
  }

  if (!converged && strict && unrestricted >= tol) {
    throw Error(ErrorCode::NotConverged,
                "upper bounding graph: off-peak difference " +
                    std::to_string(restricted) + " after " + std::to_string(n_max) +
                    " iterations");
  }

  AttractorResult res;
  res.iterations = n + 1;
  res.converged = converged;
  res.restricted_diff = restricted;
  res.unrestricted_diff = unrestricted;
  res.exclusion_half_width = half_width;
  res.exclusion_b0 = 2.0 * default_peak_half_width(om, 0);
  res.measure_points = M;
  res.phi = boundary_line(sys, res.iterations, grid_n);
  return res;
}

SlopeReport slope_check(const GraphSample& phi, double beta, double alpha, int n) {
  SlopeReport rep;
  rep.n = n;
  rep.bound = beta * std::pow(alpha, n);
  const int N = phi.grid_n;
  for (int k = 0; k < N; ++k) {
    const double step =
        std::fabs(phi.at((k + 1) % N) - phi.at(k)) * static_cast<double>(N);
    rep.observed = std::max(rep.observed, step);
  }
  rep.pass = rep.observed <= rep.bound;
  return rep;
}

bool DecayReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const DecayRow& r) { return r.pass; });
}

DecayReport difference_decay_check(const std::vector<GraphSample>& seq,
                                   const DecayParams& p) {
  if (seq.size() < 2) {
    throw Error(ErrorCode::ConfigError, "difference_decay_check: need >= 2 lines");
  }
  if (p.q < 0) throw Error(ErrorCode::ConfigError, "difference_decay_check: q >= 0");
  DecayReport rep;
  rep.lambda_decay = p.gamma * (1.0 - 4.0 / p.m) - 4.0 / p.m;
  const int n_lines = static_cast<int>(seq.size());
  std::vector<double> tau(static_cast<std::size_t>(n_lines));
  for (int j = 0; j < n_lines; ++j) tau[static_cast<std::size_t>(j)] = orbit_point(p.omega, j);
  // Rows below q*m + 1 are outside the regime where the bound is claimed
  // (the exclusion union at step n only controls indices up to (n-1)/m).
  const int n_first = std::max(1, p.q * p.m + 1);
  for (int n = n_first; n < n_lines; ++n) {
    const GraphSample& cur = seq[static_cast<std::size_t>(n)];
    const GraphSample& prev = seq[static_cast<std::size_t>(n - 1)];
    const double half =
        0.5 * p.b * std::pow(p.a, -static_cast<double>(n - 1) / p.m);
    DecayRow row;
    row.n = n;
    row.bound = p.L * std::pow(p.alpha, -static_cast<double>(n - 1) * rep.lambda_decay);
    const int N = cur.grid_n;
    for (int k = 0; k < N; ++k) {
      const double theta = static_cast<double>(k) / N;
      bool keep = true;
      for (int j = p.q; j <= n; ++j) {
        if (circle_dist(theta, tau[static_cast<std::size_t>(j)]) <= half) {
          keep = false;
          break;
        }
      }
      if (!keep) continue;
      ++row.restricted_count;
      row.observed = std::max(row.observed, std::fabs(cur.at(k) - prev.at(k)));
    }
    row.vacuous = (row.restricted_count == 0);
    row.pass = row.vacuous || row.observed <= row.bound;
    rep.rows.push_back(row);
  }
  return rep;
}

double invariance_defect(const PinchedSystem& sys, int n, int n_samples,
                         double exclusion_radius) {
  if (n < 0 || n_samples < 1) {
    throw Error(ErrorCode::ConfigError, "invariance_defect: bad parameters");
  }
  std::vector<double> tau(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) tau[static_cast<std::size_t>(j)] = orbit_point(sys.omega, j);
  const double stride = golden_mean();
  double defect = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const double theta = wrap01(0.5 + stride * s); // low-discrepancy, deterministic
    bool keep = true;
    for (double t : tau) {
      if (circle_dist(theta, t) <= exclusion_radius) {
        keep = false;
        break;
      }
    }
    if (!keep) continue;
    const double x = boundary_value(sys, theta, n);
    const double image = std::clamp(sys.fibre(theta, x), 0.0, sys.L);
    const double ahead = boundary_value(sys, wrap01(theta + sys.omega), n);
    defect = std::max(defect, std::fabs(image - ahead));
  }
  return defect;
}

DensityProbeReport density_probe(const PinchedSystem& sys, const GraphSample& phi_plus,
                                 int n_samples, double delta, double epsilon,
                                 std::uint64_t seed) {
  if (n_samples < 1 || !(delta > 0.0) || !(epsilon > 0.0)) {
    throw Error(ErrorCode::ConfigError, "density_probe: bad parameters");
  }
  const int N = phi_plus.grid_n;
  if (delta * N < 10.0) {
    throw Error(ErrorCode::GridTooCoarse,
                "density_probe: fewer than 10 grid cells per box half-width");
  }
  DensityProbeReport rep;
  rep.delta = delta;
  rep.epsilon = epsilon;
  rep.seed = seed;
  const int reach = static_cast<int>(std::ceil(delta * N)) + 1;
  for (int i = 0; i < n_samples; ++i) {
    std::mt19937_64 rng(splitmix64(seed + static_cast<std::uint64_t>(i)));
    // Rejection-sample an angle whose fibre is tall enough for the box.
    double theta = 0.0, top = 0.0;
    bool found = false;
    for (int attempt = 0; attempt < 10000; ++attempt) {
      theta = uniform01(rng);
      top = phi_plus.nearest(theta);
      if (top >= 6.0 * epsilon) {
        found = true;
        break;
      }
    }
    if (!found) break; // graph too low everywhere sampled: stop with what we have
    const double x = 3.0 * epsilon + uniform01(rng) * (top - 6.0 * epsilon);
    ++rep.samples;
    const long k0 = std::lround(wrap01(theta) * N);
    bool hit = false;
    for (int off = -reach; off <= reach && !hit; ++off) {
      const long k = ((k0 + off) % N + N) % N;
      const double tk = static_cast<double>(k) / N;
      if (circle_dist(tk, theta) > delta) continue;
      if (std::fabs(phi_plus.at(static_cast<int>(k)) - x) < epsilon) hit = true;
    }
    // The uniform grid only resolves the widest oscillations of the graph;
    // the box is really asked to meet the graph itself, whose points are
    // produced by the dynamics.  Follow the forward orbit of a graph point:
    // it stays on the graph and revisits B_delta(theta) at rotation-return
    // times, each visit sampling the local value distribution at fibre
    // resolution far below the grid scale.
    if (!hit) {
      const int warmup = 128; // settle from x = L onto the graph first
      const int steps = 1000000;
      double xo = sys.L;
      for (int t = 0; t < steps; ++t) {
        const double ang = wrap01(theta + static_cast<double>(t) * sys.omega);
        if (t >= warmup && circle_dist(ang, theta) <= delta &&
            std::fabs(xo - x) < epsilon) {
          hit = true;
          break;
        }
        xo = std::clamp(sys.fibre(ang, xo), 0.0, sys.L);
      }
    }
    if (hit) {
      ++rep.hits;
    } else if (rep.miss_locations.size() < 64) {
      rep.miss_locations.emplace_back(theta, x);
    }
  }
  return rep;
}

} // namespace sna
