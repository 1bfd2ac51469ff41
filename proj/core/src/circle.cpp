#include "sna/circle.hpp"

#include <cmath>
#include <limits>

namespace sna {

namespace {

constexpr double kTwo53 = 9007199254740992.0; // 2^53

// Largest q_n * q_{n+1} for which fl(q_n*omega) - p_n still satisfies the
// two-sided closest-return bounds with comfortable margin (relative rounding
// error ~ q_n*q_{n+1}*eps, and the tightest families sit ~0.7% inside the
// upper bound).
constexpr double kDirectSigmaHorizon = 1e12;

double to_double(const BigInt& v) { return v.convert_to<double>(); }

// Complete quotient zeta_{n+1} = [a_{n+1}; a_{n+2}, ...] from a coefficient
// window, deepest first damping.  Truncation error at the start contracts by
// 1/zeta^2 per level, so ~60 levels are plenty even for all-ones tails.
double complete_quotient(const std::vector<std::int64_t>& coeffs, int n_plus_1,
                         const CoeffRule* rule) {
  const int have = static_cast<int>(coeffs.size());
  const int want_last = n_plus_1 + 60;
  std::vector<double> window;
  for (int i = n_plus_1; i <= want_last; ++i) {
    if (i <= have) {
      window.push_back(static_cast<double>(coeffs[i - 1]));
    } else if (rule) {
      window.push_back(static_cast<double>(rule->a(i)));
    } else {
      break;
    }
  }
  double zeta = window.back() + 0.5; // nominal tail in (0,1)
  for (int j = static_cast<int>(window.size()) - 2; j >= 0; --j) {
    zeta = window[j] + 1.0 / zeta;
  }
  return zeta;
}

void fill_returns(ContinuedFraction& cf, const CoeffRule* rule) {
  const int K = cf.depth();
  cf.returns.assign(std::max(0, K - 1), 0.0);
  for (int n = 0; n + 1 < K; ++n) {
    const double qn = cf.q_double(n);
    const double qn1 = cf.q_double(n + 1);
    double s;
    if (qn * qn1 <= kDirectSigmaHorizon) {
      // Orbit-consistent: exactly the displacement the fmod-based orbit sees.
      s = qn * cf.omega - cf.p_double(n);
    } else {
      const double zeta = complete_quotient(cf.coeffs, n + 1, rule);
      const double mag = 1.0 / (zeta * qn + (n > 0 ? cf.q_double(n - 1) : 0.0));
      s = (n % 2 == 0) ? mag : -mag;
    }
    cf.returns[n] = s;
  }
}

void check_index(int n, int limit, const char* what) {
  if (n < 0 || n >= limit) {
    throw Error(ErrorCode::OutOfRange,
                std::string(what) + " index " + std::to_string(n) +
                    " out of range [0," + std::to_string(limit) + ")");
  }
}

} // namespace

double wrap01(double x) {
  double r = std::fmod(x, 1.0);
  if (r < 0.0) r += 1.0;
  if (r >= 1.0) r = 0.0; // fmod(-eps,1)+1 can round to 1
  return r;
}

double circle_dist(double a, double b) {
  const double d = std::fabs(wrap01(a) - wrap01(b));
  return std::min(d, 1.0 - d);
}

double signed_displacement(double x) {
  const double r = wrap01(x);
  return r > 0.5 ? r - 1.0 : r;
}

double golden_mean() { return (std::sqrt(5.0) - 1.0) / 2.0; }

double orbit_point(double omega, long long k) {
  return wrap01(static_cast<double>(k) * omega);
}

std::vector<double> rotation_orbit(double omega, int n) {
  if (n < 0) throw Error(ErrorCode::ConfigError, "rotation_orbit: n must be >= 0");
  std::vector<double> orbit(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) orbit[static_cast<std::size_t>(k)] = orbit_point(omega, k);
  return orbit;
}

CoeffRule coeff_rule(const std::string& name) {
  if (name == "ones") {
    return CoeffRule{
        "ones",
        [](int) -> std::int64_t { return 1; },
        [](int) { return std::numeric_limits<double>::infinity(); },
    };
  }
  if (name == "squares") {
    return CoeffRule{
        "squares",
        [](int i) -> std::int64_t { return static_cast<std::int64_t>(i) * i; },
        [](int m) {
          if (m <= 1) return 1.6449340668482264; // pi^2/6
          return 1.0 / (m - 1);                  // integral bound for sum 1/i^2
        },
    };
  }
  if (name == "pow2") {
    return CoeffRule{
        "pow2",
        [](int i) -> std::int64_t {
          if (i > 62) throw Error(ErrorCode::CapExceeded, "pow2 rule overflows past i=62");
          return std::int64_t{1} << i;
        },
        [](int m) { return std::ldexp(1.0, 1 - m); }, // 2^{1-m}
    };
  }
  throw Error(ErrorCode::ConfigError, "unknown coefficient rule: " + name);
}

double ContinuedFraction::q_double(int n) const {
  check_index(n, static_cast<int>(denominators.size()), "denominator");
  return to_double(denominators[static_cast<std::size_t>(n)]);
}

double ContinuedFraction::p_double(int n) const {
  check_index(n, static_cast<int>(numerators.size()), "numerator");
  return to_double(numerators[static_cast<std::size_t>(n)]);
}

std::int64_t ContinuedFraction::q_i64(int n) const {
  check_index(n, static_cast<int>(denominators.size()), "denominator");
  const BigInt& q = denominators[static_cast<std::size_t>(n)];
  if (q > BigInt(static_cast<std::int64_t>(kTwo53))) {
    throw Error(ErrorCode::PrecisionExhausted,
                "q_" + std::to_string(n) + " exceeds the exact integer range of double");
  }
  return q.convert_to<std::int64_t>();
}

double ContinuedFraction::sigma(int n) const {
  check_index(n, static_cast<int>(returns.size()), "return");
  return returns[static_cast<std::size_t>(n)];
}

ContinuedFraction cf_expand(double omega, int k) {
  if (k < 1) throw Error(ErrorCode::ConfigError, "cf_expand: depth must be >= 1");
  double x = wrap01(omega);
  ContinuedFraction cf;
  cf.omega = x;
  cf.denominators = {BigInt(1)};
  cf.numerators = {BigInt(0)};
  BigInt q_prev = 0, q_cur = 1; // q_{-1}, q_0
  BigInt p_prev = 1, p_cur = 0; // p_{-1}, p_0
  for (int i = 1; i <= k; ++i) {
    if (x < 1e-15) {
      throw Error(ErrorCode::DegenerateExpansion,
                  "remainder underflow at term " + std::to_string(i) +
                      " (machine-rational input)");
    }
    const double inv = 1.0 / x;
    const double af = std::floor(inv);
    if (af > 1e15) {
      throw Error(ErrorCode::DegenerateExpansion,
                  "partial quotient overflow at term " + std::to_string(i));
    }
    const auto a = static_cast<std::int64_t>(af);
    x = inv - af;
    cf.coeffs.push_back(a);
    BigInt q_next = BigInt(a) * q_cur + q_prev;
    BigInt p_next = BigInt(a) * p_cur + p_prev;
    q_prev = q_cur; q_cur = q_next;
    p_prev = p_cur; p_cur = p_next;
    cf.denominators.push_back(q_cur);
    cf.numerators.push_back(p_cur);
  }
  fill_returns(cf, nullptr);
  return cf;
}

double build_omega_from_coeffs(const std::vector<std::int64_t>& coeffs) {
  if (coeffs.empty()) throw Error(ErrorCode::ConfigError, "empty coefficient list");
  BigInt q_prev = 0, q_cur = 1;
  BigInt p_prev = 1, p_cur = 0;
  for (std::int64_t a : coeffs) {
    if (a < 1) throw Error(ErrorCode::ConfigError, "partial quotients must be >= 1");
    BigInt q_next = BigInt(a) * q_cur + q_prev;
    BigInt p_next = BigInt(a) * p_cur + p_prev;
    q_prev = q_cur; q_cur = q_next;
    p_prev = p_cur; p_cur = p_next;
  }
  if (q_cur > BigInt(static_cast<std::int64_t>(kTwo53))) {
    throw Error(ErrorCode::PrecisionExhausted,
                "final denominator exceeds the exact integer range of double");
  }
  return to_double(p_cur) / to_double(q_cur);
}

ContinuedFraction cf_from_rule(const CoeffRule& rule, int k) {
  if (k < 1) throw Error(ErrorCode::ConfigError, "cf_from_rule: depth must be >= 1");
  ContinuedFraction cf;
  cf.rule_name = rule.name;
  cf.denominators = {BigInt(1)};
  cf.numerators = {BigInt(0)};
  BigInt q_prev = 0, q_cur = 1;
  BigInt p_prev = 1, p_cur = 0;
  int deepest_exact = 0; // deepest n with q_n <= 2^53
  for (int i = 1; i <= k; ++i) {
    const std::int64_t a = rule.a(i);
    if (a < 1) throw Error(ErrorCode::ConfigError, "rule produced a partial quotient < 1");
    cf.coeffs.push_back(a);
    BigInt q_next = BigInt(a) * q_cur + q_prev;
    BigInt p_next = BigInt(a) * p_cur + p_prev;
    q_prev = q_cur; q_cur = q_next;
    p_prev = p_cur; p_cur = p_next;
    cf.denominators.push_back(q_cur);
    cf.numerators.push_back(p_cur);
    if (q_cur <= BigInt(static_cast<std::int64_t>(kTwo53))) deepest_exact = i;
  }
  // The double value: convergent at the deepest exactly representable prefix.
  // Deeper terms perturb the value by < 1/q^2, far below one ulp.
  cf.omega = to_double(cf.numerators[static_cast<std::size_t>(deepest_exact)]) /
             to_double(cf.denominators[static_cast<std::size_t>(deepest_exact)]);
  fill_returns(cf, &rule);
  return cf;
}

DiophantineEstimate diophantine_fit(double omega, long horizon, double floor_c) {
  if (horizon < 1) throw Error(ErrorCode::ConfigError, "diophantine_fit: horizon must be >= 1");
  constexpr int kCand = 21; // d = 1.0, 1.1, ..., 3.0
  double best[kCand];
  for (double& b : best) b = std::numeric_limits<double>::infinity();
  for (long n = 1; n <= horizon; ++n) {
    const double dist = circle_dist(orbit_point(omega, n), 0.0);
    const double ln = std::log(static_cast<double>(n));
    for (int j = 0; j < kCand; ++j) {
      const double d = 1.0 + 0.1 * j;
      const double v = dist * std::exp(d * ln);
      if (v < best[j]) best[j] = v;
    }
  }
  for (int j = 0; j < kCand; ++j) {
    if (best[j] >= floor_c) {
      return DiophantineEstimate{best[j], 1.0 + 0.1 * j, horizon, floor_c};
    }
  }
  throw Error(ErrorCode::NoFit,
              "no exponent in [1,3] clears the floor at this horizon "
              "(liouville-like approximation quality)");
}

long long first_entry_time(double omega, double center, double radius, long long cap) {
  if (radius <= 0.0) throw Error(ErrorCode::ConfigError, "first_entry_time: radius must be > 0");
  for (long long n = 1; n <= cap; ++n) {
    if (circle_dist(orbit_point(omega, n), center) <= radius) return n;
  }
  throw Error(ErrorCode::CapExceeded,
              "no entry into the target ball within " + std::to_string(cap) + " steps");
}

} // namespace sna
