#pragma once

// Deterministic layer: branching fixed points, the drift function g and its
// relatives, exact binomial coefficients, and the finite-n sequences
// (alpha, beta, x, pi, gamma) consumed by the martingale analytics.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyperwalk {

inline constexpr int kMinUniformity = 2;
inline constexpr int kMaxUniformity = 10;

using u128 = unsigned __int128;

// binom(m, k) as an exact integer, or nullopt when it does not fit in 128
// bits. binom(m, k) = 0 for k < 0 or m < k (covers m < 0).
inline std::optional<u128> binomial_exact(std::int64_t m, int k) {
  if (k < 0 || m < k) return u128{0};
  if (k > m - k) k = static_cast<int>(m - k);
  u128 acc = 1;
  for (int i = 0; i < k; ++i) {
    // acc holds binom(m, i); binom(m, i) * (m - i) / (i + 1) is exact.
    u128 next;
    if (__builtin_mul_overflow(acc, static_cast<u128>(m - i), &next)) {
      return std::nullopt;
    }
    acc = next / static_cast<u128>(i + 1);
  }
  return acc;
}

inline double u128_to_double(u128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  const auto lo = static_cast<std::uint64_t>(v);
  return std::ldexp(static_cast<double>(hi), 64) + static_cast<double>(lo);
}

// binom(m, k) as a real. Exact (then rounded once) whenever the integer fits
// in 128 bits, otherwise a long-double product.
inline double binomial(std::int64_t m, int k) {
  if (auto exact = binomial_exact(m, k)) return u128_to_double(*exact);
  long double acc = 1.0L;
  if (k > m - k) k = static_cast<int>(m - k);
  for (int i = 0; i < k; ++i) {
    acc *= static_cast<long double>(m - i) / static_cast<long double>(i + 1);
  }
  return static_cast<double>(acc);
}

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// (1 - p)^c for huge c, evaluated as exp(c * log1p(-p)).
inline double pow_one_minus(double p, double c) {
  if (c == 0.0) return 1.0;
  return std::exp(c * std::log1p(-p));
}

// 1 - (1 - p)^c without cancellation.
inline double one_minus_pow_one_minus(double p, double c) {
  if (c == 0.0) return 0.0;
  return -std::expm1(c * std::log1p(-p));
}

struct BranchingParams {
  int r = 3;
  double lambda = 1.0;
  double eps = 0.0;

  static BranchingParams from_lambda(int r, double lambda) {
    return checked(r, lambda, lambda - 1.0);
  }
  static BranchingParams from_eps(int r, double eps) {
    return checked(r, 1.0 + eps, eps);
  }

 private:
  static BranchingParams checked(int r, double lambda, double eps) {
    if (r < kMinUniformity || r > kMaxUniformity) {
      throw std::domain_error("uniformity r must lie in [2, 10], got " +
                              std::to_string(r));
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw std::domain_error("branching parameter must be positive");
    }
    return BranchingParams{r, lambda, eps};
  }
};

struct DerivedConstants {
  double rho_lambda = 0.0;
  double lambda_star = 0.0;
  double rho_r = 0.0;
  double rho_star = 0.0;
};

struct CltTargets {
  double mean_L1 = 0.0;
  double sd_L1 = 0.0;
  double mean_N1 = 0.0;
  double sd_N1 = 0.0;
  double corr = 0.0;
};

namespace detail {

inline void require_supercritical(double lambda) {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) {
    throw std::domain_error("supercritical branching parameter required (lambda > 1)");
  }
}

inline void require_uniformity(int r) {
  if (r < kMinUniformity || r > kMaxUniformity) {
    throw std::domain_error("uniformity r must lie in [2, 10]");
  }
}

// Bisection on [lo, hi] (f(lo) > 0 > f(hi)) to width `width`, then two
// Newton steps kept inside the final bracket.
template <class F, class DF>
double bracketed_root(F f, DF df, double lo, double hi, double width) {
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 2; ++i) {
    const double d = df(x);
    if (d == 0.0 || !std::isfinite(d)) break;
    const double next = x - f(x) / d;
    if (!(next >= lo && next <= hi)) break;
    x = next;
  }
  return x;
}

}  // namespace detail

// Survival probability of a Poisson(lambda) Galton-Watson process: the
// positive root of 1 - rho = exp(-lambda * rho).
inline double solve_rho(double lambda, double tol = 1e-15) {
  detail::require_supercritical(lambda);
  if (!(tol >= 1e-15)) throw std::domain_error("tolerance must be >= 1e-15");
  // 1 - rho - e^{-lambda rho}, written to keep full relative accuracy near 0.
  auto f = [lambda](double rho) { return -rho - std::expm1(-lambda * rho); };
  auto df = [lambda](double rho) { return -1.0 + lambda * std::exp(-lambda * rho); };
  // Width is relative to the root's scale so that lambda -> 1+ stays accurate.
  const double lo = tol;
  const double hi = 1.0 - tol;
  const double width = std::min(1e-14, 1e-3 * (lambda - 1.0));
  return detail::bracketed_root(f, df, lo, hi, std::max(width, 1e-300));
}

// The dual parameter lambda* < 1 with lambda* e^{-lambda*} = lambda e^{-lambda},
// found directly as a root on (0, 1).
inline double dual_lambda(double lambda) {
  detail::require_supercritical(lambda);
  const double target = std::log(lambda) - lambda;
  // log x - x is increasing on (0, 1); sign flipped for bracketed_root.
  auto f = [target](double x) { return target - (std::log(x) - x); };
  auto df = [](double x) { return -(1.0 / x - 1.0); };
  return detail::bracketed_root(f, df, 1e-300, 1.0, 1e-15);
}

// 1 - rho_{r,lambda} = (1 - rho_lambda)^{1/(r-1)}
inline double rho_r_from(int r, double rho_lambda) {
  return -std::expm1(std::log1p(-rho_lambda) / (r - 1));
}

inline double rho_r(int r, double lambda) {
  detail::require_uniformity(r);
  return rho_r_from(r, solve_rho(lambda));
}

inline double rho_star_from(int r, double lambda, double rho_r_value) {
  const double covered = -std::expm1(r * std::log1p(-rho_r_value));
  return lambda / r * covered - rho_r_value;
}

inline double rho_star(int r, double lambda) {
  detail::require_uniformity(r);
  return rho_star_from(r, lambda, rho_r(r, lambda));
}

inline DerivedConstants derive_constants(const BranchingParams& bp) {
  DerivedConstants dc;
  dc.rho_lambda = solve_rho(bp.lambda);
  dc.lambda_star = dual_lambda(bp.lambda);
  dc.rho_r = rho_r_from(bp.r, dc.rho_lambda);
  dc.rho_star = rho_star_from(bp.r, bp.lambda, dc.rho_r);
  return dc;
}

// g(tau) = 1 - tau - exp(-lambda/(r-1) * (1 - (1-tau)^{r-1})) and its
// derivatives. With u(tau) the exponent's argument, g' = -1 + u' e^{-u} and
// g'' = (u'' - u'^2) e^{-u}.
namespace detail {
inline double g_exponent(int r, double lambda, double tau) {
  return lambda / (r - 1) * -std::expm1((r - 1) * std::log1p(-tau));
}
inline double g_exponent_d1(int r, double lambda, double tau) {
  return lambda * std::pow(1.0 - tau, r - 2);
}
inline double g_exponent_d2(int r, double lambda, double tau) {
  if (r == 2) return 0.0;
  return -lambda * (r - 2) * std::pow(1.0 - tau, r - 3);
}
}  // namespace detail

inline double g_eval(int r, double lambda, double tau) {
  return 1.0 - tau - std::exp(-detail::g_exponent(r, lambda, tau));
}

inline double g_prime(int r, double lambda, double tau) {
  const double u = detail::g_exponent(r, lambda, tau);
  return -1.0 + detail::g_exponent_d1(r, lambda, tau) * std::exp(-u);
}

inline double g_double_prime(int r, double lambda, double tau) {
  const double u = detail::g_exponent(r, lambda, tau);
  const double d1 = detail::g_exponent_d1(r, lambda, tau);
  return (detail::g_exponent_d2(r, lambda, tau) - d1 * d1) * std::exp(-u);
}

inline double h_eval(int r, double lambda, double tau) {
  return g_eval(r, lambda, tau) * lambda * std::pow(1.0 - tau, r - 2);
}

// Adaptive Simpson quadrature with an absolute tolerance.
template <class F>
double integrate_simpson(F f, double a, double b, double abs_tol = 1e-11,
                         int max_depth = 48) {
  struct Rec {
    static double run(F& f, double a, double b, double fa, double fm, double fb,
                      double whole, double tol, int depth) {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m);
      const double rm = 0.5 * (m + b);
      const double flm = f(lm);
      const double frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double delta = left + right - whole;
      if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
      }
      return run(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
             run(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  };
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return Rec::run(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

// integral of h over [0, rho_{r,lambda}]; equals rho*_{r,lambda}.
inline double integrate_h(int r, double lambda, double abs_tol = 1e-11) {
  const double upper = rho_r(r, lambda);
  return integrate_simpson([&](double tau) { return h_eval(r, lambda, tau); },
                           0.0, upper, abs_tol);
}

// p = lambda (r-2)! n^{-r+1}
inline double edge_probability(std::int64_t n, int r, double lambda) {
  detail::require_uniformity(r);
  if (n < 1) throw std::domain_error("n must be >= 1");
  return lambda * factorial(r - 2) * std::exp(-(r - 1) * std::log(static_cast<double>(n)));
}

// Inverse of edge_probability: the normalized density of p.
inline double branching_from_probability(std::int64_t n, int r, double p) {
  return p / (factorial(r - 2) * std::exp(-(r - 1) * std::log(static_cast<double>(n))));
}

// Deterministic sequences for a given (n, r, p). Index t runs over [0, n] in
// every vector; alpha[0] = 0 and gamma is meaningful on [1, t1].
struct DriftSequences {
  std::int64_t n = 0;
  int r = 0;
  double p = 0.0;
  std::int64_t t1 = 0;
  std::vector<double> alpha;  // p * binom(n-t-1, r-2)
  std::vector<double> beta;   // prod_{i<=t} (1 - alpha_i)
  std::vector<double> x;      // n - t - n beta_t
  std::vector<double> pi;     // 1 - (1-p)^{binom(n-t-1, r-2)}
  std::vector<double> pi2;    // both of two fixed unexplored vertices covered
  std::vector<double> gamma;  // sum_{s=t}^{t1-1} beta_s pi_s / beta_t
};

// Probability that two fixed unexplored vertices are both covered by the
// tested sets of a step, given c sets cover each and c2 cover both:
// 1 - 2q^c + q^{2c - c2} = pi1^2 + q^{2c} (q^{-c2} - 1).
inline double pair_coverage(double p, double c, double c2) {
  const double l = std::log1p(-p);
  const double pi1 = -std::expm1(c * l);
  const double qc = std::exp(c * l);
  return pi1 * pi1 + qc * qc * std::expm1(-c2 * l);
}

inline DriftSequences drift_sequences(std::int64_t n, int r, double p, std::int64_t t1) {
  detail::require_uniformity(r);
  if (n < r) throw std::domain_error("drift sequences need n >= r");
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("p must lie in (0, 1)");
  if (t1 < 0 || t1 > n) throw std::domain_error("t1 must lie in [0, n]");
  if (!(binomial(n - 1, r - 2) * p < 0.5)) {
    throw std::domain_error("alpha_t < 1/2 precondition violated: binom(n-1, r-2) p >= 1/2");
  }
  DriftSequences s;
  s.n = n;
  s.r = r;
  s.p = p;
  s.t1 = t1;
  const auto size = static_cast<std::size_t>(n + 1);
  s.alpha.assign(size, 0.0);
  s.beta.assign(size, 1.0);
  s.x.assign(size, 0.0);
  s.pi.assign(size, 0.0);
  s.pi2.assign(size, 0.0);
  s.gamma.assign(static_cast<std::size_t>(t1 + 1), 0.0);

  const double log1m_p = std::log1p(-p);
  // Kahan-compensated running sum of log(1 - alpha_i).
  double log_beta = 0.0;
  double carry = 0.0;
  const double nd = static_cast<double>(n);
  for (std::int64_t t = 0; t <= n; ++t) {
    const double c = binomial(n - t - 1, r - 2);
    const double c2 = binomial(n - t - 2, r - 3);
    const auto i = static_cast<std::size_t>(t);
    s.pi[i] = -std::expm1(c * log1m_p);
    s.pi2[i] = pair_coverage(p, c, c2);
    if (t >= 1) {
      s.alpha[i] = p * c;
      const double term = std::log1p(-s.alpha[i]) - carry;
      const double next = log_beta + term;
      carry = (next - log_beta) - term;
      log_beta = next;
      s.beta[i] = std::exp(log_beta);
    }
    s.x[i] = nd - static_cast<double>(t) - nd * s.beta[i];
  }
  double suffix = 0.0;
  for (std::int64_t t = t1; t >= 1; --t) {
    const auto i = static_cast<std::size_t>(t);
    if (t <= t1 - 1) suffix += s.beta[i] * s.pi[i];
    s.gamma[i] = suffix / s.beta[i];
  }
  return s;
}

inline CltTargets clt_targets(std::int64_t n, int r, double eps) {
  if (!(eps > 0.0)) throw std::domain_error("CLT targets need eps > 0");
  const double lambda = 1.0 + eps;
  const double nd = static_cast<double>(n);
  CltTargets c;
  c.mean_L1 = rho_r(r, lambda) * nd;
  c.sd_L1 = std::sqrt(2.0 * nd / eps);
  c.mean_N1 = rho_star(r, lambda) * nd;
  c.sd_N1 = std::sqrt(10.0 / 3.0) / (r - 1) * std::sqrt(eps * eps * eps * nd);
  c.corr = std::sqrt(3.0 / 5.0);
  return c;
}

// Cut-offs used by the window analysis: t0 = omega sqrt(n/eps), t1 = rho_r n,
// both floored.
inline std::int64_t initial_cutoff(std::int64_t n, double eps, double omega) {
  return static_cast<std::int64_t>(std::floor(omega * std::sqrt(static_cast<double>(n) / eps)));
}

inline std::int64_t giant_time(std::int64_t n, int r, double lambda) {
  return static_cast<std::int64_t>(std::floor(rho_r(r, lambda) * static_cast<double>(n)));
}

}  // namespace hyperwalk
