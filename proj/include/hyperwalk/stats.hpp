#pragma once

// Streaming moments, normal distribution helpers, goodness of fit and
// interval estimates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace hyperwalk {

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

inline double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("normal quantile needs u in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), u);
}

// sup_x |F_emp(x) - Phi(x)|.
inline double ks_distance_normal(std::span<const double> samples) {
  if (samples.size() < 100) throw std::invalid_argument("KS needs at least 100 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

struct KsVerdict {
  double statistic = 0.0;
  double bound = 0.0;
  bool pass = false;
};

inline KsVerdict ks_normality(std::span<const double> samples, double bound) {
  const double d = ks_distance_normal(samples);
  return {d, bound, d < bound};
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

inline constexpr double kZ95 = 1.959963984540054;

inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ95) {
  if (trials == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(trials);
  const double q = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double centre = (q + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
  const double half = z / (1.0 + z2 / nn) * std::sqrt(q * (1.0 - q) / nn + z2 / (4.0 * nn * nn));
  return {successes == 0 ? 0.0 : std::max(0.0, centre - half),
          successes == trials ? 1.0 : std::min(1.0, centre + half)};
}

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double pvalue = 1.0;
};

// Pearson chi-square of observed counts against a law. Adjacent cells are
// pooled left to right until each pooled expectation reaches min_expected;
// a short tail is folded into the last pooled cell.
inline ChiSquare chi_square_test(std::span<const std::uint64_t> observed, std::span<const double> law,
                                 double min_expected = 5.0) {
  if (observed.size() != law.size()) throw std::invalid_argument("chi-square size mismatch");
  double total = 0.0;
  for (auto o : observed) total += static_cast<double>(o);
  std::vector<double> obs;
  std::vector<double> exp;
  double o_acc = 0.0;
  double e_acc = 0.0;
  for (std::size_t i = 0; i < law.size(); ++i) {
    o_acc += static_cast<double>(observed[i]);
    e_acc += law[i] * total;
    if (e_acc >= min_expected) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = 0.0;
      e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (exp.empty()) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      exp.back() += e_acc;
    }
  }
  ChiSquare out;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (exp[i] <= 0.0) {
      if (obs[i] > 0.0) return {INFINITY, static_cast<int>(obs.size()) - 1, 0.0};
      continue;
    }
    const double d = obs[i] - exp[i];
    out.statistic += d * d / exp[i];
  }
  out.dof = static_cast<int>(obs.size()) - 1;
  out.pvalue = out.dof > 0 ? boost::math::gamma_q(0.5 * out.dof, 0.5 * out.statistic) : 1.0;
  return out;
}

// Count, means, second central moments and co-moment of a pair stream.
struct RunningMoments2D {
  std::uint64_t count = 0;
  double mean_x = 0.0;
  double mean_y = 0.0;
  double m2_x = 0.0;
  double m2_y = 0.0;
  double c_xy = 0.0;

  void push(double x, double y) {
    ++count;
    const double k = static_cast<double>(count);
    const double dx = x - mean_x;
    const double dy = y - mean_y;
    mean_x += dx / k;
    mean_y += dy / k;
    m2_x += dx * (x - mean_x);
    m2_y += dy * (y - mean_y);
    c_xy += dx * (y - mean_y);
  }

  // Chan et al. pairwise combination.
  void merge(const RunningMoments2D& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double nt = na + nb;
    const double dx = o.mean_x - mean_x;
    const double dy = o.mean_y - mean_y;
    m2_x += o.m2_x + dx * dx * na * nb / nt;
    m2_y += o.m2_y + dy * dy * na * nb / nt;
    c_xy += o.c_xy + dx * dy * na * nb / nt;
    mean_x += dx * nb / nt;
    mean_y += dy * nb / nt;
    count += o.count;
  }

  std::optional<double> var_x() const {
    if (count < 2) return std::nullopt;
    return m2_x / static_cast<double>(count - 1);
  }
  std::optional<double> var_y() const {
    if (count < 2) return std::nullopt;
    return m2_y / static_cast<double>(count - 1);
  }
  std::optional<double> cov() const {
    if (count < 2) return std::nullopt;
    return c_xy / static_cast<double>(count - 1);
  }
  std::optional<double> corr() const {
    if (count < 2 || m2_x <= 0.0 || m2_y <= 0.0) return std::nullopt;
    return c_xy / std::sqrt(m2_x * m2_y);
  }
};

inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson needs equal lengths");
  RunningMoments2D m;
  for (std::size_t i = 0; i < x.size(); ++i) m.push(x[i], y[i]);
  return m.corr().value_or(NAN);
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  double r2 = 0.0;
};

inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit needs >= 2 points");
  RunningMoments2D m;
  for (std::size_t i = 0; i < x.size(); ++i) m.push(x[i], y[i]);
  LinearFit f;
  f.slope = m.c_xy / m.m2_x;
  f.intercept = m.mean_y - f.slope * m.mean_x;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double res = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += res * res;
    f.max_residual = std::max(f.max_residual, std::abs(res));
  }
  f.r2 = m.m2_y > 0.0 ? 1.0 - ss_res / m.m2_y : 1.0;
  return f;
}

}  // namespace hyperwalk
