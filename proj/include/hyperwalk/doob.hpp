#pragma once

// Doob decomposition of an exploration trace. Every conditional moment is
// exact given the pre-step state: with A' active vertices other than v_t and
// u' = n - t - A' unseen ones, each unexplored vertex is covered by the step's
// edges with probability pi1 and each pair with probability pi2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hyperwalk/explore.hpp"
#include "hyperwalk/theory.hpp"

namespace hyperwalk {

struct ConditionalMoments {
  double mean_eta = 0.0;
  double var_eta = 0.0;
  double mean_xi = 0.0;
  double var_xi = 0.0;
  double cov_xi_eta = 0.0;
  double pi1 = 0.0;
  double pi2 = 0.0;
};

inline ConditionalMoments moments_from_coverage(double pi1, double pi2, double active,
                                                double unseen) {
  ConditionalMoments m;
  m.pi1 = pi1;
  m.pi2 = pi2;
  m.mean_eta = unseen * pi1;
  m.var_eta = unseen * pi1 + unseen * (unseen - 1.0) * pi2 - m.mean_eta * m.mean_eta;
  m.mean_xi = active * pi1;
  m.var_xi = active * pi1 + active * (active - 1.0) * pi2 - m.mean_xi * m.mean_xi;
  m.cov_xi_eta = active * unseen * (pi2 - pi1 * pi1);
  return m;
}

// Moments of (eta_t, xi_t) given F_{t-1}, for step t in [1, n].
inline ConditionalMoments conditional_moments(std::int64_t n, int r, double p, std::int64_t t,
                                              std::int64_t active, std::int64_t unseen) {
  if (t < 1 || t > n) throw std::invalid_argument("step index must lie in [1, n]");
  if (active < 0 || unseen < 0 || active + unseen != n - t) {
    throw std::invalid_argument("A' + u' must equal n - t");
  }
  const double c = binomial(n - t - 1, r - 2);
  const double c2 = binomial(n - t - 2, r - 3);
  const double pi1 = one_minus_pow_one_minus(p, c);
  const double pi2 = pair_coverage(p, c, c2);
  return moments_from_coverage(pi1, pi2, static_cast<double>(active), static_cast<double>(unseen));
}

// A'_{t-1}: active vertices other than v_t just before step t.
inline std::int64_t active_before_step(const ExplorationTrace& trace, std::size_t index) {
  const StepRecord& rec = trace.steps[index];
  if (rec.started_new_component) return 0;
  return (index == 0 ? 0 : trace.steps[index - 1].A) - 1;
}

struct DoobOptions {
  std::int64_t t1 = 0;   // upper summation index of the variance sums
  double eps = 0.0;      // normalizer scale for the Lindeberg thresholds
  double delta = 0.1;    // Lindeberg truncation level
};

struct DoobTrace {
  // Per-step series, index t in [0, T] with entry 0 the initial value.
  std::vector<double> D;
  std::vector<double> Delta;
  std::vector<double> Dstar;
  std::vector<double> DeltaStar;
  std::vector<double> S;
  std::vector<double> Xtilde;
  std::vector<double> Shat;

  std::int64_t t1 = 0;
  double V1 = 0.0;
  double V2 = 0.0;
  double V12 = 0.0;
  // Realized-increment proxies of the Lindeberg sums.
  double lindeberg1 = 0.0;
  double lindeberg2 = 0.0;

  std::int64_t length() const { return static_cast<std::int64_t>(S.size()) - 1; }

  double max_abs_S(std::int64_t upto) const {
    double m = 0.0;
    const auto last = std::min<std::int64_t>(upto, length());
    for (std::int64_t t = 1; t <= last; ++t) m = std::max(m, std::abs(S[static_cast<std::size_t>(t)]));
    return m;
  }
};

inline DoobTrace decompose(const ExplorationTrace& trace, const DriftSequences& seq,
                           const DoobOptions& options) {
  const auto& cfg = trace.config;
  if (seq.n != cfg.n || seq.r != cfg.r || seq.p != cfg.p) {
    throw std::invalid_argument("trace and drift sequences disagree on (n, r, p)");
  }
  if (options.t1 < 0 || options.t1 > seq.t1) {
    throw std::invalid_argument("t1 must lie within the drift sequences' gamma range");
  }
  const std::size_t len = trace.steps.size();
  DoobTrace d;
  d.t1 = options.t1;
  for (auto* v : {&d.D, &d.Delta, &d.Dstar, &d.DeltaStar, &d.S, &d.Xtilde, &d.Shat}) {
    v->assign(len + 1, 0.0);
  }
  const double scale = std::abs(options.eps);
  const double nd = static_cast<double>(cfg.n);
  const double cut1 = options.delta * std::sqrt(scale * nd);
  const double cut2 = options.delta * std::sqrt(scale * scale * scale * nd);

  double S = 0.0;
  double Shat = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const StepRecord& rec = trace.steps[i];
    const std::size_t t = i + 1;
    const std::int64_t active = active_before_step(trace, i);
    const std::int64_t unseen = cfg.n - rec.t - active;
    const ConditionalMoments m = moments_from_coverage(
        seq.pi[t], seq.pi2[t], static_cast<double>(active), static_cast<double>(unseen));

    const double D = m.mean_eta - 1.0;
    const double Delta = static_cast<double>(rec.eta) - 1.0 - D;
    const double Dstar = m.mean_xi;
    const double DeltaStar = static_cast<double>(rec.xi) - Dstar;
    const double beta = seq.beta[t];
    const bool in_window = static_cast<std::int64_t>(t) <= options.t1;
    const double gamma = in_window ? seq.gamma[t] : 0.0;
    const double hatDelta = gamma * Delta + DeltaStar;

    S += Delta / beta;
    Shat += hatDelta;
    d.D[t] = D;
    d.Delta[t] = Delta;
    d.Dstar[t] = Dstar;
    d.DeltaStar[t] = DeltaStar;
    d.S[t] = S;
    d.Xtilde[t] = seq.x[t] + beta * S;
    d.Shat[t] = Shat;

    if (in_window) {
      d.V1 += m.var_eta / (beta * beta);
      d.V2 += gamma * gamma * m.var_eta + 2.0 * gamma * m.cov_xi_eta + m.var_xi;
      d.V12 += (gamma * m.var_eta + m.cov_xi_eta) / beta;
      if (std::abs(Delta) >= cut1) d.lindeberg1 += Delta * Delta;
      if (std::abs(hatDelta) >= cut2) d.lindeberg2 += hatDelta * hatDelta;
    }
  }
  return d;
}

// Empirical c1 of |X_t - Xtilde_t| <= c1 t C_t / n: the maximum ratio over t.
inline double approx_gap(const ExplorationTrace& trace, const DoobTrace& doob) {
  if (doob.length() != trace.length()) {
    throw std::invalid_argument("Doob trace does not match the exploration trace");
  }
  const double nd = static_cast<double>(trace.config.n);
  double worst = 0.0;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const StepRecord& rec = trace.steps[i];
    if (rec.C < 1) continue;
    const double gap = std::abs(static_cast<double>(rec.X) - doob.Xtilde[i + 1]);
    worst = std::max(worst, gap * nd / (static_cast<double>(rec.t) * static_cast<double>(rec.C)));
  }
  return worst;
}

// (T1 - t1, Xtilde_{t1} / (1 - lambda*)): realized versus predicted end time
// of the first giant-scale component.
inline std::pair<double, double> duality_diagnostic(const DoobTrace& doob, const Census& census,
                                                    double lambda_star, std::int64_t t1) {
  if (!census.T1) throw std::runtime_error("T1 undefined: exploration stopped before it");
  if (t1 < 0 || t1 > doob.length()) throw std::runtime_error("trace shorter than t1");
  return {static_cast<double>(*census.T1 - t1),
          doob.Xtilde[static_cast<std::size_t>(t1)] / (1.0 - lambda_star)};
}

}  // namespace hyperwalk
