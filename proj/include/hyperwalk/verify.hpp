#pragma once

// The acceptance criteria. Each criterion runs end to end at its stated
// size and reports one verdict; calibrated bands are fixed constants below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hyperwalk/doob.hpp"
#include "hyperwalk/explore.hpp"
#include "hyperwalk/io.hpp"
#include "hyperwalk/mc.hpp"
#include "hyperwalk/oracle.hpp"
#include "hyperwalk/stats.hpp"
#include "hyperwalk/theory.hpp"

namespace hyperwalk {

// Frozen calibration constants (chosen on pilot seeds, then fixed).
namespace calibration {
inline constexpr double kLinearBandLo = 0.4;
inline constexpr double kLinearBandHi = 0.6;
inline constexpr double kCubicBandLo = 0.08;
inline constexpr double kCubicBandHi = 0.2;
inline constexpr double kTailC = 10.0;
inline constexpr double kTailFitMinR2 = 0.9;
inline constexpr double kConcentrationMax = 0.02;
inline constexpr double kWindowMinFreq = 0.95;
inline constexpr double kDualityMinCorr = 0.9;
inline constexpr double kMaximalC = 3.0;
inline constexpr double kGapMax = 10.0;
inline constexpr double kLindebergMax = 0.01;
}  // namespace calibration

struct Verdict {
  std::string name;
  double value = 0.0;
  bool pass = false;
};

// Finite-size bands for standardized (L1, N1) of a supercritical cell.
inline std::vector<Verdict> clt_verdicts(const CellReport& rep) {
  const auto& z = rep.agg.z;
  if (z.count < 2 || !rep.ks_z1 || !rep.ks_z2) return {};
  const double v1 = *z.var_x();
  const double v2 = *z.var_y();
  const double rho = z.corr().value_or(0.0);
  return {
      {"mean_z1", z.mean_x, std::abs(z.mean_x) <= 0.25},
      {"mean_z2", z.mean_y, std::abs(z.mean_y) <= 0.3},
      {"var_z1", v1, v1 >= 0.8 && v1 <= 1.2},
      {"var_z2", v2, v2 >= 0.75 && v2 <= 1.25},
      {"corr", rho, std::abs(rho - std::sqrt(0.6)) <= 0.06},
      {"ks_z1", *rep.ks_z1, *rep.ks_z1 < 0.05},
      {"ks_z2", *rep.ks_z2, *rep.ks_z2 < 0.06},
  };
}

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double limit_seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 0x5EED2024ULL;
  unsigned threads = 0;
  std::vector<int> only;  // empty = all
};

namespace detail {

class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (failures_++ < 8) fail_ << (fail_.tellp() > 0 ? "; " : "") << what;
    }
  }
  void note(const std::string& s) { info_ << (info_.tellp() > 0 ? " " : "") << s; }
  bool pass() const { return pass_; }
  std::string detail() const {
    std::string d = info_.str();
    if (!pass_) d += (d.empty() ? "" : " | ") + std::string("failed: ") + fail_.str();
    return d;
  }

 private:
  bool pass_ = true;
  int failures_ = 0;
  std::ostringstream fail_;
  std::ostringstream info_;
};

inline std::string fmt(double v, int digits = 4) {
  std::ostringstream o;
  o.precision(digits);
  o << v;
  return o.str();
}

inline bool in_band(double v, double lo, double hi) { return v >= lo && v <= hi; }

inline void criterion_fixed_points(Checks& c) {
  double worst[4] = {0, 0, 0, 0};
  for (int r : {2, 3, 4, 7}) {
    for (double lambda : {1.05, 1.2, 1.5, 2.0}) {
      const auto dc = derive_constants(BranchingParams::from_lambda(r, lambda));
      const double e1 = std::abs(1.0 - dc.rho_lambda - std::exp(-lambda * dc.rho_lambda));
      const double e2 = std::abs(dc.lambda_star * std::exp(-dc.lambda_star) - lambda * std::exp(-lambda));
      const double e3 = std::abs(std::pow(1.0 - dc.rho_r, r - 1) - (1.0 - dc.rho_lambda));
      const double e4 = std::abs(integrate_h(r, lambda) - dc.rho_star);
      const std::string at = "(r=" + std::to_string(r) + ",lambda=" + fmt(lambda) + ")";
      c.expect(e1 < 1e-12, "rho residual " + fmt(e1) + at);
      c.expect(e2 < 1e-12, "lambda* residual " + fmt(e2) + at);
      c.expect(e3 < 1e-10, "rho_r residual " + fmt(e3) + at);
      c.expect(e4 < 1e-9, "integral residual " + fmt(e4) + at);
      worst[0] = std::max(worst[0], e1);
      worst[1] = std::max(worst[1], e2);
      worst[2] = std::max(worst[2], e3);
      worst[3] = std::max(worst[3], e4);
    }
  }
  c.note("max residuals " + fmt(worst[0], 3) + " " + fmt(worst[1], 3) + " " + fmt(worst[2], 3) + " " +
         fmt(worst[3], 3));
}

inline void criterion_series(Checks& c) {
  using namespace calibration;
  const double eps_grid[] = {0.2, 0.1, 0.05, 0.025};
  double lo = 1e9;
  double hi = 0.0;
  double clo = 1e9;
  double chi = 0.0;
  for (int r : {2, 3, 4, 7}) {
    double prev[4] = {0, 0, 0, 0};
    for (int k = 0; k < 4; ++k) {
      const double e = eps_grid[k];
      const double rm1 = r - 1.0;
      const auto dc = derive_constants(BranchingParams::from_eps(r, e));
      const double err[4] = {
          std::abs(dc.rho_lambda - (2 * e - 8.0 / 3.0 * e * e)),
          std::abs(dc.rho_r / (2 * e / rm1) - 1.0),
          std::abs(dc.rho_star / (2.0 / 3.0 * e * e * e / (rm1 * rm1)) - 1.0),
          std::abs(dc.rho_r - (2 * e / rm1 - 2.0 * (r + 2) / (3.0 * rm1 * rm1) * e * e)),
      };
      if (k > 0) {
        for (int q = 0; q < 4; ++q) {
          const double ratio = err[q] / prev[q];
          const bool cubic = q == 0 || q == 3;
          const double blo = cubic ? kCubicBandLo : kLinearBandLo;
          const double bhi = cubic ? kCubicBandHi : kLinearBandHi;
          static const char* names[] = {"rho_lambda", "rho_r", "rho_star", "rho_r two-term"};
          c.expect(in_band(ratio, blo, bhi), std::string(names[q]) + " ratio " + fmt(ratio) + " r=" + std::to_string(r));
          if (cubic) {
            clo = std::min(clo, ratio);
            chi = std::max(chi, ratio);
          } else {
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
          }
        }
      }
      std::copy(err, err + 4, prev);
    }
  }
  c.note("linear ratios [" + fmt(lo) + ", " + fmt(hi) + "] cubic ratios [" + fmt(clo) + ", " + fmt(chi) + "]");
}

inline void criterion_trace_identities(Checks& c, std::uint64_t seed) {
  Rng rng = make_rng(derive_seed(seed, 3, 0));
  int sub = 0;
  int super = 0;
  std::int64_t steps = 0;
  for (int i = 0; i < 100; ++i) {
    ExplorationConfig cfg;
    cfg.r = static_cast<int>(2 + uniform_below(rng, 4));
    cfg.n = static_cast<std::int64_t>(1 + uniform_below(rng, 2000));
    const bool supercritical = i % 2 == 1;
    const double lambda = supercritical ? 1.05 + 1.95 * uniform01(rng) : 0.3 + 0.65 * uniform01(rng);
    cfg.p = std::min(0.9, edge_probability(cfg.n, cfg.r, lambda));
    cfg.seed = derive_seed(seed, 3, static_cast<std::uint64_t>(i) + 1);
    if (binomial(cfg.n, cfg.r) <= 2e5 && i % 4 < 2) cfg.mode = EdgeMode::materialized;
    const auto trace = explore(cfg);
    steps += trace.length();
    (supercritical ? super : sub) += 1;
    c.expect(trace.complete, "incomplete trace");
    if (auto bad = find_trace_violation(trace)) {
      c.expect(false, *bad + " (n=" + std::to_string(cfg.n) + ",r=" + std::to_string(cfg.r) + ")");
    }
  }
  c.note(std::to_string(sub) + " subcritical + " + std::to_string(super) + " supercritical configs, " +
         std::to_string(steps) + " steps checked");
}

inline double l1_law_pvalue(std::int64_t n, int r, double p, EdgeMode mode, std::uint64_t seed, unsigned threads,
                            const std::vector<double>& law) {
  const std::uint64_t reps = 200000;
  const auto tables = StepTables::build(n, r, p);
  const auto l1 = parallel_map<std::int64_t>(reps, threads, [&](std::size_t i) {
    ExplorationConfig cfg;
    cfg.n = n;
    cfg.r = r;
    cfg.p = p;
    cfg.mode = mode;
    cfg.seed = derive_seed(seed, 4, i);
    return census(explore(cfg, tables), 0).L1;
  });
  std::vector<std::uint64_t> counts(law.size(), 0);
  for (auto v : l1) ++counts[static_cast<std::size_t>(v)];
  return chi_square_test(counts, law).pvalue;
}

inline void criterion_oracle(Checks& c, std::uint64_t seed, unsigned threads) {
  std::uint64_t k = 0;
  for (auto [n, r, p] : {std::tuple<std::int64_t, int, double>{5, 3, 0.15}, {8, 2, 0.2}}) {
    const auto exact = enumerate_all(n, r, p);
    c.expect(std::abs(exact.total() - 1.0) < 1e-10, "oracle mass " + fmt(exact.total(), 15));
    const auto law = exact.l1_law();
    for (auto mode : {EdgeMode::implicit, EdgeMode::materialized}) {
      const double pv = l1_law_pvalue(n, r, p, mode, derive_seed(seed, 4, ++k), threads, law);
      const std::string at = "(" + std::to_string(n) + "," + std::to_string(r) + "," + fmt(p) + "," + to_string(mode) + ")";
      c.expect(pv > 1e-3, "chi-square p=" + fmt(pv) + " " + at);
      c.note(at + " p=" + fmt(pv, 3));
    }
  }
  const std::vector<Vertex> none;
  const auto step = enumerate_step(8, 3, 0.1, none, none).moments();
  const auto m = conditional_moments(8, 3, 0.1, 1, 0, 7);
  const double diff = std::max({std::abs(step.mean_eta - m.mean_eta), std::abs(step.var_eta - m.var_eta),
                                std::abs(step.mean_xi - m.mean_xi), std::abs(step.var_xi - m.var_xi),
                                std::abs(step.cov_xi_eta - m.cov_xi_eta)});
  c.expect(diff < 1e-10, "step moments differ by " + fmt(diff));
  c.note("step moment gap " + fmt(diff, 3));
}

inline void criterion_clt(Checks& c, std::uint64_t seed, unsigned threads) {
  ExperimentPlan plan;
  plan.cells = {{300000, 3, 0.15, EdgeMode::implicit}};
  plan.replicates = 4000;
  plan.master_seed = derive_seed(seed, 5, 0);
  plan.threads = threads;
  const auto rep = run_experiment(plan).front();
  std::string row;
  for (const auto& v : clt_verdicts(rep)) {
    c.expect(v.pass, v.name + " " + fmt(v.value));
    row += (row.empty() ? "" : " ") + v.name + "=" + fmt(v.value);
  }
  c.note(row);
}

struct TrackedRun {
  double V1 = 0.0;
  double V2 = 0.0;
  double V12 = 0.0;
  double lindeberg1 = 0.0;
  double lindeberg2 = 0.0;
};

inline std::vector<TrackedRun> tracked_runs(std::int64_t n, int r, double eps, std::uint64_t reps,
                                            std::uint64_t seed, unsigned threads) {
  const double p = edge_probability(n, r, 1.0 + eps);
  const std::int64_t t1 = giant_time(n, r, 1.0 + eps);
  const auto tables = StepTables::build(n, r, p);
  const auto seq = drift_sequences(n, r, p, t1);
  return parallel_map<TrackedRun>(reps, threads, [&](std::size_t i) {
    ExplorationConfig cfg;
    cfg.n = n;
    cfg.r = r;
    cfg.p = p;
    cfg.seed = derive_seed(seed, 0, i);
    const auto d = decompose(explore(cfg, tables), seq, {t1, eps, 0.1});
    return TrackedRun{d.V1, d.V2, d.V12, d.lindeberg1, d.lindeberg2};
  });
}

inline void criterion_variance_sums(Checks& c, std::uint64_t seed, unsigned threads) {
  const std::int64_t n = 300000;
  const int r = 3;
  const double eps = 0.15;
  const auto runs = tracked_runs(n, r, eps, 100, derive_seed(seed, 6, 0), threads);
  double a = 0, b = 0, d = 0;
  const double nd = static_cast<double>(n);
  for (const auto& t : runs) {
    a += t.V1 / (2 * eps * nd);
    b += t.V2 / (10.0 / 3.0 / ((r - 1.0) * (r - 1.0)) * eps * eps * eps * nd);
    d += t.V12 / (2.0 / (r - 1.0) * eps * eps * nd);
  }
  a /= runs.size();
  b /= runs.size();
  d /= runs.size();
  c.expect(in_band(a, 0.9, 1.1), "V1 ratio " + fmt(a));
  c.expect(in_band(b, 0.7, 1.3), "V2 ratio " + fmt(b));
  c.expect(in_band(d, 0.8, 1.2), "V12 ratio " + fmt(d));
  c.note("V1=" + fmt(a) + " V2=" + fmt(b) + " V12=" + fmt(d));
}

inline std::vector<std::int64_t> grid_for(double eps, std::initializer_list<double> targets) {
  std::vector<std::int64_t> g;
  for (double t : targets) g.push_back(std::llround(t / (eps * eps)));
  return g;
}

inline void criterion_subcritical_tail(Checks& c, std::uint64_t seed, unsigned threads) {
  using namespace calibration;
  const double eps = 0.3;
  const auto grid = grid_for(eps, {3.0, 4.5, 6.0, 8.0});
  const auto rep = tail_subcritical(30000, 3, eps, grid, 20000, {derive_seed(seed, 7, 0), kTailC, threads, 0});
  std::string rows;
  for (const auto& row : rep.rows) {
    rows += " L=" + std::to_string(row.L) + ":" + fmt(row.p_hat) + "/" + fmt(row.bound, 3);
  }
  c.expect(rep.strictly_decreasing, "not strictly decreasing");
  c.expect(rep.below_bound, "a point exceeds the bound");
  c.expect(rep.measurable, "largest L has fewer than 5 exceedances");
  c.expect(rep.fit && rep.fit->r2 >= kTailFitMinR2, "log-affine fit r2 " + fmt(rep.fit ? rep.fit->r2 : 0));
  c.note("p_hat/bound" + rows + (rep.fit ? " slope=" + fmt(rep.fit->slope) + " r2=" + fmt(rep.fit->r2) : ""));
}

inline void criterion_supercritical_tail(Checks& c, std::uint64_t seed, unsigned threads) {
  using namespace calibration;
  const double eps = 0.2;
  const auto grid = grid_for(eps, {3.0, 4.5, 6.0, 8.0});
  const auto rep = tail_supercritical(100000, 3, eps, {2, 3, 4, 5}, grid, 2000,
                                      {derive_seed(seed, 8, 0), kTailC, threads, 0});
  const double at4 = rep.concentration[2].p_hat;
  c.expect(at4 <= kConcentrationMax, "Pr(|L1 - rho n| >= 4 sqrt(n/eps)) = " + fmt(at4));
  c.expect(rep.non_increasing, "exceedance not monotone in omega");
  c.expect(rep.l2.below_bound, "L2 tail exceeds bound");
  std::string conc;
  for (const auto& row : rep.concentration) conc += " w=" + fmt(row.omega) + ":" + fmt(row.p_hat);
  std::string l2;
  for (const auto& row : rep.l2.rows) l2 += " L=" + std::to_string(row.L) + ":" + fmt(row.p_hat) + "/" + fmt(row.bound, 3);
  c.note("concentration" + conc + "; L2" + l2);
}

inline void criterion_windows(Checks& c, std::uint64_t seed, unsigned threads) {
  using namespace calibration;
  const Cell cell{100000, 3, 0.2, EdgeMode::implicit};
  const auto rep = window_report(cell, 4.0, 1000, derive_seed(seed, 9, 0), threads);
  c.expect(rep.freq_E1 >= kWindowMinFreq, "freq E1 " + fmt(rep.freq_E1));
  c.expect(rep.freq_E2 >= kWindowMinFreq, "freq E2 " + fmt(rep.freq_E2));
  c.expect(rep.freq_E3 >= kWindowMinFreq, "freq E3 " + fmt(rep.freq_E3));
  c.expect(rep.duality_corr >= kDualityMinCorr, "duality corr " + fmt(rep.duality_corr));
  c.expect(rep.z_mismatches == 0, std::to_string(rep.z_mismatches) + " runs with Z + 1 != C_{t0+1}");
  c.note("E1=" + fmt(rep.freq_E1) + " E2=" + fmt(rep.freq_E2) + " E3=" + fmt(rep.freq_E3) +
         " corr=" + fmt(rep.duality_corr) + " Z-identity failures=" + std::to_string(rep.z_mismatches));
}

inline void criterion_martingale_shape(Checks& c, std::uint64_t seed, unsigned threads) {
  using namespace calibration;
  // Maximal inequality at t = t1.
  {
    const Cell cell{100000, 3, 0.2, EdgeMode::implicit};
    const auto rep = window_report(cell, 4.0, 1000, derive_seed(seed, 10, 0), threads);
    const double t1 = static_cast<double>(rep.t1);
    std::string row;
    for (double k : {2.0, 3.0, 4.0, 5.0, 6.0}) {
      const double y = k * std::sqrt(t1);
      const auto hits = std::count_if(rep.runs.begin(), rep.runs.end(),
                                      [y](const WindowRun& w) { return w.max_S_t1 >= y; });
      const double freq = static_cast<double>(hits) / static_cast<double>(rep.runs.size());
      const double bound = 2.0 * std::exp(-y * y / (2.0 * kMaximalC * t1));
      c.expect(freq <= bound, "max|S| exceedance " + fmt(freq) + " > " + fmt(bound) + " at y=" + fmt(k) + "sqrt(t1)");
      row += " " + fmt(k) + ":" + fmt(freq, 3) + "/" + fmt(bound, 3);
    }
    c.note("maxS freq/bound" + row + ";");
  }
  // Empirical c1 of the X / Xtilde gap.
  {
    std::string row;
    std::uint64_t k = 0;
    for (double lambda : {0.8, 1.2}) {
      const std::int64_t n = 100000;
      const double p = edge_probability(n, 3, lambda);
      const std::int64_t t1 = lambda > 1 ? giant_time(n, 3, lambda) : 0;
      const auto tables = StepTables::build(n, 3, p);
      const auto seq = drift_sequences(n, 3, p, t1);
      const auto gaps = parallel_map<double>(100, threads, [&](std::size_t i) {
        ExplorationConfig cfg;
        cfg.n = n;
        cfg.r = 3;
        cfg.p = p;
        cfg.seed = derive_seed(seed, 11 + k, i);
        const auto trace = explore(cfg, tables);
        return approx_gap(trace, decompose(trace, seq, {t1, lambda - 1.0, 0.1}));
      });
      ++k;
      const double worst = *std::max_element(gaps.begin(), gaps.end());
      c.expect(worst <= kGapMax, "c1 " + fmt(worst) + " at lambda=" + fmt(lambda));
      row += " lambda=" + fmt(lambda) + ":" + fmt(worst);
    }
    c.note("max c1" + row + ";");
  }
  // Realized Lindeberg sums.
  {
    const std::int64_t n = 300000;
    const double eps = 0.15;
    const auto runs = tracked_runs(n, 3, eps, 100, derive_seed(seed, 13, 0), threads);
    double l1 = 0.0;
    double l2 = 0.0;
    for (const auto& t : runs) {
      l1 += t.lindeberg1 / (eps * n);
      l2 += t.lindeberg2 / (eps * eps * eps * n);
    }
    l1 /= runs.size();
    l2 /= runs.size();
    c.expect(l1 < kLindebergMax, "lindeberg1 " + fmt(l1));
    c.expect(l2 < kLindebergMax, "lindeberg2 " + fmt(l2));
    c.note("lindeberg " + fmt(l1) + " " + fmt(l2));
  }
}

inline void criterion_determinism(Checks& c, std::uint64_t seed) {
  ExperimentPlan plan;
  plan.cells = {{20000, 3, 0.3, EdgeMode::implicit}, {10000, 2, -0.2, EdgeMode::implicit},
                {2000, 4, 0.5, EdgeMode::implicit}};
  plan.replicates = 300;
  plan.master_seed = derive_seed(seed, 14, 0);
  std::vector<std::string> outs;
  for (unsigned threads : {1u, 1u, 4u, 7u}) {
    plan.threads = threads;
    std::ostringstream o;
    write_mc_csv(o, run_experiment(plan));
    outs.push_back(o.str());
  }
  for (std::size_t i = 1; i < outs.size(); ++i) c.expect(outs[i] == outs[0], "mc output differs in invocation " + std::to_string(i));

  // Streaming merge against a single pass.
  Rng rng = make_rng(derive_seed(seed, 14, 1));
  std::vector<std::pair<double, double>> data;
  for (int i = 0; i < 20000; ++i) {
    const double a = 4e4 + 300 * normal_quantile((static_cast<double>(i) + 0.5) / 20000);
    data.push_back({a, 0.01 * a + uniform01(rng)});
  }
  RunningMoments2D whole;
  for (auto [a, b] : data) whole.push(a, b);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::size_t> cuts = {0, data.size()};
    for (int k = 0; k < 5; ++k) cuts.push_back(static_cast<std::size_t>(uniform_below(rng, data.size())));
    std::sort(cuts.begin(), cuts.end());
    RunningMoments2D merged;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      RunningMoments2D part;
      for (std::size_t i = cuts[k]; i < cuts[k + 1]; ++i) part.push(data[i].first, data[i].second);
      merged.merge(part);
    }
    auto rel = [](double x, double y) { return std::abs(x - y) / std::max(std::abs(y), 1e-300); };
    worst = std::max({worst, rel(merged.mean_x, whole.mean_x), rel(merged.mean_y, whole.mean_y),
                      rel(*merged.var_x(), *whole.var_x()), rel(*merged.var_y(), *whole.var_y()),
                      rel(*merged.cov(), *whole.cov())});
  }
  c.expect(worst <= 1e-9, "merge deviation " + fmt(worst));
  c.note("4 invocations identical=" + std::string(c.pass() ? "yes" : "no") + " merge rel dev=" + fmt(worst, 3));
}

}  // namespace detail

struct CriterionInfo {
  int id;
  const char* name;
  double limit_seconds;
};

inline const std::vector<CriterionInfo>& criteria() {
  static const std::vector<CriterionInfo> list = {
      {1, "fixed-points", 5},          {2, "series-asymptotics", 5},   {3, "trace-identities", 60},
      {4, "oracle-equivalence", 600},  {5, "bivariate-clt", 1800},     {6, "variance-sums", 600},
      {7, "subcritical-tail", 900},    {8, "supercritical-tail", 1200}, {9, "windows-duality", 600},
      {10, "martingale-shape", 600},   {11, "determinism", 120},
  };
  return list;
}

inline CriterionResult run_criterion(int id, const VerifyOptions& opt) {
  const unsigned threads = resolve_threads(opt.threads);
  const auto& list = criteria();
  const auto it = std::find_if(list.begin(), list.end(), [id](const CriterionInfo& s) { return s.id == id; });
  if (it == list.end()) throw std::invalid_argument("unknown criterion " + std::to_string(id));
  CriterionResult res;
  res.id = id;
  res.name = it->name;
  res.limit_seconds = it->limit_seconds;
  detail::Checks c;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case 1: detail::criterion_fixed_points(c); break;
      case 2: detail::criterion_series(c); break;
      case 3: detail::criterion_trace_identities(c, opt.seed); break;
      case 4: detail::criterion_oracle(c, opt.seed, threads); break;
      case 5: detail::criterion_clt(c, opt.seed, threads); break;
      case 6: detail::criterion_variance_sums(c, opt.seed, threads); break;
      case 7: detail::criterion_subcritical_tail(c, opt.seed, threads); break;
      case 8: detail::criterion_supercritical_tail(c, opt.seed, threads); break;
      case 9: detail::criterion_windows(c, opt.seed, threads); break;
      case 10: detail::criterion_martingale_shape(c, opt.seed, threads); break;
      case 11: detail::criterion_determinism(c, opt.seed); break;
    }
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(res.seconds < res.limit_seconds, "runtime " + detail::fmt(res.seconds) + "s over limit");
  res.pass = c.pass();
  res.detail = c.detail();
  return res;
}

inline std::string format_result(const CriterionResult& r) {
  std::ostringstream o;
  o << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << " (" << detail::fmt(r.seconds, 3) << "s): "
    << r.detail;
  return o.str();
}

inline std::vector<CriterionResult> run_acceptance(const VerifyOptions& opt,
                                                   const std::function<void(const CriterionResult&)>& on_result = {}) {
  std::vector<CriterionResult> out;
  for (const auto& info : criteria()) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), info.id) == opt.only.end()) continue;
    out.push_back(run_criterion(info.id, opt));
    if (on_result) on_result(out.back());
  }
  return out;
}

}  // namespace hyperwalk
