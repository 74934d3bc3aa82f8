#pragma once

// Monte Carlo runner: replicate scheduling, per-cell aggregation, tail and
// window experiments. Replicate i of cell c is seeded by
// derive_seed(master, c, i) and results are merged in replicate order, so the
// output never depends on the worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hyperwalk/doob.hpp"
#include "hyperwalk/explore.hpp"
#include "hyperwalk/random.hpp"
#include "hyperwalk/stats.hpp"
#include "hyperwalk/theory.hpp"

namespace hyperwalk {

// Worker count: `requested` (0 = hardware), capped by HYPERWALK_THREADS.
inline unsigned resolve_threads(unsigned requested) {
  unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  if (const char* cap = std::getenv("HYPERWALK_THREADS")) {
    const long v = std::strtol(cap, nullptr, 10);
    if (v >= 1) t = std::min<unsigned>(t, static_cast<unsigned>(v));
  }
  return std::max(1u, t);
}

// out[i] = fn(i) for i in [0, count), evaluated on `threads` workers.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, unsigned threads, Fn fn) {
  std::vector<std::optional<T>> slots(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(count, 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct Cell {
  std::int64_t n = 0;
  int r = 3;
  double eps = 0.0;  // lambda = 1 + eps; negative for subcritical cells
  EdgeMode mode = EdgeMode::implicit;

  double lambda() const { return 1.0 + eps; }
  double p() const { return edge_probability(n, r, lambda()); }
};

struct ExperimentPlan {
  std::vector<Cell> cells;
  std::uint64_t replicates = 1;
  std::uint64_t master_seed = 0;
  double omega = 4.0;
  unsigned threads = 0;
  std::size_t reservoir_cap = 100000;

  void validate() const {
    if (cells.empty()) throw std::invalid_argument("plan has no cells");
    if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    if (!(omega > 0.0)) throw std::invalid_argument("omega must be > 0");
    for (const auto& c : cells) {
      detail::require_uniformity(c.r);
      if (c.n < 1) throw std::invalid_argument("n must be >= 1");
      if (!(c.lambda() > 0.0)) throw std::invalid_argument("lambda must be > 0");
      const double p = c.p();
      if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("cell edge probability outside (0, 1)");
    }
  }
};

struct Replicate {
  std::int64_t L1 = 0;
  std::int64_t N1 = 0;
  std::int64_t L2 = 0;
  bool tied = false;
  bool complete = false;
};

struct MCAggregate {
  RunningMoments2D ln;  // (L1, N1)
  RunningMoments2D z;   // (z1, z2), supercritical cells only
  std::vector<double> z1;
  std::vector<double> z2;
  std::uint64_t ties = 0;

  std::uint64_t count() const { return ln.count; }
};

struct CellReport {
  Cell cell;
  std::uint64_t replicates = 0;
  MCAggregate agg;
  std::optional<CltTargets> targets;
  std::optional<double> ks_z1;
  std::optional<double> ks_z2;
  std::vector<std::string> warnings;
};

inline double standardize_L1(const CltTargets& t, double L1) { return (L1 - t.mean_L1) / t.sd_L1; }
inline double standardize_N1(const CltTargets& t, double N1) { return (N1 - t.mean_N1) / t.sd_N1; }

// Stop rule used for CLT cells: first giant plus a margin of 2 t0.
inline StopRule clt_stop_rule(const Cell& c, double omega) {
  const std::int64_t t0 = initial_cutoff(c.n, c.eps, omega);
  return StopRule::after_first_giant(t0, 2 * t0);
}

inline Replicate run_replicate(const Cell& c, const StopRule& stop, std::uint64_t seed,
                               const std::shared_ptr<const StepTables>& tables) {
  ExplorationConfig cfg;
  cfg.n = c.n;
  cfg.r = c.r;
  cfg.p = c.p();
  cfg.seed = seed;
  cfg.mode = c.mode;
  cfg.stop = stop;
  const auto trace = explore(cfg, tables);
  const auto s = census(trace, stop.t0);
  return {s.L1, s.N1, s.L2, s.largest_tied, s.complete};
}

inline std::vector<CellReport> run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  const unsigned threads = resolve_threads(plan.threads);
  std::vector<CellReport> reports;
  for (std::size_t ci = 0; ci < plan.cells.size(); ++ci) {
    const Cell& c = plan.cells[ci];
    CellReport rep;
    rep.cell = c;
    rep.replicates = plan.replicates;
    const bool clt = c.eps > 0.0;
    const StopRule stop = clt ? clt_stop_rule(c, plan.omega) : StopRule::full();
    if (clt) {
      rep.targets = clt_targets(c.n, c.r, c.eps);
      if (c.eps * c.eps * c.eps * static_cast<double>(c.n) < 1.0) {
        rep.warnings.push_back("eps^3 n < 1: outside the CLT regime");
      }
    }
    const auto tables = StepTables::build(c.n, c.r, c.p());
    const auto results = parallel_map<Replicate>(plan.replicates, threads, [&](std::size_t i) {
      return run_replicate(c, stop, derive_seed(plan.master_seed, ci, i), tables);
    });
    for (const auto& res : results) {
      rep.agg.ln.push(static_cast<double>(res.L1), static_cast<double>(res.N1));
      if (res.tied) ++rep.agg.ties;
      if (rep.targets) {
        const double a = standardize_L1(*rep.targets, static_cast<double>(res.L1));
        const double b = standardize_N1(*rep.targets, static_cast<double>(res.N1));
        rep.agg.z.push(a, b);
        if (rep.agg.z1.size() < plan.reservoir_cap) {
          rep.agg.z1.push_back(a);
          rep.agg.z2.push_back(b);
        }
      }
    }
    if (rep.agg.z1.size() >= 100) {
      rep.ks_z1 = ks_distance_normal(rep.agg.z1);
      rep.ks_z2 = ks_distance_normal(rep.agg.z2);
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

struct TailRow {
  std::int64_t L = 0;
  std::uint64_t exceed = 0;
  std::uint64_t R = 0;
  double p_hat = 0.0;
  Interval wilson;
  double bound = 0.0;
};

struct TailReport {
  std::vector<TailRow> rows;
  std::optional<LinearFit> fit;  // log p_hat against L over rows with exceed > 0
  bool strictly_decreasing = false;
  bool below_bound = false;
  bool measurable = false;  // expected count at the largest L >= 5
  std::vector<std::string> notes;
};

// C (eps n / L) exp(-eps^2 L / C)
inline double tail_bound(double C, double eps, std::int64_t n, std::int64_t L) {
  const double e = std::abs(eps);
  return C * e * static_cast<double>(n) / static_cast<double>(L) *
         std::exp(-e * e * static_cast<double>(L) / C);
}

inline TailReport tail_rows(const std::vector<std::int64_t>& values, const std::vector<std::int64_t>& grid,
                            double eps, std::int64_t n, double C) {
  TailReport rep;
  const auto R = static_cast<std::uint64_t>(values.size());
  for (std::int64_t L : grid) {
    TailRow row;
    row.L = L;
    row.R = R;
    row.exceed = static_cast<std::uint64_t>(std::count_if(values.begin(), values.end(),
                                                          [L](std::int64_t v) { return v > L; }));
    row.p_hat = R ? static_cast<double>(row.exceed) / static_cast<double>(R) : 0.0;
    row.wilson = wilson_interval(row.exceed, R);
    row.bound = tail_bound(C, eps, n, L);
    rep.rows.push_back(row);
  }
  rep.strictly_decreasing = true;
  rep.below_bound = true;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& row = rep.rows[i];
    if (i > 0 && !(row.p_hat < rep.rows[i - 1].p_hat)) rep.strictly_decreasing = false;
    if (row.p_hat > row.bound) rep.below_bound = false;
    if (row.exceed > 0) {
      xs.push_back(static_cast<double>(row.L));
      ys.push_back(std::log(row.p_hat));
    }
  }
  if (xs.size() >= 2) rep.fit = fit_line(xs, ys);
  rep.measurable = !rep.rows.empty() && rep.rows.back().exceed >= 5;
  if (!rep.measurable) rep.notes.push_back("fewer than 5 exceedances at the largest L: grid beyond measurable range");
  return rep;
}

struct TailOptions {
  std::uint64_t master_seed = 0;
  double C = 10.0;
  unsigned threads = 0;
  std::uint64_t cell_index = 0;
};

// Pr(L1 > L) at p = (1 - eps)(r-2)! n^{-r+1}, eps > 0.
inline TailReport tail_subcritical(std::int64_t n, int r, double eps, const std::vector<std::int64_t>& grid,
                                   std::uint64_t R, const TailOptions& opt = {}) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("subcritical tail needs eps in (0, 1)");
  if (R < 1) throw std::invalid_argument("replicates must be >= 1");
  const Cell c{n, r, -eps, EdgeMode::implicit};
  const auto tables = StepTables::build(c.n, c.r, c.p());
  const auto results = parallel_map<Replicate>(R, resolve_threads(opt.threads), [&](std::size_t i) {
    return run_replicate(c, StopRule::full(), derive_seed(opt.master_seed, opt.cell_index, i), tables);
  });
  std::vector<std::int64_t> L1;
  for (const auto& res : results) L1.push_back(res.L1);
  return tail_rows(L1, grid, eps, n, opt.C);
}

struct ConcentrationRow {
  double omega = 0.0;
  std::uint64_t exceed = 0;
  std::uint64_t R = 0;
  double p_hat = 0.0;
  Interval wilson;
};

struct SupercriticalReport {
  std::vector<ConcentrationRow> concentration;
  bool non_increasing = false;
  TailReport l2;
};

// Pr(|L1 - rho n| >= omega sqrt(n/eps)) per omega and Pr(L2 > L) per L, from
// full explorations.
inline SupercriticalReport tail_supercritical(std::int64_t n, int r, double eps,
                                              const std::vector<double>& omega_grid,
                                              const std::vector<std::int64_t>& L_grid, std::uint64_t R,
                                              const TailOptions& opt = {}) {
  if (!(eps > 0.0)) throw std::invalid_argument("supercritical tail needs eps > 0");
  if (R < 1) throw std::invalid_argument("replicates must be >= 1");
  const Cell c{n, r, eps, EdgeMode::implicit};
  const auto tables = StepTables::build(c.n, c.r, c.p());
  const auto results = parallel_map<Replicate>(R, resolve_threads(opt.threads), [&](std::size_t i) {
    return run_replicate(c, StopRule::full(), derive_seed(opt.master_seed, opt.cell_index, i), tables);
  });
  const double centre = rho_r(r, 1.0 + eps) * static_cast<double>(n);
  const double scale = std::sqrt(static_cast<double>(n) / eps);
  SupercriticalReport rep;
  rep.non_increasing = true;
  for (double w : omega_grid) {
    ConcentrationRow row;
    row.omega = w;
    row.R = R;
    for (const auto& res : results) {
      if (std::abs(static_cast<double>(res.L1) - centre) >= w * scale) ++row.exceed;
    }
    row.p_hat = static_cast<double>(row.exceed) / static_cast<double>(R);
    row.wilson = wilson_interval(row.exceed, R);
    if (!rep.concentration.empty() && row.p_hat > rep.concentration.back().p_hat) rep.non_increasing = false;
    rep.concentration.push_back(row);
  }
  std::vector<std::int64_t> L2;
  for (const auto& res : results) L2.push_back(res.L2);
  rep.l2 = tail_rows(L2, L_grid, eps, n, opt.C);
  return rep;
}

// Per-run outcome of the window analysis.
struct WindowRun {
  bool E1 = false;
  bool E2 = false;
  bool E3 = false;
  bool Z_matches = false;  // Z + 1 = C_{t0+1}
  double T1_dev = 0.0;     // T1 - t1
  double predicted = 0.0;  // Xtilde_{t1} / (1 - lambda*)
  double max_S = 0.0;     // over t <= t1 + t0
  double max_S_t1 = 0.0;
  std::int64_t Z = 0;
  std::int64_t T0 = 0;
  std::optional<std::int64_t> T1;
};

struct WindowReport {
  Cell cell;
  double omega = 0.0;
  std::int64_t t0 = 0;
  std::int64_t t1 = 0;
  std::uint64_t R = 0;
  double freq_E1 = 0.0;
  double freq_E2 = 0.0;
  double freq_E3 = 0.0;
  double freq_all = 0.0;
  std::uint64_t z_mismatches = 0;
  double duality_corr = 0.0;
  std::vector<WindowRun> runs;
};

inline WindowRun window_run(const Cell& c, double omega, std::uint64_t seed,
                            const std::shared_ptr<const StepTables>& tables, const DriftSequences& seq,
                            double lambda_star) {
  const double nd = static_cast<double>(c.n);
  const std::int64_t t0 = initial_cutoff(c.n, c.eps, omega);
  const std::int64_t t1 = seq.t1;
  ExplorationConfig cfg;
  cfg.n = c.n;
  cfg.r = c.r;
  cfg.p = seq.p;
  cfg.seed = seed;
  cfg.mode = c.mode;
  cfg.stop = StopRule::after_first_giant(t0, 0, std::min(c.n, t1 + t0));
  const auto trace = explore(cfg, tables);
  const auto s = census(trace, t0);
  const auto d = decompose(trace, seq, {t1, c.eps, 0.1});

  WindowRun w;
  w.Z = s.Z;
  w.T0 = s.T0;
  w.T1 = s.T1;
  w.E1 = static_cast<double>(s.Z) <= std::sqrt(c.eps * nd) / omega &&
         static_cast<double>(s.T0) <= std::sqrt(nd / c.eps) / omega;
  w.max_S = d.max_abs_S(t1 + t0);
  w.max_S_t1 = d.max_abs_S(t1);
  w.E2 = w.max_S <= omega * std::sqrt(c.eps * nd);
  w.E3 = s.T1 && *s.T1 >= t1 - t0 && *s.T1 <= t1 + t0;
  w.Z_matches = s.C_after_cutoff && *s.C_after_cutoff == s.Z + 1;
  if (s.T1 && t1 <= d.length()) {
    const auto [dev, pred] = duality_diagnostic(d, s, lambda_star, t1);
    w.T1_dev = dev;
    w.predicted = pred;
  }
  return w;
}

inline WindowReport window_report(const Cell& c, double omega, std::uint64_t R, std::uint64_t master_seed,
                                  unsigned threads = 0, std::uint64_t cell_index = 0) {
  if (!(c.eps > 0.0)) throw std::invalid_argument("window report needs a supercritical cell");
  if (R < 1) throw std::invalid_argument("replicates must be >= 1");
  WindowReport rep;
  rep.cell = c;
  rep.omega = omega;
  rep.R = R;
  rep.t0 = initial_cutoff(c.n, c.eps, omega);
  rep.t1 = giant_time(c.n, c.r, c.lambda());
  const double p = c.p();
  const auto tables = StepTables::build(c.n, c.r, p);
  const auto seq = drift_sequences(c.n, c.r, p, rep.t1);
  const double ls = dual_lambda(c.lambda());
  rep.runs = parallel_map<WindowRun>(R, resolve_threads(threads), [&](std::size_t i) {
    return window_run(c, omega, derive_seed(master_seed, cell_index, i), tables, seq, ls);
  });
  std::uint64_t e1 = 0;
  std::uint64_t e2 = 0;
  std::uint64_t e3 = 0;
  std::uint64_t all = 0;
  std::vector<double> dev;
  std::vector<double> pred;
  for (const auto& w : rep.runs) {
    e1 += w.E1;
    e2 += w.E2;
    e3 += w.E3;
    all += w.E1 && w.E2 && w.E3;
    if (!w.Z_matches) ++rep.z_mismatches;
    if (w.T1) {
      dev.push_back(w.T1_dev);
      pred.push_back(w.predicted);
    }
  }
  const double Rd = static_cast<double>(R);
  rep.freq_E1 = static_cast<double>(e1) / Rd;
  rep.freq_E2 = static_cast<double>(e2) / Rd;
  rep.freq_E3 = static_cast<double>(e3) / Rd;
  rep.freq_all = static_cast<double>(all) / Rd;
  rep.duality_corr = dev.size() >= 2 ? pearson(dev, pred) : NAN;
  return rep;
}

}  // namespace hyperwalk
