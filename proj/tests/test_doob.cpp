#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hyperwalk/doob.hpp"
#include "hyperwalk/oracle.hpp"
#include "hyperwalk/stats.hpp"
#include "generators.hpp"

using namespace hyperwalk;

namespace {

ExplorationConfig make_config(std::int64_t n, int r, double p, std::uint64_t seed) {
  ExplorationConfig c;
  c.n = n;
  c.r = r;
  c.p = p;
  c.seed = seed;
  return c;
}

void expect_moments_near(const ConditionalMoments& a, const ConditionalMoments& b, double tol) {
  EXPECT_NEAR(a.mean_eta, b.mean_eta, tol);
  EXPECT_NEAR(a.var_eta, b.var_eta, tol);
  EXPECT_NEAR(a.mean_xi, b.mean_xi, tol);
  EXPECT_NEAR(a.var_xi, b.var_xi, tol);
  EXPECT_NEAR(a.cov_xi_eta, b.cov_xi_eta, tol);
}

}  // namespace

TEST(ConditionalMoments, NoActiveVertices) {
  const auto m = conditional_moments(100, 3, 0.001, 5, 0, 95);
  EXPECT_EQ(m.mean_xi, 0.0);
  EXPECT_EQ(m.var_xi, 0.0);
  EXPECT_EQ(m.cov_xi_eta, 0.0);
  EXPECT_GT(m.mean_eta, 0.0);
}

TEST(ConditionalMoments, GraphsHaveIndependentCoverage) {
  const auto m = conditional_moments(100, 2, 0.01, 10, 20, 70);
  EXPECT_DOUBLE_EQ(m.pi2, m.pi1 * m.pi1);
  EXPECT_NEAR(m.cov_xi_eta, 0.0, 1e-15);
  EXPECT_NEAR(m.var_eta, 70 * m.pi1 * (1 - m.pi1), 1e-12);
}

TEST(ConditionalMoments, PartitionIsEnforced) {
  EXPECT_THROW(conditional_moments(100, 3, 0.001, 5, 10, 10), std::invalid_argument);
  EXPECT_THROW(conditional_moments(100, 3, 0.001, 0, 0, 100), std::invalid_argument);
  EXPECT_THROW(conditional_moments(100, 3, 0.001, 5, -1, 96), std::invalid_argument);
}

TEST(ConditionalMoments, InvariantsOverRandomStates) {
  test::Gen g(8);
  for (int i = 0; i < 500; ++i) {
    const std::int64_t n = g.uniform_int(5, 100000);
    const int r = static_cast<int>(g.uniform_int(2, 6));
    const double p = std::min(0.5, edge_probability(n, r, g.uniform_real(0.3, 3.0)));
    const std::int64_t t = g.uniform_int(1, n - 1);
    const std::int64_t a = g.uniform_int(0, n - t);
    const auto m = conditional_moments(n, r, p, t, a, n - t - a);
    EXPECT_GE(m.var_eta, -1e-9);
    EXPECT_GE(m.var_xi, -1e-9);
    EXPECT_LE(m.pi2, m.pi1 + 1e-15);
    EXPECT_LE(m.pi1, 1.0);
    EXPECT_LE(std::abs(m.cov_xi_eta), std::sqrt(std::max(0.0, m.var_xi * m.var_eta)) + 1e-9);
  }
}

TEST(ConditionalMoments, MatchStepEnumerationAtFreshState) {
  const std::vector<Vertex> none;
  const auto law = enumerate_step(8, 3, 0.1, none, none);
  EXPECT_NEAR(law.total(), 1.0, 1e-12);
  EXPECT_EQ(law.t, 1);
  const auto m = conditional_moments(8, 3, 0.1, 1, 0, 7);
  expect_moments_near(law.moments(), m, 1e-10);
  EXPECT_NEAR(m.mean_eta, 7.0 * (1.0 - std::pow(0.9, 6)), 1e-14);
}

TEST(ConditionalMoments, MatchStepEnumerationMidRun) {
  struct Case {
    std::int64_t n;
    int r;
    double p;
    std::vector<Vertex> explored;
    std::vector<Vertex> active;
  };
  const std::vector<Case> cases = {
      {8, 3, 0.2, {0}, {1, 2}},
      {8, 3, 0.15, {0, 1}, {2, 5, 7}},
      {9, 3, 0.1, {0, 3}, {}},
      {9, 2, 0.3, {0}, {4}},
      {7, 4, 0.05, {0}, {2, 3}},
      {10, 2, 0.25, {0, 1, 2}, {5, 6, 7, 8}},
  };
  for (const auto& c : cases) {
    const auto law = enumerate_step(c.n, c.r, c.p, c.explored, c.active);
    EXPECT_NEAR(law.total(), 1.0, 1e-12);
    const auto m = conditional_moments(c.n, c.r, c.p, law.t, law.active_excl, law.unseen_excl);
    expect_moments_near(law.moments(), m, 1e-10);
  }
}

TEST(ConditionalMoments, StepReplayMeansWithinThreeStandardErrors) {
  // Fresh state and a restored mid-run state, 1e5 replays each.
  struct Case {
    std::int64_t n;
    int r;
    double lambda;
    std::vector<Vertex> explored;
    std::vector<Vertex> active;
  };
  const std::vector<Case> cases = {{500, 3, 1.5, {}, {}}, {500, 3, 1.5, {0, 1, 2}, {3, 4, 5, 6, 7, 8, 9, 10}}};
  for (const auto& c : cases) {
    auto cfg = make_config(c.n, c.r, edge_probability(c.n, c.r, c.lambda), 1);
    const auto tables = StepTables::build(cfg.n, cfg.r, cfg.p);
    Rng rng = make_rng(77);
    RunningMoments2D eta_xi;
    const int reps = 100000;
    for (int i = 0; i < reps; ++i) {
      Explorer ex(cfg, tables);
      ex.restore(c.explored, c.active);
      const auto s = ex.step(rng);
      eta_xi.push(s.eta, s.xi);
    }
    const std::int64_t t = static_cast<std::int64_t>(c.explored.size()) + 1;
    const std::int64_t a = c.active.empty() ? 0 : static_cast<std::int64_t>(c.active.size()) - 1;
    const auto m = conditional_moments(c.n, c.r, cfg.p, t, a, c.n - t - a);
    EXPECT_NEAR(eta_xi.mean_x, m.mean_eta, 3.0 * std::sqrt(m.var_eta / reps));
    if (m.var_xi > 0) EXPECT_NEAR(eta_xi.mean_y, m.mean_xi, 3.0 * std::sqrt(m.var_xi / reps));
    EXPECT_NEAR(*eta_xi.var_x(), m.var_eta, 0.03 * m.var_eta);
  }
}

TEST(Decompose, TelescopesToX) {
  test::Gen g(31);
  int checked = 0;
  while (checked < 40) {
    const std::int64_t n = g.uniform_int(50, 3000);
    const int r = static_cast<int>(g.uniform_int(2, 5));
    const double lambda = g.coin() ? g.uniform_real(0.5, 0.95) : g.uniform_real(1.05, 2.5);
    const double p = edge_probability(n, r, lambda);
    if (!(binomial(n - 1, r - 2) * p < 0.5)) continue;
    const auto trace = explore(make_config(n, r, p, g.word()));
    const std::int64_t t1 = lambda > 1 ? giant_time(n, r, lambda) : n;
    const auto seq = drift_sequences(n, r, p, t1);
    const auto d = decompose(trace, seq, {t1, lambda - 1.0, 0.1});
    double sum = 0.0;
    double S = 0.0;
    for (std::int64_t t = 1; t <= trace.length(); ++t) {
      const auto i = static_cast<std::size_t>(t);
      sum += d.D[i] + d.Delta[i];
      ASSERT_NEAR(sum, static_cast<double>(trace.X(t)), 1e-6);
      ASSERT_NEAR(d.Delta[i], trace.steps[i - 1].eta - 1 - d.D[i], 1e-12);
      S += d.Delta[i] / seq.beta[i];
      ASSERT_NEAR(d.S[i], S, 1e-9 * (1 + std::abs(S)));
      ASSERT_NEAR(d.Xtilde[i], seq.x[i] + seq.beta[i] * d.S[i], 1e-9 * (1 + std::abs(d.Xtilde[i])));
    }
    EXPECT_GE(d.V1, 0.0);
    EXPECT_GE(d.V2, 0.0);
    ++checked;
  }
}

TEST(Decompose, ShatAccumulatesWeightedIncrements) {
  const std::int64_t n = 5000;
  const double p = edge_probability(n, 3, 1.3);
  const auto t1 = giant_time(n, 3, 1.3);
  const auto trace = explore(make_config(n, 3, p, 5));
  const auto seq = drift_sequences(n, 3, p, t1);
  const auto d = decompose(trace, seq, {t1, 0.3, 0.1});
  double shat = 0.0;
  for (std::int64_t t = 1; t <= trace.length(); ++t) {
    const auto i = static_cast<std::size_t>(t);
    const double gamma = t <= t1 ? seq.gamma[i] : 0.0;
    shat += gamma * d.Delta[i] + d.DeltaStar[i];
    ASSERT_NEAR(d.Shat[i], shat, 1e-9 * (1 + std::abs(shat)));
    ASSERT_NEAR(d.DeltaStar[i], trace.steps[i - 1].xi - d.Dstar[i], 1e-12);
  }
}

TEST(Decompose, RejectsMismatchedSequences) {
  const auto trace = explore(make_config(1000, 3, edge_probability(1000, 3, 1.2), 1));
  const auto seq = drift_sequences(1000, 3, edge_probability(1000, 3, 1.3), 100);
  EXPECT_THROW(decompose(trace, seq, {100, 0.2, 0.1}), std::invalid_argument);
  const auto ok = drift_sequences(1000, 3, edge_probability(1000, 3, 1.2), 100);
  EXPECT_THROW(decompose(trace, ok, {200, 0.2, 0.1}), std::invalid_argument);
}

TEST(Martingale, IncrementsHaveMeanZero) {
  const std::int64_t n = 2000;
  const int r = 3;
  const double p = edge_probability(n, r, 1.4);
  const auto seq = drift_sequences(n, r, p, 0);
  const auto tables = StepTables::build(n, r, p);
  const std::size_t checkpoints[] = {1, 5, 20, 100};
  std::vector<RunningMoments2D> delta(4);
  std::vector<RunningMoments2D> S(4);
  test::Gen g(12);
  for (int rep = 0; rep < 3000; ++rep) {
    const auto trace = explore(make_config(n, r, p, g.word()), tables);
    const auto d = decompose(trace, seq, {0, 0.4, 0.1});
    for (int k = 0; k < 4; ++k) {
      delta[k].push(d.Delta[checkpoints[k]], 0.0);
      S[k].push(d.S[checkpoints[k]], 0.0);
    }
  }
  for (int k = 0; k < 4; ++k) {
    EXPECT_LE(std::abs(delta[k].mean_x), 3.0 * std::sqrt(*delta[k].var_x() / 3000)) << checkpoints[k];
    EXPECT_LE(std::abs(S[k].mean_x), 3.0 * std::sqrt(*S[k].var_x() / 3000)) << checkpoints[k];
  }
}

TEST(Martingale, ZetaExpectationAtFirstStep) {
  const std::int64_t n = 200;
  const int r = 3;
  const double p = edge_probability(n, r, 2.0);
  const auto cfg = make_config(n, r, p, 1);
  const auto tables = StepTables::build(n, r, p);
  Rng rng = make_rng(4);
  RunningMoments2D z;
  for (int i = 0; i < 100000; ++i) {
    Explorer ex(cfg, tables);
    z.push(ex.step(rng).zeta, 0.0);
  }
  const double bound = binomial(n - 1, r - 1) * (r - 1) * binomial(n - 2, r - 2) * p * p;
  EXPECT_LE(z.mean_x, bound + 3.0 * std::sqrt(*z.var_x() / 100000));
}

TEST(ApproxGap, FiniteWhenOneComponentCoversEverything) {
  // Dense enough that the first component absorbs all vertices.
  const std::int64_t n = 300;
  const double p = 0.5 / binomial(n - 1, 1) * 0.9;
  const auto trace = explore(make_config(n, 3, p, 3));
  const auto seq = drift_sequences(n, 3, p, 0);
  const auto d = decompose(trace, seq, {0, 1.0, 0.1});
  const double c1 = approx_gap(trace, d);
  EXPECT_TRUE(std::isfinite(c1));
  EXPECT_GE(c1, 0.0);
}

TEST(Duality, ZeroPredictionAndMissingT1) {
  DoobTrace d;
  d.S.assign(11, 0.0);
  d.Xtilde.assign(11, 0.0);
  Census s;
  s.T1 = 12;
  const auto [dev, pred] = duality_diagnostic(d, s, 0.5, 10);
  EXPECT_EQ(dev, 2.0);
  EXPECT_EQ(pred, 0.0);
  Census missing;
  EXPECT_THROW(duality_diagnostic(d, missing, 0.5, 10), std::runtime_error);
}
