#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hyperwalk/explore.hpp"
#include "hyperwalk/oracle.hpp"
#include "hyperwalk/stats.hpp"

using namespace hyperwalk;

TEST(EnumerateAll, TriangleGraphs) {
  const auto law = enumerate_all(3, 2, 0.5).l1_law();
  EXPECT_NEAR(law[3], 0.5, 1e-15);
  EXPECT_NEAR(law[2], 0.375, 1e-15);
  EXPECT_NEAR(law[1], 0.125, 1e-15);
}

TEST(EnumerateAll, CompleteHypergraphAtom) {
  for (auto [n, r] : {std::pair<std::int64_t, int>{5, 3}, {6, 2}, {6, 4}}) {
    const auto d = enumerate_all(n, r, 1.0);
    ASSERT_EQ(d.support.size(), 1u);
    const auto& o = d.support[0];
    EXPECT_EQ(o.L1, n);
    EXPECT_EQ(o.N1, 1 + (r - 1) * static_cast<std::int64_t>(binomial(n, r)) - n);
    EXPECT_DOUBLE_EQ(o.probability, 1.0);
  }
}

TEST(EnumerateAll, EmptyHypergraphAtom) {
  const auto d = enumerate_all(4, 3, 0.0);
  ASSERT_EQ(d.support.size(), 1u);
  EXPECT_EQ(d.support[0].L1, 1);
  EXPECT_EQ(d.support[0].L2, 1);
  EXPECT_EQ(d.support[0].N1, 0);
}

TEST(EnumerateAll, FewerVerticesThanR) {
  const auto d = enumerate_all(2, 3, 0.4);
  ASSERT_EQ(d.support.size(), 1u);
  EXPECT_EQ(d.support[0].L1, 1);
}

TEST(EnumerateAll, FrozenLaws) {
  // Independent brute force (union-find over all edge subsets).
  const auto a = enumerate_all(5, 3, 0.15);
  EXPECT_NEAR(a.mean_L1(), 3.3111268262157227, 1e-12);
  const auto la = a.l1_law();
  EXPECT_NEAR(la[1], 0.19687440434072265, 1e-13);
  EXPECT_NEAR(la[2], 0.0, 1e-15);
  EXPECT_NEAR(la[3], 0.3474254194248047, 1e-13);
  EXPECT_NEAR(la[4], 0.20652471757177734, 1e-13);
  EXPECT_NEAR(la[5], 0.2491754586626953, 1e-13);

  const auto lb = enumerate_all(6, 2, 0.3).l1_law();
  const double expect[] = {0.0, 0.004747561509943, 0.075365808809445, 0.15550020335808,
                           0.1890676019169, 0.258418190821392, 0.31690063358424};
  for (int k = 0; k <= 6; ++k) EXPECT_NEAR(lb[k], expect[k], 1e-13) << k;
}

TEST(EnumerateAll, InvariantsAndSymmetry) {
  for (auto [n, r, p] : {std::tuple<std::int64_t, int, double>{5, 3, 0.15}, {6, 2, 0.2}, {6, 3, 0.07}, {5, 2, 0.5}}) {
    const auto d = enumerate_all(n, r, p);
    EXPECT_NEAR(d.total(), 1.0, 1e-10);
    for (const auto& o : d.support) {
      EXPECT_EQ((r - 1) * o.M1, o.L1 + o.N1 - 1);
      EXPECT_LE(o.L2, o.L1);
      EXPECT_GT(o.probability, 0.0);
    }
    // Complementation: the law at 1-p counted by edges equals the law at p
    // counted by non-edges; both must produce the all-edges atom with the
    // mirrored probability.
    const auto full = enumerate_all(n, r, 1.0 - p);
    const auto empty = enumerate_all(n, r, p);
    const double E = binomial(n, r);
    double p_full = 0.0;
    double p_empty_mirror = 0.0;
    for (const auto& o : full.support) {
      if (o.M1 == static_cast<std::int64_t>(E) && o.L1 == n) p_full += o.probability;
    }
    for (const auto& o : empty.support) {
      if (o.M1 == 0 && o.L1 == 1) p_empty_mirror += o.probability;
    }
    EXPECT_NEAR(p_full, p_empty_mirror, 1e-14);
    EXPECT_NEAR(p_full, std::pow(1.0 - p, E), 1e-14);
  }
}

TEST(EnumerateAll, SizeGuard) {
  EXPECT_THROW(enumerate_all(9, 2, 0.1), std::invalid_argument);
  EXPECT_THROW(enumerate_all(7, 3, 0.1), std::invalid_argument);
}

TEST(EnumerateStep, EmptyTestedFamily) {
  const std::vector<Vertex> explored = {0, 1};
  const std::vector<Vertex> none;
  const auto law = enumerate_step(4, 3, 0.3, explored, none);
  // v_3 = 2 and only vertex 3 remains: no (r-1)-set to test.
  ASSERT_EQ(law.support.size(), 1u);
  EXPECT_EQ(law.support[0].E, 0);
  EXPECT_EQ(law.support[0].eta, 0);
  EXPECT_DOUBLE_EQ(law.support[0].probability, 1.0);
}

TEST(EnumerateStep, SizeGuardAndPrefixChecks) {
  const std::vector<Vertex> none;
  EXPECT_THROW(enumerate_step(9, 3, 0.1, none, none), std::invalid_argument);
  const std::vector<Vertex> dup = {0, 0};
  EXPECT_THROW(enumerate_step(8, 3, 0.1, dup, none), std::invalid_argument);
}

TEST(EnumerateStep, ImplicitSamplerMatchesJointLaw) {
  const std::int64_t n = 8;
  const int r = 3;
  const double p = 0.1;
  const std::vector<Vertex> none;
  const auto law = enumerate_step(n, r, p, none, none);
  ExplorationConfig cfg;
  cfg.n = n;
  cfg.r = r;
  cfg.p = p;
  const auto tables = StepTables::build(n, r, p);
  Rng rng = make_rng(2718);
  std::vector<std::uint64_t> counts(law.support.size() + 1, 0);
  const int reps = 200000;
  for (int i = 0; i < reps; ++i) {
    Explorer ex(cfg, tables);
    const auto s = ex.step(rng);
    std::size_t k = 0;
    while (k < law.support.size() &&
           !(law.support[k].E == s.edge_count && law.support[k].eta == s.eta && law.support[k].xi == s.xi &&
             law.support[k].zeta == s.zeta)) {
      ++k;
    }
    ++counts[k];
  }
  EXPECT_EQ(counts.back(), 0u) << "sampler produced an outcome outside the exact support";
  std::vector<double> probs;
  for (const auto& o : law.support) probs.push_back(o.probability);
  probs.push_back(0.0);
  const auto chi = chi_square_test(counts, probs);
  EXPECT_GT(chi.pvalue, 1e-3) << chi.statistic;
}

namespace {

void check_l1_law(std::int64_t n, int r, double p, EdgeMode mode, int reps, std::uint64_t seed) {
  const auto law = enumerate_all(n, r, p).l1_law();
  ExplorationConfig cfg;
  cfg.n = n;
  cfg.r = r;
  cfg.p = p;
  cfg.mode = mode;
  const auto tables = StepTables::build(n, r, p);
  std::vector<std::uint64_t> counts(law.size(), 0);
  for (int i = 0; i < reps; ++i) {
    cfg.seed = derive_seed(seed, 0, static_cast<std::uint64_t>(i));
    ++counts[static_cast<std::size_t>(census(explore(cfg, tables), 0).L1)];
  }
  const auto chi = chi_square_test(counts, law);
  EXPECT_GT(chi.pvalue, 1e-3) << "mode=" << to_string(mode) << " chi2=" << chi.statistic;
}

}  // namespace

TEST(Samplers, ReproduceExactL1Law) {
  for (auto mode : {EdgeMode::implicit, EdgeMode::materialized}) {
    check_l1_law(5, 3, 0.15, mode, 50000, 1);
    check_l1_law(6, 2, 0.3, mode, 50000, 2);
  }
}
