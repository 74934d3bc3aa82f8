#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "hyperwalk/random.hpp"
#include "hyperwalk/stats.hpp"

using namespace hyperwalk;

TEST(Seeds, DeriveSeedIsDeterministicAndSpreads) {
  EXPECT_EQ(derive_seed(42, 0, 0), derive_seed(42, 0, 0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t c = 0; c < 10; ++c) {
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, c, i));
  }
  EXPECT_EQ(seen.size(), 10000u);
  EXPECT_NE(derive_seed(1, 0, 0), derive_seed(2, 0, 0));
}

TEST(Seeds, Mix64KnownValue) {
  // splitmix64 output for state 0 after one increment.
  EXPECT_EQ(mix64(0), 0xE220A8397B1DCDAFULL);
}

TEST(Uniform, RangeAndMean) {
  Rng rng = make_rng(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

namespace {

void check_binomial_law(double trials, double p, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  const int draws = 200000;
  const double mean = trials * p;
  const auto top = static_cast<std::size_t>(std::min(trials, mean + 12.0 * std::sqrt(mean + 1.0) + 10.0));
  std::vector<std::uint64_t> counts(top + 1, 0);
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t k = sample_binomial(trials, p, rng);
    ASSERT_LE(static_cast<double>(k), trials);
    ++counts[std::min<std::size_t>(k, top)];
  }
  // Reference pmf in log space; boost's pdf loses (1-p)^N once 1-p rounds to 1.
  std::vector<double> law(top + 1, 0.0);
  double log_choose = 0.0;
  double mass = 0.0;
  for (std::size_t k = 0; k < top; ++k) {
    const double kd = static_cast<double>(k);
    law[k] = std::exp(log_choose + kd * std::log(p) + (trials - kd) * std::log1p(-p));
    mass += law[k];
    log_choose += std::log(trials - kd) - std::log(kd + 1.0);
  }
  law[top] = std::max(0.0, 1.0 - mass);
  const auto chi = chi_square_test(counts, law);
  EXPECT_GT(chi.pvalue, 1e-3) << "trials=" << trials << " p=" << p << " chi2=" << chi.statistic;
}

}  // namespace

TEST(BinomialSampler, SmallMeanInversion) {
  check_binomial_law(21, 0.1, 3);
  check_binomial_law(4.5e10, 1.3e-11, 4);
  check_binomial_law(1e18, 2e-18, 5);
  check_binomial_law(1000, 0.02, 6);
}

TEST(BinomialSampler, ModeSearch) {
  check_binomial_law(1000, 0.3, 7);
  check_binomial_law(1e9, 1e-7, 8);
  check_binomial_law(80, 0.5, 9);
}

TEST(BinomialSampler, DegenerateCases) {
  Rng rng = make_rng(1);
  EXPECT_EQ(sample_binomial(0.0, 0.5, rng), 0u);
  EXPECT_EQ(sample_binomial(10.0, 0.0, rng), 0u);
  EXPECT_EQ(sample_binomial(10.0, 1.0, rng), 10u);
  for (int i = 0; i < 1000; ++i) EXPECT_LE(sample_binomial(3.0, 0.9, rng), 3u);
}

TEST(BinomialSampler, MeanAndVarianceAtHugeTrials) {
  Rng rng = make_rng(11);
  const double trials = 1e17;
  const double p = 5e-17;
  RunningMoments2D m;
  for (int i = 0; i < 200000; ++i) {
    const double k = static_cast<double>(sample_binomial(trials, p, rng));
    m.push(k, 0.0);
  }
  const double se = std::sqrt(5.0 / 200000);
  EXPECT_NEAR(m.mean_x, 5.0, 4 * se);
  EXPECT_NEAR(*m.var_x(), 5.0, 0.1);
}
