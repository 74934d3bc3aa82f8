#pragma once

// Small deterministic generators for property tests.

#include <cstdint>
#include <random>
#include <vector>

#include "hyperwalk/explore.hpp"
#include "hyperwalk/theory.hpp"

namespace test {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  double uniform_real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin(double q = 0.5) { return std::bernoulli_distribution(q)(rng_); }
  std::uint64_t word() { return rng_(); }

  // A random exploration config: r in [2, 5], n in [1, max_n], lambda drawn
  // from both sides of 1, p clamped to <= 0.9.
  hyperwalk::ExplorationConfig config(std::int64_t max_n, bool allow_materialized = false) {
    hyperwalk::ExplorationConfig c;
    c.r = static_cast<int>(uniform_int(2, 5));
    c.n = uniform_int(1, max_n);
    const double lambda = coin() ? uniform_real(0.3, 0.95) : uniform_real(1.05, 3.0);
    c.p = std::min(0.9, hyperwalk::edge_probability(c.n, c.r, lambda));
    c.seed = word();
    if (allow_materialized && hyperwalk::binomial(c.n, c.r) <= 2e5 && coin()) {
      c.mode = hyperwalk::EdgeMode::materialized;
    }
    return c;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace test
