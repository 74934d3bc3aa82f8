#pragma once

// Random streams, seed derivation and an exact binomial sampler for huge
// trial counts with small success probability.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include <boost/math/distributions/binomial.hpp>

namespace hyperwalk {

using Rng = std::mt19937_64;

// splitmix64 finalizer: a bijective avalanche on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed of replicate `replicate` in cell `cell` of a plan seeded by `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell,
                                    std::uint64_t replicate) {
  return mix64(mix64(mix64(master) ^ cell) + replicate);
}

inline Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(mix64(seed)),
                    static_cast<std::uint32_t>(mix64(seed) >> 32)};
  return Rng(seq);
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng);
}

// Parameters of a Binomial(trials, p) law with the logarithms cached; trials
// may be as large as ~1e20 (it is carried as a real).
struct BinomialLaw {
  double trials = 0.0;
  double p = 0.0;
  double log1m_p = 0.0;

  BinomialLaw() = default;
  BinomialLaw(double n, double prob) : trials(n), p(prob), log1m_p(std::log1p(-prob)) {}

  double mean() const { return trials * p; }
};

inline constexpr double kInversionMeanLimit = 30.0;

namespace detail {

// Inversion by sequential search from k = 0. P(0) = exp(N log1p(-p)) and
// P(k+1) = P(k) (N-k)/(k+1) p/(1-p).
inline std::uint64_t binomial_from_zero(const BinomialLaw& law, Rng& rng) {
  const double odds = law.p / (1.0 - law.p);
  double u = uniform01(rng);
  double pk = std::exp(law.trials * law.log1m_p);
  std::uint64_t k = 0;
  while (u >= pk) {
    u -= pk;
    const double kd = static_cast<double>(k);
    if (kd + 1.0 > law.trials) break;
    pk *= (law.trials - kd) / (kd + 1.0) * odds;
    ++k;
    if (pk < 1e-300) break;  // u sits in the rounding slack of the total mass
  }
  return k;
}

// Inversion by a search that starts at the mode and walks outward,
// alternating sides; the pmf at the mode comes from boost's incomplete-beta
// based evaluation, neighbours from the ratio recurrence.
inline std::uint64_t binomial_from_mode(const BinomialLaw& law, Rng& rng) {
  const double n = std::floor(law.trials);
  const double mode = std::floor((n + 1.0) * law.p) > n ? n : std::floor((n + 1.0) * law.p);
  const boost::math::binomial_distribution<double> dist(n, law.p);
  const double pmode = boost::math::pdf(dist, mode);
  const double odds = law.p / (1.0 - law.p);

  double u = uniform01(rng);
  double lo = mode;
  double hi = mode;
  double plo = pmode;
  double phi = pmode;
  if (u < pmode) return static_cast<std::uint64_t>(mode);
  u -= pmode;
  for (;;) {
    const bool can_up = hi < n && phi > 0.0;
    const bool can_down = lo > 0.0 && plo > 0.0;
    if (!can_up && !can_down) return static_cast<std::uint64_t>(mode);
    if (can_up) {
      phi *= (n - hi) / (hi + 1.0) * odds;
      hi += 1.0;
      if (u < phi) return static_cast<std::uint64_t>(hi);
      u -= phi;
    }
    if (can_down) {
      plo *= lo / (n - lo + 1.0) / odds;
      lo -= 1.0;
      if (u < plo) return static_cast<std::uint64_t>(lo);
      u -= plo;
    }
  }
}

}  // namespace detail

// Exact Binomial(trials, p) variate (exact up to double rounding of the pmf).
inline std::uint64_t sample_binomial(const BinomialLaw& law, Rng& rng) {
  if (law.trials <= 0.0 || law.p <= 0.0) return 0;
  if (law.p >= 1.0) return static_cast<std::uint64_t>(law.trials);
  if (law.mean() <= kInversionMeanLimit) return detail::binomial_from_zero(law, rng);
  return detail::binomial_from_mode(law, rng);
}

inline std::uint64_t sample_binomial(double trials, double p, Rng& rng) {
  return sample_binomial(BinomialLaw(trials, p), rng);
}

}  // namespace hyperwalk
