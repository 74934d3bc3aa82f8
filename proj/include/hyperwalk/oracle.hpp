#pragma once

// Exact laws at tiny scale by brute-force enumeration: every hypergraph on n
// vertices, or every outcome of one exploration step.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <vector>

#include "hyperwalk/doob.hpp"
#include "hyperwalk/explore.hpp"
#include "hyperwalk/theory.hpp"

namespace hyperwalk {

inline constexpr int kOracleEdgeLimit = 28;
inline constexpr int kOracleStepLimit = 22;

struct ExactOutcome {
  std::int64_t L1 = 0;
  std::int64_t N1 = 0;
  std::int64_t L2 = 0;
  std::int64_t M1 = 0;
  double probability = 0.0;
};

struct ExactDistribution {
  std::int64_t n = 0;
  int r = 0;
  double p = 0.0;
  std::vector<ExactOutcome> support;  // sorted by (L1, N1, L2, M1)

  double total() const {
    double s = 0.0;
    for (const auto& o : support) s += o.probability;
    return s;
  }
  // Marginal law of L1 on 0..n.
  std::vector<double> l1_law() const {
    std::vector<double> law(static_cast<std::size_t>(n + 1), 0.0);
    for (const auto& o : support) law[static_cast<std::size_t>(o.L1)] += o.probability;
    return law;
  }
  double mean_L1() const {
    double m = 0.0;
    for (const auto& o : support) m += static_cast<double>(o.L1) * o.probability;
    return m;
  }
};

namespace detail {

// p^e (1-p)^(E-e) for e in [0, E]; exact atoms at p = 0 and p = 1.
inline std::vector<double> subset_weights(int edges, double p) {
  std::vector<double> w(static_cast<std::size_t>(edges + 1));
  for (int e = 0; e <= edges; ++e) {
    w[static_cast<std::size_t>(e)] = std::pow(p, e) * std::pow(1.0 - p, edges - e);
  }
  return w;
}

inline unsigned hardware_workers(std::uint64_t jobs) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(hw, std::max<std::uint64_t>(jobs, 1)));
}

}  // namespace detail

inline ExactDistribution enumerate_all(std::int64_t n, int r, double p) {
  detail::require_uniformity(r);
  if (n < 1 || n > 16) throw std::invalid_argument("oracle needs 1 <= n <= 16");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  const double total_d = binomial(n, r);
  if (total_d > kOracleEdgeLimit) throw std::invalid_argument("oracle needs binom(n, r) <= 28");
  const int E = static_cast<int>(total_d);
  const int nv = static_cast<int>(n);

  // Vertex masks of the r-sets in colex order.
  std::vector<std::uint32_t> edge_mask(static_cast<std::size_t>(E));
  std::vector<Vertex> buf(static_cast<std::size_t>(r));
  for (int i = 0; i < E; ++i) {
    colex_unrank(static_cast<std::uint64_t>(i), n, r, buf);
    std::uint32_t m = 0;
    for (Vertex v : buf) m |= 1u << v;
    edge_mask[static_cast<std::size_t>(i)] = m;
  }
  // inside[S]: edges contained in vertex set S.
  std::vector<std::uint32_t> inside(std::size_t{1} << nv, 0);
  for (std::size_t S = 0; S < inside.size(); ++S) {
    for (int i = 0; i < E; ++i) {
      if ((edge_mask[static_cast<std::size_t>(i)] & ~static_cast<std::uint32_t>(S)) == 0) {
        inside[S] |= 1u << i;
      }
    }
  }
  // Adjacency of each vertex split over low and high halves of the edge mask.
  const int low_bits = E / 2;
  const int high_bits = E - low_bits;
  auto half_table = [&](int offset, int bits) {
    std::vector<std::uint32_t> table((std::size_t{1} << bits) * static_cast<std::size_t>(nv), 0);
    for (std::size_t s = 0; s < (std::size_t{1} << bits); ++s) {
      for (int b = 0; b < bits; ++b) {
        if (((s >> b) & 1u) == 0) continue;
        const std::uint32_t em = edge_mask[static_cast<std::size_t>(offset + b)];
        for (int v = 0; v < nv; ++v) {
          if ((em >> v) & 1u) table[s * static_cast<std::size_t>(nv) + static_cast<std::size_t>(v)] |= em;
        }
      }
    }
    return table;
  };
  const auto adj_low = half_table(0, low_bits);
  const auto adj_high = half_table(low_bits, high_bits);

  const std::size_t dimL = static_cast<std::size_t>(nv + 1);
  const std::size_t dimM = static_cast<std::size_t>(E + 1);
  const std::size_t cells = dimL * dimL * dimM * dimM;  // (L1, L2, M1, e)
  auto cell_of = [&](int L1, int L2, int M1, int e) {
    return ((static_cast<std::size_t>(L1) * dimL + static_cast<std::size_t>(L2)) * dimM +
            static_cast<std::size_t>(M1)) * dimM + static_cast<std::size_t>(e);
  };

  const std::uint64_t high_count = std::uint64_t{1} << high_bits;
  const unsigned workers = detail::hardware_workers(high_count);
  std::vector<std::vector<std::uint64_t>> counts(workers, std::vector<std::uint64_t>(cells, 0));
  auto work = [&](unsigned w) {
    auto& local = counts[w];
    std::vector<std::uint32_t> adj(static_cast<std::size_t>(nv));
    for (std::uint64_t hi = w; hi < high_count; hi += workers) {
      const std::uint32_t* ah = adj_high.data() + hi * static_cast<std::uint64_t>(nv);
      for (std::uint64_t lo = 0; lo < (std::uint64_t{1} << low_bits); ++lo) {
        const std::uint32_t* al = adj_low.data() + lo * static_cast<std::uint64_t>(nv);
        for (int v = 0; v < nv; ++v) adj[static_cast<std::size_t>(v)] = al[v] | ah[v] | (1u << v);
        const std::uint32_t mask = static_cast<std::uint32_t>(lo | (hi << low_bits));

        int L1 = 0;
        int L2 = 0;
        std::uint32_t best = 0;
        std::uint32_t left = nv == 32 ? ~0u : (1u << nv) - 1u;
        while (left != 0) {
          // Components are found in order of their smallest vertex, so the
          // strict comparison breaks ties toward the smallest vertex.
          std::uint32_t comp = left & (~left + 1u);
          std::uint32_t frontier = comp;
          while (frontier != 0) {
            const int v = std::countr_zero(frontier);
            frontier &= frontier - 1u;
            const std::uint32_t fresh = adj[static_cast<std::size_t>(v)] & ~comp;
            comp |= fresh;
            frontier |= fresh;
          }
          left &= ~comp;
          const int size = std::popcount(comp);
          if (size > L1) {
            L2 = L1;
            L1 = size;
            best = comp;
          } else {
            L2 = std::max(L2, size);
          }
        }
        const int M1 = std::popcount(mask & inside[best]);
        ++local[cell_of(L1, L2, M1, std::popcount(mask))];
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& th : pool) th.join();
  for (unsigned w = 1; w < workers; ++w) {
    for (std::size_t c = 0; c < cells; ++c) counts[0][c] += counts[w][c];
  }

  const auto weight = detail::subset_weights(E, p);
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t>, double> law;
  for (int L1 = 0; L1 <= nv; ++L1) {
    for (int L2 = 0; L2 <= nv; ++L2) {
      for (int M1 = 0; M1 <= E; ++M1) {
        double prob = 0.0;
        bool seen = false;
        for (int e = 0; e <= E; ++e) {
          const std::uint64_t k = counts[0][cell_of(L1, L2, M1, e)];
          if (k == 0) continue;
          seen = true;
          prob += static_cast<double>(k) * weight[static_cast<std::size_t>(e)];
        }
        if (!seen || prob == 0.0) continue;
        const std::int64_t N1 = 1 + static_cast<std::int64_t>(r - 1) * M1 - L1;
        law[{L1, N1, L2, M1}] += prob;
      }
    }
  }
  ExactDistribution out;
  out.n = n;
  out.r = r;
  out.p = p;
  for (const auto& [key, prob] : law) {
    out.support.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key), prob});
  }
  return out;
}

struct StepOutcome {
  std::int64_t E = 0;
  std::int64_t eta = 0;
  std::int64_t xi = 0;
  std::int64_t zeta = 0;
  double probability = 0.0;
};

struct StepLaw {
  std::int64_t t = 0;  // the step index being enumerated
  std::int64_t active_excl = 0;
  std::int64_t unseen_excl = 0;
  std::vector<StepOutcome> support;  // sorted by (E, eta, xi, zeta)

  double total() const {
    double s = 0.0;
    for (const auto& o : support) s += o.probability;
    return s;
  }
  ConditionalMoments moments() const {
    ConditionalMoments m;
    double e_eta2 = 0.0;
    double e_xi2 = 0.0;
    double e_xe = 0.0;
    for (const auto& o : support) {
      const double a = static_cast<double>(o.eta);
      const double b = static_cast<double>(o.xi);
      m.mean_eta += a * o.probability;
      m.mean_xi += b * o.probability;
      e_eta2 += a * a * o.probability;
      e_xi2 += b * b * o.probability;
      e_xe += a * b * o.probability;
    }
    m.var_eta = e_eta2 - m.mean_eta * m.mean_eta;
    m.var_xi = e_xi2 - m.mean_xi * m.mean_xi;
    m.cov_xi_eta = e_xe - m.mean_eta * m.mean_xi;
    return m;
  }
};

// Exact law of (E_t, eta_t, xi_t, zeta_t) for the step after the prefix
// v_1..v_{t-1} = explored with the given active set.
inline StepLaw enumerate_step(std::int64_t n, int r, double p, std::span<const Vertex> explored,
                              std::span<const Vertex> active) {
  detail::require_uniformity(r);
  if (n < 1 || n > 64) throw std::invalid_argument("step oracle needs 1 <= n <= 64");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  std::vector<std::uint8_t> state(static_cast<std::size_t>(n), 0);  // 0 unseen, 1 active, 2 explored
  for (Vertex v : explored) {
    if (v >= n || state[v] != 0) throw std::invalid_argument("bad explored prefix");
    state[v] = 2;
  }
  for (Vertex v : active) {
    if (v >= n || state[v] != 0) throw std::invalid_argument("bad active set");
    state[v] = 1;
  }
  if (static_cast<std::int64_t>(explored.size()) >= n) throw std::invalid_argument("no step left");

  Vertex vt = 0;
  if (!active.empty()) {
    vt = *std::min_element(active.begin(), active.end());
  } else {
    while (state[vt] != 0) ++vt;
  }
  std::vector<Vertex> pool;
  for (Vertex w = 0; w < n; ++w) {
    if (w != vt && state[w] != 2) pool.push_back(w);
  }

  StepLaw law;
  law.t = static_cast<std::int64_t>(explored.size()) + 1;
  law.active_excl = static_cast<std::int64_t>(active.size()) - (active.empty() ? 0 : 1);
  law.unseen_excl = static_cast<std::int64_t>(pool.size()) - law.active_excl;

  const auto m = static_cast<std::int64_t>(pool.size());
  const double tested_d = binomial(m, r - 1);
  if (tested_d > kOracleStepLimit) throw std::invalid_argument("step oracle needs binom(n-t, r-1) <= 22");
  const int K = static_cast<int>(tested_d);

  // Tested companion sets as index lists into pool.
  std::vector<std::vector<int>> sets;
  std::vector<Vertex> buf(static_cast<std::size_t>(r - 1));
  for (int i = 0; i < K; ++i) {
    colex_unrank(static_cast<std::uint64_t>(i), m, r - 1, buf);
    sets.emplace_back(buf.begin(), buf.end());
  }
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t>, std::uint64_t> counts;
  std::vector<int> touch(pool.size(), 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << K); ++mask) {
    std::fill(touch.begin(), touch.end(), 0);
    for (int i = 0; i < K; ++i) {
      if ((mask >> i) & 1u) {
        for (int j : sets[static_cast<std::size_t>(i)]) ++touch[static_cast<std::size_t>(j)];
      }
    }
    std::int64_t eta = 0;
    std::int64_t xi = 0;
    std::int64_t zeta = 0;
    for (std::size_t j = 0; j < pool.size(); ++j) {
      if (touch[j] == 0) continue;
      if (state[pool[j]] == 0) {
        ++eta;
      } else {
        ++xi;
      }
      zeta += static_cast<std::int64_t>(touch[j]) * (touch[j] - 1) / 2;
    }
    ++counts[{std::popcount(mask), eta, xi, zeta}];
  }
  const auto weight = detail::subset_weights(K, p);
  for (const auto& [key, k] : counts) {
    const double prob = static_cast<double>(k) * weight[static_cast<std::size_t>(std::get<0>(key))];
    if (prob == 0.0) continue;
    law.support.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key), prob});
  }
  return law;
}

}  // namespace hyperwalk
