#pragma once

// The exploration process of a random r-uniform hypergraph H^r(n, p).
//
// Step t picks v_t (minimum-index active vertex, else minimum-index unseen
// vertex) and reveals every edge containing v_t but none of v_1..v_{t-1}.
// In implicit mode the revealed edges are sampled on the fly: their number is
// Binomial(binom(n-t, r-1), p) and their companion (r-1)-sets form a uniform
// subset of the tested sets. In materialized mode the whole hypergraph is
// drawn first and edges are read off an incidence index.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "hyperwalk/random.hpp"
#include "hyperwalk/theory.hpp"

namespace hyperwalk {

using Vertex = std::uint32_t;

inline constexpr double kMaterializeLimit = 1e8;

enum class EdgeMode { implicit, materialized };

inline const char* to_string(EdgeMode m) {
  return m == EdgeMode::implicit ? "implicit" : "explicit";
}

struct StopRule {
  enum class Kind { full, after_first_giant };
  Kind kind = Kind::full;
  // after_first_giant: T1 is the first record low of X after the cut-off t0;
  // stop once t >= T1 + margin and t >= min_steps.
  std::int64_t t0 = 0;
  std::int64_t margin = 0;
  std::int64_t min_steps = 0;

  static StopRule full() { return {}; }
  static StopRule after_first_giant(std::int64_t t0, std::int64_t margin,
                                    std::int64_t min_steps = 0) {
    return {Kind::after_first_giant, t0, margin, min_steps};
  }
};

struct ExplorationConfig {
  std::int64_t n = 1;
  int r = 2;
  double p = 0.0;
  std::uint64_t seed = 0;
  EdgeMode mode = EdgeMode::implicit;
  StopRule stop = StopRule::full();

  void validate() const {
    if (n < 1 || n > (std::int64_t{1} << 31)) throw std::invalid_argument("n must lie in [1, 2^31]");
    if (r < kMinUniformity || r > kMaxUniformity) throw std::invalid_argument("r must lie in [2, 10]");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0, 1)");
    if (mode == EdgeMode::materialized && binomial(n, r) > kMaterializeLimit) {
      throw std::invalid_argument("explicit mode needs binom(n, r) <= 1e8");
    }
    if (stop.kind == StopRule::Kind::after_first_giant && (stop.t0 < 0 || stop.margin < 0)) {
      throw std::invalid_argument("giant stop rule needs t0, margin >= 0");
    }
  }
};

struct StepRecord {
  std::int64_t t = 0;
  std::int32_t edge_count = 0;
  std::int32_t eta = 0;
  std::int32_t xi = 0;
  std::int32_t zeta = 0;
  std::int32_t nullity_inc = 0;
  std::int64_t A = 0;
  std::int64_t C = 0;
  std::int64_t X = 0;
  bool started_new_component = false;
};

struct ComponentRecord {
  std::int64_t index = 0;
  std::int64_t t_start = 0;  // the record-low time closing the previous component
  std::int64_t t_end = 0;
  std::int64_t vertices = 0;
  std::int64_t edges = 0;
  std::int64_t nullity = 0;
};

struct ExplorationTrace {
  ExplorationConfig config;
  std::vector<StepRecord> steps;
  std::vector<ComponentRecord> components;
  std::int64_t total_vertices = 0;  // over completed components
  std::int64_t total_edges = 0;     // all revealed edges
  std::int64_t total_nullity = 0;   // N_t at the last step
  bool complete = false;

  // X_t with X_0 = 0.
  std::int64_t X(std::int64_t t) const {
    return t == 0 ? 0 : steps[static_cast<std::size_t>(t - 1)].X;
  }
  std::int64_t length() const { return static_cast<std::int64_t>(steps.size()); }
};

// Flat storage of an r-uniform edge list; each edge sorted ascending.
struct EdgeList {
  int r = 2;
  std::vector<Vertex> flat;

  std::size_t size() const { return flat.size() / static_cast<std::size_t>(r); }
  std::span<const Vertex> edge(std::size_t i) const {
    return {flat.data() + i * static_cast<std::size_t>(r), static_cast<std::size_t>(r)};
  }
};

// The r-set with colex rank `rank`, written ascending into out.
inline void colex_unrank(std::uint64_t rank, std::int64_t n, int r, std::span<Vertex> out) {
  std::int64_t upper = n - 1;
  for (int i = r; i >= 1; --i) {
    // Largest c in [i-1, upper] with binom(c, i) <= rank.
    std::int64_t lo = i - 1;
    std::int64_t hi = upper;
    while (lo < hi) {
      const std::int64_t mid = lo + (hi - lo + 1) / 2;
      if (static_cast<std::uint64_t>(*binomial_exact(mid, i)) <= rank) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    out[static_cast<std::size_t>(i - 1)] = static_cast<Vertex>(lo);
    rank -= static_cast<std::uint64_t>(*binomial_exact(lo, i));
    upper = lo - 1;
  }
}

inline std::uint64_t colex_rank(std::span<const Vertex> sorted_set) {
  std::uint64_t rank = 0;
  for (std::size_t i = 0; i < sorted_set.size(); ++i) {
    rank += static_cast<std::uint64_t>(*binomial_exact(sorted_set[i], static_cast<int>(i + 1)));
  }
  return rank;
}

// Draws H^r(n, p) explicitly: the edge count is Binomial(binom(n, r), p) and
// the edges a uniform subset of that size, output in colex order.
inline EdgeList materialize(std::int64_t n, int r, double p, Rng& rng) {
  const double total_d = binomial(n, r);
  if (total_d > kMaterializeLimit) {
    throw std::invalid_argument("materialize needs binom(n, r) <= 1e8");
  }
  const auto total = static_cast<std::uint64_t>(total_d);
  const std::uint64_t count = sample_binomial(total_d, p, rng);

  // Floyd's subset sampler on whichever of the subset or its complement is smaller.
  const bool complement = count > total / 2;
  const std::uint64_t draw = complement ? total - count : count;
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(draw) * 2);
  for (std::uint64_t j = total - draw; j < total; ++j) {
    const std::uint64_t pick = uniform_below(rng, j + 1);
    if (!chosen.insert(pick).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> ranks;
  ranks.reserve(static_cast<std::size_t>(count));
  if (complement) {
    for (std::uint64_t k = 0; k < total; ++k) {
      if (!chosen.contains(k)) ranks.push_back(k);
    }
  } else {
    ranks.assign(chosen.begin(), chosen.end());
    std::sort(ranks.begin(), ranks.end());
  }
  EdgeList edges;
  edges.r = r;
  edges.flat.resize(ranks.size() * static_cast<std::size_t>(r));
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    colex_unrank(ranks[i], n, r, {edges.flat.data() + i * static_cast<std::size_t>(r),
                                  static_cast<std::size_t>(r)});
  }
  return edges;
}

// Per-(n, r, p) tables shared by every run of a cell.
struct StepTables {
  std::int64_t n = 0;
  int r = 0;
  double p = 0.0;
  double log1m_p = 0.0;
  std::vector<double> tested;  // tested[t] = binom(n - t, r - 1), t in [0, n]

  static std::shared_ptr<const StepTables> build(std::int64_t n, int r, double p) {
    auto tables = std::make_shared<StepTables>();
    tables->n = n;
    tables->r = r;
    tables->p = p;
    tables->log1m_p = std::log1p(-p);
    tables->tested.resize(static_cast<std::size_t>(n + 1));
    for (std::int64_t t = 0; t <= n; ++t) {
      tables->tested[static_cast<std::size_t>(t)] = binomial(n - t, r - 1);
    }
    return tables;
  }
};

// Mutable exploration state plus the step transition.
class Explorer {
 public:
  Explorer(const ExplorationConfig& config, std::shared_ptr<const StepTables> tables,
           const EdgeList* edges = nullptr)
      : config_(config), tables_(std::move(tables)), edges_(edges) {
    const auto n = static_cast<std::size_t>(config_.n);
    state_.assign(n, kUnseen);
    touch_.assign(n, 0);
    population_.resize(n);
    position_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      population_[v] = static_cast<Vertex>(v);
      position_[v] = static_cast<Vertex>(v);
    }
    if (edges_ != nullptr) build_incidence();
  }

  // Restores a mid-run state: `explored` are v_1..v_t in order, `active` the
  // current active set. Counters C and X are not reconstructed.
  void restore(std::span<const Vertex> explored, std::span<const Vertex> active) {
    for (Vertex v : explored) {
      state_[v] = kExplored;
      remove_from_population(v);
    }
    for (Vertex v : active) {
      state_[v] = kActive;
      heap_.push(v);
    }
    t_ = static_cast<std::int64_t>(explored.size());
    A_ = static_cast<std::int64_t>(active.size());
    C_ = A_ > 0 ? 1 : 0;
    X_ = A_ - C_;
  }

  bool done() const { return t_ >= config_.n || stopped_; }
  std::int64_t t() const { return t_; }
  std::int64_t active() const { return A_; }
  std::int64_t components_started() const { return C_; }
  std::int64_t nullity() const { return nullity_; }
  std::optional<std::int64_t> first_giant_end() const { return T1_; }

  // Companion (r-1)-sets revealed by the last step, flattened.
  std::span<const Vertex> last_companions() const { return companions_; }

  StepRecord step(Rng& rng) {
    StepRecord rec;
    rec.t = ++t_;

    Vertex v;
    const bool was_active = !heap_.empty();
    if (was_active) {
      v = heap_.top();
      heap_.pop();
      --A_;
    } else {
      while (state_[next_unseen_] != kUnseen) ++next_unseen_;
      v = static_cast<Vertex>(next_unseen_);
      ++C_;
      rec.started_new_component = true;
      comp_start_ = t_ - 1;
      comp_edges_ = 0;
      comp_nullity_ = 0;
    }
    state_[v] = kExplored;
    remove_from_population(v);

    companions_.clear();
    if (edges_ != nullptr) {
      reveal_materialized(v);
    } else {
      reveal_implicit(rng);
    }
    const int width = config_.r - 1;
    const auto k = static_cast<std::int32_t>(companions_.size() / static_cast<std::size_t>(width));

    std::int32_t eta = 0;
    std::int32_t xi = 0;
    std::int64_t zeta = 0;
    touched_.clear();
    for (Vertex w : companions_) {
      if (touch_[w]++ == 0) {
        touched_.push_back(w);
        if (state_[w] == kUnseen) {
          ++eta;
        } else {
          ++xi;
        }
      }
    }
    for (Vertex w : touched_) {
      const std::int64_t m = touch_[w];
      zeta += m * (m - 1) / 2;
      touch_[w] = 0;
      if (state_[w] == kUnseen) {
        state_[w] = kActive;
        heap_.push(w);
      }
    }

    A_ += eta;
    X_ = A_ - C_;
    const std::int32_t dn = width * k - eta;
    nullity_ += dn;
    comp_edges_ += k;
    comp_nullity_ += dn;
    total_edges_ += k;

    rec.edge_count = k;
    rec.eta = eta;
    rec.xi = xi;
    rec.zeta = static_cast<std::int32_t>(zeta);
    rec.nullity_inc = dn;
    rec.A = A_;
    rec.C = C_;
    rec.X = X_;

    if (A_ == 0) {
      ComponentRecord c;
      c.index = static_cast<std::int64_t>(closed_.size()) + 1;
      c.t_start = comp_start_;
      c.t_end = t_;
      c.vertices = t_ - comp_start_;
      c.edges = comp_edges_;
      c.nullity = comp_nullity_;
      closed_.push_back(c);
    }
    update_stop_rule();
    return rec;
  }

  std::vector<ComponentRecord>& closed_components() { return closed_; }
  std::int64_t total_edges() const { return total_edges_; }
  std::size_t revealed_edge_count() const { return revealed_count_; }

 private:
  static constexpr std::uint8_t kUnseen = 0;
  static constexpr std::uint8_t kActive = 1;
  static constexpr std::uint8_t kExplored = 2;

  void remove_from_population(Vertex v) {
    const Vertex slot = position_[v];
    const Vertex last = population_.back();
    population_[slot] = last;
    position_[last] = slot;
    population_.pop_back();
  }

  void reveal_implicit(Rng& rng) {
    const auto& tables = *tables_;
    const double trials = tables.tested[static_cast<std::size_t>(t_)];
    BinomialLaw law;
    law.trials = trials;
    law.p = tables.p;
    law.log1m_p = tables.log1m_p;
    const std::uint64_t k = sample_binomial(law, rng);
    if (k == 0) return;

    const auto width = static_cast<std::size_t>(config_.r - 1);
    const std::uint64_t m = population_.size();
    companions_.resize(static_cast<std::size_t>(k) * width);
    for (std::size_t e = 0; e < k; ++e) {
      std::span<Vertex> set(companions_.data() + e * width, width);
      for (;;) {
        draw_distinct(rng, m, set);
        std::sort(set.begin(), set.end());
        bool duplicate = false;
        for (std::size_t f = 0; f < e && !duplicate; ++f) {
          duplicate = std::equal(set.begin(), set.end(), companions_.begin() + f * width);
        }
        if (!duplicate) break;
      }
    }
  }

  // r-1 distinct vertices drawn uniformly from the unexplored population.
  void draw_distinct(Rng& rng, std::uint64_t m, std::span<Vertex> set) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      Vertex w;
      bool clash;
      do {
        w = population_[static_cast<std::size_t>(uniform_below(rng, m))];
        clash = std::find(set.begin(), set.begin() + static_cast<std::ptrdiff_t>(i), w) !=
                set.begin() + static_cast<std::ptrdiff_t>(i);
      } while (clash);
      set[i] = w;
    }
  }

  void build_incidence() {
    const auto n = static_cast<std::size_t>(config_.n);
    const std::size_t r = static_cast<std::size_t>(config_.r);
    offsets_.assign(n + 1, 0);
    for (Vertex v : edges_->flat) ++offsets_[v + 1];
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    incidence_.resize(edges_->flat.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t e = 0; e < edges_->size(); ++e) {
      for (std::size_t j = 0; j < r; ++j) {
        incidence_[fill[edges_->flat[e * r + j]]++] = static_cast<std::uint32_t>(e);
      }
    }
    revealed_.assign(edges_->size(), false);
  }

  void reveal_materialized(Vertex v) {
    for (std::size_t i = offsets_[v]; i < offsets_[v + 1]; ++i) {
      const std::uint32_t e = incidence_[i];
      if (revealed_[e]) continue;
      revealed_[e] = true;
      ++revealed_count_;
      for (Vertex w : edges_->edge(e)) {
        if (w != v) companions_.push_back(w);
      }
    }
  }

  void update_stop_rule() {
    const auto& rule = config_.stop;
    if (rule.kind != StopRule::Kind::after_first_giant) return;
    if (t_ <= rule.t0) {
      cutoff_min_ = std::min(cutoff_min_, X_);
    } else if (!T1_ && X_ < cutoff_min_) {
      T1_ = t_;
    }
    if (T1_ && t_ >= *T1_ + rule.margin && t_ >= rule.min_steps) stopped_ = true;
  }

  ExplorationConfig config_;
  std::shared_ptr<const StepTables> tables_;
  const EdgeList* edges_ = nullptr;

  std::vector<std::uint8_t> state_;
  std::vector<std::uint32_t> touch_;
  std::vector<Vertex> touched_;
  std::vector<Vertex> population_;
  std::vector<Vertex> position_;
  std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> heap_;
  std::size_t next_unseen_ = 0;
  std::vector<Vertex> companions_;

  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> incidence_;
  std::vector<bool> revealed_;
  std::size_t revealed_count_ = 0;

  std::int64_t t_ = 0;
  std::int64_t A_ = 0;
  std::int64_t C_ = 0;
  std::int64_t X_ = 0;
  std::int64_t nullity_ = 0;
  std::int64_t total_edges_ = 0;
  std::int64_t comp_start_ = 0;
  std::int64_t comp_edges_ = 0;
  std::int64_t comp_nullity_ = 0;
  std::vector<ComponentRecord> closed_;

  std::int64_t cutoff_min_ = 0;
  std::optional<std::int64_t> T1_;
  bool stopped_ = false;
};

// Runs the exploration to completion or until the stop rule fires.
inline ExplorationTrace explore(const ExplorationConfig& config,
                                std::shared_ptr<const StepTables> tables = nullptr) {
  config.validate();
  if (!tables) tables = StepTables::build(config.n, config.r, config.p);
  Rng rng = make_rng(config.seed);
  EdgeList edges;
  if (config.mode == EdgeMode::materialized) edges = materialize(config.n, config.r, config.p, rng);

  Explorer explorer(config, tables, config.mode == EdgeMode::materialized ? &edges : nullptr);
  ExplorationTrace trace;
  trace.config = config;
  trace.steps.reserve(static_cast<std::size_t>(
      config.stop.kind == StopRule::Kind::full ? config.n : std::min<std::int64_t>(config.n, 1 << 16)));
  while (!explorer.done()) trace.steps.push_back(explorer.step(rng));

  trace.components = std::move(explorer.closed_components());
  for (const auto& c : trace.components) trace.total_vertices += c.vertices;
  trace.total_edges = explorer.total_edges();
  trace.total_nullity = explorer.nullity();
  trace.complete = explorer.t() == config.n;
  return trace;
}

// Summary statistics of a trace relative to a cut-off t0.
struct Census {
  std::int64_t L1 = 0;
  std::int64_t L2 = 0;
  std::int64_t M1 = 0;
  std::int64_t N1 = 0;
  std::int64_t largest_index = 0;
  bool largest_tied = false;
  bool complete = false;       // trace ran to t = n
  bool L2_lower_bound = false;  // exploration stopped early

  std::int64_t t0 = 0;
  std::int64_t Z = 0;
  std::int64_t T0 = 0;
  std::optional<std::int64_t> T1;
  std::optional<std::int64_t> C_after_cutoff;  // C_{t0+1}
  std::optional<std::int64_t> giant_nullity;   // N_{T1} - N_{T0}
};

inline Census census(const ExplorationTrace& trace, std::int64_t t0) {
  if (t0 < 0) throw std::invalid_argument("census cut-off must be >= 0");
  Census s;
  s.complete = trace.complete;
  s.L2_lower_bound = !trace.complete;
  s.t0 = t0;

  for (const auto& c : trace.components) {
    if (c.vertices > s.L1) {
      s.L2 = s.L1;
      s.L1 = c.vertices;
      s.largest_index = c.index;
      s.largest_tied = false;
      s.M1 = c.edges;
      s.N1 = c.nullity;
    } else {
      if (c.vertices == s.L1) s.largest_tied = true;
      s.L2 = std::max(s.L2, c.vertices);
    }
  }

  const std::int64_t len = trace.length();
  std::int64_t low = 0;
  for (std::int64_t t = 1; t <= std::min(t0, len); ++t) low = std::min(low, trace.X(t));
  s.Z = -low;
  std::int64_t nullity = 0;
  std::int64_t nullity_at_T0 = 0;
  bool reached_low = false;
  for (std::int64_t t = 0; t <= len; ++t) {
    if (t > 0) nullity += trace.steps[static_cast<std::size_t>(t - 1)].nullity_inc;
    if (!reached_low && trace.X(t) == -s.Z) {
      reached_low = true;
      s.T0 = t;
      nullity_at_T0 = nullity;
    }
    if (trace.X(t) == -s.Z - 1) {
      s.T1 = t;
      s.giant_nullity = nullity - nullity_at_T0;
      break;
    }
  }
  if (t0 + 1 <= len) s.C_after_cutoff = trace.steps[static_cast<std::size_t>(t0)].C;
  return s;
}

// First violated trace identity, if any. Step identities always apply;
// whole-run identities only on complete traces.
inline std::optional<std::string> find_trace_violation(const ExplorationTrace& trace) {
  const auto& cfg = trace.config;
  const std::int64_t width = cfg.r - 1;
  std::int64_t prev_X = 0;
  for (const auto& s : trace.steps) {
    const std::string at = "t=" + std::to_string(s.t) + ": ";
    if (s.X != s.A - s.C) return at + "X != A - C";
    if (s.X - prev_X != s.eta - 1) return at + "X_t - X_{t-1} != eta - 1";
    if (s.eta > width * s.edge_count) return at + "eta > (r-1) E";
    if (s.nullity_inc != width * s.edge_count - s.eta) return at + "nullity_inc != (r-1) E - eta";
    if (s.xi > s.nullity_inc) return at + "xi > nullity_inc";
    if (s.nullity_inc > s.xi + s.zeta) return at + "nullity_inc > xi + zeta";
    if (s.A < 0 || s.eta < 0 || s.xi < 0 || s.zeta < 0) return at + "negative count";
    prev_X = s.X;
  }
  std::int64_t vertices = 0;
  std::int64_t edges = 0;
  for (const auto& c : trace.components) {
    if (c.nullity != 1 + width * c.edges - c.vertices) {
      return "component " + std::to_string(c.index) + ": nullity != 1 + (r-1) e - v";
    }
    vertices += c.vertices;
    edges += c.edges;
  }
  if (!trace.complete) return std::nullopt;
  if (vertices != cfg.n) return std::string("component orders do not sum to n");
  if (edges != trace.total_edges) return std::string("component sizes do not sum to e(H)");
  if (trace.X(cfg.n) != -static_cast<std::int64_t>(trace.components.size())) return std::string("X_n != -c(H)");
  const auto s = census(trace, 0);
  if (width * s.M1 != s.L1 + s.N1 - 1) return std::string("(r-1) M1 != L1 + N1 - 1");
  return std::nullopt;
}

}  // namespace hyperwalk
