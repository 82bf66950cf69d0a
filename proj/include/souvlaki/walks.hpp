#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "souvlaki/electrical.hpp"
#include "souvlaki/graph.hpp"
#include "souvlaki/laplacian.hpp"
#include "souvlaki/parallel.hpp"
#include "souvlaki/philox.hpp"

namespace souvlaki {

struct WalkConfig {
  enum class Mode { Exact, MonteCarlo };
  std::uint64_t seed = 0;
  std::uint64_t trials = 10000;
  std::uint64_t max_steps = 1000000;
  Mode mode = Mode::Exact;

  void validate() const {
    if (trials < 1) throw DomainError("trials must be at least 1");
    if (max_steps < 1) throw DomainError("max_steps must be at least 1");
  }
};

/// Absorption probabilities onto the absorbing vertices, in id order.
struct HittingDistribution {
  std::vector<VertexId> targets;
  std::vector<double> probability;
  std::vector<double> sigma;        // binomial standard errors (Monte-Carlo only)
  double other = 0;                 // mass absorbed outside `targets`
  std::uint64_t truncated = 0;      // Monte-Carlo walks cut off at max_steps
  std::uint64_t trials = 0;         // zero in exact mode

  double total() const { return std::accumulate(probability.begin(), probability.end(), other); }
};

namespace detail {

inline std::vector<char> indicator(std::size_t n, std::span<const VertexId> vs) {
  std::vector<char> in(n, 0);
  for (auto v : vs) in.at(v) = 1;
  return in;
}

inline std::vector<VertexId> sorted_unique(std::span<const VertexId> vs) {
  std::vector<VertexId> out(vs.begin(), vs.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

/// Absorbing chain of the conductance-weighted walk, factorized once.
/// Absorption probabilities from s are sum_v G(s, v) c(v, a) / c(v), with
/// G = (I - Q)^{-1}; since L_I = D (I - Q) this is one solve per start.
class AbsorbingChain {
 public:
  AbsorbingChain(const Graph& g, std::span<const VertexId> absorbing, SolverOptions opt = {})
      : g_(&g), absorbing_(detail::sorted_unique(absorbing)) {
    if (absorbing_.empty()) throw DomainError("no absorbing vertices");
    const std::size_t n = g.num_vertices();
    group_.resize(n);
    std::iota(group_.begin(), group_.end(), std::int64_t{0});
    for (auto a : absorbing_) group_[a] = kGrounded;
    detail::exclude_unanchored(g, group_);
    std::size_t k = detail::compact_groups(group_);
    if (k > 0) lap_ = std::make_unique<ReducedLaplacian>(g, group_, k, opt);
    slot_.assign(n, -1);
    for (std::size_t i = 0; i < absorbing_.size(); ++i) slot_[absorbing_[i]] = static_cast<std::int64_t>(i);
  }

  const std::vector<VertexId>& absorbing() const { return absorbing_; }

  /// Probability of absorption at each absorbing vertex (in id order).
  std::vector<double> distribution(VertexId start) const {
    std::vector<double> p(absorbing_.size(), 0.0);
    if (slot_.at(start) >= 0) {
      p[slot_[start]] = 1.0;
      return p;
    }
    if (group_[start] == kExcluded) throw DomainError("absorbing set unreachable from " + g_->name(start));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lap_->size()));
    rhs[group_[start]] = 1.0;
    Eigen::VectorXd z = lap_->solve(rhs);
    for (const auto& e : g_->edges()) {
      auto a = group_[e.u], b = group_[e.v];
      if (a >= 0 && b == kGrounded) p[slot_[e.v]] += z[a] * e.conductance();
      if (b >= 0 && a == kGrounded) p[slot_[e.u]] += z[b] * e.conductance();
    }
    return p;
  }

 private:
  const Graph* g_;
  std::vector<VertexId> absorbing_;
  std::vector<std::int64_t> group_;
  std::vector<std::int64_t> slot_;
  std::unique_ptr<ReducedLaplacian> lap_;
};

/// Exact hitting distribution on `targets`; `extra` vertices also absorb and
/// their mass is reported in `other`.
inline HittingDistribution hitting_distribution(const Graph& g, VertexId start, std::span<const VertexId> targets,
                                                std::span<const VertexId> extra = {}, SolverOptions opt = {}) {
  if (targets.empty()) throw DomainError("empty target set");
  std::vector<VertexId> all(targets.begin(), targets.end());
  all.insert(all.end(), extra.begin(), extra.end());
  AbsorbingChain chain(g, all, opt);
  auto p = chain.distribution(start);
  auto is_target = detail::indicator(g.num_vertices(), targets);
  HittingDistribution h;
  for (std::size_t i = 0; i < chain.absorbing().size(); ++i) {
    VertexId a = chain.absorbing()[i];
    if (is_target[a]) {
      h.targets.push_back(a);
      h.probability.push_back(p[i]);
    } else {
      h.other += p[i];
    }
  }
  return h;
}

/// Per-vertex cumulative conductances for sampling walk steps.
class WalkTable {
 public:
  explicit WalkTable(const Graph& g) : g_(&g) {
    std::size_t total = 0;
    for (VertexId v = 0; v < g.num_vertices(); ++v) total += g.incident(v).size();
    cum_.reserve(total);
    start_.reserve(g.num_vertices() + 1);
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
      start_.push_back(cum_.size());
      double c = 0;
      for (auto inc : g.incident(v)) {
        c += g.edge(inc.edge).conductance();
        cum_.push_back(c);
      }
    }
    start_.push_back(cum_.size());
  }

  bool isolated(VertexId v) const { return start_[v] == start_[v + 1]; }

  VertexId step(VertexId v, double u) const { return step_incidence(v, u).neighbor; }

  Incidence step_incidence(VertexId v, double u) const {
    auto b = cum_.begin() + static_cast<std::ptrdiff_t>(start_[v]);
    auto e = cum_.begin() + static_cast<std::ptrdiff_t>(start_[v + 1]);
    double x = u * *(e - 1);
    auto it = std::upper_bound(b, e, x);
    if (it == e) --it;
    return g_->incident(v)[static_cast<std::size_t>(it - b)];
  }

 private:
  const Graph* g_;
  std::vector<double> cum_;
  std::vector<std::size_t> start_;
};

enum class WalkEnd { Absorbed, Isolated, MaxSteps };

inline const char* to_string(WalkEnd e) {
  switch (e) {
    case WalkEnd::Absorbed: return "absorbed";
    case WalkEnd::Isolated: return "isolated";
    case WalkEnd::MaxSteps: return "max-steps";
  }
  return "?";
}

struct TraceSummary {
  std::map<std::string, std::uint64_t> visits;  // positions X_1..X_steps on each mark
  WalkEnd end = WalkEnd::MaxSteps;
  std::optional<VertexId> absorbed_at;
  std::uint64_t steps = 0;
};

struct WalkResult {
  WalkEnd end;
  std::optional<VertexId> absorbed_at;
  std::uint64_t steps;
};

/// Runs one walk, calling visit(v) on X_1, X_2, ...; stops on `absorbing`
/// (empty = none) or after max_steps.
template <class Visit>
WalkResult run_walk(const WalkTable& table, Philox4x64& rng, VertexId start, std::uint64_t max_steps,
                    const std::vector<char>& absorbing, Visit&& visit) {
  if (!absorbing.empty() && absorbing[start]) return {WalkEnd::Absorbed, start, 0};
  if (table.isolated(start)) return {WalkEnd::Isolated, std::nullopt, 0};
  VertexId v = start;
  for (std::uint64_t s = 1; s <= max_steps; ++s) {
    v = table.step(v, rng.uniform());
    visit(v);
    if (!absorbing.empty() && absorbing[v]) return {WalkEnd::Absorbed, v, s};
  }
  return {WalkEnd::MaxSteps, std::nullopt, max_steps};
}

/// One walk with stream (seed, trial), counting visits to each mark.
inline TraceSummary simulate(const Graph& g, const WalkTable& table, VertexId start, std::uint64_t seed,
                             std::uint64_t trial, std::uint64_t max_steps, const std::vector<char>& absorbing,
                             const std::vector<std::string>& marks = {}) {
  std::vector<std::vector<char>> in;
  for (const auto& m : marks) in.push_back(detail::indicator(g.num_vertices(), g.mark(m)));
  std::vector<std::uint64_t> counts(marks.size(), 0);
  auto rng = trial_stream(seed, trial);
  auto r = run_walk(table, rng, start, max_steps, absorbing, [&](VertexId v) {
    for (std::size_t i = 0; i < in.size(); ++i) counts[i] += in[i][v];
  });
  TraceSummary t;
  for (std::size_t i = 0; i < marks.size(); ++i) t.visits[marks[i]] = counts[i];
  t.end = r.end;
  t.absorbed_at = r.absorbed_at;
  t.steps = r.steps;
  return t;
}

inline TraceSummary simulate(const Graph& g, VertexId start, const WalkConfig& cfg,
                             std::span<const VertexId> absorbing = {}, const std::vector<std::string>& marks = {}) {
  cfg.validate();
  WalkTable table(g);
  auto abs = absorbing.empty() ? std::vector<char>{} : detail::indicator(g.num_vertices(), absorbing);
  return simulate(g, table, start, cfg.seed, 0, cfg.max_steps, abs, marks);
}

inline constexpr std::size_t kTrialChunks = 64;

/// Monte-Carlo hitting distribution: trial i uses the stream (seed, i).
inline HittingDistribution hitting_distribution_mc(const Graph& g, VertexId start, std::span<const VertexId> targets,
                                                   std::span<const VertexId> extra, const WalkConfig& cfg) {
  cfg.validate();
  if (targets.empty()) throw DomainError("empty target set");
  WalkTable table(g);
  std::vector<VertexId> all(targets.begin(), targets.end());
  all.insert(all.end(), extra.begin(), extra.end());
  auto abs = detail::indicator(g.num_vertices(), all);
  auto tgt = detail::sorted_unique(targets);
  std::vector<std::int64_t> slot(g.num_vertices(), -1);
  for (std::size_t i = 0; i < tgt.size(); ++i) slot[tgt[i]] = static_cast<std::int64_t>(i);

  struct Tally {
    std::vector<std::uint64_t> hits;
    std::uint64_t other = 0, truncated = 0;
  };
  std::vector<Tally> tallies(kTrialChunks, Tally{std::vector<std::uint64_t>(tgt.size(), 0)});
  parallel_chunks(cfg.trials, kTrialChunks, [&](std::size_t b, std::size_t e, std::size_t c) {
    for (std::size_t i = b; i < e; ++i) {
      auto rng = trial_stream(cfg.seed, i);
      auto t = run_walk(table, rng, start, cfg.max_steps, abs, [](VertexId) {});
      if (t.end != WalkEnd::Absorbed) ++tallies[c].truncated;
      else if (slot[*t.absorbed_at] >= 0) ++tallies[c].hits[slot[*t.absorbed_at]];
      else ++tallies[c].other;
    }
  });
  HittingDistribution h;
  h.targets = tgt;
  h.trials = cfg.trials;
  std::vector<std::uint64_t> hits(tgt.size(), 0);
  std::uint64_t other = 0;
  for (const auto& t : tallies) {
    for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += t.hits[i];
    other += t.other;
    h.truncated += t.truncated;
  }
  const double n = static_cast<double>(cfg.trials);
  for (auto k : hits) {
    double p = static_cast<double>(k) / n;
    h.probability.push_back(p);
    h.sigma.push_back(std::sqrt(p * (1 - p) / n));
  }
  h.other = static_cast<double>(other) / n;
  return h;
}

/// P_v(walk reaches `ceiling` before returning to `skewer`), the first step
/// out of v taken unconditionally.
inline std::vector<double> roof_probabilities(const Graph& g, std::span<const VertexId> starts,
                                              std::span<const VertexId> skewer, std::span<const VertexId> ceiling,
                                              SolverOptions opt = {}) {
  std::vector<VertexId> bnd(skewer.begin(), skewer.end());
  bnd.insert(bnd.end(), ceiling.begin(), ceiling.end());
  auto in_ceiling = detail::indicator(g.num_vertices(), ceiling);
  std::vector<double> vals;
  for (auto v : bnd) vals.push_back(in_ceiling[v] ? 1.0 : 0.0);
  for (auto v : skewer)
    if (in_ceiling[v]) throw DomainError("skewer and ceiling intersect");
  auto h = harmonic_extension(g, bnd, {vals}, opt)[0];
  std::vector<double> out;
  for (auto v : starts) {
    double c = g.weighted_degree(v);
    if (c == 0) throw DomainError("start vertex is isolated");
    double p = 0;
    for (auto inc : g.incident(v)) {
      double hw = h[inc.neighbor];
      if (!std::isnan(hw)) p += g.edge(inc.edge).conductance() * hw;
    }
    out.push_back(p / c);
  }
  return out;
}

inline double roof_probability(const Graph& g, VertexId v, const std::string& skewer_mark = "S",
                               const std::string& ceiling_mark = "ceiling") {
  return roof_probabilities(g, std::span<const VertexId>(&v, 1), g.mark(skewer_mark), g.mark(ceiling_mark))[0];
}

/// P_v(hit `boundary` before returning to v) = 1 / (c(v) R_eff(v, boundary)).
inline double escape_probability(const Graph& g, VertexId v, std::span<const VertexId> boundary,
                                 SolverOptions opt = {}) {
  for (auto b : boundary)
    if (b == v) return 1.0;
  return 1.0 / (g.weighted_degree(v) * effective_resistance_to_set(g, v, boundary, opt));
}

struct EscapeRow {
  int radius;
  double probability;
};

/// Escape probability from mark "root" to mark "boundary" over nested truncations.
inline std::vector<EscapeRow> escape_profile(const std::function<Graph(int)>& builder, const std::vector<int>& radii,
                                             SolverOptions opt = {}) {
  std::vector<EscapeRow> rows;
  for (int r : radii) {
    Graph g = builder(r);
    rows.push_back({r, escape_probability(g, g.mark("root").at(0), g.mark("boundary"), opt)});
  }
  return rows;
}

/// Expected fraction of the positions X_1..X_T lying on `mark` (exact
/// distribution iteration; `absorbing` vertices hold their mass).
inline double occupation_exact(const Graph& g, VertexId start, const std::string& mark, std::uint64_t T,
                               std::span<const VertexId> absorbing = {}) {
  if (T < 1) throw DomainError("T must be at least 1");
  const std::size_t n = g.num_vertices();
  auto in = detail::indicator(n, g.mark(mark));
  auto abs = detail::indicator(n, absorbing);
  std::vector<double> p(n, 0.0), q(n);
  std::vector<double> deg(n);
  for (VertexId v = 0; v < n; ++v) deg[v] = g.weighted_degree(v);
  p[start] = 1.0;
  double acc = 0;
  for (std::uint64_t t = 0; t < T; ++t) {
    std::fill(q.begin(), q.end(), 0.0);
    for (VertexId v = 0; v < n; ++v) {
      if (p[v] == 0) continue;
      if (abs[v] || deg[v] == 0) {
        q[v] += p[v];
        continue;
      }
      double s = p[v] / deg[v];
      for (auto inc : g.incident(v)) q[inc.neighbor] += s * g.edge(inc.edge).conductance();
    }
    std::swap(p, q);
    for (VertexId v = 0; v < n; ++v)
      if (in[v]) acc += p[v];
  }
  return acc / static_cast<double>(T);
}

struct OccupationEstimate {
  double mean;
  double sigma;  // standard error over trials
};

inline OccupationEstimate occupation_mc(const Graph& g, VertexId start, const std::string& mark, std::uint64_t T,
                                        const WalkConfig& cfg, std::span<const VertexId> absorbing = {}) {
  cfg.validate();
  WalkTable table(g);
  auto abs = absorbing.empty() ? std::vector<char>{} : detail::indicator(g.num_vertices(), absorbing);
  auto in = detail::indicator(g.num_vertices(), g.mark(mark));
  std::vector<double> frac(cfg.trials);
  parallel_chunks(cfg.trials, kTrialChunks, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) {
      auto rng = trial_stream(cfg.seed, i);
      std::uint64_t on = 0;
      auto t = run_walk(table, rng, start, T, abs, [&](VertexId v) { on += in[v]; });
      // an absorbed walk stays put for the remaining steps
      if (t.end == WalkEnd::Absorbed && in[*t.absorbed_at]) on += T - t.steps;
      frac[i] = static_cast<double>(on) / static_cast<double>(T);
    }
  });
  double mean = std::accumulate(frac.begin(), frac.end(), 0.0) / static_cast<double>(cfg.trials);
  double var = 0;
  for (double f : frac) var += (f - mean) * (f - mean);
  var /= std::max<double>(1.0, static_cast<double>(cfg.trials) - 1);
  return {mean, std::sqrt(var / static_cast<double>(cfg.trials))};
}

/// max |c(v) P(v,u) - c(u) P(u,v)| over adjacent pairs.
inline double detailed_balance_residual(const Graph& g) {
  double worst = 0;
  for (const auto& e : g.edges()) {
    double cu = g.weighted_degree(e.u), cv = g.weighted_degree(e.v);
    double puv = e.conductance() / cu, pvu = e.conductance() / cv;
    worst = std::max(worst, std::abs(cu * puv - cv * pvu));
  }
  return worst;
}

}  // namespace souvlaki
