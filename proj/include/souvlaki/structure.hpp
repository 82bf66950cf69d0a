#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "souvlaki/certificate.hpp"
#include "souvlaki/electrical.hpp"
#include "souvlaki/graph.hpp"
#include "souvlaki/graph_algorithms.hpp"
#include "souvlaki/hyperbolic.hpp"
#include "souvlaki/philox.hpp"
#include "souvlaki/s_bound.hpp"
#include "souvlaki/walks.hpp"

namespace souvlaki {

/// Copy of g with extra marks (vertex ids of g).
inline Graph with_marks(const Graph& g, const std::map<std::string, std::vector<VertexId>>& extra) {
  GraphBuilder b;
  for (VertexId v = 0; v < g.num_vertices(); ++v) b.add_vertex(g.label(v));
  for (const auto& e : g.edges()) b.add_edge(e.u, e.v, e.resistance, e.kind, e.multiplicity);
  for (const auto& [name, vs] : g.marks()) {
    b.declare_mark(name);
    for (auto v : vs) b.mark(name, v);
  }
  for (const auto& [name, vs] : extra) {
    b.declare_mark(name);
    for (auto v : vs) b.mark(name, v);
  }
  return std::move(b).build();
}

/// BFS spanning tree of a souvlaki truncation from its root; each vertex
/// hangs from its smallest-id neighbour one step closer to the root.
inline Graph skewer_tree(const Graph& host) {
  VertexId o = host.mark("root").at(0);
  auto dist = bfs(host, o);
  std::vector<EdgeId> edges;
  for (VertexId v = 0; v < host.num_vertices(); ++v) {
    if (v == o || dist[v] == kUnreachable) continue;
    std::optional<Incidence> best;
    for (auto inc : host.incident(v))
      if (dist[inc.neighbor] == dist[v] - 1 &&
          (!best || std::tie(inc.neighbor, inc.edge) < std::tie(best->neighbor, best->edge)))
        best = inc;
    edges.push_back(best->edge);
  }
  return edge_subgraph(host, edges);
}

/// Spanning tree from Wilson's algorithm rooted at the "root" mark
/// (loop-erased walks, conductance-weighted, seeded).
inline Graph wilson_tree(const Graph& host, std::uint64_t seed) {
  const std::size_t n = host.num_vertices();
  if (components(host) != std::vector<int>(n, 0)) throw DomainError("graph must be connected");
  WalkTable table(host);
  auto rng = trial_stream(seed, 0);
  std::vector<char> in_tree(n, 0);
  std::vector<Incidence> next(n);
  in_tree[host.mark("root").at(0)] = 1;
  for (VertexId i = 0; i < n; ++i) {
    for (VertexId u = i; !in_tree[u]; u = next[u].neighbor) next[u] = table.step_incidence(u, rng.uniform());
    for (VertexId u = i; !in_tree[u]; u = next[u].neighbor) in_tree[u] = 1;
  }
  std::vector<EdgeId> edges;
  VertexId o = host.mark("root").at(0);
  for (VertexId v = 0; v < n; ++v)
    if (v != o) edges.push_back(next[v].edge);
  return edge_subgraph(host, edges);
}

struct Quotient {
  Graph q;
  std::vector<std::optional<VertexId>> v;  // v[n] for n = 1..N+1 (index 0 unused)
  std::size_t pruned = 0;                  // leaves removed before contraction
};

/// Q for a subtree of a souvlaki truncation: leaves are pruned repeatedly
/// (root and boundary vertices are kept), then the remaining vertices of
/// each L:n are identified to v_n and those of the boundary to v_{N+1}.
/// Each v_n is marked "v:n".
inline Quotient quotient_Q(const Graph& host, const Graph& tree) {
  const int N = souvlaki_size(host);
  const std::size_t n = tree.num_vertices();
  if (n == 0) throw DomainError("empty tree");
  std::vector<VertexId> in_host(n);
  for (VertexId v = 0; v < n; ++v) {
    auto h = host.find(tree.label(v));
    if (!h) throw DomainError("tree vertex " + tree.name(v) + " is not in the host");
    in_host[v] = *h;
  }
  for (const auto& e : tree.edges()) {
    if (e.multiplicity != 1 || !host.find_edge(in_host[e.u], in_host[e.v]))
      throw DomainError("tree edge " + tree.name(e.u) + " -- " + tree.name(e.v) + " is not a host edge");
  }
  if (tree.num_edges() + 1 != n || components(tree) != std::vector<int>(n, 0))
    throw DomainError("not a tree");

  std::vector<char> keep(n, 0), alive(n, 1);
  for (const auto* name : {"root", "boundary"})
    for (auto h : host.mark(name))
      if (auto t = tree.find(host.label(h))) keep[*t] = 1;
  std::vector<std::size_t> deg(n, 0);
  for (const auto& e : tree.edges()) ++deg[e.u], ++deg[e.v];
  std::vector<VertexId> leaves;
  for (VertexId v = 0; v < n; ++v)
    if (deg[v] <= 1 && !keep[v]) leaves.push_back(v);
  Quotient out;
  while (!leaves.empty()) {
    VertexId v = leaves.back();
    leaves.pop_back();
    if (!alive[v]) continue;
    alive[v] = 0;
    ++out.pruned;
    for (auto inc : tree.incident(v))
      if (alive[inc.neighbor] && --deg[inc.neighbor] <= 1 && !keep[inc.neighbor]) leaves.push_back(inc.neighbor);
  }
  std::vector<VertexId> rest;
  for (VertexId v = 0; v < n; ++v)
    if (alive[v]) rest.push_back(v);
  Graph pruned = induced_subgraph(tree, rest);

  std::vector<std::vector<VertexId>> classes;
  std::vector<int> class_index;
  for (int k = 1; k <= N + 1; ++k) {
    const auto& mark = host.mark(k <= N ? "L:" + std::to_string(k) : std::string("boundary"));
    std::vector<VertexId> cls;
    for (auto h : mark)
      if (auto p = pruned.find(host.label(h))) cls.push_back(*p);
    if (cls.empty()) continue;
    classes.push_back(std::move(cls));
    class_index.push_back(k);
  }
  Graph q = identify(pruned, classes);
  std::map<std::string, std::vector<VertexId>> extra;
  out.v.assign(N + 2, std::nullopt);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    VertexId rep = *std::min_element(classes[c].begin(), classes[c].end());
    VertexId id = q.id(pruned.label(rep));
    extra["v:" + std::to_string(class_index[c])] = {id};
    out.v[class_index[c]] = id;
  }
  out.q = with_marks(q, extra);
  return out;
}

/// Q_n: the blocks of Q on the block-cut path from v_n to v_{n+1}.
inline Graph quotient_block(const Graph& q, int n) {
  VertexId a = q.mark("v:" + std::to_string(n)).at(0), b = q.mark("v:" + std::to_string(n + 1)).at(0);
  return edge_subgraph(q, blocks_between(q, a, b));
}

/// K' of a graph K: every maximal chain of degree-2 vertices becomes one edge.
struct SuppressedGraph {
  Graph base;
  std::vector<std::uint64_t> count;    // edges of K along each record of K'
  std::vector<double> length;          // summed resistance along the chain
  std::vector<char> black;             // count >= R
  std::vector<EdgeId> representative;  // first K edge of the chain
  std::vector<VertexId> origin;        // K vertex of each K' vertex
  std::uint64_t R = 0;
  std::size_t suppressed = 0;          // degree-2 vertices removed
  std::size_t loop_vertices = 0;       // of those, on chains closing at their start (dropped)

  std::size_t reconstructed_vertices() const { return base.num_vertices() + suppressed; }
};

inline SuppressedGraph suppress_degree2(const Graph& g, std::uint64_t R, std::span<const VertexId> keep = {}) {
  const std::size_t n = g.num_vertices();
  std::vector<char> kept(n, 0);
  for (auto v : keep) kept.at(v) = 1;
  for (VertexId v = 0; v < n; ++v) {
    auto inc = g.incident(v);
    bool chain = inc.size() == 2 && g.edge(inc[0].edge).multiplicity == 1 && g.edge(inc[1].edge).multiplicity == 1;
    if (!chain) kept[v] = 1;
  }
  if (n == 0 || components(g) != std::vector<int>(n, 0)) throw DomainError("graph must be connected");
  std::size_t kept_count = static_cast<std::size_t>(std::count(kept.begin(), kept.end(), 1));
  if (kept_count == 0) throw DomainError("graph is a bare cycle");
  if (kept_count < 2) throw DomainError("graph degenerates to one vertex after suppression");

  struct Record {
    VertexId u, v;
    double length;
    std::uint32_t m;
    EdgeKind kind;
    std::uint64_t count;
    EdgeId rep;
  };
  std::vector<Record> recs;
  std::vector<char> used(g.num_edges(), 0);
  SuppressedGraph s;
  s.R = R;
  for (VertexId u = 0; u < n; ++u) {
    if (!kept[u]) continue;
    for (auto start : g.incident(u)) {
      if (used[start.edge]) continue;
      used[start.edge] = 1;
      const auto& e0 = g.edge(start.edge);
      std::uint64_t count = 1;
      double len = e0.resistance;
      EdgeId last = start.edge;
      VertexId cur = start.neighbor;
      while (!kept[cur]) {
        auto inc = g.incident(cur);
        auto next = inc[0].edge == last ? inc[1] : inc[0];
        used[next.edge] = 1;
        ++count;
        len += g.edge(next.edge).resistance;
        last = next.edge;
        cur = next.neighbor;
      }
      s.suppressed += count - 1;
      if (cur == u) {
        s.loop_vertices += count - 1;
        continue;
      }
      recs.push_back({u, cur, len, count == 1 ? e0.multiplicity : 1u, count == 1 ? e0.kind : EdgeKind::Suppressed,
                      count, start.edge});
    }
  }
  GraphBuilder b;
  std::vector<std::int64_t> new_id(n, -1);
  for (VertexId v = 0; v < n; ++v)
    if (kept[v]) {
      new_id[v] = b.add_vertex(g.label(v));
      s.origin.push_back(v);
    }
  for (auto& r : recs) {
    r.u = static_cast<VertexId>(new_id[r.u]);
    r.v = static_cast<VertexId>(new_id[r.v]);
    if (r.u > r.v) std::swap(r.u, r.v);
    b.add_edge(r.u, r.v, r.length, r.kind, r.m);
  }
  detail::copy_marks(g, new_id, b);
  s.base = std::move(b).build();
  // the builder sorts edges by (u, v, kind, resistance, multiplicity); match that order
  std::stable_sort(recs.begin(), recs.end(), [](const Record& a, const Record& c) {
    return std::tie(a.u, a.v, a.kind, a.length, a.m) < std::tie(c.u, c.v, c.kind, c.length, c.m);
  });
  for (const auto& r : recs) {
    s.count.push_back(r.count);
    s.length.push_back(r.length);
    s.black.push_back(r.count >= R ? 1 : 0);
    s.representative.push_back(r.rep);
  }
  return s;
}

struct ResistanceFloor {
  double floor = 0;   // smallest chain resistance in the cut / strands in the cut
  double exact = 0;   // Laplacian R_eff(a, b)
  std::uint64_t R = 0;
  CutSet cut;
  std::uint64_t max_degree = 0;
  std::size_t branch_vertices = 0;  // degree > 2
  bool consistent = false;          // floor <= exact (1e-9)
};

/// Black-cut lower bound on R_eff(a, b). Every threshold R among the chain
/// counts is tried; edges of count < R are contracted around a and the
/// boundary of a's class, all black, is the cut.
inline ResistanceFloor resistance_floor(const Graph& g, VertexId a, VertexId b, std::uint64_t C) {
  if (a == b) throw DomainError("endpoints coincide");
  ResistanceFloor out;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    out.max_degree = std::max(out.max_degree, g.degree(v));
    if (g.degree(v) > C) throw DomainError("degree of " + g.name(v) + " exceeds C = " + std::to_string(C));
    if (g.degree(v) > 2 && ++out.branch_vertices > C)
      throw DomainError("more than C vertices of degree > 2 (at " + g.name(v) + ")");
  }
  std::array<VertexId, 2> ends{a, b};
  auto s = suppress_degree2(g, 1, ends);
  const auto& k = s.base;
  auto ka = k.id(g.label(a)), kb = k.id(g.label(b));
  std::vector<std::uint64_t> thresholds(s.count.begin(), s.count.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  std::optional<std::vector<EdgeId>> best_cut;
  for (auto R : thresholds) {
    std::vector<char> in(k.num_vertices(), 0);
    std::vector<VertexId> stack{ka};
    in[ka] = 1;
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      for (auto inc : k.incident(v))
        if (s.count[inc.edge] < R && !in[inc.neighbor]) {
          in[inc.neighbor] = 1;
          stack.push_back(inc.neighbor);
        }
    }
    if (in[kb]) continue;
    std::vector<EdgeId> cut;
    double shortest = std::numeric_limits<double>::infinity(), strands = 0;
    for (EdgeId e = 0; e < k.num_edges(); ++e)
      if (in[k.edge(e).u] != in[k.edge(e).v]) {
        cut.push_back(e);
        shortest = std::min(shortest, s.length[e]);
        strands += k.edge(e).multiplicity;
      }
    double f = shortest / strands;
    if (!best_cut || f > out.floor) {
      out.floor = f;
      out.R = R;
      best_cut = cut;
    }
  }
  out.cut.side_a = {g.name(a)};
  out.cut.side_b = {g.name(b)};
  for (auto e : *best_cut) {
    const auto& ed = g.edge(s.representative[e]);
    out.cut.edges.emplace_back(g.name(ed.u), g.name(ed.v));
  }
  out.exact = effective_resistance(g, a, b);
  out.consistent = out.floor <= out.exact + 1e-9;
  return out;
}

struct SEstimate {
  double m = 0;
  std::uint64_t C = 0;
  std::uint64_t R = 0;          // ceil(m C^2)
  std::uint64_t s = 1;          // R * C
  std::uint64_t trials = 0;     // random instances with dist(x, y) >= s
  double min_resistance = std::numeric_limits<double>::infinity();
  std::vector<std::tuple<int, int, std::uint64_t>> witness;  // K' edges (a, b, length) of the minimum; x = 0, y = 1
  bool holds = true;            // min_resistance >= m
};

/// s(m, C) from the black-cut argument, plus a seeded random search over
/// subdivided multigraphs (max degree <= C, at most C branch vertices,
/// dist(x, y) >= s) for the smallest R_eff(x, y).
inline SEstimate estimate_s(double m, std::uint64_t C, std::uint64_t budget, std::uint64_t seed = 0) {
  if (C < 1) throw DomainError("C must be positive");
  SEstimate out;
  out.m = m;
  out.C = C;
  out.s = static_cast<std::uint64_t>(constructive_s(m, static_cast<std::int64_t>(C)));
  out.R = m <= 0 ? 0 : out.s / C;
  for (std::uint64_t trial = 0; trial < budget; ++trial) {
    auto rng = trial_stream(seed, trial);
    auto pick = [&](std::uint64_t k) { return std::min(k - 1, static_cast<std::uint64_t>(rng.uniform() * static_cast<double>(k))); };
    const int nv = 2 + static_cast<int>(pick(C + 1));
    std::vector<std::uint64_t> deg(nv, 0);
    std::vector<std::tuple<int, int, std::uint64_t>> edges;
    const std::uint64_t attempts = 1 + pick(C * static_cast<std::uint64_t>(nv));
    for (std::uint64_t t = 0; t < attempts; ++t) {
      int a = static_cast<int>(pick(nv)), c = static_cast<int>(pick(nv));
      if (a == c || deg[a] >= C || deg[c] >= C) continue;
      ++deg[a], ++deg[c];
      edges.emplace_back(std::min(a, c), std::max(a, c), 1 + pick(out.s));
    }
    std::uint64_t branch = 0;
    for (auto d : deg) branch += d > 2;
    if (branch > C || edges.empty()) continue;
    // weighted distance x -> y (Bellman-Ford on a handful of vertices)
    constexpr auto inf = std::numeric_limits<std::uint64_t>::max();
    std::vector<std::uint64_t> dist(nv, inf);
    dist[0] = 0;
    for (int it = 0; it < nv; ++it)
      for (auto [a, c, l] : edges) {
        if (dist[a] != inf) dist[c] = std::min(dist[c], dist[a] + l);
        if (dist[c] != inf) dist[a] = std::min(dist[a], dist[c] + l);
      }
    if (dist[1] == inf) continue;
    if (dist[1] < out.s) {
      std::uint64_t scale = (out.s + dist[1] - 1) / dist[1];
      for (auto& [a, c, l] : edges) l *= scale;
    }
    ++out.trials;
    GraphBuilder b;
    for (int i = 0; i < nv; ++i) b.add_vertex(VertexLabel::skewer(i));
    for (auto [a, c, l] : edges) b.add_edge(static_cast<VertexId>(a), static_cast<VertexId>(c), static_cast<double>(l));
    Graph k = std::move(b).build();
    auto comp = components(k);
    std::vector<VertexId> live;
    for (VertexId v = 0; v < k.num_vertices(); ++v)
      if (comp[v] == comp[k.id(VertexLabel::skewer(0))]) live.push_back(v);
    Graph kc = induced_subgraph(k, live);
    double r = effective_resistance(kc, kc.id(VertexLabel::skewer(0)), kc.id(VertexLabel::skewer(1)));
    if (r < out.min_resistance) {
      out.min_resistance = r;
      out.witness = edges;
    }
  }
  out.holds = out.trials == 0 || out.min_resistance >= m;
  return out;
}

struct LevelPairDensity {
  int level = 0;                // the pair (level, level + 1)
  std::size_t size_lo = 0, size_hi = 0;
  std::uint64_t edges = 0;      // strands of H between the two levels
  std::uint64_t full_edges = 0; // size_lo * size_hi
  double gap_resistance = 0;    // resistance of one strand
  double contracted_resistance = std::numeric_limits<double>::infinity();  // both levels identified to a point each
  double c_tilde = 0;
  bool sparse = false;          // edges <= c~ (size_lo + size_hi)
  double floor = 0;             // gap / (c~ (size_lo + size_hi)); 2 / (3 c~) on a full gadget
  bool floor_holds = true;      // sparse implies contracted >= floor
};

inline LevelPairDensity level_bipartite_density(const Graph& h, int m, double c_tilde) {
  if (!(c_tilde > 0)) throw DomainError("c~ must be positive");
  const std::string lo = "level:" + std::to_string(m), hi = "level:" + std::to_string(m + 1);
  if (!h.has_mark(lo) || !h.has_mark(hi)) throw DomainError("graph lacks marks " + lo + " / " + hi);
  LevelPairDensity out;
  out.level = m;
  out.c_tilde = c_tilde;
  std::vector<int> side(h.num_vertices(), 0);
  for (auto v : h.mark(lo)) side[v] = 1;
  for (auto v : h.mark(hi)) side[v] = 2;
  out.size_lo = h.mark(lo).size();
  out.size_hi = h.mark(hi).size();
  out.full_edges = static_cast<std::uint64_t>(out.size_lo) * out.size_hi;
  double conductance = 0;
  for (const auto& e : h.edges())
    if (side[e.u] && side[e.v] && side[e.u] != side[e.v]) {
      out.edges += e.multiplicity;
      conductance += e.conductance();
      out.gap_resistance = std::max(out.gap_resistance, e.resistance);
    }
  if (conductance > 0) out.contracted_resistance = 1.0 / conductance;
  const double sizes = static_cast<double>(out.size_lo + out.size_hi);
  out.sparse = static_cast<double>(out.edges) <= c_tilde * sizes;
  out.floor = out.gap_resistance / (c_tilde * sizes);
  out.floor_holds = !out.sparse || out.contracted_resistance >= out.floor * (1 - 1e-12);
  return out;
}

}  // namespace souvlaki
