#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <tuple>
#include <vector>

#include "souvlaki/graph.hpp"

namespace souvlaki {

inline constexpr std::int32_t kUnreachable = -1;

/// Unweighted distances from a set of sources; kUnreachable where none.
inline std::vector<std::int32_t> bfs(const Graph& g, std::span<const VertexId> sources) {
  std::vector<std::int32_t> dist(g.num_vertices(), kUnreachable);
  std::vector<VertexId> queue;
  queue.reserve(g.num_vertices());
  for (auto s : sources) {
    if (s >= g.num_vertices()) throw DomainError("bfs source out of range");
    if (dist[s] != 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    VertexId v = queue[head];
    for (auto inc : g.incident(v)) {
      if (dist[inc.neighbor] == kUnreachable) {
        dist[inc.neighbor] = dist[v] + 1;
        queue.push_back(inc.neighbor);
      }
    }
  }
  return dist;
}

inline std::vector<std::int32_t> bfs(const Graph& g, VertexId source) {
  return bfs(g, std::span<const VertexId>(&source, 1));
}

inline std::optional<std::uint32_t> distance(const Graph& g, VertexId u, VertexId v) {
  if (v >= g.num_vertices()) throw DomainError("vertex out of range");
  auto d = bfs(g, u)[v];
  if (d == kUnreachable) return std::nullopt;
  return static_cast<std::uint32_t>(d);
}

inline std::vector<VertexId> neighbors(const Graph& g, VertexId v) {
  if (v >= g.num_vertices()) throw DomainError("vertex out of range");
  std::vector<VertexId> out;
  for (auto inc : g.incident(v)) out.push_back(inc.neighbor);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<int> components(const Graph& g) {
  std::vector<int> comp(g.num_vertices(), -1);
  int next = 0;
  std::vector<VertexId> stack;
  for (VertexId s = 0; s < g.num_vertices(); ++s) {
    if (comp[s] != -1) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      for (auto inc : g.incident(v))
        if (comp[inc.neighbor] == -1) {
          comp[inc.neighbor] = next;
          stack.push_back(inc.neighbor);
        }
    }
    ++next;
  }
  return comp;
}

namespace detail {

inline void copy_marks(const Graph& g, const std::vector<std::int64_t>& new_id, GraphBuilder& b,
                       bool keep_empty = false) {
  for (const auto& [name, vs] : g.marks()) {
    bool any = false;
    for (auto v : vs)
      if (new_id[v] >= 0) {
        b.mark(name, static_cast<VertexId>(new_id[v]));
        any = true;
      }
    if (!any && keep_empty) b.declare_mark(name);
  }
}

}  // namespace detail

/// Subgraph induced on `vertices`; marks are restricted and dropped when empty.
inline Graph induced_subgraph(const Graph& g, std::span<const VertexId> vertices) {
  GraphBuilder b;
  std::vector<std::int64_t> new_id(g.num_vertices(), -1);
  for (auto v : vertices) {
    if (v >= g.num_vertices()) throw DomainError("vertex out of range");
    if (new_id[v] >= 0) continue;
    new_id[v] = b.add_vertex(g.label(v));
  }
  for (const auto& e : g.edges())
    if (new_id[e.u] >= 0 && new_id[e.v] >= 0)
      b.add_edge(static_cast<VertexId>(new_id[e.u]), static_cast<VertexId>(new_id[e.v]),
                 e.resistance, e.kind, e.multiplicity);
  detail::copy_marks(g, new_id, b);
  return std::move(b).build();
}

/// Subgraph formed by the given edge records and their endpoints.
inline Graph edge_subgraph(const Graph& g, std::span<const EdgeId> edges) {
  GraphBuilder b;
  std::vector<std::int64_t> new_id(g.num_vertices(), -1);
  std::vector<char> used(g.num_edges(), 0);
  for (auto ei : edges) {
    if (ei >= g.num_edges()) throw DomainError("edge out of range");
    if (used[ei]) continue;
    used[ei] = 1;
    const auto& e = g.edge(ei);
    for (auto x : {e.u, e.v})
      if (new_id[x] < 0) new_id[x] = b.add_vertex(g.label(x));
    b.add_edge(static_cast<VertexId>(new_id[e.u]), static_cast<VertexId>(new_id[e.v]),
               e.resistance, e.kind, e.multiplicity);
  }
  detail::copy_marks(g, new_id, b);
  return std::move(b).build();
}

/// Induced ball of the given radius; the sphere vertices that still have a
/// neighbour outside the ball are marked "boundary".
inline Graph ball(const Graph& g, VertexId center, std::uint32_t radius) {
  auto dist = bfs(g, center);
  std::vector<VertexId> inside;
  for (VertexId v = 0; v < g.num_vertices(); ++v)
    if (dist[v] != kUnreachable && static_cast<std::uint32_t>(dist[v]) <= radius)
      inside.push_back(v);
  GraphBuilder b;
  std::vector<std::int64_t> new_id(g.num_vertices(), -1);
  for (auto v : inside) new_id[v] = b.add_vertex(g.label(v));
  for (const auto& e : g.edges())
    if (new_id[e.u] >= 0 && new_id[e.v] >= 0)
      b.add_edge(static_cast<VertexId>(new_id[e.u]), static_cast<VertexId>(new_id[e.v]),
                 e.resistance, e.kind, e.multiplicity);
  detail::copy_marks(g, new_id, b);
  b.declare_mark("boundary");
  for (auto v : inside) {
    if (static_cast<std::uint32_t>(dist[v]) != radius) continue;
    for (auto inc : g.incident(v))
      if (new_id[inc.neighbor] < 0) {
        b.mark("boundary", static_cast<VertexId>(new_id[v]));
        break;
      }
  }
  return std::move(b).build();
}

/// Quotient by disjoint vertex classes. Each class becomes its smallest
/// label; vertices outside every class stay as they are. Parallel edges
/// between the same classes are merged into one record per
/// (resistance, kind) with multiplicities added; loops are dropped.
inline Graph identify(const Graph& g, const std::vector<std::vector<VertexId>>& classes,
                      bool require_connected = false) {
  const std::size_t n = g.num_vertices();
  std::vector<std::int64_t> cls(n, -1);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (classes[c].empty()) throw DomainError("empty contraction class");
    for (auto v : classes[c]) {
      if (v >= n) throw DomainError("contraction class vertex out of range");
      if (cls[v] >= 0) throw DomainError("contraction classes overlap at " + g.name(v));
      cls[v] = static_cast<std::int64_t>(c);
    }
  }
  if (require_connected) {
    std::vector<VertexId> stack;
    std::vector<char> seen(n, 0);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      std::size_t reached = 1;
      stack.assign(1, classes[c][0]);
      seen[classes[c][0]] = 1;
      while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        for (auto inc : g.incident(v))
          if (cls[inc.neighbor] == static_cast<std::int64_t>(c) && !seen[inc.neighbor]) {
            seen[inc.neighbor] = 1;
            ++reached;
            stack.push_back(inc.neighbor);
          }
      }
      if (reached != classes[c].size())
        throw DomainError("contraction class containing " + g.name(classes[c][0]) +
                          " is not connected");
    }
  }
  // Representative: smallest id in the class (ids follow canonical order).
  std::vector<VertexId> rep(n);
  for (VertexId v = 0; v < n; ++v) rep[v] = v;
  for (const auto& c : classes) {
    VertexId m = *std::min_element(c.begin(), c.end());
    for (auto v : c) rep[v] = m;
  }
  GraphBuilder b;
  std::vector<std::int64_t> new_id(n, -1);
  for (VertexId v = 0; v < n; ++v)
    if (rep[v] == v) new_id[v] = b.add_vertex(g.label(v));
  for (VertexId v = 0; v < n; ++v) new_id[v] = new_id[rep[v]];

  std::map<std::tuple<VertexId, VertexId, EdgeKind, double>, std::uint64_t> bundles;
  for (const auto& e : g.edges()) {
    auto a = static_cast<VertexId>(new_id[e.u]);
    auto c = static_cast<VertexId>(new_id[e.v]);
    if (a == c) continue;
    if (a > c) std::swap(a, c);
    bundles[{a, c, e.kind, e.resistance}] += e.multiplicity;
  }
  for (const auto& [key, m] : bundles) {
    if (m > UINT32_MAX) throw DomainError("edge multiplicity overflow");
    b.add_edge(std::get<0>(key), std::get<1>(key), std::get<3>(key), std::get<2>(key),
               static_cast<std::uint32_t>(m));
  }
  detail::copy_marks(g, new_id, b);
  return std::move(b).build();
}

/// Minor-style contraction: every class must induce a connected subgraph.
inline Graph contract(const Graph& g, const std::vector<std::vector<VertexId>>& classes) {
  return identify(g, classes, true);
}

/// Blocks (maximal 2-connected subgraphs and bridges) as lists of edge ids.
/// Parallel edge records between the same pair form one block.
inline std::vector<std::vector<EdgeId>> blocks(const Graph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<std::int64_t> disc(n, -1), low(n, 0);
  std::vector<std::vector<EdgeId>> out;
  std::vector<EdgeId> estack;
  struct Frame {
    VertexId v;
    std::int64_t parent_edge;
    std::size_t next;
  };
  std::vector<Frame> stack;
  std::int64_t timer = 0;
  for (VertexId root = 0; root < n; ++root) {
    if (disc[root] >= 0) continue;
    disc[root] = low[root] = timer++;
    stack.push_back({root, -1, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      auto inc = g.incident(f.v);
      if (f.next < inc.size()) {
        auto [w, e] = inc[f.next++];
        if (static_cast<std::int64_t>(e) == f.parent_edge) continue;
        if (disc[w] < 0) {
          estack.push_back(e);
          disc[w] = low[w] = timer++;
          stack.push_back({w, static_cast<std::int64_t>(e), 0});
        } else if (disc[w] < disc[f.v]) {
          estack.push_back(e);
          low[f.v] = std::min(low[f.v], disc[w]);
        }
        continue;
      }
      Frame done = f;
      stack.pop_back();
      if (stack.empty()) break;
      Frame& parent = stack.back();
      low[parent.v] = std::min(low[parent.v], low[done.v]);
      if (low[done.v] >= disc[parent.v]) {
        std::vector<EdgeId> block;
        while (true) {
          EdgeId e = estack.back();
          estack.pop_back();
          block.push_back(e);
          if (static_cast<std::int64_t>(e) == done.parent_edge) break;
        }
        std::sort(block.begin(), block.end());
        out.push_back(std::move(block));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Union of the blocks on the block-cut-tree path from a to b.
inline std::vector<EdgeId> blocks_between(const Graph& g, VertexId a, VertexId b) {
  auto bl = blocks(g);
  const std::size_t nb = bl.size();
  std::vector<std::vector<std::size_t>> blocks_of(g.num_vertices());
  for (std::size_t i = 0; i < nb; ++i) {
    std::set<VertexId> vs;
    for (auto e : bl[i]) {
      vs.insert(g.edge(e).u);
      vs.insert(g.edge(e).v);
    }
    for (auto v : vs) blocks_of[v].push_back(i);
  }
  if (blocks_of[a].empty() || blocks_of[b].empty())
    throw DomainError("endpoint lies in no block");
  // Bipartite block-vertex graph: nodes 0..nb-1 are blocks, nb+v is vertex v.
  const std::size_t total = nb + g.num_vertices();
  std::vector<std::int64_t> prev(total, -2);
  std::deque<std::size_t> q;
  prev[nb + a] = -1;
  q.push_back(nb + a);
  while (!q.empty()) {
    std::size_t x = q.front();
    q.pop_front();
    if (x == nb + b) break;
    if (x >= nb) {
      for (auto blk : blocks_of[x - nb])
        if (prev[blk] == -2) {
          prev[blk] = static_cast<std::int64_t>(x);
          q.push_back(blk);
        }
    } else {
      for (auto e : bl[x])
        for (auto v : {g.edge(e).u, g.edge(e).v})
          if (prev[nb + v] == -2) {
            prev[nb + v] = static_cast<std::int64_t>(x);
            q.push_back(nb + v);
          }
    }
  }
  if (prev[nb + b] == -2) throw DomainError("endpoints are not connected");
  std::vector<EdgeId> edges;
  for (std::int64_t x = static_cast<std::int64_t>(nb + b); x != -1; x = prev[x])
    if (static_cast<std::size_t>(x) < nb) edges.insert(edges.end(), bl[x].begin(), bl[x].end());
  std::sort(edges.begin(), edges.end());
  return edges;
}

inline double average_degree(const Graph& g) {
  if (g.num_vertices() == 0) throw DomainError("average degree of the empty graph");
  double strands = 0;
  for (const auto& e : g.edges()) strands += e.multiplicity;
  return 2.0 * strands / static_cast<double>(g.num_vertices());
}

}  // namespace souvlaki
