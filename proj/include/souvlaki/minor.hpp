#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "souvlaki/certificate.hpp"
#include "souvlaki/graph.hpp"
#include "souvlaki/graph_algorithms.hpp"

namespace souvlaki {

struct MinorResult {
  std::optional<BranchSets> certificate;
  bool exhaustive = false;     // absence is proven when no certificate is returned
  std::uint64_t expanded = 0;  // search nodes used

  std::string verdict() const {
    if (certificate) return "found";
    return exhaustive ? "none" : "budget";
  }
};

namespace detail {

class MinorSearch {
 public:
  MinorSearch(const Graph& g, int r, std::uint64_t budget)
      : g_(g), r_(r), budget_(budget), owner_(g.num_vertices(), -1) {}

  std::uint64_t expanded() const { return expanded_; }
  bool exhausted() const { return expanded_ >= budget_; }

  /// Seeds at high-degree vertices, joined by shortest free paths.
  std::optional<std::vector<std::vector<VertexId>>> heuristic() {
    std::vector<VertexId> order(g_.num_vertices());
    for (VertexId v = 0; v < order.size(); ++v) order[v] = v;
    std::stable_sort(order.begin(), order.end(),
                     [&](VertexId a, VertexId b) { return distinct_degree(a) > distinct_degree(b); });
    const std::size_t k = std::min<std::size_t>(order.size(), static_cast<std::size_t>(r_) + 6);
    std::vector<std::size_t> pick(static_cast<std::size_t>(r_));
    for (int i = 0; i < r_; ++i) pick[i] = static_cast<std::size_t>(i);
    while (true) {
      sets_.assign(static_cast<std::size_t>(r_), {});
      std::fill(owner_.begin(), owner_.end(), -1);
      for (int i = 0; i < r_; ++i) add(i, order[pick[i]]);
      if (grow()) return sets_;
      if (exhausted()) return std::nullopt;
      int i = r_ - 1;
      while (i >= 0 && pick[i] == k - static_cast<std::size_t>(r_) + static_cast<std::size_t>(i)) --i;
      if (i < 0) return std::nullopt;
      ++pick[i];
      for (int j = i + 1; j < r_; ++j) pick[j] = pick[j - 1] + 1;
    }
  }

  /// Every assignment of vertices to r sets or to none, up to relabelling.
  /// Returns nullopt with exhausted() false when none exists.
  std::optional<std::vector<std::vector<VertexId>>> enumerate() {
    std::fill(owner_.begin(), owner_.end(), -1);
    if (assign(0, 0)) {
      std::vector<std::vector<VertexId>> sets(static_cast<std::size_t>(r_));
      for (VertexId v = 0; v < g_.num_vertices(); ++v)
        if (owner_[v] >= 0) sets[owner_[v]].push_back(v);
      return sets;
    }
    return std::nullopt;
  }

 private:
  std::size_t distinct_degree(VertexId v) const {
    std::vector<VertexId> nb;
    for (auto inc : g_.incident(v)) nb.push_back(inc.neighbor);
    std::sort(nb.begin(), nb.end());
    return static_cast<std::size_t>(std::unique(nb.begin(), nb.end()) - nb.begin());
  }

  void add(int i, VertexId v) {
    owner_[v] = i;
    sets_[i].push_back(v);
  }

  bool adjacent(int i, int j) const {
    for (auto v : sets_[i])
      for (auto inc : g_.incident(v))
        if (owner_[inc.neighbor] == j) return true;
    return false;
  }

  /// Free interior of a shortest path from set i to set j.
  std::optional<std::vector<VertexId>> free_path(int i, int j) const {
    std::vector<std::int64_t> prev(g_.num_vertices(), -2);
    std::vector<VertexId> queue;
    for (auto v : sets_[i]) {
      prev[v] = -1;
      queue.push_back(v);
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      VertexId v = queue[head];
      for (auto inc : g_.incident(v)) {
        VertexId w = inc.neighbor;
        if (owner_[w] == j && owner_[v] == -1) {
          std::vector<VertexId> path;
          for (std::int64_t x = v; x >= 0 && owner_[x] == -1; x = prev[x]) path.push_back(static_cast<VertexId>(x));
          std::reverse(path.begin(), path.end());
          return path;
        }
        if (owner_[w] != -1 || prev[w] != -2) continue;
        prev[w] = v;
        queue.push_back(w);
      }
    }
    return std::nullopt;
  }

  bool grow() {
    if (++expanded_ >= budget_) return false;
    for (int i = 0; i < r_; ++i)
      for (int j = i + 1; j < r_; ++j) {
        if (adjacent(i, j)) continue;
        auto path = free_path(i, j);
        if (!path) return false;
        const std::size_t half = path->size() / 2;
        // attach the path to i, to j, or split it between them
        for (int mode = 0; mode < 3; ++mode) {
          if (mode == 2 && path->size() < 2) break;
          for (std::size_t x = 0; x < path->size(); ++x) {
            int to = mode == 0 ? i : mode == 1 ? j : (x < half ? i : j);
            add(to, (*path)[x]);
          }
          if (grow()) return true;
          for (auto v : *path) {
            auto& s = sets_[owner_[v]];
            s.erase(std::find(s.begin(), s.end(), v));
            owner_[v] = -1;
          }
          if (exhausted()) return false;
        }
        return false;
      }
    return true;
  }

  bool complete() const {
    std::vector<std::vector<VertexId>> sets(static_cast<std::size_t>(r_));
    for (VertexId v = 0; v < g_.num_vertices(); ++v)
      if (owner_[v] >= 0) sets[owner_[v]].push_back(v);
    for (const auto& s : sets) {
      std::vector<VertexId> stack{s[0]};
      std::vector<char> seen(g_.num_vertices(), 0);
      seen[s[0]] = 1;
      std::size_t reached = 1;
      int id = owner_[s[0]];
      while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        for (auto inc : g_.incident(v))
          if (owner_[inc.neighbor] == id && !seen[inc.neighbor]) {
            seen[inc.neighbor] = 1;
            ++reached;
            stack.push_back(inc.neighbor);
          }
      }
      if (reached != s.size()) return false;
    }
    std::vector<char> joined(static_cast<std::size_t>(r_ * r_), 0);
    for (const auto& e : g_.edges()) {
      int a = owner_[e.u], b = owner_[e.v];
      if (a >= 0 && b >= 0 && a != b) joined[a * r_ + b] = joined[b * r_ + a] = 1;
    }
    for (int a = 0; a < r_; ++a)
      for (int b = a + 1; b < r_; ++b)
        if (!joined[a * r_ + b]) return false;
    return true;
  }

  bool assign(VertexId v, int used) {
    if (++expanded_ >= budget_) return false;
    const auto n = static_cast<VertexId>(g_.num_vertices());
    // not enough vertices left to open the missing sets
    if (static_cast<int>(n - v) < r_ - used) return false;
    if (v == n) return used == r_ && complete();
    for (int c = -1; c <= std::min(used, r_ - 1); ++c) {
      owner_[v] = c;
      if (assign(v + 1, c == used ? used + 1 : used)) return true;
      if (exhausted()) break;
    }
    owner_[v] = -1;
    return false;
  }

  const Graph& g_;
  int r_;
  std::uint64_t budget_;
  std::uint64_t expanded_ = 0;
  std::vector<int> owner_;
  std::vector<std::vector<VertexId>> sets_;
};

inline BranchSets to_branch_sets(const Graph& g, const std::vector<std::vector<VertexId>>& sets) {
  const std::size_t r = sets.size();
  std::vector<int> owner(g.num_vertices(), -1);
  BranchSets c;
  for (std::size_t i = 0; i < r; ++i) {
    std::vector<std::string> names;
    for (auto v : sets[i]) {
      owner[v] = static_cast<int>(i);
      names.push_back(g.name(v));
    }
    std::sort(names.begin(), names.end());
    c.sets.push_back(std::move(names));
  }
  std::vector<char> linked(r * r, 0);
  for (const auto& e : g.edges()) {
    int a = owner[e.u], b = owner[e.v];
    if (a < 0 || b < 0 || a == b) continue;
    auto [i, j] = std::minmax(a, b);
    if (linked[i * r + j]) continue;
    linked[i * r + j] = 1;
    VertexId u = a == i ? e.u : e.v, v = a == i ? e.v : e.u;
    c.links.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), g.name(u), g.name(v)});
  }
  std::sort(c.links.begin(), c.links.end(),
            [](const auto& x, const auto& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); });
  return c;
}

/// A cycle of the underlying simple graph, if any.
inline std::optional<std::vector<VertexId>> simple_cycle(const Graph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<std::int64_t> parent(n, -2);
  std::vector<int> depth(n, 0);
  for (VertexId root = 0; root < n; ++root) {
    if (parent[root] != -2) continue;
    parent[root] = -1;
    std::vector<VertexId> stack{root};
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      for (auto inc : g.incident(v)) {
        VertexId w = inc.neighbor;
        if (static_cast<std::int64_t>(w) == parent[v]) continue;
        if (parent[w] == -2) {
          parent[w] = v;
          depth[w] = depth[v] + 1;
          stack.push_back(w);
          continue;
        }
        // non-tree edge v-w closes a cycle through their common ancestor
        std::vector<VertexId> a{v}, b{w};
        while (a.back() != b.back()) {
          if (depth[a.back()] >= depth[b.back()]) a.push_back(static_cast<VertexId>(parent[a.back()]));
          else b.push_back(static_cast<VertexId>(parent[b.back()]));
        }
        b.pop_back();
        a.insert(a.end(), b.rbegin(), b.rend());
        if (a.size() >= 3) return a;
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline bool verify_minor(const Graph& g, const BranchSets& c, std::size_t r) {
  return c.sets.size() == r && verify(g, c);
}

/// Search for a K^r minor. r <= 3 is decided exactly; for larger r a
/// seeded greedy/backtracking search runs first, then complete enumeration
/// on small graphs. `budget` counts search nodes.
inline MinorResult find_clique_minor(const Graph& g, int r, std::uint64_t budget = 1000000) {
  if (r < 1) throw DomainError("r must be at least 1");
  MinorResult out;
  const std::size_t n = g.num_vertices();
  std::size_t pairs = 0;
  for (VertexId v = 0; v < n; ++v) {
    std::vector<VertexId> nb;
    for (auto inc : g.incident(v)) nb.push_back(inc.neighbor);
    std::sort(nb.begin(), nb.end());
    pairs += static_cast<std::size_t>(std::unique(nb.begin(), nb.end()) - nb.begin());
  }
  pairs /= 2;
  if (n < static_cast<std::size_t>(r) || pairs < static_cast<std::size_t>(r) * (r - 1) / 2) {
    out.exhaustive = true;
    return out;
  }
  if (r == 1) {
    out.certificate = detail::to_branch_sets(g, {{0}});
    out.exhaustive = true;
    return out;
  }
  if (r == 2) {
    const auto& e = g.edge(0);
    out.certificate = detail::to_branch_sets(g, {{e.u}, {e.v}});
    out.exhaustive = true;
    return out;
  }
  auto cycle = detail::simple_cycle(g);
  if (!cycle) {  // forests have no K^3 minor, hence none larger
    out.exhaustive = true;
    return out;
  }
  if (r == 3) {
    std::vector<std::vector<VertexId>> sets{{(*cycle)[0]}, {(*cycle)[1]}, {}};
    sets[2].assign(cycle->begin() + 2, cycle->end());
    out.certificate = detail::to_branch_sets(g, sets);
    out.exhaustive = true;
    return out;
  }
  detail::MinorSearch h(g, r, budget);
  auto found = h.heuristic();
  out.expanded = h.expanded();
  if (!found && out.expanded < budget) {
    detail::MinorSearch e(g, r, budget - out.expanded);
    found = e.enumerate();
    out.expanded += e.expanded();
    out.exhaustive = !found && !e.exhausted();
  }
  if (found) out.certificate = detail::to_branch_sets(g, *found);
  return out;
}

}  // namespace souvlaki
