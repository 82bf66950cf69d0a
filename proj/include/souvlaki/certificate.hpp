#pragma once

#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "souvlaki/graph_algorithms.hpp"
#include "souvlaki/graph_json.hpp"

namespace souvlaki {

/// Disjoint connected vertex sets with one witnessing edge per pair.
struct BranchSets {
  struct Link {
    std::size_t i, j;
    std::string u, v;  // u in set i, v in set j
  };
  std::vector<std::vector<std::string>> sets;
  std::vector<Link> links;
};

struct GeodesicList {
  std::string from, to;
  std::vector<std::vector<std::string>> paths;
  bool capped = false;
};

/// Edge set whose removal separates side_a from side_b.
struct CutSet {
  std::vector<std::string> side_a, side_b;
  std::vector<std::pair<std::string, std::string>> edges;
};

using Certificate = std::variant<BranchSets, GeodesicList, CutSet>;

inline bool verify(const Graph& g, const BranchSets& c) {
  std::vector<int> owner(g.num_vertices(), -1);
  for (std::size_t i = 0; i < c.sets.size(); ++i) {
    if (c.sets[i].empty()) return false;
    for (const auto& l : c.sets[i]) {
      auto v = g.find(VertexLabel::parse(l));
      if (!v || owner[*v] != -1) return false;
      owner[*v] = static_cast<int>(i);
    }
  }
  for (std::size_t i = 0; i < c.sets.size(); ++i) {
    VertexId start = g.id(c.sets[i][0]);
    std::vector<VertexId> stack{start};
    std::set<VertexId> seen{start};
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      for (auto inc : g.incident(v))
        if (owner[inc.neighbor] == static_cast<int>(i) && seen.insert(inc.neighbor).second)
          stack.push_back(inc.neighbor);
    }
    if (seen.size() != c.sets[i].size()) return false;
  }
  const std::size_t r = c.sets.size();
  std::vector<char> joined(r * r, 0);
  for (const auto& link : c.links) {
    if (link.i >= r || link.j >= r || link.i == link.j) return false;
    auto u = g.find(VertexLabel::parse(link.u));
    auto v = g.find(VertexLabel::parse(link.v));
    if (!u || !v || owner[*u] != static_cast<int>(link.i) || owner[*v] != static_cast<int>(link.j))
      return false;
    if (!g.find_edge(*u, *v)) return false;
    joined[link.i * r + link.j] = joined[link.j * r + link.i] = 1;
  }
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j)
      if (!joined[i * r + j]) return false;
  return true;
}

inline bool verify(const Graph& g, const GeodesicList& c) {
  // `to` names a vertex or a mark; paths then end anywhere in the mark
  auto from = g.find(VertexLabel::parse(c.from));
  if (!from) return false;
  std::vector<VertexId> targets;
  if (g.has_mark(c.to)) {
    targets = g.mark(c.to);
  } else {
    auto to = g.find(VertexLabel::parse(c.to));
    if (!to) return false;
    targets.push_back(*to);
  }
  if (targets.empty()) return false;
  std::set<std::string> ends;
  for (auto v : targets) ends.insert(g.name(v));
  auto dist = bfs(g, targets);
  if (dist[*from] == kUnreachable) return c.paths.empty();
  std::set<std::vector<std::string>> distinct;
  for (const auto& p : c.paths) {
    if (p.size() != static_cast<std::size_t>(dist[*from]) + 1) return false;
    if (p.front() != c.from || !ends.contains(p.back())) return false;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      auto a = g.find(VertexLabel::parse(p[i]));
      auto b = g.find(VertexLabel::parse(p[i + 1]));
      if (!a || !b || !g.find_edge(*a, *b)) return false;
    }
    if (!distinct.insert(p).second) return false;
  }
  return true;
}

inline bool verify(const Graph& g, const CutSet& c) {
  std::set<std::pair<VertexId, VertexId>> cut;
  for (const auto& [a, b] : c.edges) {
    auto u = g.find(VertexLabel::parse(a));
    auto v = g.find(VertexLabel::parse(b));
    if (!u || !v || !g.find_edge(*u, *v)) return false;
    cut.insert(std::minmax(*u, *v));
  }
  std::vector<char> seen(g.num_vertices(), 0);
  std::vector<VertexId> stack;
  for (const auto& l : c.side_a) {
    auto v = g.find(VertexLabel::parse(l));
    if (!v) return false;
    if (!seen[*v]) {
      seen[*v] = 1;
      stack.push_back(*v);
    }
  }
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    for (auto inc : g.incident(v)) {
      if (seen[inc.neighbor] || cut.count(std::minmax(v, inc.neighbor))) continue;
      seen[inc.neighbor] = 1;
      stack.push_back(inc.neighbor);
    }
  }
  for (const auto& l : c.side_b) {
    auto v = g.find(VertexLabel::parse(l));
    if (!v || seen[*v]) return false;
  }
  return true;
}

inline bool verify(const Graph& g, const Certificate& c) {
  return std::visit([&](const auto& x) { return verify(g, x); }, c);
}

inline Json to_json(const BranchSets& c) {
  Json links = Json::array();
  for (const auto& l : c.links) links.push_back({{"i", l.i}, {"j", l.j}, {"u", l.u}, {"v", l.v}});
  return {{"type", "branch-sets"}, {"sets", c.sets}, {"links", std::move(links)}};
}

inline Json to_json(const GeodesicList& c) {
  return {{"type", "geodesics"}, {"from", c.from}, {"to", c.to}, {"capped", c.capped}, {"paths", c.paths}};
}

inline Json to_json(const CutSet& c) {
  Json edges = Json::array();
  for (const auto& [a, b] : c.edges) edges.push_back(Json::array({a, b}));
  return {{"type", "cut"}, {"side_a", c.side_a}, {"side_b", c.side_b}, {"edges", std::move(edges)}};
}

inline Json to_json(const Certificate& c) {
  return std::visit([](const auto& x) { return to_json(x); }, c);
}

}  // namespace souvlaki
