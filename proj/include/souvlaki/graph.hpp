#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "souvlaki/error.hpp"
#include "souvlaki/label.hpp"

namespace souvlaki {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

enum class EdgeKind : std::uint8_t {
  Plain,
  Tree,           // H2 tree edge
  Cycle,          // H2 level cycle, or (t,w)(t',w) in a meatball
  WHorizontal,    // r_i^k r_i^{k+1}
  WVertical,      // r_i^k r_{i+1}^{2k}
  H3Horizontal,   // (t,w)(t,w') with ww' horizontal
  H3CycleDiag,    // (t,w)(t',w') with tt' a cycle edge, ww' horizontal
  H3TreeDiag,     // (t,w)(t',w') with tt' a tree edge, ww' vertical
  Skewer,         // consecutive skewer vertices
  GadgetLevel,    // between consecutive gadget levels
  Subdivision,    // piece of a subdivided edge
  FanIn,          // fan-in tree edge of the degree reduction
  DyadicNest,     // cube and sub-cube
  DyadicFace,     // two cubes sharing a square
  Suppressed,     // chain of degree-2 vertices replaced by one edge
};

inline const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::Plain: return "plain";
    case EdgeKind::Tree: return "tree";
    case EdgeKind::Cycle: return "cycle";
    case EdgeKind::WHorizontal: return "w-horizontal";
    case EdgeKind::WVertical: return "w-vertical";
    case EdgeKind::H3Horizontal: return "horizontal";
    case EdgeKind::H3CycleDiag: return "cycle-diagonal";
    case EdgeKind::H3TreeDiag: return "tree-diagonal";
    case EdgeKind::Skewer: return "skewer";
    case EdgeKind::GadgetLevel: return "gadget-level";
    case EdgeKind::Subdivision: return "subdivision";
    case EdgeKind::FanIn: return "fan-in";
    case EdgeKind::DyadicNest: return "dyadic-nest";
    case EdgeKind::DyadicFace: return "dyadic-face";
    case EdgeKind::Suppressed: return "suppressed";
  }
  return "plain";
}

inline EdgeKind edge_kind_from_string(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(EdgeKind::Suppressed); ++i) {
    auto k = static_cast<EdgeKind>(i);
    if (s == to_string(k)) return k;
  }
  throw DomainError("unknown edge kind '" + s + "'");
}

/// An edge record. `multiplicity` parallel strands of resistance
/// `resistance` each; u < v after Graph construction.
struct Edge {
  VertexId u;
  VertexId v;
  double resistance;
  std::uint32_t multiplicity;
  EdgeKind kind;

  double conductance() const { return multiplicity / resistance; }
  VertexId other(VertexId x) const { return x == u ? v : u; }
};

struct Incidence {
  VertexId neighbor;
  EdgeId edge;
};

/// Immutable finite weighted multigraph. Vertex ids follow the canonical
/// label order, so ids and serializations are reproducible.
class Graph {
 public:
  Graph() { offsets_.push_back(0); }

  std::size_t num_vertices() const { return labels_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const VertexLabel& label(VertexId v) const { return labels_.at(v); }
  const std::string& name(VertexId v) const { return names_.at(v); }
  const std::vector<VertexLabel>& labels() const { return labels_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }

  std::optional<VertexId> find(const VertexLabel& l) const {
    auto it = index_.find(l);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  VertexId id(const VertexLabel& l) const {
    auto v = find(l);
    if (!v) throw DomainError("unknown vertex " + l.canonical());
    return *v;
  }
  VertexId id(std::string_view canonical) const { return id(VertexLabel::parse(canonical)); }

  std::span<const Incidence> incident(VertexId v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }

  /// Number of edge strands at v (multiplicities counted).
  std::uint64_t degree(VertexId v) const {
    std::uint64_t d = 0;
    for (auto inc : incident(v)) d += edges_[inc.edge].multiplicity;
    return d;
  }
  double weighted_degree(VertexId v) const {
    double d = 0;
    for (auto inc : incident(v)) d += edges_[inc.edge].conductance();
    return d;
  }
  std::uint64_t max_degree() const {
    std::uint64_t m = 0;
    for (VertexId v = 0; v < num_vertices(); ++v) m = std::max(m, degree(v));
    return m;
  }

  /// First edge record joining u and v, optionally of a given kind.
  std::optional<EdgeId> find_edge(VertexId u, VertexId v,
                                  std::optional<EdgeKind> kind = std::nullopt) const {
    if (offsets_[u + 1] - offsets_[u] > offsets_[v + 1] - offsets_[v]) std::swap(u, v);
    for (auto inc : incident(u))
      if (inc.neighbor == v && (!kind || edges_[inc.edge].kind == *kind)) return inc.edge;
    return std::nullopt;
  }

  const std::map<std::string, std::vector<VertexId>>& marks() const { return marks_; }
  bool has_mark(const std::string& name) const { return marks_.count(name) != 0; }
  const std::vector<VertexId>& mark(const std::string& name) const {
    auto it = marks_.find(name);
    if (it == marks_.end()) throw DomainError("graph has no mark '" + name + "'");
    return it->second;
  }

  /// Vertex set named either by a mark or by a single canonical label.
  std::vector<VertexId> resolve(const std::string& mark_or_label) const {
    if (has_mark(mark_or_label)) return mark(mark_or_label);
    return {id(mark_or_label)};
  }

 private:
  friend class GraphBuilder;

  std::vector<VertexLabel> labels_;
  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  std::vector<std::uint64_t> offsets_;
  std::vector<Incidence> adj_;
  std::map<std::string, std::vector<VertexId>> marks_;
  std::unordered_map<VertexLabel, VertexId> index_;
};

/// Single-owner mutable builder. Ids returned by add_vertex are provisional;
/// build() renumbers into canonical order.
class GraphBuilder {
 public:
  VertexId add_vertex(const VertexLabel& l) {
    auto [it, inserted] = index_.try_emplace(l, static_cast<VertexId>(labels_.size()));
    if (!inserted) throw DomainError("duplicate vertex " + l.canonical());
    labels_.push_back(l);
    if (labels_.size() > UINT32_MAX - 1) throw DomainError("too many vertices");
    return it->second;
  }

  /// Id of an existing vertex, or a fresh one.
  VertexId ensure_vertex(const VertexLabel& l) {
    auto it = index_.find(l);
    if (it != index_.end()) return it->second;
    return add_vertex(l);
  }

  std::optional<VertexId> find(const VertexLabel& l) const {
    auto it = index_.find(l);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  VertexId id(const VertexLabel& l) const {
    auto v = find(l);
    if (!v) throw DomainError("builder has no vertex " + l.canonical());
    return *v;
  }

  void add_edge(VertexId a, VertexId b, double resistance = 1.0, EdgeKind kind = EdgeKind::Plain,
                std::uint32_t multiplicity = 1) {
    if (a >= labels_.size() || b >= labels_.size()) throw DomainError("edge endpoint missing");
    if (a == b) throw DomainError("self-loop at " + labels_[a].canonical());
    if (!(resistance > 0) || !std::isfinite(resistance))
      throw DomainError("edge resistance must be positive and finite");
    if (multiplicity == 0) throw DomainError("edge multiplicity must be positive");
    if (a > b) std::swap(a, b);
    edges_.push_back({a, b, resistance, multiplicity, kind});
  }

  void mark(const std::string& name, VertexId v) {
    if (v >= labels_.size()) throw DomainError("mark references a missing vertex");
    marks_[name].push_back(v);
  }
  /// Registers a mark even if it ends up empty.
  void declare_mark(const std::string& name) { marks_[name]; }

  std::size_t num_vertices() const { return labels_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  const VertexLabel& label(VertexId v) const { return labels_[v]; }

  Graph build() && {
    const std::size_t n = labels_.size();
    std::vector<std::string> names(n);
    for (std::size_t i = 0; i < n; ++i) names[i] = labels_[i].canonical();
    std::vector<VertexId> order(n);
    std::iota(order.begin(), order.end(), VertexId{0});
    std::sort(order.begin(), order.end(),
              [&](VertexId a, VertexId b) { return names[a] < names[b]; });
    std::vector<VertexId> remap(n);
    for (std::size_t i = 0; i < n; ++i) remap[order[i]] = static_cast<VertexId>(i);

    Graph g;
    g.labels_.resize(n);
    g.names_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      g.labels_[i] = labels_[order[i]];
      g.names_[i] = std::move(names[order[i]]);
    }
    labels_.clear();
    labels_.shrink_to_fit();
    index_.clear();
    g.index_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) g.index_.emplace(g.labels_[i], static_cast<VertexId>(i));

    for (auto& e : edges_) {
      e.u = remap[e.u];
      e.v = remap[e.v];
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
      if (a.u != b.u) return a.u < b.u;
      if (a.v != b.v) return a.v < b.v;
      if (a.kind != b.kind) return a.kind < b.kind;
      if (a.resistance != b.resistance) return a.resistance < b.resistance;
      return a.multiplicity < b.multiplicity;
    });
    if (edges_.size() > UINT32_MAX - 1) throw DomainError("too many edges");
    g.edges_ = std::move(edges_);

    g.offsets_.assign(n + 1, 0);
    for (const auto& e : g.edges_) {
      ++g.offsets_[e.u + 1];
      ++g.offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.adj_.resize(g.offsets_[n]);
    std::vector<std::uint64_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (EdgeId e = 0; e < g.edges_.size(); ++e) {
      const auto& ed = g.edges_[e];
      g.adj_[fill[ed.u]++] = {ed.v, e};
      g.adj_[fill[ed.v]++] = {ed.u, e};
    }

    for (auto& [name, vs] : marks_) {
      for (auto& v : vs) v = remap[v];
      std::sort(vs.begin(), vs.end());
      vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    }
    g.marks_ = std::move(marks_);
    return g;
  }

 private:
  std::vector<VertexLabel> labels_;
  std::vector<Edge> edges_;
  std::map<std::string, std::vector<VertexId>> marks_;
  std::unordered_map<VertexLabel, VertexId> index_;
};

}  // namespace souvlaki
