#pragma once

#include <optional>
#include <string>
#include <vector>

#include "souvlaki/graph.hpp"
#include "souvlaki/hyperbolic.hpp"

namespace souvlaki {

inline constexpr double kEdgeCap = 5e7;

struct GadgetSpec {
  int n = 1;
  bool subdivided = false;  // resistance-k edges become k-edge unit paths
};

/// Level sizes 2^{n-|i|}; the gap between magnitudes a and a+1 has
/// resistance 2^{n-a}.
inline double gadget_gap_resistance(int n, int i, int j) {
  int a = std::min(std::abs(i), std::abs(j));
  return static_cast<double>(pow2(n - a));
}

/// Closed form of the pole-to-pole resistance: sum of 2 * 2^{a+1-n}, a < n.
inline double gadget_resistance_closed_form(int n) { return 4.0 - 4.0 / static_cast<double>(pow2(n)); }

/// Edge records of one gadget copy before any subdivision or reduction.
inline double gadget_edge_count(int n, bool subdivided, bool reduced) {
  double edges = 0;
  for (int a = 0; a < n; ++a) {
    double pairs = 2.0 * static_cast<double>(pow2(n - a)) * static_cast<double>(pow2(n - a - 1));
    double per = subdivided ? static_cast<double>(pow2(n - a)) : 1.0;
    edges += pairs * per + (reduced ? 2.0 * pairs : 0.0);
  }
  return edges;
}

namespace detail {

struct GadgetPlacement {
  int n;
  int gid_depth = 0;
  std::int64_t gid_code = 0;
  std::optional<VertexLabel> top;     // replaces the level +n pole
  std::optional<VertexLabel> bottom;  // replaces the level -n pole
  bool subdivided = false;
  bool reduce = false;
  bool level_marks = true;
};

inline void emit_gadget(GraphBuilder& b, const GadgetPlacement& p) {
  const int n = p.n;
  auto size = [&](int i) { return pow2(n - std::abs(i)); };
  auto label = [&](int i, std::int64_t idx) {
    if (i == n && p.top) return *p.top;
    if (i == -n && p.bottom) return *p.bottom;
    return VertexLabel::gadget(p.gid_depth, p.gid_code, i, idx);
  };
  std::vector<std::vector<VertexId>> ids(2 * n + 1);
  for (int i = -n; i <= n; ++i) {
    auto& row = ids[i + n];
    for (std::int64_t x = 0; x < size(i); ++x) {
      auto l = label(i, x);
      bool shared = (i == n && p.top) || (i == -n && p.bottom);
      row.push_back(shared ? b.ensure_vertex(l) : b.add_vertex(l));
      if (p.level_marks) b.mark("level:" + std::to_string(i), row.back());
    }
  }
  if (p.level_marks) {
    b.mark("pole+", ids[2 * n][0]);
    b.mark("pole-", ids[0][0]);
  }
  // Fan-in trees: vertex x at a non-pole level gets one binary tree towards
  // each neighbouring level; heap index 1 is x, leaves are 2^k + index.
  auto depth_of = [&](int level) {
    int k = 0;
    while (pow2(k) < size(level)) ++k;
    return k;
  };
  auto fan_vertex = [&](int i, std::int64_t x, int towards, std::int64_t heap) -> VertexId {
    VertexId root = ids[i + n][x];
    if (heap == 1) return root;
    auto role = towards > i ? AuxRole::FanUp : AuxRole::FanDown;
    return b.ensure_vertex(VertexLabel::aux(role, heap, 0, b.label(root)));
  };
  if (p.reduce) {
    for (int i = -n + 1; i <= n - 1; ++i)
      for (std::int64_t x = 0; x < size(i); ++x)
        for (int towards : {i - 1, i + 1}) {
          int k = depth_of(towards);
          for (std::int64_t h = 2; h < pow2(k + 1); ++h)
            b.add_edge(fan_vertex(i, x, towards, h / 2), fan_vertex(i, x, towards, h), 1.0, EdgeKind::FanIn);
        }
  }
  auto endpoint = [&](int i, std::int64_t x, int towards, std::int64_t neighbor_index) -> VertexId {
    if (!p.reduce || std::abs(i) == n) return ids[i + n][x];
    int k = depth_of(towards);
    return fan_vertex(i, x, towards, pow2(k) + neighbor_index);
  };
  for (int i = -n; i < n; ++i) {
    // Gap between levels i and i+1; `inner` is the level nearer 0.
    const int j = i + 1;
    const double r = gadget_gap_resistance(n, i, j);
    const int inner = std::abs(i) < std::abs(j) ? i : j;
    const int outer = inner == i ? j : i;
    for (std::int64_t x = 0; x < size(inner); ++x)
      for (std::int64_t y = 0; y < size(outer); ++y) {
        VertexId a = endpoint(inner, x, outer, y);
        VertexId c = endpoint(outer, y, inner, x);
        if (!p.subdivided) {
          b.add_edge(a, c, r, EdgeKind::GadgetLevel);
          continue;
        }
        const std::int64_t steps = static_cast<std::int64_t>(r);
        const std::int64_t tag = (outer > inner ? 1 : -1) * (y + 1);
        const VertexLabel base = b.label(ids[inner + n][x]);
        VertexId prev = a;
        for (std::int64_t s = 1; s < steps; ++s) {
          VertexId mid = b.add_vertex(VertexLabel::aux(AuxRole::Subdivision, tag, s, base));
          b.add_edge(prev, mid, 1.0, EdgeKind::Subdivision);
          prev = mid;
        }
        b.add_edge(prev, c, 1.0, EdgeKind::Subdivision);
      }
  }
}

}  // namespace detail

inline Graph build_gadget(const GadgetSpec& spec) {
  if (spec.n < 1) throw DomainError("gadget size must be at least 1");
  if (spec.n > 24 || gadget_edge_count(spec.n, spec.subdivided, false) > kEdgeCap)
    throw DomainError("gadget exceeds the resource cap of 5e7 edges");
  GraphBuilder b;
  detail::emit_gadget(b, {spec.n, 0, 0, std::nullopt, std::nullopt, spec.subdivided, false, true});
  return std::move(b).build();
}

struct GadgetTreeSpec {
  int depth = 1;
  bool reduce_degree = false;
  bool subdivided = false;
  std::vector<int> schedule;  // gadget size for edges at distance r; empty = 2^r
};

inline int gadget_size_at(const GadgetTreeSpec& spec, int r) {
  if (spec.schedule.empty()) return static_cast<int>(pow2(r));
  if (r >= static_cast<int>(spec.schedule.size())) throw DomainError("gadget schedule too short");
  return spec.schedule[r];
}

/// Binary tree of the given depth whose edge at distance r from the root is
/// a gadget copy; the gadget's level +n pole is the upper tree node.
inline Graph build_gadget_tree(const GadgetTreeSpec& spec) {
  if (spec.depth < 0) throw DomainError("depth must be non-negative");
  if (spec.depth > 20) throw DomainError("gadget tree depth too large");
  double edges = 0;
  for (int r = 0; r < spec.depth; ++r) {
    int n = gadget_size_at(spec, r);
    if (n < 1) throw DomainError("gadget sizes must be positive");
    if (n > 24) throw DomainError("gadget tree exceeds the resource cap of 5e7 edges");
    edges += static_cast<double>(pow2(r + 1)) * gadget_edge_count(n, spec.subdivided, spec.reduce_degree);
  }
  if (edges > kEdgeCap) throw DomainError("gadget tree exceeds the resource cap of 5e7 edges");
  GraphBuilder b;
  for (int r = 0; r <= spec.depth; ++r)
    for (std::int64_t c = 0; c < pow2(r); ++c) {
      VertexId v = b.add_vertex(VertexLabel::node(r, c));
      std::string bits;
      for (int i = r - 1; i >= 0; --i) bits += static_cast<char>('0' + ((c >> i) & 1));
      b.mark("tree-node:" + bits, v);
      if (r == spec.depth) b.mark("boundary", v);
    }
  b.mark("root", b.id(VertexLabel::node(0, 0)));
  for (int r = 0; r < spec.depth; ++r)
    for (std::int64_t c = 0; c < pow2(r + 1); ++c) {
      detail::GadgetPlacement p{gadget_size_at(spec, r), r + 1, c, VertexLabel::node(r, c / 2),
                                VertexLabel::node(r + 1, c), spec.subdivided, spec.reduce_degree, false};
      detail::emit_gadget(b, p);
    }
  return std::move(b).build();
}

/// Root-to-boundary resistance of the unreduced gadget tree: every depth is
/// an equipotential, so it is the series sum of R(D_{n(r)}) / 2^{r+1}.
inline double gadget_tree_resistance_closed_form(const GadgetTreeSpec& spec) {
  double total = 0;
  for (int r = 0; r < spec.depth; ++r)
    total += gadget_resistance_closed_form(gadget_size_at(spec, r)) / static_cast<double>(pow2(r + 1));
  return total;
}

}  // namespace souvlaki
