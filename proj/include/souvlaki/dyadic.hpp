#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "souvlaki/gadget.hpp"
#include "souvlaki/graph_algorithms.hpp"
#include "souvlaki/graph.hpp"

namespace souvlaki {

/// Octant address of the cube with integer corner (a, b, c) at depth d: one
/// base-8 digit per level, digit = bit(a) + 2 bit(b) + 4 bit(c).
inline std::int64_t dyadic_code(int d, std::int64_t a, std::int64_t b, std::int64_t c) {
  std::int64_t code = 0;
  for (int p = d - 1; p >= 0; --p)
    code = code * 8 + ((a >> p) & 1) + 2 * ((b >> p) & 1) + 4 * ((c >> p) & 1);
  return code;
}

namespace detail {

struct DyadicPlacement {
  int n;
  int copy_depth = 0;
  std::int64_t copy_code = 0;
  std::optional<VertexLabel> low;   // replaces the corner cube at (0,0,0)
  std::optional<VertexLabel> high;  // replaces the opposite corner cube
  bool marks = true;
};

inline void emit_dyadic(GraphBuilder& b, const DyadicPlacement& p) {
  const int n = p.n;
  std::vector<std::vector<VertexId>> ids(n + 1);
  for (int d = 0; d <= n; ++d) {
    const std::int64_t side = pow2(d);
    ids[d].resize(static_cast<std::size_t>(side * side * side));
    for (std::int64_t c = 0; c < side; ++c)
      for (std::int64_t bb = 0; bb < side; ++bb)
        for (std::int64_t a = 0; a < side; ++a) {
          bool lo = d == n && a == 0 && bb == 0 && c == 0;
          bool hi = d == n && a == side - 1 && bb == side - 1 && c == side - 1;
          VertexId v;
          if (lo && p.low) v = b.ensure_vertex(*p.low);
          else if (hi && p.high) v = b.ensure_vertex(*p.high);
          else v = b.add_vertex(VertexLabel::dyadic(p.copy_depth, p.copy_code, d, dyadic_code(d, a, bb, c)));
          ids[d][(c * side + bb) * side + a] = v;
          if (p.marks) {
            b.mark("depth:" + std::to_string(d), v);
            if (lo) b.mark("corner-", v);
            if (hi) b.mark("corner+", v);
          }
        }
  }
  for (int d = 0; d <= n; ++d) {
    const std::int64_t side = pow2(d);
    auto at = [&](int dd, std::int64_t a, std::int64_t bb, std::int64_t c) {
      std::int64_t s = pow2(dd);
      return ids[dd][(c * s + bb) * s + a];
    };
    for (std::int64_t c = 0; c < side; ++c)
      for (std::int64_t bb = 0; bb < side; ++bb)
        for (std::int64_t a = 0; a < side; ++a) {
          VertexId v = at(d, a, bb, c);
          if (a + 1 < side) b.add_edge(v, at(d, a + 1, bb, c), 1.0, EdgeKind::DyadicFace);
          if (bb + 1 < side) b.add_edge(v, at(d, a, bb + 1, c), 1.0, EdgeKind::DyadicFace);
          if (c + 1 < side) b.add_edge(v, at(d, a, bb, c + 1), 1.0, EdgeKind::DyadicFace);
          if (d > 0) b.add_edge(at(d - 1, a / 2, bb / 2, c / 2), v, 1.0, EdgeKind::DyadicNest);
        }
  }
}

inline double dyadic_edge_count(int n) {
  double e = 0;
  for (int d = 0; d <= n; ++d) {
    double s = static_cast<double>(pow2(d));
    e += 3 * s * s * (s - 1) + (d > 0 ? s * s * s : 0);
  }
  return e;
}

}  // namespace detail

/// Dyadic sub-cubes of [0,1]^3 down to depth n; nested cubes and cubes of
/// one depth sharing a square are adjacent.
inline Graph build_dyadic(int n) {
  if (n < 0) throw DomainError("depth must be non-negative");
  if (n > 8 || detail::dyadic_edge_count(n) > kEdgeCap)
    throw DomainError("dyadic graph exceeds the resource cap of 5e7 edges");
  GraphBuilder b;
  detail::emit_dyadic(b, {n, 0, 0, std::nullopt, std::nullopt, true});
  return std::move(b).build();
}

/// Deepest level of G_n: the grid of side 2^n, with the corner marks.
inline Graph dyadic_grid_level(const Graph& gn, int n) {
  return induced_subgraph(gn, gn.mark("depth:" + std::to_string(n)));
}

/// Binary tree whose edge at height k is a copy of G_{3^k}, the upper node
/// glued to the (0,0,0) corner and the lower node to the opposite one.
inline Graph build_cube_tree(int tree_height) {
  if (tree_height < 0) throw DomainError("tree height must be non-negative");
  double edges = 0;
  for (int k = 0; k < tree_height; ++k) {
    int n = static_cast<int>(pow3(std::min(k, 3)));
    if (n > 8) throw DomainError("cube tree exceeds the resource cap of 5e7 edges");
    edges += static_cast<double>(pow2(k + 1)) * detail::dyadic_edge_count(n);
  }
  if (edges > kEdgeCap) throw DomainError("cube tree exceeds the resource cap of 5e7 edges");
  GraphBuilder b;
  for (int r = 0; r <= tree_height; ++r)
    for (std::int64_t c = 0; c < pow2(r); ++c) {
      VertexId v = b.add_vertex(VertexLabel::node(r, c));
      if (r == tree_height) b.mark("boundary", v);
    }
  b.mark("root", b.id(VertexLabel::node(0, 0)));
  for (int k = 0; k < tree_height; ++k)
    for (std::int64_t c = 0; c < pow2(k + 1); ++c)
      detail::emit_dyadic(b, {static_cast<int>(pow3(k)), k + 1, c, VertexLabel::node(k, c / 2),
                              VertexLabel::node(k + 1, c), false});
  return std::move(b).build();
}

}  // namespace souvlaki
