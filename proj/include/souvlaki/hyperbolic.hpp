#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "souvlaki/graph.hpp"
#include "souvlaki/s_bound.hpp"

namespace souvlaki {

inline std::int64_t pow2(int e) {
  if (e < 0 || e > 62) throw DomainError("power of 2 out of range");
  return std::int64_t{1} << e;
}
inline std::int64_t pow3(int e) {
  if (e < 0 || e > 39) throw DomainError("power of 3 out of range");
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= 3;
  return r;
}

// ---------------------------------------------------------------- H2 and W

/// Ternary tree ball with a cycle through every level in planar (base-3
/// lexicographic) order.
inline Graph build_h2(int radius) {
  if (radius < 0) throw DomainError("radius must be non-negative");
  if (radius > 14) throw DomainError("H2 radius too large");
  GraphBuilder b;
  std::vector<std::vector<VertexId>> level(radius + 1);
  for (int d = 0; d <= radius; ++d) {
    std::int64_t count = pow3(d);
    level[d].resize(count);
    for (std::int64_t c = 0; c < count; ++c) {
      level[d][c] = b.add_vertex(VertexLabel::tree(d, c));
      b.mark("level:" + std::to_string(d), level[d][c]);
    }
  }
  b.mark("root", level[0][0]);
  for (int d = 1; d <= radius; ++d) {
    std::int64_t count = pow3(d);
    for (std::int64_t c = 0; c < count; ++c) {
      b.add_edge(level[d - 1][c / 3], level[d][c], 1.0, EdgeKind::Tree);
      b.add_edge(level[d][c], level[d][(c + 1) % count], 1.0, EdgeKind::Cycle);
    }
  }
  return std::move(b).build();
}

struct Window {
  std::int64_t lo, hi;
  std::int64_t size() const { return hi - lo + 1; }
  bool contains(std::int64_t k) const { return lo <= k && k <= hi; }
};

/// Doubling windows: [lo, hi] at height 0, [2 lo - slack, 2 hi + slack] above.
inline std::vector<Window> doubling_windows(int max_height, std::int64_t lo, std::int64_t hi, int slack) {
  if (max_height < 0) throw DomainError("height must be non-negative");
  if (lo > hi) throw DomainError("empty k range");
  if (slack < 0) throw DomainError("slack must be non-negative");
  std::vector<Window> w{{lo, hi}};
  for (int i = 1; i <= max_height; ++i) {
    w.push_back({2 * w.back().lo - slack, 2 * w.back().hi + slack});
    if (w.back().hi > INT32_MAX / 2 || w.back().lo < INT32_MIN / 2)
      throw DomainError("window exceeds the coordinate range");
  }
  return w;
}

/// Truncated Baumslag-Solitar strip: rows r_i^k over doubling windows.
inline Graph build_w(int max_height, std::int64_t k_lo, std::int64_t k_hi, int slack = 0) {
  auto win = doubling_windows(max_height, k_lo, k_hi, slack);
  GraphBuilder b;
  for (int i = 0; i <= max_height; ++i)
    for (auto k = win[i].lo; k <= win[i].hi; ++k)
      b.mark("level:" + std::to_string(i), b.add_vertex(VertexLabel::w(i, k)));
  for (int i = 0; i <= max_height; ++i)
    for (auto k = win[i].lo; k <= win[i].hi; ++k) {
      auto v = b.id(VertexLabel::w(i, k));
      if (k < win[i].hi) b.add_edge(v, b.id(VertexLabel::w(i, k + 1)), 1.0, EdgeKind::WHorizontal);
      if (i < max_height) b.add_edge(v, b.id(VertexLabel::w(i + 1, 2 * k)), 1.0, EdgeKind::WVertical);
    }
  return std::move(b).build();
}

// ---------------------------------------------------------------- meatballs

struct MeatballSpec {
  int n = 1;                     // box height
  std::int64_t bottom_len = 0;   // length of the bottom path; 0 means 3 * 2^n
  int slack = 1;                 // horizontal slack of the doubling windows

  std::int64_t resolved_bottom_len() const { return bottom_len == 0 ? 3 * pow2(n) : bottom_len; }
};

/// Where a meatball sits and how its vertices are named.
struct MeatballFrame {
  int id = 1;                          // meatball index used in Pair labels
  int n = 1;                           // height
  std::int64_t bottom_count = 0;       // vertices on the bottom path
  std::optional<std::int64_t> offset;  // skewer index of the bottom path start
  bool lumped = false;                 // one vertex per cocircular class
  std::vector<Window> windows;

  VertexLabel label(int h, std::int64_t t, std::int64_t k) const {
    if (h == 0 && offset) return VertexLabel::skewer(*offset + k);
    return VertexLabel::pair(id, h, lumped ? 0 : t, k);
  }
  std::int64_t circle_size(int h) const { return lumped ? 1 : pow3(h); }
  std::int64_t l_count() const { return pow2(n); }
  std::int64_t r_count() const { return pow2(n + 1); }
  /// Bottom position of l^j, j = 1..2^n, counted from the midpoint towards o.
  std::int64_t l_pos(std::int64_t j) const { return pow2(n) - j; }
  /// Bottom position of r^i, i = 1..2^{n+1}, counted from the start of R.
  std::int64_t r_pos(std::int64_t i) const { return bottom_count - pow2(n + 1) - 1 + i; }
};

namespace detail {

/// Adds the vertices, edges and marks of one meatball. `suffix` is appended
/// to the mark names; `skip_bottom_edges` leaves out the first skewer edges
/// (already present from the previous meatball).
inline void emit_meatball(GraphBuilder& b, const MeatballFrame& f, const std::string& suffix,
                          std::int64_t skip_bottom_edges, bool circle_marks) {
  const int n = f.n;
  std::vector<std::vector<VertexId>> ids(n + 1);
  for (int h = 0; h <= n; ++h) {
    const auto& w = f.windows[h];
    std::int64_t ts = f.circle_size(h);
    ids[h].resize(static_cast<std::size_t>(ts * w.size()));
    for (std::int64_t t = 0; t < ts; ++t)
      for (auto k = w.lo; k <= w.hi; ++k) {
        auto l = f.label(h, t, k);
        ids[h][t * w.size() + (k - w.lo)] = (h == 0 && f.offset) ? b.ensure_vertex(l) : b.add_vertex(l);
      }
  }
  auto at = [&](int h, std::int64_t t, std::int64_t k) {
    return ids[h][t * f.windows[h].size() + (k - f.windows[h].lo)];
  };
  for (int h = 0; h <= n; ++h) {
    const auto& w = f.windows[h];
    const std::int64_t ts = f.circle_size(h);
    const std::int64_t c3 = pow3(h);
    const auto hm = static_cast<std::uint32_t>(f.lumped ? c3 : 1);
    for (std::int64_t t = 0; t < ts; ++t)
      for (auto k = w.lo; k <= w.hi; ++k) {
        VertexId v = at(h, t, k);
        if (k < w.hi) {
          if (h == 0) {
            if (k - w.lo >= skip_bottom_edges) b.add_edge(v, at(0, 0, k + 1), 1.0, EdgeKind::Skewer);
          } else {
            b.add_edge(v, at(h, t, k + 1), 1.0, EdgeKind::H3Horizontal, hm);
          }
        }
        if (h >= 1) {
          if (f.lumped) {
            if (k < w.hi) b.add_edge(v, at(h, 0, k + 1), 1.0, EdgeKind::H3CycleDiag, static_cast<std::uint32_t>(2 * c3));
          } else {
            std::int64_t tn = (t + 1) % c3;
            b.add_edge(v, at(h, tn, k), 1.0, EdgeKind::Cycle);
            if (k < w.hi) b.add_edge(v, at(h, tn, k + 1), 1.0, EdgeKind::H3CycleDiag);
            if (k > w.lo) b.add_edge(v, at(h, tn, k - 1), 1.0, EdgeKind::H3CycleDiag);
          }
        }
        if (h < n) {
          const std::int64_t children = f.lumped ? 1 : 3;
          const auto m = static_cast<std::uint32_t>(f.lumped ? pow3(h + 1) : 1);
          for (std::int64_t c = 0; c < children; ++c)
            b.add_edge(v, at(h + 1, 3 * t + c, 2 * k), 1.0, EdgeKind::H3TreeDiag, m);
        }
      }
  }
  const std::int64_t bc = f.bottom_count;
  const std::int64_t lc = f.l_count(), rc = f.r_count();
  b.declare_mark("Z" + suffix);
  for (std::int64_t k = 0; k < bc; ++k) {
    VertexId v = at(0, 0, k);
    b.mark("S" + suffix, v);
    if (k < lc) b.mark("L" + suffix, v);
    else if (k >= bc - rc) b.mark("R" + suffix, v);
    else b.mark("Z" + suffix, v);
    if (k == lc) b.mark("m" + suffix, v);
  }
  for (std::int64_t t = 0; t < f.circle_size(n); ++t)
    for (auto k = f.windows[n].lo; k <= f.windows[n].hi; ++k) b.mark("ceiling" + suffix, at(n, t, k));
  if (circle_marks)
    for (int h = 1; h <= n; ++h)
      for (auto k = f.windows[h].lo; k <= f.windows[h].hi; ++k) {
        std::string name = "circle:" + std::to_string(h) + "," + std::to_string(k);
        for (std::int64_t t = 0; t < f.circle_size(h); ++t) b.mark(name, at(h, t, k));
      }
}

inline MeatballFrame make_frame(int id, int n, std::int64_t bottom_len, int slack,
                                std::optional<std::int64_t> offset, bool lumped) {
  if (n < 1) throw DomainError("meatball height must be at least 1");
  if (n > 12) throw DomainError("meatball height too large");
  if (bottom_len < 3) throw DomainError("bottom path length must be at least 3");
  if (bottom_len + 1 < pow2(n) + 1 + pow2(n + 1))
    throw DomainError("bottom path too short to hold L, a midpoint and R");
  MeatballFrame f;
  f.id = id;
  f.n = n;
  f.bottom_count = bottom_len + 1;
  f.offset = offset;
  f.lumped = lumped;
  f.windows = doubling_windows(n, 0, bottom_len, slack);
  return f;
}

}  // namespace detail

/// One meatball M_n: pairs (t, w), t over whole H2 levels, w in the box.
/// With `lumped`, each cocircular class is a single vertex and edges become
/// bundles; flows and potentials that are constant on classes are unchanged.
inline Graph build_meatball(const MeatballSpec& spec, bool lumped = false) {
  auto f = detail::make_frame(spec.n, spec.n, spec.resolved_bottom_len(), spec.slack, std::nullopt, lumped);
  GraphBuilder b;
  detail::emit_meatball(b, f, "", 0, true);
  return std::move(b).build();
}

struct SouvlakiSpec {
  enum class Variant { Standard, Stretched };
  int N = 1;
  Variant variant = Variant::Standard;
  std::vector<std::int64_t> f;  // stretched: bottom vertex count of meatball n; empty = default
  bool lumped = false;
  int slack = 1;
};

/// Default stretching: f(n) = 3 * 2^n + s(1, d) with d = 2^{n+1}, so the
/// middle segment Z_n has exactly s(1, d) vertices.
inline std::vector<std::int64_t> default_stretch(int N) {
  std::vector<std::int64_t> f;
  for (int n = 1; n <= N; ++n) f.push_back(3 * pow2(n) + constructive_s(1.0, pow2(n + 1)));
  return f;
}

/// Bottom vertex count of every meatball of the souvlaki.
inline std::vector<std::int64_t> bottom_counts(const SouvlakiSpec& spec) {
  if (spec.N < 1) throw DomainError("N must be at least 1");
  std::vector<std::int64_t> counts;
  if (spec.variant == SouvlakiSpec::Variant::Standard) {
    for (int n = 1; n <= spec.N; ++n) counts.push_back(3 * pow2(n) + 1);
    return counts;
  }
  counts = spec.f.empty() ? default_stretch(spec.N) : spec.f;
  if (static_cast<int>(counts.size()) < spec.N) throw DomainError("f has fewer than N entries");
  counts.resize(spec.N);
  for (int n = 1; n <= spec.N; ++n) {
    if (n > 1 && counts[n - 1] <= counts[n - 2]) throw DomainError("f must be strictly increasing");
    if (counts[n - 1] < 3 * pow2(n) + 1)
      throw DomainError("f(" + std::to_string(n) + ") too small to fit L, Z and R");
  }
  return counts;
}

/// Skewer index of the first bottom vertex of each meatball.
inline std::vector<std::int64_t> skewer_offsets(const std::vector<std::int64_t>& counts) {
  std::vector<std::int64_t> a{0};
  for (std::size_t i = 0; i + 1 < counts.size(); ++i)
    a.push_back(a.back() + counts[i] - pow2(static_cast<int>(i) + 2));
  return a;
}

/// Meatballs 1..N glued along the skewer: L_{n+1} onto R_n.
inline Graph build_souvlaki(const SouvlakiSpec& spec) {
  auto counts = bottom_counts(spec);
  auto offsets = skewer_offsets(counts);
  GraphBuilder b;
  for (int n = 1; n <= spec.N; ++n) {
    auto f = detail::make_frame(n, n, counts[n - 1] - 1, spec.slack, offsets[n - 1], spec.lumped);
    std::int64_t skip = n == 1 ? 0 : pow2(n) - 1;
    detail::emit_meatball(b, f, ":" + std::to_string(n), skip, false);
  }
  std::int64_t last = offsets.back() + counts.back() - 1;
  for (std::int64_t x = 0; x <= last; ++x) b.mark("skewer", b.id(VertexLabel::skewer(x)));
  b.mark("root", b.id(VertexLabel::skewer(0)));
  for (std::int64_t x = last - pow2(spec.N + 1) + 1; x <= last; ++x)
    b.mark("boundary", b.id(VertexLabel::skewer(x)));
  return std::move(b).build();
}

/// Frame of a stand-alone meatball graph (marks "S", "ceiling").
inline MeatballFrame meatball_frame(const Graph& g) {
  const auto& s = g.mark("S");
  if (s.empty() || g.label(s[0]).kind() != LabelKind::Pair)
    throw DomainError("graph is not a stand-alone meatball");
  MeatballFrame f;
  f.id = g.label(s[0])[0];
  f.n = g.label(g.mark("ceiling").at(0))[1];
  f.bottom_count = static_cast<std::int64_t>(s.size());
  f.lumped = !g.find(VertexLabel::pair(f.id, 1, 1, 0));
  int slack = g.find(VertexLabel::pair(f.id, 1, 0, -1)) ? 1 : 0;
  f.windows = doubling_windows(f.n, 0, f.bottom_count - 1, slack);
  return f;
}

/// Frame of meatball n inside a souvlaki graph (marks "L:n", "R:n").
inline MeatballFrame souvlaki_frame(const Graph& g, int n) {
  std::string sfx = ":" + std::to_string(n);
  std::int64_t lo = INT64_MAX, hi = INT64_MIN;
  for (auto v : g.mark("S" + sfx)) {
    const auto& l = g.label(v);
    if (l.kind() != LabelKind::Skewer) throw DomainError("mark S" + sfx + " is not on the skewer");
    lo = std::min<std::int64_t>(lo, l[0]);
    hi = std::max<std::int64_t>(hi, l[0]);
  }
  MeatballFrame f;
  f.id = n;
  f.n = n;
  f.offset = lo;
  f.bottom_count = hi - lo + 1;
  f.lumped = !g.find(VertexLabel::pair(n, 1, 1, 0));
  int slack = g.find(VertexLabel::pair(n, 1, 0, -1)) ? 1 : 0;
  f.windows = doubling_windows(n, 0, f.bottom_count - 1, slack);
  return f;
}

/// Number of meatballs in a souvlaki graph.
inline int souvlaki_size(const Graph& g) {
  int N = 0;
  while (g.has_mark("L:" + std::to_string(N + 1))) ++N;
  if (N == 0) throw DomainError("graph is not a souvlaki");
  return N;
}

/// Cocircular classes of a full (non-lumped) meatball or souvlaki graph.
inline std::vector<std::vector<VertexId>> cocircular_classes(const Graph& g) {
  std::map<std::tuple<int, int, int>, std::vector<VertexId>> by;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    const auto& l = g.label(v);
    if (l.kind() == LabelKind::Pair) by[{l[0], l[1], l[3]}].push_back(v);
  }
  std::vector<std::vector<VertexId>> out;
  for (auto& [key, vs] : by) out.push_back(std::move(vs));
  return out;
}

}  // namespace souvlaki
