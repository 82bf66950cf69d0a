#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "souvlaki/graph.hpp"
#include "souvlaki/hyperbolic.hpp"
#include "souvlaki/laplacian.hpp"

namespace souvlaki {

/// Current on every edge record of one graph, positive in the direction
/// e.u -> e.v (the canonical label order). A record of multiplicity m
/// carries the total over its m strands, split equally.
class Flow {
 public:
  explicit Flow(const Graph& g) : g_(&g), value_(g.num_edges(), 0.0) {}

  const Graph& graph() const { return *g_; }
  const std::vector<double>& values() const { return value_; }
  double value(EdgeId e) const { return value_.at(e); }
  void set(EdgeId e, double x) { value_.at(e) = x; }

  /// Adds `amount` of current from `from` to `to` on their edge (of `kind`, if given).
  void push(VertexId from, VertexId to, double amount, std::optional<EdgeKind> kind = std::nullopt) {
    auto e = g_->find_edge(from, to, kind);
    if (!e) throw DomainError("no edge " + g_->name(from) + " -- " + g_->name(to));
    value_[*e] += g_->edge(*e).u == from ? amount : -amount;
  }

  Flow& operator+=(const Flow& o) {
    if (o.g_ != g_) throw DomainError("flows live on different graphs");
    for (std::size_t i = 0; i < value_.size(); ++i) value_[i] += o.value_[i];
    return *this;
  }

  std::vector<EdgeId> support() const {
    std::vector<EdgeId> s;
    for (EdgeId e = 0; e < value_.size(); ++e)
      if (value_[e] != 0.0) s.push_back(e);
    return s;
  }

 private:
  const Graph* g_;
  std::vector<double> value_;
};

/// Net outflow at v.
inline double divergence(const Flow& f, VertexId v) {
  double d = 0;
  for (auto inc : f.graph().incident(v)) {
    const auto& e = f.graph().edge(inc.edge);
    d += e.u == v ? f.value(inc.edge) : -f.value(inc.edge);
  }
  return d;
}

inline std::vector<double> divergence(const Flow& f) {
  std::vector<double> d(f.graph().num_vertices(), 0.0);
  const auto& edges = f.graph().edges();
  for (EdgeId i = 0; i < edges.size(); ++i) {
    d[edges[i].u] += f.value(i);
    d[edges[i].v] -= f.value(i);
  }
  return d;
}

/// Dirichlet energy: sum of value^2 r / m over edge records.
inline double energy(const Flow& f) {
  double s = 0;
  const auto& edges = f.graph().edges();
  for (EdgeId i = 0; i < edges.size(); ++i) {
    double x = f.value(i);
    if (x != 0.0) s += x * x * edges[i].resistance / edges[i].multiplicity;
  }
  return s;
}

/// Current through every tree edge of an H2 ball: 3^{-d} into each depth-d vertex.
inline Flow tree_flow_t(const Graph& h2) {
  Flow f(h2);
  for (EdgeId i = 0; i < h2.num_edges(); ++i) {
    const auto& e = h2.edge(i);
    const auto &a = h2.label(e.u), &b = h2.label(e.v);
    if (a.kind() != LabelKind::Tree || b.kind() != LabelKind::Tree)
      throw DomainError("tree flow needs an H2 graph");
    if (e.kind != EdgeKind::Tree) continue;
    int d = std::max(a[0], b[0]);
    double x = 1.0 / static_cast<double>(pow3(d));
    f.set(i, a[0] < b[0] ? x : -x);
  }
  return f;
}

/// Atomic flow g^j split into its three parts.
struct AtomicFlow {
  Flow out, middle, in;
  std::int64_t j;
  int height;  // layers climbed by the out-part

  Flow combined() const {
    Flow f = out;
    f += middle;
    f += in;
    return f;
  }
};

/// g^j inside the meatball described by `frame`: 2^{-n} leaves l^j, climbs
/// min(j, n) layers of the tree flow, runs horizontally inside each H2
/// vertex and comes down, halved, to r^{2j-1} and r^{2j}.
inline AtomicFlow atomic_flow(const Graph& g, const MeatballFrame& frame, std::int64_t j) {
  const int n = frame.n;
  if (j < 1 || j > frame.l_count()) throw DomainError("atomic flow index out of range");
  const int H = static_cast<int>(std::min<std::int64_t>(j, n));
  const std::int64_t xl = frame.l_pos(j), xr1 = frame.r_pos(2 * j - 1), xr2 = frame.r_pos(2 * j);
  if (xl < 0 || xr2 >= frame.bottom_count || xr1 <= xl)
    throw DomainError("meatball too short for the atomic flow");
  for (int h = 0; h <= H; ++h)
    if (!frame.windows.at(h).contains(pow2(h) * xr2))
      throw DomainError("meatball too short for the atomic flow");
  const double unit = 1.0 / static_cast<double>(pow2(n));
  auto id = [&](int h, std::int64_t t, std::int64_t k) { return g.id(frame.label(h, t, k)); };
  // current per class vertex at height h for a per-H2-vertex amount `a`
  auto per = [&](int h, double a) { return a * static_cast<double>(pow3(h)) / frame.circle_size(h); };
  auto parent = [&](std::int64_t t) { return frame.lumped ? 0 : t / 3; };

  AtomicFlow af{Flow(g), Flow(g), Flow(g), j, H};
  for (int h = 1; h <= H; ++h) {
    double a = unit / static_cast<double>(pow3(h));
    for (std::int64_t t = 0; t < frame.circle_size(h); ++t) {
      af.out.push(id(h - 1, parent(t), pow2(h - 1) * xl), id(h, t, pow2(h) * xl), per(h, a),
                  EdgeKind::H3TreeDiag);
      for (auto xr : {xr1, xr2})
        af.in.push(id(h, t, pow2(h) * xr), id(h - 1, parent(t), pow2(h - 1) * xr), per(h, a / 2),
                   EdgeKind::H3TreeDiag);
    }
  }
  const double a = unit / static_cast<double>(pow3(H));
  const std::int64_t s = pow2(H);
  for (std::int64_t t = 0; t < frame.circle_size(H); ++t) {
    for (std::int64_t k = s * xl; k < s * xr2; ++k)
      af.middle.push(id(H, t, k), id(H, t, k + 1), per(H, k < s * xr1 ? a : a / 2), EdgeKind::H3Horizontal);
  }
  return af;
}

inline AtomicFlow atomic_flow(const Graph& meatball, std::int64_t j) {
  return atomic_flow(meatball, meatball_frame(meatball), j);
}

/// g(n): union of the 2^n atomic flows of one meatball.
inline Flow meatball_flow(const Graph& g, const MeatballFrame& frame) {
  Flow f(g);
  for (std::int64_t j = 1; j <= frame.l_count(); ++j) f += atomic_flow(g, frame, j).combined();
  return f;
}

inline Flow meatball_flow(const Graph& meatball) { return meatball_flow(meatball, meatball_frame(meatball)); }

/// Union of g(1..N) on a souvlaki, plus 1/2 on the first skewer edge so that
/// the root o is the only source (unit strength); sinks are R_N.
inline Flow souvlaki_flow(const Graph& g) {
  const int N = souvlaki_size(g);
  Flow f(g);
  for (int n = 1; n <= N; ++n) f += meatball_flow(g, souvlaki_frame(g, n));
  f.push(g.id(VertexLabel::skewer(0)), g.id(VertexLabel::skewer(1)), 0.5, EdgeKind::Skewer);
  return f;
}

/// Current flow of a solved potential: (phi_u - phi_v) / r per strand.
inline Flow current_flow(const Graph& g, const Eigen::VectorXd& potential) {
  Flow f(g);
  for (EdgeId i = 0; i < g.num_edges(); ++i) {
    const auto& e = g.edge(i);
    double d = potential[e.u] - potential[e.v];
    f.set(i, std::isnan(d) ? 0.0 : d * e.conductance());
  }
  return f;
}

inline double effective_resistance(const Graph& g, std::span<const VertexId> a, std::span<const VertexId> b,
                                   SolverOptions opt = {}) {
  return unit_current(g, a, b, opt).resistance;
}

inline double effective_resistance(const Graph& g, VertexId a, VertexId b, SolverOptions opt = {}) {
  if (a == b) return 0.0;
  return unit_current(g, std::span<const VertexId>(&a, 1), std::span<const VertexId>(&b, 1), opt).resistance;
}

inline double effective_resistance_to_set(const Graph& g, VertexId a, std::span<const VertexId> boundary,
                                          SolverOptions opt = {}) {
  for (auto b : boundary)
    if (b == a) return 0.0;
  return unit_current(g, std::span<const VertexId>(&a, 1), boundary, opt).resistance;
}

struct ProfileRow {
  int radius;
  double resistance;
};

/// R_eff from mark "root" to mark "boundary" over nested truncations.
inline std::vector<ProfileRow> transience_profile(const std::function<Graph(int)>& builder,
                                                  const std::vector<int>& radii, SolverOptions opt = {}) {
  std::vector<ProfileRow> rows;
  for (int r : radii) {
    Graph g = builder(r);
    VertexId o = g.mark("root").at(0);
    rows.push_back({r, effective_resistance_to_set(g, o, g.mark("boundary"), opt)});
  }
  return rows;
}

}  // namespace souvlaki
