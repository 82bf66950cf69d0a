#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "souvlaki/certificate.hpp"
#include "souvlaki/graph.hpp"
#include "souvlaki/graph_algorithms.hpp"
#include "souvlaki/hyperbolic.hpp"
#include "souvlaki/parallel.hpp"
#include "souvlaki/philox.hpp"

namespace souvlaki {

inline constexpr std::size_t kExhaustiveLimit = 700;
inline constexpr std::uint64_t kDefaultQuadruples = 1000000;

struct DeltaReport {
  bool exhaustive = true;
  std::uint64_t seed = 0;
  std::size_t pool = 0;             // vertices scanned
  std::uint64_t quadruples = 0;     // C(pool, 4)
  double delta = 0;
  std::array<VertexId, 4> witness{};
  bool has_witness = false;
};

struct DeltaOptions {
  bool sampled = false;
  std::uint64_t quadruples = kDefaultQuadruples;  // sampled: minimum number examined
  std::uint64_t seed = 0;
  std::size_t exhaustive_limit = kExhaustiveLimit;
};

/// (largest - middle) of the three pair sums: twice the four-point defect.
inline int four_point_defect2(int dxy, int dxz, int dxw, int dyz, int dyw, int dzw) {
  int s1 = dxy + dzw, s2 = dxz + dyw, s3 = dxw + dyz;
  int hi = std::max({s1, s2, s3}), lo = std::min({s1, s2, s3});
  return hi - (s1 + s2 + s3 - hi - lo);
}

inline double four_point_delta(const Graph& g, VertexId x, VertexId y, VertexId z, VertexId w) {
  auto dx = bfs(g, x), dy = bfs(g, y), dz = bfs(g, z);
  for (auto d : {dx[y], dx[z], dx[w], dy[z], dy[w], dz[w]})
    if (d == kUnreachable) throw DomainError("graph is disconnected");
  return four_point_defect2(dx[y], dx[z], dx[w], dy[z], dy[w], dz[w]) / 2.0;
}

namespace detail {

inline std::uint64_t choose4(std::uint64_t p) {
  return p < 4 ? 0 : p * (p - 1) / 2 * (p - 2) / 3 * (p - 3) / 4;
}

/// Distances between pool vertices; rows follow pool order.
inline std::vector<std::uint16_t> pool_distances(const Graph& g, const std::vector<VertexId>& pool) {
  const std::size_t p = pool.size();
  std::vector<std::uint16_t> d(p * p);
  parallel_chunks(p, 64, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) {
      auto row = bfs(g, pool[i]);
      for (std::size_t j = 0; j < p; ++j) {
        auto x = row[pool[j]];
        if (x == kUnreachable) throw DomainError("graph is disconnected");
        if (x > std::numeric_limits<std::uint16_t>::max()) throw DomainError("distance exceeds 65535");
        d[i * p + j] = static_cast<std::uint16_t>(x);
      }
    }
  });
  return d;
}

struct QuadBest {
  int defect2 = -1;
  std::array<std::uint32_t, 4> w{};
};

/// Lexicographic scan of x in [xb, xe), y > x, z > y, w > z. Only strict
/// improvements move the witness; a triple is skipped when twice its smallest
/// distance cannot beat the current best (the defect never exceeds any of
/// the six distances).
inline QuadBest scan_quadruples(const std::vector<std::uint16_t>& d, std::size_t p, std::size_t xb,
                                std::size_t xe) {
  QuadBest best;
  for (std::size_t x = xb; x < xe; ++x) {
    const std::uint16_t* Dx = &d[x * p];
    for (std::size_t y = x + 1; y < p; ++y) {
      const int dxy = Dx[y];
      if (2 * dxy <= best.defect2) continue;
      const std::uint16_t* Dy = &d[y * p];
      for (std::size_t z = y + 1; z < p; ++z) {
        const int dxz = Dx[z], dyz = Dy[z];
        if (2 * std::min({dxy, dxz, dyz}) <= best.defect2) continue;
        const std::uint16_t* Dz = &d[z * p];
        int row = -1;
        for (std::size_t w = z + 1; w < p; ++w) {
          int s1 = dxy + Dz[w], s2 = dxz + Dy[w], s3 = dyz + Dx[w];
          int hi = std::max(s1, std::max(s2, s3)), lo = std::min(s1, std::min(s2, s3));
          row = std::max(row, 2 * hi + lo - s1 - s2 - s3);
        }
        if (row <= best.defect2) continue;
        for (std::size_t w = z + 1; w < p; ++w) {
          if (four_point_defect2(dxy, dxz, Dx[w], dyz, Dy[w], Dz[w]) == row) {
            best.defect2 = row;
            best.w = {static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y), static_cast<std::uint32_t>(z),
                      static_cast<std::uint32_t>(w)};
            break;
          }
        }
      }
    }
  }
  return best;
}

}  // namespace detail

/// Four-point hyperbolicity constant. Exhaustive up to `exhaustive_limit`
/// vertices unless sampling is requested; sampled mode scans every
/// quadruple of a seeded random vertex pool with C(pool, 4) >= quadruples,
/// which gives a lower bound.
inline DeltaReport four_point_delta(const Graph& g, const DeltaOptions& opt = {}) {
  const std::size_t n = g.num_vertices();
  if (n == 0) throw DomainError("empty graph");
  DeltaReport rep;
  rep.seed = opt.seed;
  std::vector<VertexId> pool(n);
  std::iota(pool.begin(), pool.end(), VertexId{0});
  bool sample = opt.sampled || n > opt.exhaustive_limit;
  if (sample) {
    std::size_t p = 4;
    while (p < n && detail::choose4(p) < opt.quadruples) ++p;
    if (p < n) {
      auto rng = trial_stream(opt.seed, 0);
      for (std::size_t i = 0; i < p; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - i));
        std::swap(pool[i], pool[std::min(j, n - 1)]);
      }
      pool.resize(p);
      std::sort(pool.begin(), pool.end());
    } else {
      sample = false;
    }
  }
  rep.exhaustive = !sample;
  rep.pool = pool.size();
  rep.quadruples = detail::choose4(pool.size());
  if (components(g) != std::vector<int>(n, 0)) throw DomainError("graph is disconnected");
  if (pool.size() < 4) return rep;
  auto d = detail::pool_distances(g, pool);
  const std::size_t p = pool.size();
  constexpr std::size_t kChunks = 64;
  std::vector<detail::QuadBest> part(std::min(kChunks, p));
  // x-chunks shrink towards small x, where most quadruples start
  std::vector<std::size_t> cut{0};
  {
    const double total = static_cast<double>(detail::choose4(p));
    double acc = 0;
    std::size_t c = 1;
    for (std::size_t x = 0; x < p && c < part.size(); ++x) {
      acc += static_cast<double>(detail::choose4(p - x) - detail::choose4(p - x - 1));
      if (acc >= total * static_cast<double>(c) / static_cast<double>(part.size())) {
        cut.push_back(x + 1);
        ++c;
      }
    }
    while (cut.size() <= part.size()) cut.push_back(p);
    cut.back() = p;
  }
  parallel_chunks(part.size(), part.size(), [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t c = b; c < e; ++c) part[c] = detail::scan_quadruples(d, p, cut[c], cut[c + 1]);
  });
  detail::QuadBest best;
  for (const auto& q : part)
    if (q.defect2 > best.defect2) best = q;
  rep.delta = best.defect2 / 2.0;
  rep.has_witness = best.defect2 >= 0;
  for (int i = 0; i < 4; ++i) rep.witness[i] = pool[best.w[i]];
  return rep;
}

struct GeodesicSet {
  std::vector<std::vector<VertexId>> paths;  // lexicographic by vertex id
  std::int32_t length = kUnreachable;
  bool capped = false;
};

/// All shortest paths from u to the nearest vertices of `targets`, at most `cap`.
inline GeodesicSet all_geodesics(const Graph& g, VertexId u, std::span<const VertexId> targets, std::size_t cap) {
  if (targets.empty()) throw DomainError("empty target set");
  auto dist = bfs(g, targets);
  GeodesicSet out;
  out.length = dist[u];
  if (dist[u] == kUnreachable) return out;
  std::vector<VertexId> path{u};
  std::vector<std::vector<VertexId>> next(g.num_vertices());
  auto successors = [&](VertexId v) -> const std::vector<VertexId>& {
    auto& nx = next[v];
    if (nx.empty() && dist[v] > 0) {
      for (auto inc : g.incident(v))
        if (dist[inc.neighbor] == dist[v] - 1) nx.push_back(inc.neighbor);
      std::sort(nx.begin(), nx.end());
      nx.erase(std::unique(nx.begin(), nx.end()), nx.end());
    }
    return nx;
  };
  std::vector<std::size_t> pos{0};
  while (!pos.empty()) {
    VertexId v = path.back();
    if (dist[v] == 0) {
      if (out.paths.size() == cap) {
        out.capped = true;
        return out;
      }
      out.paths.push_back(path);
      path.pop_back();
      pos.pop_back();
      continue;
    }
    const auto& nx = successors(v);
    if (pos.back() == nx.size()) {
      path.pop_back();
      pos.pop_back();
      continue;
    }
    path.push_back(nx[pos.back()++]);
    pos.push_back(0);
  }
  return out;
}

inline GeodesicSet all_geodesics(const Graph& g, VertexId u, VertexId v, std::size_t cap) {
  return all_geodesics(g, u, std::span<const VertexId>(&v, 1), cap);
}

inline GeodesicList to_certificate(const Graph& g, const GeodesicSet& s, VertexId from, const std::string& to) {
  GeodesicList c;
  c.from = g.name(from);
  c.to = to;
  c.capped = s.capped;
  for (const auto& p : s.paths) {
    std::vector<std::string> names;
    for (auto v : p) names.push_back(g.name(v));
    c.paths.push_back(std::move(names));
  }
  return c;
}

/// Largest skewer index of a souvlaki or meatball graph, i.e. the far end of S.
inline VertexId skewer_end(const Graph& g) {
  const auto& s = g.has_mark("skewer") ? g.mark("skewer") : g.mark("S");
  VertexId best = s.at(0);
  std::int64_t bx = -1;
  for (auto v : s) {
    const auto& l = g.label(v);
    std::int64_t x = l.kind() == LabelKind::Skewer ? l[0] : l[3];
    if (x > bx) {
      bx = x;
      best = v;
    }
  }
  return best;
}

/// Greedy escape path: step down the tree-diagonal whenever the horizontal
/// coordinate is even, otherwise step horizontally towards infinity (back one
/// step at the far edge of the box); on S, walk to its far end.
inline std::vector<VertexId> escape_geodesic(const Graph& g, VertexId x) {
  const bool souvlaki = g.has_mark("skewer");
  if (!souvlaki && !g.has_mark("S")) throw DomainError("escape rule needs a souvlaki or meatball graph");
  std::vector<MeatballFrame> frames;
  if (souvlaki) {
    int N = souvlaki_size(g);
    for (int n = 1; n <= N; ++n) frames.push_back(souvlaki_frame(g, n));
  } else {
    frames.push_back(meatball_frame(g));
  }
  const VertexId end = skewer_end(g);
  std::vector<VertexId> path{x};
  VertexId v = x;
  const std::size_t guard = g.num_vertices() + 1;
  while (v != end) {
    if (path.size() > guard) throw DomainError("escape rule did not terminate");
    const auto& l = g.label(v);
    VertexLabel next;
    if (l.kind() == LabelKind::Skewer) {
      next = VertexLabel::skewer(l[0] + 1);
    } else if (l.kind() == LabelKind::Pair) {
      const auto& f = souvlaki ? frames.at(static_cast<std::size_t>(l[0]) - 1) : frames[0];
      const int h = l[1];
      const std::int64_t t = l[2], k = l[3];
      if (h == 0) {
        next = f.label(0, 0, k + 1);
      } else if (k % 2 == 0) {
        next = f.label(h - 1, f.lumped ? 0 : t / 3, k / 2);
      } else {
        next = f.label(h, t, f.windows[h].contains(k + 1) ? k + 1 : k - 1);
      }
    } else {
      throw DomainError("escape rule inapplicable at " + g.name(v));
    }
    v = g.id(next);
    path.push_back(v);
  }
  return path;
}

struct EscapeAudit {
  std::size_t vertices = 0;
  std::size_t non_geodesic = 0;  // escape path longer than the BFS distance
  std::int32_t max_excess = 0;
  std::optional<VertexId> witness;  // first vertex attaining max_excess
};

/// Compares escape_geodesic with the BFS distance at every vertex.
inline EscapeAudit escape_audit(const Graph& g) {
  auto dist = bfs(g, skewer_end(g));
  EscapeAudit a;
  a.vertices = g.num_vertices();
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    std::int32_t e = static_cast<std::int32_t>(escape_geodesic(g, v).size()) - 1 - dist[v];
    if (e <= 0) continue;
    ++a.non_geodesic;
    if (e > a.max_excess) {
      a.max_excess = e;
      a.witness = v;
    }
  }
  return a;
}

struct CoincidenceReport {
  std::size_t samples = 0;
  std::size_t geodesic = 0;      // greedy path length equals the BFS distance
  std::size_t merged = 0;        // path reaches the skewer and stays on it
  std::size_t pairs = 0;
  std::size_t coinciding = 0;    // pairs whose paths share their tail from some point on
  std::vector<std::string> failures;

  bool ok() const { return geodesic == samples && merged == samples && coinciding == pairs; }
};

inline CoincidenceReport coincidence_check(const Graph& g, std::span<const VertexId> sample) {
  const VertexId end = skewer_end(g);
  auto dist = bfs(g, end);
  std::vector<char> on_s(g.num_vertices(), 0);
  for (auto v : g.has_mark("skewer") ? g.mark("skewer") : g.mark("S")) on_s[v] = 1;
  CoincidenceReport rep;
  rep.samples = sample.size();
  std::vector<std::vector<VertexId>> paths;
  for (auto x : sample) {
    auto p = escape_geodesic(g, x);
    if (static_cast<std::int32_t>(p.size()) - 1 == dist[x]) ++rep.geodesic;
    else rep.failures.push_back("not a geodesic from " + g.name(x));
    std::size_t first = p.size();
    for (std::size_t i = 0; i < p.size(); ++i)
      if (on_s[p[i]]) {
        first = i;
        break;
      }
    bool stays = first < p.size();
    for (std::size_t i = first; i < p.size() && stays; ++i) stays = on_s[p[i]];
    if (stays) ++rep.merged;
    else rep.failures.push_back("does not merge into the skewer from " + g.name(x));
    paths.push_back(std::move(p));
  }
  for (std::size_t a = 0; a < paths.size(); ++a)
    for (std::size_t b = a + 1; b < paths.size(); ++b) {
      ++rep.pairs;
      const auto &p = paths[a], &q = paths[b];
      // tails agree from the first vertex of p that q also visits
      std::vector<char> in_q(g.num_vertices(), 0);
      for (auto v : q) in_q[v] = 1;
      std::size_t i = 0;
      while (i < p.size() && !in_q[p[i]]) ++i;
      std::size_t j = i < p.size() ? static_cast<std::size_t>(std::find(q.begin(), q.end(), p[i]) - q.begin()) : q.size();
      bool same = i < p.size() && p.size() - i == q.size() - j && std::equal(p.begin() + i, p.end(), q.begin() + j);
      if (same) ++rep.coinciding;
      else rep.failures.push_back("tails differ: " + g.name(p[0]) + " / " + g.name(q[0]));
    }
  return rep;
}

/// Seeded sample of distinct vertices, sorted by id.
inline std::vector<VertexId> sample_vertices(const Graph& g, std::size_t count, std::uint64_t seed) {
  std::vector<VertexId> all(g.num_vertices());
  std::iota(all.begin(), all.end(), VertexId{0});
  count = std::min(count, all.size());
  auto rng = trial_stream(seed, 1);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(all.size() - i));
    std::swap(all[i], all[std::min(j, all.size() - 1)]);
  }
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace souvlaki
