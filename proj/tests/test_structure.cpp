#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "souvlaki/gadget.hpp"
#include "souvlaki/minor.hpp"
#include "souvlaki/structure.hpp"
#include "test_util.hpp"

using namespace souvlaki;

namespace {

Graph stretched(int N) {
  SouvlakiSpec s;
  s.N = N;
  s.variant = SouvlakiSpec::Variant::Stretched;
  return build_souvlaki(s);
}

/// s:0..s:10 plus the detour s:3 - s:11 - s:12 - s:7.
Graph detour_toy() {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < 10; ++i) e.emplace_back(i, i + 1);
  e.insert(e.end(), {{3, 11}, {11, 12}, {12, 7}});
  return testutil::make_graph(13, e);
}

/// Two degree-3 anchors joined by a 10-edge path, each with two pendant edges.
Graph anchored_path() {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < 10; ++i) e.emplace_back(i, i + 1);
  e.insert(e.end(), {{0, 11}, {0, 12}, {10, 13}, {10, 14}});
  return testutil::make_graph(15, e);
}

Graph complete_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return testutil::make_graph(static_cast<std::size_t>(n), e);
}

Graph binary_tree(int depth) {
  std::vector<std::pair<int, int>> e;
  for (int v = 1; v < (1 << (depth + 1)) - 1; ++v) e.emplace_back((v - 1) / 2, v);
  return testutil::make_graph(static_cast<std::size_t>((1 << (depth + 1)) - 1), e);
}

}  // namespace

TEST(Suppress, AnchoredPathIsOneEdge) {
  auto g = anchored_path();
  auto s = suppress_degree2(g, 5);
  EXPECT_EQ(s.base.num_vertices(), 6u);
  EXPECT_EQ(s.base.num_edges(), 5u);
  auto e = s.base.find_edge(s.base.id(VertexLabel::skewer(0)), s.base.id(VertexLabel::skewer(10)));
  ASSERT_TRUE(e);
  EXPECT_EQ(s.count[*e], 10u);
  EXPECT_TRUE(s.black[*e]);
  EXPECT_EQ(s.base.edge(*e).resistance, 10.0);
  EXPECT_EQ(s.reconstructed_vertices(), g.num_vertices());
}

TEST(Suppress, NoDegreeTwoKeepsCounts) {
  auto g = complete_graph(5);
  auto s = suppress_degree2(g, 2);
  EXPECT_EQ(s.base.num_edges(), 10u);
  for (auto c : s.count) EXPECT_EQ(c, 1u);
  for (auto b : s.black) EXPECT_FALSE(b);
}

TEST(Suppress, DetourToyMatchesPathTracing) {
  // networkx oracle: chains (s0,s3,3), (s3,s7,3), (s3,s7,4), (s7,s10,3)
  auto g = detour_toy();
  auto s = suppress_degree2(g, 4);
  ASSERT_EQ(s.base.num_vertices(), 4u);
  std::multiset<std::tuple<std::string, std::string, std::uint64_t>> got;
  for (EdgeId e = 0; e < s.base.num_edges(); ++e)
    got.insert({s.base.name(s.base.edge(e).u), s.base.name(s.base.edge(e).v), s.count[e]});
  std::multiset<std::tuple<std::string, std::string, std::uint64_t>> want{
      {"s:0", "s:3", 3}, {"s:3", "s:7", 3}, {"s:3", "s:7", 4}, {"s:10", "s:7", 3}};
  EXPECT_EQ(got, want);
  for (EdgeId e = 0; e < s.base.num_edges(); ++e) {
    EXPECT_EQ(s.base.edge(e).resistance, static_cast<double>(s.count[e]));
    EXPECT_EQ(s.black[e] != 0, s.count[e] >= 4);
  }
  EXPECT_EQ(s.reconstructed_vertices(), 13u);
}

TEST(Suppress, PreservesResistance) {
  auto g = detour_toy();
  auto s = suppress_degree2(g, 1);
  auto a = g.id(VertexLabel::skewer(0)), b = g.id(VertexLabel::skewer(10));
  double k = effective_resistance(g, a, b);
  EXPECT_NEAR(k, 6.0 + 12.0 / 7.0, 1e-12);
  EXPECT_NEAR(effective_resistance(s.base, s.base.id(g.label(a)), s.base.id(g.label(b))), k, 1e-12);
}

TEST(Suppress, KeepSetAndErrors) {
  auto c = testutil::cycle_graph(8);
  EXPECT_THROW(suppress_degree2(c, 1), DomainError);
  std::array<VertexId, 1> one{0};
  EXPECT_THROW(suppress_degree2(c, 1, one), DomainError);
  std::array<VertexId, 2> two{testutil::s(c, 0), testutil::s(c, 4)};
  auto s = suppress_degree2(c, 1, two);
  EXPECT_EQ(s.base.num_edges(), 2u);
  EXPECT_EQ(s.base.edge(0).multiplicity, 1u);
  EXPECT_EQ(s.count[0] + s.count[1], 8u);
  auto d = testutil::make_graph(4, {{0, 1}, {2, 3}});
  EXPECT_THROW(suppress_degree2(d, 1), DomainError);
}

TEST(Floor, SeriesAndParallel) {
  auto p = testutil::path_graph(10);
  auto f = resistance_floor(p, testutil::s(p, 0), testutil::s(p, 10), 2);
  EXPECT_EQ(f.floor, 10.0);
  EXPECT_NEAR(f.exact, 10.0, 1e-9);
  EXPECT_TRUE(verify(p, f.cut));
  auto c = testutil::cycle_graph(20);
  auto h = resistance_floor(c, testutil::s(c, 0), testutil::s(c, 10), 2);
  EXPECT_EQ(h.floor, 5.0);
  EXPECT_NEAR(h.exact, 5.0, 1e-9);
  EXPECT_EQ(h.cut.edges.size(), 2u);
  EXPECT_TRUE(verify(c, h.cut));
}

TEST(Floor, CycleFamilyMatchesExact) {
  // networkx oracle: antipodal R_eff of C_{2a} is a/2
  for (int a : {4, 6, 10, 25}) {
    auto c = testutil::cycle_graph(static_cast<std::size_t>(2 * a));
    auto f = resistance_floor(c, testutil::s(c, 0), testutil::s(c, a), 3);
    EXPECT_NEAR(f.floor, a / 2.0, 1e-9);
    EXPECT_NEAR(f.exact, f.floor, 1e-9);
  }
}

TEST(Floor, DetourToy) {
  auto g = detour_toy();
  auto f = resistance_floor(g, testutil::s(g, 0), testutil::s(g, 10), 3);
  EXPECT_EQ(f.floor, 3.0);
  EXPECT_TRUE(f.consistent);
  EXPECT_NEAR(f.exact, 54.0 / 7.0, 1e-12);
  EXPECT_EQ(f.branch_vertices, 2u);
}

TEST(Floor, HypothesesChecked) {
  auto k = complete_graph(5);
  EXPECT_THROW(resistance_floor(k, 0, 1, 3), DomainError);
  auto t = binary_tree(3);
  EXPECT_THROW(resistance_floor(t, 0, 7, 3), DomainError);  // 6 vertices of degree 3
  EXPECT_THROW(resistance_floor(t, 0, 0, 20), DomainError);
}

TEST(Quotient, SkewerTreeOfStretchedSouvlaki) {
  // networkx oracle: Q_1 has 66 vertices / 65 edges, Q_2 514 / 513
  auto g = stretched(2);
  auto t = skewer_tree(g);
  EXPECT_EQ(t.num_vertices(), g.num_vertices());
  EXPECT_EQ(t.num_edges() + 1, t.num_vertices());
  auto q = quotient_Q(g, t);
  const std::pair<std::size_t, double> want[] = {{66, 65.0}, {514, 513.0}};
  double cumulative = 0;
  for (int n = 1; n <= 2; ++n) {
    auto b = quotient_block(q.q, n);
    EXPECT_EQ(b.num_vertices(), want[n - 1].first);
    auto va = b.mark("v:" + std::to_string(n)).at(0), vb = b.mark("v:" + std::to_string(n + 1)).at(0);
    auto f = resistance_floor(b, va, vb, std::max<std::uint64_t>(b.max_degree(), 2));
    EXPECT_NEAR(f.exact, want[n - 1].second, 1e-8);
    EXPECT_GE(f.floor, 1.0);
    EXPECT_TRUE(f.consistent);
    EXPECT_TRUE(verify(b, f.cut));
    cumulative += f.exact;
  }
  auto o = q.q.mark("v:1").at(0), end = q.q.mark("v:3").at(0);
  EXPECT_NEAR(effective_resistance(q.q, o, end), cumulative, 1e-8);
}

TEST(Quotient, SkewerPathCollapses) {
  auto g = stretched(1);
  std::vector<EdgeId> edges;
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    if (g.edge(e).kind == EdgeKind::Skewer) edges.push_back(e);
  auto path = edge_subgraph(g, edges);
  auto q = quotient_Q(g, path);
  EXPECT_EQ(q.pruned, 0u);
  // 70 skewer vertices: L_1 (2) -> v_1, R_1 (4) -> v_2
  EXPECT_EQ(q.q.num_vertices(), 70u - 2 - 4 + 2);
  EXPECT_EQ(q.q.max_degree(), 2u);
  EXPECT_NEAR(effective_resistance(q.q, *q.v[1], *q.v[2]), 65.0, 1e-9);
}

TEST(Quotient, TreeAvoidingMarksIsPruned) {
  auto g = stretched(1);
  // a path up into the box and back: every vertex avoids L and R
  auto a = g.id(VertexLabel::pair(1, 1, 0, 20)), b = g.id(VertexLabel::pair(1, 1, 0, 21)),
       c = g.id(VertexLabel::pair(1, 1, 1, 21));
  std::vector<EdgeId> edges{*g.find_edge(a, b), *g.find_edge(b, c)};
  auto t = edge_subgraph(g, edges);
  auto q = quotient_Q(g, t);
  EXPECT_EQ(q.q.num_vertices(), 0u);
  EXPECT_EQ(q.pruned, 3u);
  EXPECT_FALSE(q.v[1]);
}

TEST(Quotient, RejectsForeignTrees) {
  auto g = stretched(1);
  EXPECT_NO_THROW(quotient_Q(g, testutil::path_graph(3)));
  GraphBuilder b;
  b.add_vertex(VertexLabel::skewer(0));
  b.add_vertex(VertexLabel::skewer(100000));
  b.add_edge(0, 1, 1.0);
  EXPECT_THROW(quotient_Q(g, std::move(b).build()), DomainError);
}

TEST(Quotient, RejectsNonTrees) {
  auto g = stretched(1);
  auto c = g.id(VertexLabel::pair(1, 1, 0, 0)), d = g.id(VertexLabel::pair(1, 1, 1, 0)),
       e = g.id(VertexLabel::pair(1, 1, 2, 0));
  std::vector<EdgeId> tri{*g.find_edge(c, d), *g.find_edge(d, e), *g.find_edge(c, e)};
  EXPECT_THROW(quotient_Q(g, edge_subgraph(g, tri)), DomainError);
  auto skew = testutil::make_graph(3, {{0, 2}});
  EXPECT_THROW(quotient_Q(g, skew), DomainError);
}

TEST(Quotient, WilsonTreeBlocks) {
  auto g = stretched(2);
  auto t = wilson_tree(g, 7);
  EXPECT_EQ(t.num_edges() + 1, g.num_vertices());
  auto q = quotient_Q(g, t);
  for (int n = 1; n <= 2; ++n) {
    auto b = quotient_block(q.q, n);
    auto va = b.mark("v:" + std::to_string(n)).at(0), vb = b.mark("v:" + std::to_string(n + 1)).at(0);
    std::uint64_t branch = 0;
    for (VertexId v = 0; v < b.num_vertices(); ++v) branch += b.degree(v) > 2;
    auto f = resistance_floor(b, va, vb, std::max<std::uint64_t>(b.max_degree(), branch));
    EXPECT_GE(f.floor, 1.0);
    EXPECT_GE(f.exact, 1.0);
    EXPECT_TRUE(f.consistent);
    EXPECT_TRUE(verify(b, f.cut));
  }
  EXPECT_EQ(wilson_tree(g, 7).num_edges(), t.num_edges());
}

TEST(EstimateS, ConstructiveBound) {
  auto e = estimate_s(1, 2, 2000, 1);
  EXPECT_EQ(e.R, 4u);
  EXPECT_EQ(e.s, 8u);
  EXPECT_GT(e.trials, 100u);
  EXPECT_TRUE(e.holds);
  EXPECT_GE(e.min_resistance, 1.0);
  auto z = estimate_s(0, 3, 10);
  EXPECT_EQ(z.s, 1u);
  auto c3 = estimate_s(1, 3, 2000, 2);
  EXPECT_EQ(c3.s, 27u);
  EXPECT_TRUE(c3.holds);
  auto again = estimate_s(1, 3, 2000, 2);
  EXPECT_EQ(again.min_resistance, c3.min_resistance);
  EXPECT_EQ(again.witness, c3.witness);
}

TEST(Density, FullGadgetLevelPairs) {
  for (int n : {2, 3, 4}) {
    auto g = build_gadget({n});
    for (int m = 0; m < n; ++m) {
      auto d = level_bipartite_density(g, m, 2.0);
      EXPECT_EQ(d.edges, static_cast<std::uint64_t>(pow2(n - m) * pow2(n - m - 1)));
      EXPECT_EQ(d.edges, d.full_edges);
      EXPECT_NEAR(d.contracted_resistance, std::pow(2.0, 1 + m - n), 1e-12);
      EXPECT_NEAR(d.floor, 2.0 / 6.0, 1e-12);
      EXPECT_TRUE(d.floor_holds);
    }
  }
  EXPECT_EQ(average_degree(testutil::cycle_graph(7)), 2.0);
}

TEST(Density, SparseSubgraphMeetsFloor) {
  auto g = build_gadget({4});
  // keep one level-(0,1) edge per level-0 vertex plus one more: 17 edges, sizes 16 + 8
  std::vector<EdgeId> keep;
  std::vector<int> used(g.num_vertices(), 0);
  std::size_t extra = 1;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const auto& ed = g.edge(e);
    auto l0 = g.mark("level:0"), l1 = g.mark("level:1");
    bool a0 = std::binary_search(l0.begin(), l0.end(), ed.u) || std::binary_search(l0.begin(), l0.end(), ed.v);
    bool a1 = std::binary_search(l1.begin(), l1.end(), ed.u) || std::binary_search(l1.begin(), l1.end(), ed.v);
    if (!a0 || !a1) continue;
    VertexId z = std::binary_search(l0.begin(), l0.end(), ed.u) ? ed.u : ed.v;
    if (used[z]++ == 0) {
      keep.push_back(e);
    } else if (extra > 0) {
      --extra;
      keep.push_back(e);
    }
  }
  auto h = edge_subgraph(g, keep);
  auto d = level_bipartite_density(h, 0, 1.0);
  EXPECT_EQ(d.edges, 17u);
  EXPECT_TRUE(d.sparse);
  EXPECT_NEAR(d.contracted_resistance, 16.0 / 17.0, 1e-12);
  EXPECT_GE(d.contracted_resistance, d.floor);
  EXPECT_THROW(level_bipartite_density(testutil::path_graph(3), 0, 1.0), DomainError);
}

TEST(Minor, CompleteGraphs) {
  auto k4 = complete_graph(4);
  auto r = find_clique_minor(k4, 4);
  ASSERT_TRUE(r.certificate);
  EXPECT_TRUE(verify_minor(k4, *r.certificate, 4));
  for (const auto& s : r.certificate->sets) EXPECT_EQ(s.size(), 1u);
  auto none = find_clique_minor(k4, 5);
  EXPECT_FALSE(none.certificate);
  EXPECT_TRUE(none.exhaustive);
}

TEST(Minor, TreesHaveNoTriangleMinor) {
  for (int d : {1, 3, 6}) {
    auto t = binary_tree(d);
    for (int r : {3, 4, 6}) {
      auto m = find_clique_minor(t, r);
      EXPECT_FALSE(m.certificate);
      EXPECT_TRUE(m.exhaustive);
      EXPECT_EQ(m.verdict(), "none");
    }
    EXPECT_TRUE(find_clique_minor(t, 2).certificate);
  }
  auto p = testutil::path_graph(30);
  EXPECT_EQ(find_clique_minor(p, 3).verdict(), "none");
}

TEST(Minor, CycleHasTriangle) {
  auto c = testutil::cycle_graph(9);
  auto m = find_clique_minor(c, 3);
  ASSERT_TRUE(m.certificate);
  EXPECT_TRUE(verify_minor(c, *m.certificate, 3));
  EXPECT_EQ(find_clique_minor(c, 4).verdict(), "none");
}

TEST(Minor, PetersenHasK5NotByInspection) {
  // Petersen graph: K5 minor by contracting the spokes, but no K5 subgraph
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < 5; ++i) e.insert(e.end(), {{i, (i + 1) % 5}, {i, i + 5}, {5 + i, 5 + (i + 2) % 5}});
  auto g = testutil::make_graph(10, e);
  auto m = find_clique_minor(g, 5);
  ASSERT_TRUE(m.certificate);
  EXPECT_TRUE(verify_minor(g, *m.certificate, 5));
  auto six = find_clique_minor(g, 6, 20000000);
  EXPECT_FALSE(six.certificate);
  EXPECT_TRUE(six.exhaustive);
}

TEST(Minor, GadgetsContainCliques) {
  for (auto [n, r] : {std::pair{3, 4}, std::pair{4, 5}}) {
    auto g = build_gadget({n});
    auto t0 = std::chrono::steady_clock::now();
    auto m = find_clique_minor(g, r);
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ASSERT_TRUE(m.certificate) << "D_" << n;
    EXPECT_TRUE(verify_minor(g, *m.certificate, r));
    EXPECT_LT(dt, 60.0);
    for (int k = 1; k < r; ++k) EXPECT_TRUE(find_clique_minor(g, k).certificate) << k;
  }
  auto d4 = build_gadget({4});
  auto big = find_clique_minor(d4, 15);
  ASSERT_TRUE(big.certificate);
  EXPECT_TRUE(verify_minor(d4, *big.certificate, 15));
}

TEST(Minor, BudgetIsReported) {
  // planar grid: no K5 minor, not provable within the budget
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      if (i + 1 < 8) e.emplace_back(8 * i + j, 8 * (i + 1) + j);
      if (j + 1 < 8) e.emplace_back(8 * i + j, 8 * i + j + 1);
    }
  auto g = testutil::make_graph(64, e);
  auto m = find_clique_minor(g, 5, 50);
  EXPECT_FALSE(m.certificate);
  EXPECT_FALSE(m.exhaustive);
  EXPECT_EQ(m.verdict(), "budget");
}

TEST(Minor, VerifyRejectsBadCertificates) {
  auto k4 = complete_graph(4);
  auto m = find_clique_minor(k4, 4);
  auto bad = *m.certificate;
  bad.sets[0].push_back(bad.sets[1][0]);
  EXPECT_FALSE(verify_minor(k4, bad, 4));
  EXPECT_FALSE(verify_minor(k4, *m.certificate, 3));
}
