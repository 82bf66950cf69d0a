// Acceptance checks: one PASS/FAIL line per criterion.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "souvlaki/souvlaki.hpp"

using namespace souvlaki;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::ostringstream note;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [violated: " << what << "]";
    }
  }
};

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

Graph souvlaki_graph(int N, bool lumped, bool stretched = false) {
  SouvlakiSpec s;
  s.N = N;
  s.lumped = lumped;
  if (stretched) s.variant = SouvlakiSpec::Variant::Stretched;
  return build_souvlaki(s);
}

Graph binary_tree(int depth) {
  GraphBuilder b;
  const std::int64_t n = pow2(depth + 1) - 1;
  for (std::int64_t i = 0; i < n; ++i) b.add_vertex(VertexLabel::skewer(i));
  for (std::int64_t v = 1; v < n; ++v) b.add_edge(static_cast<VertexId>((v - 1) / 2), static_cast<VertexId>(v));
  return std::move(b).build();
}

void criterion1(Verdict& v) {
  double worst = 0, slowest = 0, sub_worst = 0;
  for (int n = 1; n <= 8; ++n) {
    auto g = build_gadget({n});
    auto t0 = Clock::now();
    double r = effective_resistance(g, g.mark("pole+").at(0), g.mark("pole-").at(0));
    slowest = std::max(slowest, seconds_since(t0));
    double series = 0;
    for (int i = -n; i < n; ++i) {
      double strands = static_cast<double>(g.mark("level:" + std::to_string(i)).size()) *
                       static_cast<double>(g.mark("level:" + std::to_string(i + 1)).size());
      series += gadget_gap_resistance(n, i, i + 1) / strands;
    }
    double closed = gadget_resistance_closed_form(n);
    worst = std::max({worst, std::abs(r - closed) / closed, std::abs(series - closed) / closed});
    if (n <= 5) {
      auto h = build_gadget({n, true});
      auto t1 = Clock::now();
      double rs = effective_resistance(h, h.mark("pole+").at(0), h.mark("pole-").at(0));
      slowest = std::max(slowest, seconds_since(t1));
      sub_worst = std::max(sub_worst, std::abs(rs - r));
    }
  }
  v.note << "max relative error " << g17(worst) << ", subdivided max difference " << g17(sub_worst)
         << ", slowest solve " << g17(slowest) << " s";
  v.check(worst <= 1e-8, "relative error <= 1e-8");
  v.check(sub_worst <= 1e-8, "subdivided agrees to 1e-8");
  v.check(slowest < 10, "each solve < 10 s");
}

void criterion2(Verdict& v) {
  auto t0 = Clock::now();
  double div = 0;
  for (int N = 2; N <= 6; ++N) {
    auto g = souvlaki_graph(N, N >= 5);
    auto d = divergence(souvlaki_flow(g));
    std::vector<char> skip(g.num_vertices(), 0);
    for (auto x : g.mark("boundary")) skip[x] = 1;
    skip[g.mark("root").at(0)] = 1;
    for (VertexId x = 0; x < g.num_vertices(); ++x)
      if (!skip[x]) div = std::max(div, std::abs(d[x]));
  }
  auto g = souvlaki_graph(6, true);
  std::vector<double> e, scaled, per_j;
  for (int n = 2; n <= 6; ++n) {
    auto frame = souvlaki_frame(g, n);
    e.push_back(energy(meatball_flow(g, frame)));
    scaled.push_back(e.back() * static_cast<double>(pow2(n)));
    double worst = 0;
    for (std::int64_t j = 1; j <= pow2(n); ++j)
      worst = std::max(worst, energy(atomic_flow(g, frame, j).combined()) * static_cast<double>(pow2(2 * n)));
    per_j.push_back(worst);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < e.size(); ++i) decreasing = decreasing && e[i] < e[i - 1];
  auto spread = [](const std::vector<double>& x, std::size_t from) {
    auto [lo, hi] = std::minmax_element(x.begin() + static_cast<std::ptrdiff_t>(from), x.end());
    return (*hi - *lo) / *lo;
  };
  double s = spread(scaled, 1), sj = spread(per_j, 1);
  double secs = seconds_since(t0);
  v.note << "max interior divergence " << g17(div) << "; E(g(n)) n=2..6:";
  for (double x : e) v.note << " " << g17(x);
  v.note << "; 2^n E spread (n>=3) " << g17(s) << "; max_j 4^n E(g^j) spread (n>=3) " << g17(sj) << "; "
         << g17(secs) << " s";
  v.check(div <= 1e-12, "divergence 0 to 1e-12");
  v.check(decreasing, "E(g(n)) strictly decreasing");
  v.check(s <= 0.2, "2^n E spread <= 20% for n >= 3");
  v.check(sj <= 0.2, "per-j 4^n E(g^j) bounded by one constant (spread <= 20%)");
  v.check(secs < 60, "runtime < 60 s");
}

void criterion3(Verdict& v) {
  std::vector<double> r, e;
  for (int N = 2; N <= 6; ++N) {
    auto g = souvlaki_graph(N, N >= 5);
    r.push_back(effective_resistance_to_set(g, g.mark("root").at(0), g.mark("boundary")));
    e.push_back(energy(souvlaki_flow(g)));
  }
  bool monotone = true, thomson = true, decay = true;
  v.note << "R_eff N=2..6:";
  for (std::size_t i = 0; i < r.size(); ++i) {
    v.note << " " << g17(r[i]);
    thomson = thomson && r[i] <= e[i] + 1e-9;
    if (i > 0) monotone = monotone && r[i] >= r[i - 1];
  }
  v.note << "; increment ratios:";
  for (std::size_t i = 2; i < r.size(); ++i) {
    double q = (r[i - 1] - r[i - 2]) / (r[i] - r[i - 1]);
    v.note << " " << g17(q);
    decay = decay && q >= 1.5;
  }
  v.check(monotone, "non-decreasing in N");
  v.check(thomson, "R_eff <= flow energy");
  v.check(decay, "increments decay by >= 1.5 per step");
}

void criterion4(Verdict& v) {
  const int N = 3;
  auto g = souvlaki_graph(N, false, true);
  auto q = quotient_Q(g, skewer_tree(g));
  auto o = q.q.mark("v:1").at(0);
  for (int n = 1; n <= N; ++n) {
    auto b = quotient_block(q.q, n);
    auto va = b.mark("v:" + std::to_string(n)).at(0), vb = b.mark("v:" + std::to_string(n + 1)).at(0);
    std::uint64_t branch = 0;
    for (VertexId x = 0; x < b.num_vertices(); ++x) branch += b.degree(x) > 2;
    auto f = resistance_floor(b, va, vb, std::max<std::uint64_t>({b.max_degree(), branch, 2}));
    double cum = effective_resistance(q.q, o, q.q.mark("v:" + std::to_string(n + 1)).at(0));
    v.note << (n > 1 ? "; " : "") << "Q_" << n << ": R_eff " << g17(f.exact) << ", floor " << g17(f.floor)
           << ", cumulative " << g17(cum);
    v.check(f.exact >= 1, "exact R_eff(Q_" + std::to_string(n) + ") >= 1");
    v.check(f.floor >= 1 && f.consistent && verify(b, f.cut), "certified floor of Q_" + std::to_string(n) + " >= 1");
    v.check(cum >= 0.9 * n, "cumulative >= 0.9 n at n = " + std::to_string(n));
  }
}

void criterion5(Verdict& v) {
  std::vector<double> mins;
  for (int n = 2; n <= 4; ++n) {
    auto g = build_meatball({n});
    auto p = roof_probabilities(g, g.mark("L"), g.mark("S"), g.mark("ceiling"));
    mins.push_back(*std::min_element(p.begin(), p.end()));
  }
  v.note << "min roof probability n=2..4: " << g17(mins[0]) << " " << g17(mins[1]) << " " << g17(mins[2]);
  for (double m : mins) v.check(m >= 0.5 * mins[0], "roof >= half the n=2 value");
  auto g = souvlaki_graph(5, true);
  double worst = 1;
  for (int n = 2; n <= 4; ++n) {
    auto h = hitting_distribution(g, g.mark("root").at(0), g.mark("R:" + std::to_string(n)), g.mark("boundary"));
    worst = std::min(worst, h.total() - h.other);
  }
  v.note << "; smallest absorption on R_n (n=2..4) " << g17(worst);
  v.check(worst >= 1 - 1e-10, "R_n absorbs with probability 1 - 1e-10");
}

void criterion6(Verdict& v) {
  for (int n = 2; n <= 3; ++n) {
    auto g = build_meatball({n});
    AbsorbingChain chain(g, g.mark("S"));
    double worst = 0;
    std::size_t pairs = 0;
    for (const auto& [name, vs] : g.marks()) {
      if (name.rfind("circle:", 0) != 0) continue;
      auto ref = chain.distribution(vs[0]);
      for (std::size_t i = 1; i < vs.size(); ++i, ++pairs) {
        auto d = chain.distribution(vs[i]);
        for (std::size_t k = 0; k < d.size(); ++k) worst = std::max(worst, std::abs(d[k] - ref[k]));
      }
    }
    v.note << (n > 2 ? "; " : "") << "M_" << n << ": " << pairs << " pairs, max deviation " << g17(worst);
    v.check(pairs > 0, "cocircular pairs exist");
    v.check(worst <= 1e-10, "identical distributions to 1e-10");
  }
}

void criterion7(Verdict& v) {
  std::map<int, double> delta;
  for (int N = 2; N <= 4; ++N) {
    auto g = souvlaki_graph(N, false);
    DeltaOptions opt;
    opt.seed = 1;
    auto d = four_point_delta(g, opt);
    delta[N] = d.delta;
    v.note << "delta(N=" << N << ") = " << g17(d.delta) << (d.exhaustive ? " exhaustive" : " sampled") << " ("
           << g.num_vertices() << " vertices); ";
    if (g.num_vertices() <= kExhaustiveLimit) v.check(d.exhaustive, "exhaustive when <= 700 vertices");
    auto a = escape_audit(g);
    auto c = coincidence_check(g, sample_vertices(g, 60, 1));
    v.note << "non-geodesic escapes " << a.non_geodesic << "/" << a.vertices << ", merged " << c.merged << "/"
           << c.samples << ", coinciding pairs " << c.coinciding << "/" << c.pairs << "; ";
    v.check(a.non_geodesic == 0, "every escape_geodesic is a geodesic (N=" + std::to_string(N) + ")");
    v.check(c.samples >= 50 && c.merged == c.samples && c.coinciding == c.pairs,
            "all sampled pairs coincide after merging (N=" + std::to_string(N) + ")");
  }
  v.check(delta[4] <= delta[3] + 1, "delta(4) <= delta(3) + 1");
}

void criterion8(Verdict& v) {
  for (auto [n, r] : {std::pair{3, 4}, std::pair{4, 5}}) {
    auto g = build_gadget({n});
    auto t0 = Clock::now();
    auto m = find_clique_minor(g, r);
    double secs = seconds_since(t0);
    bool ok = m.certificate && verify_minor(g, *m.certificate, static_cast<std::size_t>(r));
    v.note << "K_" << r << " in D_" << n << ": " << m.verdict() << (ok ? " verified" : "") << " in " << g17(secs)
           << " s; ";
    v.check(ok, "verified K_" + std::to_string(r) + " in D_" + std::to_string(n));
    v.check(secs < 60, "< 60 s");
  }
  std::vector<std::pair<std::string, Graph>> trees;
  for (int d = 1; d <= 6; ++d) trees.emplace_back("binary tree " + std::to_string(d), binary_tree(d));
  trees.emplace_back("skewer tree", skewer_tree(souvlaki_graph(2, false)));
  std::size_t none = 0;
  for (const auto& [name, t] : trees) {
    auto m = find_clique_minor(t, 3);
    bool ok = !m.certificate && m.exhaustive;
    none += ok;
    v.check(ok, "no K_3 minor in " + name + " (exhaustive)");
  }
  v.note << "trees without K_3 (exhaustive): " << none << "/" << trees.size();
}

void criterion9(Verdict& v) {
  std::vector<double> r;
  for (int n = 2; n <= 4; ++n) {
    auto gn = build_dyadic(n);
    auto grid = dyadic_grid_level(gn, n);
    r.push_back(effective_resistance(grid, grid.mark("corner+").at(0), grid.mark("corner-").at(0)));
    auto d = distance(gn, gn.mark("corner+").at(0), gn.mark("corner-").at(0));
    v.note << "n=" << n << ": R_eff " << g17(r.back()) << ", corner distance " << (d ? std::to_string(*d) : "inf")
           << "; ";
    v.check(d && *d >= static_cast<std::uint32_t>(n), "corner distance >= n");
  }
  auto [lo, hi] = std::minmax_element(r.begin(), r.end());
  double var = (*hi - *lo) / *lo;
  v.note << "variation " << g17(var);
  v.check(var < 0.15, "variation < 15% from n=2 to n=4");
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    files[e.path().filename().string()] = s.str();
  }
  return files;
}

void criterion10(Verdict& v, const std::string& cli) {
  if (cli.empty()) {
    v.check(false, "--cli <path> given");
    return;
  }
  auto root = fs::temp_directory_path() / "souvlaki_acceptance_reports";
  fs::remove_all(root);
  for (const char* suite : {"flows", "resistance", "walks", "hyperbolicity", "minors", "subtree"}) {
    auto dir = root / suite;
    std::string cmd = cli + " report " + suite + " --seed 1 --dir " + dir.string() + " > /dev/null 2>&1";
    int a = std::system(cmd.c_str());
    auto first = snapshot(dir);
    int b = std::system(cmd.c_str());
    auto second = snapshot(dir);
    bool ok = a == 0 && b == 0 && !first.empty() && first == second;
    v.note << suite << " (" << first.size() << " files) " << (ok ? "identical" : "DIFFERS") << "; ";
    v.check(ok, std::string(suite) + " byte-identical");
  }
  fs::remove_all(root);
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
  std::vector<std::pair<int, std::function<void(Verdict&)>>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9},
      {10, [&](Verdict& v) { criterion10(v, cli); }}};
  int failed = 0;
  for (auto& [k, fn] : criteria) {
    Verdict v;
    auto t0 = Clock::now();
    try {
      fn(v);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    failed += !v.pass;
    std::cout << "CRITERION " << k << " " << (v.pass ? "PASS" : "FAIL") << " (" << g17(seconds_since(t0))
              << " s): " << v.note.str() << std::endl;
  }
  std::cout << (10 - failed) << "/10 criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}
