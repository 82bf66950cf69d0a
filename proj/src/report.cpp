#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>

#include "app.hpp"
#include "souvlaki/souvlaki.hpp"

namespace souvlaki::app {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : width_(header.size()) { rows_.push_back(std::move(header)); }

  template <class... T>
  void row(const T&... cells) {
    std::vector<std::string> r{cell(cells)...};
    if (r.size() != width_) throw DomainError("CSV row width mismatch");
    rows_.push_back(std::move(r));
  }

  std::string str() const {
    std::string s;
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
      s += "\n";
    }
    return s;
  }

 private:
  static std::string cell(double x) { return fmt(x); }
  static std::string cell(const std::string& x) { return x; }
  static std::string cell(const char* x) { return x; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I x) {
    return std::to_string(x);
  }

  std::size_t width_;
  std::vector<std::vector<std::string>> rows_;
};

struct SuiteOutput {
  Json parameters = Json::object();
  std::vector<std::uint64_t> seeds;
  Json result = Json::object();
  std::vector<std::pair<std::string, Csv>> curves;
};

Graph souvlaki_graph(int N, bool lumped, bool stretched = false) {
  SouvlakiSpec s;
  s.N = N;
  s.lumped = lumped;
  if (stretched) s.variant = SouvlakiSpec::Variant::Stretched;
  return build_souvlaki(s);
}

double energy_or_zero(const Flow& f) { return f.support().empty() ? 0.0 : energy(f); }

SuiteOutput suite_flows(std::uint64_t) {
  SuiteOutput o;
  o.parameters = {{"meatball_n", {2, 6}}, {"souvlaki_N", {2, 6}}, {"lumped", true}};
  Csv curve({"n", "E", "2^n*E"});
  Csv per_j({"n", "j", "height", "E_out", "E_mid", "E_in", "E_total", "4^n*E_total"});
  Json meatballs = Json::array();
  std::vector<double> energies, scaled;
  for (int n = 2; n <= 6; ++n) {
    auto g = build_meatball({n}, true);
    double e = energy(meatball_flow(g));
    double s = e * static_cast<double>(pow2(n));
    curve.row(n, e, s);
    energies.push_back(e);
    scaled.push_back(s);
    double worst = 0;
    for (std::int64_t j = 1; j <= pow2(n); ++j) {
      auto a = atomic_flow(g, j);
      double t = energy(a.combined());
      double k = t * static_cast<double>(pow2(2 * n));
      per_j.row(n, j, a.height, energy_or_zero(a.out), energy_or_zero(a.middle), energy_or_zero(a.in), t, k);
      worst = std::max(worst, k);
    }
    meatballs.push_back({{"n", n}, {"E", e}, {"2^n*E", s}, {"max_j 4^n*E(g^j)", worst}});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < energies.size(); ++i) decreasing = decreasing && energies[i] < energies[i - 1];
  auto tail = std::vector<double>(scaled.begin() + 1, scaled.end());
  auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  Json souvlakis = Json::array();
  for (int N = 2; N <= 6; ++N) {
    auto g = souvlaki_graph(N, true);
    auto f = souvlaki_flow(g);
    auto div = divergence(f);
    std::vector<char> sink(g.num_vertices(), 0);
    for (auto v : g.mark("boundary")) sink[v] = 1;
    VertexId o_id = g.mark("root").at(0);
    double worst = 0, sunk = 0;
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
      if (sink[v]) sunk -= div[v];
      else if (v != o_id) worst = std::max(worst, std::abs(div[v]));
    }
    souvlakis.push_back({{"N", N}, {"vertices", g.num_vertices()}, {"source_divergence", div[o_id]},
                         {"sunk", sunk}, {"max_interior_divergence", worst}, {"energy", energy(f)}});
  }
  o.result = {{"meatballs", meatballs},
              {"E_strictly_decreasing", decreasing},
              {"2^n*E_spread_n>=3", (*hi - *lo) / *lo},
              {"souvlaki", souvlakis}};
  o.curves.emplace_back("flows.csv", std::move(curve));
  o.curves.emplace_back("flows_per_j.csv", std::move(per_j));
  return o;
}

SuiteOutput suite_resistance(std::uint64_t) {
  SuiteOutput o;
  o.parameters = {{"gadget_n", {1, 8}}, {"subdivided_n", {1, 5}}, {"souvlaki_N", {2, 6}}, {"dyadic_n", {2, 4}}};
  Csv gad({"n", "R_eff", "4-2^(2-n)", "R_eff_subdivided"});
  Json gadgets = Json::array();
  for (int n = 1; n <= 8; ++n) {
    auto g = build_gadget({n});
    double r = effective_resistance(g, g.mark("pole+").at(0), g.mark("pole-").at(0));
    double c = gadget_resistance_closed_form(n);
    Json row = {{"n", n}, {"R_eff", r}, {"closed_form", c}, {"relative_error", std::abs(r - c) / c}};
    std::string sub;
    if (n <= 5) {
      auto h = build_gadget({n, true});
      double rs = effective_resistance(h, h.mark("pole+").at(0), h.mark("pole-").at(0));
      row["R_eff_subdivided"] = rs;
      row["subdivided_difference"] = std::abs(rs - r);
      sub = fmt(rs);
    }
    gad.row(n, r, c, sub);
    gadgets.push_back(std::move(row));
  }
  Csv tr({"N", "R_eff", "flow_energy"});
  Json profile = Json::array();
  for (int N = 2; N <= 6; ++N) {
    auto g = souvlaki_graph(N, N >= 5);
    double r = effective_resistance_to_set(g, g.mark("root").at(0), g.mark("boundary"));
    double e = energy(souvlaki_flow(g));
    tr.row(N, r, e);
    profile.push_back({{"N", N}, {"lumped", N >= 5}, {"R_eff", r}, {"flow_energy", e}});
  }
  Csv dy({"n", "R_eff_grid", "corner_distance"});
  Json dyadic = Json::array();
  for (int n = 2; n <= 4; ++n) {
    auto gn = build_dyadic(n);
    auto grid = dyadic_grid_level(gn, n);
    double r = effective_resistance(grid, grid.mark("corner+").at(0), grid.mark("corner-").at(0));
    auto d = distance(gn, gn.mark("corner+").at(0), gn.mark("corner-").at(0));
    dy.row(n, r, static_cast<std::uint64_t>(d.value_or(0)));
    dyadic.push_back({{"n", n}, {"R_eff_grid", r}, {"corner_distance", d ? Json(*d) : Json(nullptr)}});
  }
  o.result = {{"gadgets", gadgets}, {"transience", profile}, {"dyadic", dyadic}};
  o.curves.emplace_back("resistance.csv", std::move(gad));
  o.curves.emplace_back("transience.csv", std::move(tr));
  o.curves.emplace_back("dyadic.csv", std::move(dy));
  return o;
}

SuiteOutput suite_walks(std::uint64_t seed) {
  SuiteOutput o;
  const std::uint64_t trials = 20000;
  o.parameters = {{"roof_n", {2, 4}}, {"separation_N", 5}, {"radial_n", {2, 3}}, {"mc_trials", trials}};
  o.seeds = {seed};
  Csv roof({"n", "min_roof_probability", "argmin"});
  Json roofs = Json::array();
  for (int n = 2; n <= 4; ++n) {
    auto g = build_meatball({n});
    const auto& L = g.mark("L");
    auto p = roof_probabilities(g, L, g.mark("S"), g.mark("ceiling"));
    auto it = std::min_element(p.begin(), p.end());
    auto arg = g.name(L[static_cast<std::size_t>(it - p.begin())]);
    roof.row(n, *it, arg);
    roofs.push_back({{"n", n}, {"min", *it}, {"argmin", arg}});
  }
  Json separation = Json::array();
  {
    auto g = souvlaki_graph(5, true);
    for (int n = 1; n <= 4; ++n) {
      auto h = hitting_distribution(g, g.mark("root").at(0), g.mark("R:" + std::to_string(n)), g.mark("boundary"));
      double on = h.total() - h.other;
      separation.push_back({{"n", n}, {"absorbed_on_R", on}, {"escaped", h.other}});
    }
  }
  Json radial = Json::array();
  for (int n = 2; n <= 3; ++n) {
    auto g = build_meatball({n});
    AbsorbingChain chain(g, g.mark("S"));
    double worst = 0;
    std::size_t pairs = 0;
    for (const auto& [name, vs] : g.marks()) {
      if (name.rfind("circle:", 0) != 0) continue;
      auto ref = chain.distribution(vs[0]);
      for (std::size_t i = 1; i < vs.size(); ++i) {
        auto d = chain.distribution(vs[i]);
        for (std::size_t k = 0; k < d.size(); ++k) worst = std::max(worst, std::abs(d[k] - ref[k]));
        ++pairs;
      }
    }
    radial.push_back({{"n", n}, {"pairs", pairs}, {"max_deviation", worst}});
  }
  Json mc;
  {
    auto g = build_meatball({2});
    VertexId start = g.mark("ceiling").at(0);
    auto exact = hitting_distribution(g, start, g.mark("S"));
    WalkConfig cfg;
    cfg.seed = seed;
    cfg.trials = trials;
    cfg.mode = WalkConfig::Mode::MonteCarlo;
    auto est = hitting_distribution_mc(g, start, g.mark("S"), {}, cfg);
    double worst = 0, z = 0;
    for (std::size_t i = 0; i < exact.probability.size(); ++i) {
      double d = std::abs(est.probability[i] - exact.probability[i]);
      worst = std::max(worst, d);
      if (est.sigma[i] > 0) z = std::max(z, d / est.sigma[i]);
    }
    mc = {{"start", g.name(start)}, {"trials", est.trials}, {"truncated", est.truncated},
          {"max_abs_error", worst}, {"max_z", z}, {"mc_probability", est.probability},
          {"exact_probability", exact.probability}};
  }
  o.result = {{"roof", roofs}, {"separation", separation}, {"radial", radial}, {"monte_carlo", mc}};
  o.curves.emplace_back("roof.csv", std::move(roof));
  return o;
}

SuiteOutput suite_hyperbolicity(std::uint64_t seed) {
  SuiteOutput o;
  const std::size_t samples = 60;
  o.parameters = {{"souvlaki_N", {1, 4}}, {"exhaustive_limit", kExhaustiveLimit},
                  {"sampled_quadruples", kDefaultQuadruples}, {"coincidence_samples", samples}};
  o.seeds = {seed};
  Csv curve({"N", "vertices", "exhaustive", "delta"});
  Json deltas = Json::array(), escapes = Json::array(), coincidence = Json::array();
  for (int N = 1; N <= 4; ++N) {
    auto g = souvlaki_graph(N, false);
    DeltaOptions opt;
    opt.seed = seed;
    auto d = four_point_delta(g, opt);
    Json w = Json::array();
    if (d.has_witness)
      for (auto v : d.witness) w.push_back(g.name(v));
    curve.row(N, g.num_vertices(), d.exhaustive ? "yes" : "no", d.delta);
    deltas.push_back({{"N", N}, {"vertices", g.num_vertices()}, {"exhaustive", d.exhaustive}, {"pool", d.pool},
                      {"quadruples", d.quadruples}, {"delta", d.delta}, {"witness", w}});
    if (N >= 2 && N <= 3) {
      auto a = escape_audit(g);
      escapes.push_back({{"N", N}, {"vertices", a.vertices}, {"non_geodesic", a.non_geodesic},
                         {"max_excess", a.max_excess},
                         {"witness", a.witness ? Json(g.name(*a.witness)) : Json(nullptr)}});
    }
    if (N >= 2) {
      auto rep = coincidence_check(g, sample_vertices(g, samples, seed));
      coincidence.push_back({{"N", N}, {"samples", rep.samples}, {"geodesic", rep.geodesic}, {"merged", rep.merged},
                             {"pairs", rep.pairs}, {"coinciding", rep.coinciding}});
    }
  }
  o.result = {{"delta", deltas}, {"escape_rule", escapes}, {"coincidence", coincidence}};
  o.curves.emplace_back("hyperbolicity.csv", std::move(curve));
  return o;
}

Graph binary_tree(int depth) {
  GraphBuilder b;
  const std::int64_t n = pow2(depth + 1) - 1;
  for (std::int64_t i = 0; i < n; ++i) b.add_vertex(VertexLabel::skewer(i));
  for (std::int64_t v = 1; v < n; ++v) b.add_edge(static_cast<VertexId>((v - 1) / 2), static_cast<VertexId>(v));
  return std::move(b).build();
}

Json minor_json(const Graph& g, const MinorResult& m, int r) {
  Json j = {{"r", r}, {"verdict", m.verdict()}, {"exhaustive", m.exhaustive}, {"expanded", m.expanded}};
  if (m.certificate) {
    j["verified"] = verify_minor(g, *m.certificate, static_cast<std::size_t>(r));
    j["certificate"] = to_json(*m.certificate);
  }
  return j;
}

SuiteOutput suite_minors(std::uint64_t) {
  SuiteOutput o;
  const std::uint64_t budget = 1000000;
  o.parameters = {{"budget", budget}};
  Json gadgets = Json::array(), trees = Json::array();
  for (auto [n, r] : {std::pair{3, 4}, std::pair{4, 5}}) {
    auto g = build_gadget({n});
    auto m = find_clique_minor(g, r, budget);
    Json j = minor_json(g, m, r);
    j["graph"] = "D" + std::to_string(n);
    gadgets.push_back(std::move(j));
  }
  for (int d = 1; d <= 6; ++d) {
    auto t = binary_tree(d);
    auto m = find_clique_minor(t, 3, budget);
    Json j = minor_json(t, m, 3);
    j["graph"] = "binary tree depth " + std::to_string(d);
    trees.push_back(std::move(j));
  }
  {
    auto t = skewer_tree(souvlaki_graph(2, false));
    auto m = find_clique_minor(t, 3, budget);
    Json j = minor_json(t, m, 3);
    j["graph"] = "souvlaki N=2 skewer tree";
    trees.push_back(std::move(j));
  }
  o.result = {{"gadgets", gadgets}, {"trees", trees}};
  return o;
}

SuiteOutput suite_subtree(std::uint64_t seed) {
  SuiteOutput o;
  const int N = 3;
  o.parameters = {{"stretched_N", N}, {"f", default_stretch(N)}, {"tree", "bfs"}, {"s_budget", 2000}, {"c_tilde", 2.0}};
  o.seeds = {seed};
  Csv curve({"n", "Q_vertices", "Q_edges", "floor", "R_eff", "cumulative_R_eff"});
  Json blocks = Json::array();
  {
    auto g = souvlaki_graph(N, false, true);
    auto t = skewer_tree(g);
    auto q = quotient_Q(g, t);
    auto o_id = q.q.mark("v:1").at(0);
    for (int n = 1; n <= N; ++n) {
      auto b = quotient_block(q.q, n);
      auto va = b.mark("v:" + std::to_string(n)).at(0), vb = b.mark("v:" + std::to_string(n + 1)).at(0);
      std::uint64_t branch = 0;
      for (VertexId v = 0; v < b.num_vertices(); ++v) branch += b.degree(v) > 2;
      std::uint64_t C = std::max<std::uint64_t>({b.max_degree(), branch, 2});
      auto f = resistance_floor(b, va, vb, C);
      double cum = effective_resistance(q.q, o_id, q.q.mark("v:" + std::to_string(n + 1)).at(0));
      curve.row(n, b.num_vertices(), b.num_edges(), f.floor, f.exact, cum);
      blocks.push_back({{"n", n}, {"vertices", b.num_vertices()}, {"edges", b.num_edges()}, {"C", C},
                        {"floor", f.floor}, {"R", f.R}, {"R_eff", f.exact}, {"consistent", f.consistent},
                        {"cut_verified", verify(b, f.cut)}, {"cut", to_json(f.cut)}, {"cumulative_R_eff", cum}});
    }
    o.result["host_vertices"] = g.num_vertices();
    o.result["pruned"] = q.pruned;
  }
  Json s = Json::array();
  for (std::uint64_t C : {2, 3}) {
    auto e = estimate_s(1.0, C, 2000, seed);
    s.push_back({{"m", 1.0}, {"C", C}, {"R", e.R}, {"s", e.s}, {"trials", e.trials},
                 {"min_resistance", e.min_resistance}, {"holds", e.holds}});
  }
  Json density = Json::array();
  for (int n : {3, 4}) {
    auto g = build_gadget({n});
    for (int m = 0; m < n; ++m) {
      auto d = level_bipartite_density(g, m, 2.0);
      density.push_back({{"n", n}, {"level", m}, {"edges", d.edges}, {"sparse", d.sparse},
                         {"contracted_resistance", d.contracted_resistance}, {"floor", d.floor},
                         {"floor_holds", d.floor_holds}});
    }
  }
  o.result["blocks"] = blocks;
  o.result["s_estimate"] = s;
  o.result["level_density"] = density;
  o.curves.emplace_back("subtree.csv", std::move(curve));
  return o;
}

const std::map<std::string, std::function<SuiteOutput(std::uint64_t)>>& suites() {
  static const std::map<std::string, std::function<SuiteOutput(std::uint64_t)>> m = {
      {"flows", suite_flows},     {"resistance", suite_resistance}, {"walks", suite_walks},
      {"hyperbolicity", suite_hyperbolicity}, {"minors", suite_minors}, {"subtree", suite_subtree}};
  return m;
}

}  // namespace

Json envelope(const std::string& operation, const std::vector<std::string>& command, Json parameters,
              std::vector<std::uint64_t> seeds, Json result) {
  return {{"tool", kToolName}, {"version", kToolVersion}, {"operation", operation}, {"command", command},
          {"parameters", std::move(parameters)}, {"seeds", std::move(seeds)}, {"result", std::move(result)}};
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : suites()) v.push_back(k);
    return v;
  }();
  return names;
}

std::vector<std::string> report_suite(const std::string& name, const std::string& dir, std::uint64_t seed,
                                      const std::vector<std::string>& command) {
  auto it = suites().find(name);
  if (it == suites().end()) throw DomainError("unknown report suite '" + name + "'");
  auto out = it->second(seed);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DomainError("cannot create directory '" + dir + "': " + ec.message());
  std::vector<std::string> files;
  Json curves = Json::array();
  for (const auto& [file, _] : out.curves) curves.push_back(file);
  out.result["curves"] = curves;
  auto path = (std::filesystem::path(dir) / (name + ".json")).string();
  write_text(path, envelope("report " + name, command, out.parameters, out.seeds, out.result).dump(2) + "\n");
  files.push_back(path);
  for (const auto& [file, csv] : out.curves) {
    auto p = (std::filesystem::path(dir) / file).string();
    write_text(p, csv.str());
    files.push_back(p);
  }
  return files;
}

}  // namespace souvlaki::app
