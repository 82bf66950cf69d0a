#include <chrono>
#include <cmath>
#include <iomanip>
#include <optional>

#include "CLI11.hpp"
#include "app.hpp"
#include "souvlaki/souvlaki.hpp"

namespace souvlaki::app {

namespace {

const std::vector<std::string> kGraphKinds = {"h2",     "w",           "meatball", "souvlaki", "stretched",
                                              "gadget", "gadget-tree", "dyadic",   "cube-tree", "spanning-tree"};

struct BuildArgs {
  std::string graph, out, host, method = "bfs";
  int n = 1;
  std::optional<int> depth, slack;
  std::int64_t bottom_len = 0;
  bool subdivided = false, reduce_degree = false, lumped = false;
  std::vector<std::int64_t> f;
  std::uint64_t seed = 0;
};

struct AnalyzeArgs {
  std::string graph, tree, source, target, start, targets, from, to, csv, out;
  int souvlaki_n = 2, r = 4;
  bool per_j = false, lumped = false, exact = false, mc = false;
  std::uint64_t trials = 10000, steps = 1000000, seed = 0, budget = 1000000, R = 1, cap = 1000;
  std::optional<std::uint64_t> sampled;
};

Graph build(const BuildArgs& a) {
  if (a.graph == "h2") return build_h2(a.n);
  if (a.graph == "w") return build_w(a.n, 0, a.bottom_len ? a.bottom_len : 3 * pow2(a.n), a.slack.value_or(0));
  if (a.graph == "meatball") {
    MeatballSpec s;
    s.n = a.n;
    s.bottom_len = a.bottom_len;
    s.slack = a.slack.value_or(1);
    return build_meatball(s, a.lumped);
  }
  if (a.graph == "souvlaki" || a.graph == "stretched") {
    SouvlakiSpec s;
    s.N = a.n;
    s.lumped = a.lumped;
    s.slack = a.slack.value_or(1);
    if (a.graph == "stretched") {
      s.variant = SouvlakiSpec::Variant::Stretched;
      s.f = a.f;
    } else if (!a.f.empty()) {
      throw DomainError("--f applies to the stretched souvlaki only");
    }
    return build_souvlaki(s);
  }
  if (a.graph == "gadget") return build_gadget({a.n, a.subdivided});
  if (a.graph == "gadget-tree") {
    GadgetTreeSpec s;
    s.depth = a.depth.value_or(a.n);
    s.reduce_degree = a.reduce_degree;
    s.subdivided = a.subdivided;
    return build_gadget_tree(s);
  }
  if (a.graph == "dyadic") return build_dyadic(a.n);
  if (a.graph == "cube-tree") return build_cube_tree(a.n);
  if (a.host.empty()) throw DomainError("spanning-tree needs --host");
  auto host = read_graph(a.host);
  return a.method == "wilson" ? wilson_tree(host, a.seed) : skewer_tree(host);
}

Json names(const Graph& g, std::span<const VertexId> vs) {
  Json j = Json::array();
  for (auto v : vs) j.push_back(g.name(v));
  return j;
}

VertexId single(const Graph& g, const std::string& label) {
  auto vs = g.resolve(label);
  if (vs.size() != 1) throw DomainError("'" + label + "' must name a single vertex");
  return vs[0];
}

Json analyze_resistance(const AnalyzeArgs& a) {
  auto g = read_graph(a.graph);
  auto s = g.resolve(a.source), t = g.resolve(a.target);
  return {{"source", a.source}, {"target", a.target}, {"resistance", effective_resistance(g, s, t)}};
}

Json analyze_flow(const AnalyzeArgs& a) {
  SouvlakiSpec spec;
  spec.N = a.souvlaki_n;
  spec.lumped = a.lumped;
  auto g = build_souvlaki(spec);
  auto total = souvlaki_flow(g);
  auto div = divergence(total);
  VertexId o = g.mark("root").at(0);
  std::vector<char> sink(g.num_vertices(), 0);
  for (auto v : g.mark("boundary")) sink[v] = 1;
  double worst = 0;
  for (VertexId v = 0; v < g.num_vertices(); ++v)
    if (v != o && !sink[v]) worst = std::max(worst, std::abs(div[v]));
  Json rows = Json::array(), per_j = Json::array();
  std::string csv = "n,E\n";
  auto part = [](const Flow& f) { return f.support().empty() ? 0.0 : energy(f); };
  for (int n = 1; n <= spec.N; ++n) {
    auto frame = souvlaki_frame(g, n);
    double e = energy(meatball_flow(g, frame));
    rows.push_back({{"n", n}, {"E", e}, {"2^n*E", e * static_cast<double>(pow2(n))}});
    std::ostringstream line;
    line << n << "," << std::setprecision(17) << e << "\n";
    csv += line.str();
    if (!a.per_j) continue;
    for (std::int64_t j = 1; j <= pow2(n); ++j) {
      auto f = atomic_flow(g, frame, j);
      double t = energy(f.combined());
      per_j.push_back({{"n", n}, {"j", j}, {"E_out", part(f.out)}, {"E_mid", part(f.middle)}, {"E_in", part(f.in)},
                       {"E_total", t}, {"bound_2^{-2n}K", t * static_cast<double>(pow2(2 * n))}});
    }
  }
  if (!a.csv.empty()) write_text(a.csv, csv);
  Json r = {{"N", spec.N}, {"lumped", spec.lumped}, {"vertices", g.num_vertices()}, {"meatballs", rows},
            {"energy", energy(total)}, {"source_divergence", div[o]}, {"max_interior_divergence", worst}};
  if (a.per_j) r["per_j"] = per_j;
  return r;
}

Json analyze_walk(const AnalyzeArgs& a) {
  if (a.exact && a.mc) throw CLI::ValidationError("--exact and --mc are exclusive");
  auto g = read_graph(a.graph);
  VertexId s = single(g, a.start);
  const auto& t = g.mark(a.targets);
  HittingDistribution h;
  if (a.mc) {
    WalkConfig cfg;
    cfg.mode = WalkConfig::Mode::MonteCarlo;
    cfg.trials = a.trials;
    cfg.max_steps = a.steps;
    cfg.seed = a.seed;
    h = hitting_distribution_mc(g, s, t, {}, cfg);
  } else {
    h = hitting_distribution(g, s, t);
  }
  Json r = {{"mode", a.mc ? "monte-carlo" : "exact"}, {"start", g.name(s)}, {"targets", names(g, h.targets)},
            {"values", h.probability}, {"other", h.other}};
  if (a.mc) {
    r["sigma"] = h.sigma;
    r["trials"] = h.trials;
    r["truncated"] = h.truncated;
  }
  return r;
}

Json analyze_hyperbolicity(const AnalyzeArgs& a) {
  auto g = read_graph(a.graph);
  DeltaOptions opt;
  opt.seed = a.seed;
  if (a.sampled) {
    opt.sampled = true;
    opt.quadruples = *a.sampled;
  }
  auto d = four_point_delta(g, opt);
  Json r = {{"vertices", g.num_vertices()}, {"exhaustive", d.exhaustive}, {"seed", d.seed}, {"pool", d.pool},
            {"quadruples", d.quadruples}, {"delta", d.delta}};
  if (d.has_witness) r["witness"] = names(g, d.witness);
  return r;
}

Json analyze_geodesics(const AnalyzeArgs& a) {
  auto g = read_graph(a.graph);
  VertexId u = single(g, a.from);
  auto targets = g.resolve(a.to);
  auto set = all_geodesics(g, u, targets, a.cap);
  if (set.length == kUnreachable) throw DomainError("'" + a.to + "' is unreachable from '" + a.from + "'");
  auto cert = to_certificate(g, set, u, a.to);
  return {{"from", g.name(u)},         {"to", a.to},
          {"length", set.length},      {"count", set.paths.size()},
          {"capped", set.capped},      {"verified", verify(g, cert)},
          {"certificate", to_json(cert)}};
}

Json analyze_minor(const AnalyzeArgs& a) {
  auto g = read_graph(a.graph);
  auto m = find_clique_minor(g, a.r, a.budget);
  Json r = {{"r", a.r}, {"verdict", m.verdict()}, {"exhaustive", m.exhaustive}, {"expanded", m.expanded}};
  if (m.certificate) {
    r["verified"] = verify_minor(g, *m.certificate, static_cast<std::size_t>(a.r));
    r["certificate"] = to_json(*m.certificate);
  }
  return r;
}

Json analyze_quotient(const AnalyzeArgs& a) {
  auto host = read_graph(a.graph);
  auto tree = read_graph(a.tree);
  auto q = quotient_Q(host, tree);
  Json blocks = Json::array();
  for (int n = 1;; ++n) {
    auto lo = "v:" + std::to_string(n), hi = "v:" + std::to_string(n + 1);
    if (!q.q.has_mark(lo) || !q.q.has_mark(hi)) break;
    auto b = quotient_block(q.q, n);
    auto va = b.mark(lo).at(0), vb = b.mark(hi).at(0);
    std::array<VertexId, 2> ends{va, vb};
    auto s = suppress_degree2(b, a.R, ends);
    std::uint64_t branch = 0;
    for (VertexId v = 0; v < b.num_vertices(); ++v) branch += b.degree(v) > 2;
    std::uint64_t C = std::max<std::uint64_t>({b.max_degree(), branch, 2});
    auto f = resistance_floor(b, va, vb, C);
    blocks.push_back({{"n", n},
                      {"vertices", b.num_vertices()},
                      {"edges", b.num_edges()},
                      {"suppressed_vertices", s.base.num_vertices()},
                      {"suppressed_edges", s.base.num_edges()},
                      {"black_edges", std::count(s.black.begin(), s.black.end(), 1)},
                      {"C", C},
                      {"floor", f.floor},
                      {"floor_R", f.R},
                      {"R_eff", f.exact},
                      {"consistent", f.consistent},
                      {"cut", to_json(f.cut)}});
  }
  return {{"Q_vertices", q.q.num_vertices()}, {"Q_edges", q.q.num_edges()}, {"pruned", q.pruned}, {"R", a.R},
          {"blocks", blocks}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  CLI::App app{"Finite souvlaki graphs: builders and analyses", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  BuildArgs b;
  auto* build_cmd = app.add_subcommand("build", "Build a graph and write it as JSON");
  build_cmd->add_option("--graph", b.graph, "Graph family")->required()->check(CLI::IsMember(kGraphKinds));
  build_cmd->add_option("--n", b.n, "Size parameter (radius, height, gadget size or N)");
  build_cmd->add_option("--depth", b.depth, "Gadget tree depth (defaults to --n)");
  build_cmd->add_option("--bottom-len", b.bottom_len, "Meatball bottom length or W width");
  build_cmd->add_option("--slack", b.slack, "Horizontal window slack");
  build_cmd->add_flag("--subdivided", b.subdivided, "Replace resistance-k edges by k-edge paths");
  build_cmd->add_flag("--reduce-degree", b.reduce_degree, "Degree-3 fan-in trees at the gadget poles");
  build_cmd->add_flag("--lumped", b.lumped, "One vertex per cocircular class");
  build_cmd->add_option("--f", b.f, "Stretched bottom vertex counts")->delimiter(',');
  build_cmd->add_option("--host", b.host, "Host graph file (spanning-tree)");
  build_cmd->add_option("--method", b.method, "Spanning tree method")->check(CLI::IsMember({"bfs", "wilson"}));
  build_cmd->add_option("--seed", b.seed, "Seed (wilson)");
  build_cmd->add_option("--out", b.out, "Output file")->required();

  AnalyzeArgs a;
  auto* analyze = app.add_subcommand("analyze", "Run one analysis");
  analyze->require_subcommand(1);
  auto graph_opt = [&](CLI::App* c) { c->add_option("--graph", a.graph, "Graph file")->required(); };
  auto out_opt = [&](CLI::App* c) { c->add_option("--out", a.out, "Write the report here instead of stdout"); };

  auto* res = analyze->add_subcommand("resistance", "Effective resistance between two labels or marks");
  graph_opt(res);
  res->add_option("--source", a.source)->required();
  res->add_option("--target", a.target)->required();

  auto* flow = analyze->add_subcommand("flow", "Energies of the souvlaki flow");
  flow->add_option("--souvlaki-n", a.souvlaki_n)->required()->check(CLI::Range(1, 8));
  flow->add_flag("--per-j", a.per_j, "Report every atomic flow");
  flow->add_flag("--lumped", a.lumped, "Use the cocircular quotient");
  flow->add_option("--csv", a.csv, "Write the curve (n, E) here");

  auto* walk = analyze->add_subcommand("walk", "Hitting distribution");
  graph_opt(walk);
  walk->add_option("--start", a.start)->required();
  walk->add_option("--targets", a.targets, "Target mark")->required();
  walk->add_flag("--exact", a.exact);
  walk->add_flag("--mc", a.mc);
  walk->add_option("--trials", a.trials);
  walk->add_option("--steps", a.steps);
  walk->add_option("--seed", a.seed);

  auto* hyp = analyze->add_subcommand("hyperbolicity", "Four-point delta");
  graph_opt(hyp);
  hyp->add_option("--sampled", a.sampled, "Sample at least this many quadruples");
  hyp->add_option("--seed", a.seed);

  auto* geo = analyze->add_subcommand("geodesics", "All geodesics between a vertex and a label or mark");
  graph_opt(geo);
  geo->add_option("--from", a.from)->required();
  geo->add_option("--to", a.to)->required();
  geo->add_option("--cap", a.cap, "Maximum number of paths");

  auto* minor = analyze->add_subcommand("minor", "Search for a K_r minor");
  graph_opt(minor);
  minor->add_option("--r", a.r)->required()->check(CLI::Range(1, 64));
  minor->add_option("--budget", a.budget);

  auto* quot = analyze->add_subcommand("quotient", "Quotient of a spanning tree and its resistance floors");
  graph_opt(quot);
  quot->add_option("--tree", a.tree)->required();
  quot->add_option("--R", a.R, "Black threshold")->check(CLI::PositiveNumber);

  for (auto* c : {res, flow, walk, hyp, geo, minor, quot}) out_opt(c);

  std::string suite, dir = "report";
  std::uint64_t suite_seed = 1;
  auto* rep = app.add_subcommand("report", "Compute a report suite");
  rep->add_option("suite", suite, "Suite name")->required()->check(CLI::IsMember(suite_names()));
  rep->add_option("--dir", dir, "Output directory");
  rep->add_option("--seed", suite_seed);

  std::vector<const char*> argv{kToolName};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    worker_count();
    if (build_cmd->parsed()) {
      auto g = build(b);
      write_graph(b.out, g);
      out << dump({{"graph", b.graph}, {"out", b.out}, {"vertices", g.num_vertices()}, {"edges", g.num_edges()}});
    } else if (rep->parsed()) {
      auto files = report_suite(suite, dir, suite_seed, args);
      out << dump({{"suite", suite}, {"files", files}});
    } else {
      Json params = Json::object();
      std::vector<std::uint64_t> seeds;
      Json result;
      std::string op;
      for (auto* c : analyze->get_subcommands())
        if (c->parsed()) {
          op = c->get_name();
          for (const auto* o : c->get_options())
            if (o->count() > 0 && o->get_name() != "--help" && !o->results().empty())
              params[o->get_single_name()] = o->as<std::string>();
        }
      if (op == "resistance") result = analyze_resistance(a);
      else if (op == "flow") result = analyze_flow(a);
      else if (op == "walk") result = analyze_walk(a);
      else if (op == "hyperbolicity") result = analyze_hyperbolicity(a);
      else if (op == "geodesics") result = analyze_geodesics(a);
      else if (op == "minor") result = analyze_minor(a);
      else result = analyze_quotient(a);
      if (op == "walk" || op == "hyperbolicity") seeds.push_back(a.seed);
      auto text = dump(envelope("analyze " + op, args, params, seeds, result));
      if (a.out.empty()) out << text;
      else write_text(a.out, text);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  err << "wall-time: " << std::fixed << std::setprecision(3) << secs << " s\n";
  return 0;
}

}  // namespace souvlaki::app
