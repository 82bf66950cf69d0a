#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "souvlaki/graph.hpp"

namespace souvlaki {

using Json = nlohmann::ordered_json;

inline Json to_json(const Graph& g) {
  Json vertices = Json::array();
  for (VertexId v = 0; v < g.num_vertices(); ++v) vertices.push_back({{"label", g.name(v)}});
  Json edges = Json::array();
  for (const auto& e : g.edges()) {
    Json je = {{"u", g.name(e.u)}, {"v", g.name(e.v)}, {"r", e.resistance}};
    if (e.multiplicity != 1) je["m"] = e.multiplicity;
    je["kind"] = to_string(e.kind);
    edges.push_back(std::move(je));
  }
  Json marks = Json::object();
  for (const auto& [name, vs] : g.marks()) {
    Json list = Json::array();
    for (auto v : vs) list.push_back(g.name(v));
    marks[name] = std::move(list);
  }
  return {{"vertices", std::move(vertices)}, {"edges", std::move(edges)}, {"marks", std::move(marks)}};
}

inline std::string to_json_string(const Graph& g) { return to_json(g).dump() + "\n"; }

inline Graph graph_from_json(const Json& j) {
  try {
    GraphBuilder b;
    for (const auto& jv : j.at("vertices")) b.add_vertex(VertexLabel::parse(jv.at("label").get<std::string>()));
    for (const auto& je : j.at("edges")) {
      auto u = b.id(VertexLabel::parse(je.at("u").get<std::string>()));
      auto v = b.id(VertexLabel::parse(je.at("v").get<std::string>()));
      double r = je.contains("r") ? je.at("r").get<double>() : 1.0;
      std::uint32_t m = je.contains("m") ? je.at("m").get<std::uint32_t>() : 1;
      EdgeKind kind = je.contains("kind") ? edge_kind_from_string(je.at("kind").get<std::string>())
                                          : EdgeKind::Plain;
      b.add_edge(u, v, r, kind, m);
    }
    if (j.contains("marks"))
      for (const auto& [name, list] : j.at("marks").items()) {
        b.declare_mark(name);
        for (const auto& l : list) b.mark(name, b.id(VertexLabel::parse(l.get<std::string>())));
      }
    return std::move(b).build();
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed graph JSON: ") + e.what());
  }
}

inline Graph read_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open graph file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("cannot parse '" + path + "': " + e.what());
  }
  return graph_from_json(j);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DomainError("write to '" + path + "' failed");
}

inline void write_graph(const std::string& path, const Graph& g) { write_text(path, to_json_string(g)); }

}  // namespace souvlaki
