#pragma once

#include <sstream>
#include <string>
#include <string_view>

#include "hrush/graph.hpp"
#include "json.hpp"

namespace hrush {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline Json to_json(const VertexSet& s) {
  Json out = Json::array();
  for (Vertex v : s) out.push_back(v);
  return out;
}

inline Json to_json(const Graph& g) {
  Json edges = Json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u, e.v});
  return Json{{"vertices", g.vertices()}, {"edges", std::move(edges)}};
}

inline Json to_json(const Orientation& o) {
  Json j = to_json(o.reduct());
  Json arcs = Json::array();
  for (const Arc& a : o.arcs()) arcs.push_back({a.tail, a.head});
  j["arcs"] = std::move(arcs);
  j["k"] = o.k();
  return j;
}

inline Json to_json(const Embedding& f) {
  Json out = Json::array();
  for (const auto& [from, to] : f.map) out.push_back({from, to});
  return out;
}

// Compact JSON dump; object keys are sorted so equal structures give equal bytes.
inline std::string canonical_encode(const Graph& g) { return to_json(g).dump(); }
inline std::string canonical_encode(const Orientation& o) { return to_json(o).dump(); }

namespace detail {

[[noreturn]] inline void schema_error(const std::string& where, const std::string& what) {
  throw DomainError((where.empty() ? std::string("/") : where) + ": " + what);
}

inline Vertex vertex_from_json(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) schema_error(where, "expected a non-negative integer vertex id");
  const auto value = j.get<std::int64_t>();
  if (value < 0 || value > std::numeric_limits<Vertex>::max()) {
    schema_error(where, "vertex id out of range");
  }
  return static_cast<Vertex>(value);
}

inline std::pair<Vertex, Vertex> pair_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) schema_error(where, "expected a pair [u, v]");
  return {vertex_from_json(j[0], where + "/0"), vertex_from_json(j[1], where + "/1")};
}

inline const Json& field(const Json& j, const char* name, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected an object");
  auto it = j.find(name);
  if (it == j.end()) schema_error(where, std::string("missing field \"") + name + "\"");
  return *it;
}

inline std::string child(const std::string& where, const std::string& key) {
  return where + "/" + key;
}

}  // namespace detail

inline VertexSet vertex_set_from_json(const Json& j, const std::string& where = "") {
  if (!j.is_array()) detail::schema_error(where, "expected an array of vertex ids");
  VertexSet out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!out.insert(detail::vertex_from_json(j[i], where + "/" + std::to_string(i))).second) {
      detail::schema_error(where, "duplicate vertex id");
    }
  }
  return out;
}

inline Graph graph_from_json(const Json& j, const std::string& where = "") {
  const Json& vs = detail::field(j, "vertices", where);
  const Json& es = detail::field(j, "edges", where);
  const VertexSet vertices = vertex_set_from_json(vs, detail::child(where, "vertices"));
  if (!es.is_array()) detail::schema_error(detail::child(where, "edges"), "expected an array");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < es.size(); ++i) {
    auto [u, v] = detail::pair_from_json(es[i], detail::child(where, "edges/" + std::to_string(i)));
    edges.push_back({u, v});
  }
  try {
    return Graph(std::vector<Vertex>(vertices.begin(), vertices.end()), std::move(edges));
  } catch (const DomainError& e) {
    detail::schema_error(where, e.what());
  }
}

inline Orientation orientation_from_json(const Json& j, const std::string& where = "") {
  const VertexSet vertices =
      vertex_set_from_json(detail::field(j, "vertices", where), detail::child(where, "vertices"));
  const Json& k = detail::field(j, "k", where);
  if (!k.is_number_integer() || k.get<std::int64_t>() < 1) {
    detail::schema_error(detail::child(where, "k"), "expected a positive integer");
  }
  const Json& as = detail::field(j, "arcs", where);
  if (!as.is_array()) detail::schema_error(detail::child(where, "arcs"), "expected an array");
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < as.size(); ++i) {
    auto [u, v] = detail::pair_from_json(as[i], detail::child(where, "arcs/" + std::to_string(i)));
    arcs.push_back({u, v});
  }
  try {
    Orientation o(std::vector<Vertex>(vertices.begin(), vertices.end()), std::move(arcs),
                  k.get<int>());
    if (j.contains("edges") && !(graph_from_json(j, where) == o.reduct())) {
      detail::schema_error(detail::child(where, "edges"), "edges disagree with arcs");
    }
    return o;
  } catch (const DomainError& e) {
    const std::string msg = e.what();
    if (!msg.empty() && msg.front() == '/') throw;
    detail::schema_error(where, msg);
  }
}

inline Embedding embedding_from_json(const Json& j, const std::string& where = "") {
  if (!j.is_array()) detail::schema_error(where, "expected an array of [from, to] pairs");
  Embedding f;
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto [a, b] = detail::pair_from_json(j[i], where + "/" + std::to_string(i));
    if (!f.map.emplace(a, b).second) detail::schema_error(where, "vertex mapped twice");
  }
  return f;
}

// Parses text, reporting syntax errors with line and column.
inline Json parse_json(std::string_view text, const std::string& source = "input") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw DomainError(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                      ": malformed JSON (" + e.what() + ")");
  }
}

inline Graph decode_graph(std::string_view bytes) { return graph_from_json(parse_json(bytes)); }
inline Orientation decode_orientation(std::string_view bytes) {
  return orientation_from_json(parse_json(bytes));
}

// ---- DOT export ----

struct DotStyle {
  std::string name = "G";
  std::map<Vertex, std::string> labels;
  VertexSet boxed;      // drawn as boxes (e.g. a gadget root)
  VertexSet left;       // filled light blue
  VertexSet right;      // filled light salmon
};

namespace detail {

inline void dot_vertex(std::ostringstream& out, Vertex v, const DotStyle& style, bool root) {
  out << "  " << v << " [";
  auto label = style.labels.find(v);
  out << "label=\"" << (label == style.labels.end() ? std::to_string(v) : label->second) << "\"";
  if (style.boxed.count(v)) {
    out << ", shape=box";
  } else if (root) {
    out << ", shape=doublecircle";
  } else {
    out << ", shape=circle";
  }
  if (style.left.count(v)) out << ", style=filled, fillcolor=lightblue";
  if (style.right.count(v)) out << ", style=filled, fillcolor=lightsalmon";
  out << "];\n";
}

}  // namespace detail

inline std::string to_dot(const Graph& g, const DotStyle& style = {}) {
  std::ostringstream out;
  out << "graph " << style.name << " {\n";
  for (Vertex v : g.vertices()) detail::dot_vertex(out, v, style, false);
  for (const Edge& e : g.edges()) out << "  " << e.u << " -- " << e.v << ";\n";
  out << "}\n";
  return out.str();
}

// Roots (out-degree below k) get a double circle.
inline std::string to_dot(const Orientation& o, const DotStyle& style = {}) {
  std::ostringstream out;
  out << "digraph " << style.name << " {\n";
  for (std::size_t i = 0; i < o.vertex_count(); ++i) {
    detail::dot_vertex(out, o.vertex_at(i), style,
                       o.out_degree(i) < static_cast<std::size_t>(o.k()));
  }
  for (const Arc& a : o.arcs()) out << "  " << a.tail << " -> " << a.head << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace hrush
