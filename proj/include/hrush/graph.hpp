#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <concepts>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hrush/errors.hpp"

namespace hrush {

using Vertex = std::uint32_t;
using VertexSet = std::set<Vertex>;
// Bitmask over vertex indices (position in ascending id order).
using Mask = std::uint64_t;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  auto operator<=>(const Edge&) const = default;
};

struct Arc {
  Vertex tail = 0;
  Vertex head = 0;
  auto operator<=>(const Arc&) const = default;
};

namespace detail {

inline std::vector<Vertex> sorted_unique_vertices(std::vector<Vertex> vertices) {
  std::sort(vertices.begin(), vertices.end());
  if (std::adjacent_find(vertices.begin(), vertices.end()) != vertices.end()) {
    throw DomainError("duplicate vertex id");
  }
  return vertices;
}

inline std::size_t lookup(const std::vector<Vertex>& sorted, Vertex v) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
  if (it == sorted.end() || *it != v) {
    throw DomainError("unknown vertex id " + std::to_string(v));
  }
  return static_cast<std::size_t>(it - sorted.begin());
}

}  // namespace detail

// Finite simple graph. Vertices are kept in ascending order and all index
// based accessors refer to that order.
class Graph {
 public:
  Graph() = default;

  Graph(std::vector<Vertex> vertices, std::vector<Edge> edges)
      : vertices_(detail::sorted_unique_vertices(std::move(vertices))) {
    for (Edge& e : edges) {
      if (e.u == e.v) throw DomainError("loop at vertex " + std::to_string(e.u));
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end());
    if (auto dup = std::adjacent_find(edges.begin(), edges.end()); dup != edges.end()) {
      throw DomainError("duplicate edge {" + std::to_string(dup->u) + "," +
                        std::to_string(dup->v) + "}");
    }
    edges_ = std::move(edges);
    adjacency_.assign(vertices_.size(), {});
    for (const Edge& e : edges_) {
      const std::size_t i = detail::lookup(vertices_, e.u);
      const std::size_t j = detail::lookup(vertices_, e.v);
      adjacency_[i].push_back(j);
      adjacency_[j].push_back(i);
    }
    for (auto& row : adjacency_) std::sort(row.begin(), row.end());
  }

  // Vertices 0..n-1 and the given edges.
  static Graph on_range(std::size_t n, std::vector<Edge> edges = {}) {
    std::vector<Vertex> vs(n);
    for (std::size_t i = 0; i < n; ++i) vs[i] = static_cast<Vertex>(i);
    return Graph(std::move(vs), std::move(edges));
  }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  bool contains(Vertex v) const {
    return std::binary_search(vertices_.begin(), vertices_.end(), v);
  }
  std::size_t index_of(Vertex v) const { return detail::lookup(vertices_, v); }
  Vertex vertex_at(std::size_t i) const { return vertices_[i]; }

  const std::vector<std::size_t>& neighbors(std::size_t i) const { return adjacency_[i]; }
  std::size_t degree(std::size_t i) const { return adjacency_[i].size(); }

  bool adjacent_index(std::size_t i, std::size_t j) const {
    return std::binary_search(adjacency_[i].begin(), adjacency_[i].end(), j);
  }
  bool adjacent(Vertex a, Vertex b) const {
    return a != b && adjacent_index(index_of(a), index_of(b));
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

// Returns a description of the first broken orientation invariant, if any.
inline std::optional<std::string> orientation_violation(const std::vector<Vertex>& vertices,
                                                        const std::vector<Arc>& arcs, int k) {
  if (k < 1) return "out-degree cap k must be positive";
  std::vector<Vertex> vs = vertices;
  std::sort(vs.begin(), vs.end());
  if (std::adjacent_find(vs.begin(), vs.end()) != vs.end()) return "duplicate vertex id";
  std::set<Arc> seen;
  std::map<Vertex, int> out;
  for (const Arc& a : arcs) {
    const std::string label =
        "(" + std::to_string(a.tail) + "," + std::to_string(a.head) + ")";
    if (a.tail == a.head) return "loop " + label;
    if (!std::binary_search(vs.begin(), vs.end(), a.tail) ||
        !std::binary_search(vs.begin(), vs.end(), a.head)) {
      return "arc " + label + " has an endpoint outside the vertex set";
    }
    if (!seen.insert(a).second) return "duplicate arc " + label;
    if (seen.count(Arc{a.head, a.tail})) return "arc " + label + " appears in both directions";
    if (++out[a.tail] > k) {
      return "vertex " + std::to_string(a.tail) + " exceeds out-degree " + std::to_string(k);
    }
  }
  return std::nullopt;
}

// Asymmetric loop-free digraph with out-degree at most k.
class Orientation {
 public:
  Orientation() = default;

  Orientation(std::vector<Vertex> vertices, std::vector<Arc> arcs, int k) : k_(k) {
    if (auto problem = orientation_violation(vertices, arcs, k)) throw DomainError(*problem);
    vertices_ = detail::sorted_unique_vertices(std::move(vertices));
    std::sort(arcs.begin(), arcs.end());
    arcs_ = std::move(arcs);
    out_.assign(vertices_.size(), {});
    in_.assign(vertices_.size(), {});
    for (const Arc& a : arcs_) {
      const std::size_t i = detail::lookup(vertices_, a.tail);
      const std::size_t j = detail::lookup(vertices_, a.head);
      out_[i].push_back(j);
      in_[j].push_back(i);
    }
    for (auto& row : out_) std::sort(row.begin(), row.end());
    for (auto& row : in_) std::sort(row.begin(), row.end());
  }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  int k() const { return k_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t arc_count() const { return arcs_.size(); }

  bool contains(Vertex v) const {
    return std::binary_search(vertices_.begin(), vertices_.end(), v);
  }
  std::size_t index_of(Vertex v) const { return detail::lookup(vertices_, v); }
  Vertex vertex_at(std::size_t i) const { return vertices_[i]; }

  const std::vector<std::size_t>& out_neighbors(std::size_t i) const { return out_[i]; }
  const std::vector<std::size_t>& in_neighbors(std::size_t i) const { return in_[i]; }
  std::size_t out_degree(std::size_t i) const { return out_[i].size(); }

  bool has_arc_index(std::size_t i, std::size_t j) const {
    return std::binary_search(out_[i].begin(), out_[i].end(), j);
  }
  bool has_arc(Vertex a, Vertex b) const {
    return a != b && has_arc_index(index_of(a), index_of(b));
  }

  Graph reduct() const {
    std::vector<Edge> edges;
    edges.reserve(arcs_.size());
    for (const Arc& a : arcs_) edges.push_back({a.tail, a.head});
    return Graph(vertices_, std::move(edges));
  }

  friend bool operator==(const Orientation& a, const Orientation& b) {
    return a.k_ == b.k_ && a.vertices_ == b.vertices_ && a.arcs_ == b.arcs_;
  }

 private:
  int k_ = 1;
  std::vector<Vertex> vertices_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

template <class S>
concept Structure = std::same_as<S, Graph> || std::same_as<S, Orientation>;

inline Graph undirected_reduct(const Orientation& o) { return o.reduct(); }

// Relation between the vertices at indices i and j: 0 none, 1 edge or arc
// i->j, 2 arc j->i. Graph edges always report 1.
template <Structure S>
int relation_code(const S& s, std::size_t i, std::size_t j) {
  if constexpr (std::same_as<S, Graph>) {
    return s.adjacent_index(i, j) ? 1 : 0;
  } else {
    if (s.has_arc_index(i, j)) return 1;
    if (s.has_arc_index(j, i)) return 2;
    return 0;
  }
}

template <Structure S>
std::vector<std::size_t> indices_of(const S& s, const VertexSet& members) {
  std::vector<std::size_t> out;
  out.reserve(members.size());
  for (Vertex v : members) out.push_back(s.index_of(v));
  return out;
}

inline Graph induced_subgraph(const Graph& parent, const VertexSet& members) {
  for (Vertex v : members) (void)parent.index_of(v);
  std::vector<Edge> edges;
  for (const Edge& e : parent.edges()) {
    if (members.count(e.u) && members.count(e.v)) edges.push_back(e);
  }
  return Graph(std::vector<Vertex>(members.begin(), members.end()), std::move(edges));
}

inline Orientation induced_suborientation(const Orientation& parent, const VertexSet& members) {
  for (Vertex v : members) (void)parent.index_of(v);
  std::vector<Arc> arcs;
  for (const Arc& a : parent.arcs()) {
    if (members.count(a.tail) && members.count(a.head)) arcs.push_back(a);
  }
  return Orientation(std::vector<Vertex>(members.begin(), members.end()), std::move(arcs),
                     parent.k());
}

template <Structure S>
S induced(const S& parent, const VertexSet& members) {
  if constexpr (std::same_as<S, Graph>) {
    return induced_subgraph(parent, members);
  } else {
    return induced_suborientation(parent, members);
  }
}

template <Structure S>
VertexSet all_vertices(const S& s) {
  return VertexSet(s.vertices().begin(), s.vertices().end());
}

// Injective vertex map. Whether it is an embedding depends on the structures
// it is checked against, see is_embedding.
struct Embedding {
  std::map<Vertex, Vertex> map;

  Vertex operator()(Vertex v) const {
    auto it = map.find(v);
    if (it == map.end()) throw DomainError("vertex " + std::to_string(v) + " not in embedding domain");
    return it->second;
  }
  VertexSet image() const {
    VertexSet out;
    for (const auto& [from, to] : map) out.insert(to);
    return out;
  }
  VertexSet image_of(const VertexSet& members) const {
    VertexSet out;
    for (Vertex v : members) out.insert((*this)(v));
    return out;
  }
  friend bool operator==(const Embedding&, const Embedding&) = default;

  static Embedding identity(const VertexSet& members) {
    Embedding e;
    for (Vertex v : members) e.map.emplace(v, v);
    return e;
  }
};

// True when f is injective, defined exactly on src, and preserves and
// reflects edges (resp. arcs).
template <Structure S>
bool is_embedding(const S& src, const S& dst, const Embedding& f) {
  if (f.map.size() != src.vertex_count()) return false;
  std::vector<std::size_t> idx;
  idx.reserve(src.vertex_count());
  VertexSet targets;
  for (Vertex v : src.vertices()) {
    auto it = f.map.find(v);
    if (it == f.map.end() || !dst.contains(it->second)) return false;
    if (!targets.insert(it->second).second) return false;
    idx.push_back(dst.index_of(it->second));
  }
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      if (relation_code(src, i, j) != relation_code(dst, idx[i], idx[j])) return false;
    }
  }
  return true;
}

// ---- bitmask helpers for exhaustive searches over small structures ----

template <Structure S>
Mask to_mask(const S& s, const VertexSet& members) {
  if (s.vertex_count() > 64) throw ResourceError("bitmask search needs at most 64 vertices");
  Mask m = 0;
  for (Vertex v : members) m |= Mask{1} << s.index_of(v);
  return m;
}

template <Structure S>
VertexSet from_mask(const S& s, Mask m) {
  VertexSet out;
  while (m) {
    const int i = std::countr_zero(m);
    out.insert(s.vertex_at(static_cast<std::size_t>(i)));
    m &= m - 1;
  }
  return out;
}

// Undirected neighbourhood masks (arcs are symmetrised for orientations).
template <Structure S>
std::vector<Mask> neighbor_masks(const S& s) {
  if (s.vertex_count() > 64) throw ResourceError("bitmask search needs at most 64 vertices");
  std::vector<Mask> adj(s.vertex_count(), 0);
  for (std::size_t i = 0; i < s.vertex_count(); ++i) {
    if constexpr (std::same_as<S, Graph>) {
      for (std::size_t j : s.neighbors(i)) adj[i] |= Mask{1} << j;
    } else {
      for (std::size_t j : s.out_neighbors(i)) {
        adj[i] |= Mask{1} << j;
        adj[j] |= Mask{1} << i;
      }
    }
  }
  return adj;
}

inline std::size_t edges_inside(const std::vector<Mask>& adj, Mask m) {
  std::size_t twice = 0;
  for (Mask rest = m; rest; rest &= rest - 1) {
    twice += static_cast<std::size_t>(std::popcount(adj[std::countr_zero(rest)] & m));
  }
  return twice / 2;
}

inline Mask full_mask(std::size_t n) {
  return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1;
}

// Length of a shortest cycle, or nullopt for forests.
inline std::optional<std::size_t> girth(const Graph& g) {
  const std::size_t n = g.vertex_count();
  std::optional<std::size_t> best;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> dist(n, std::numeric_limits<std::size_t>::max());
    std::vector<std::size_t> parent(n, n);
    std::deque<std::size_t> queue{s};
    dist[s] = 0;
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      for (std::size_t y : g.neighbors(x)) {
        if (dist[y] == std::numeric_limits<std::size_t>::max()) {
          dist[y] = dist[x] + 1;
          parent[y] = x;
          queue.push_back(y);
        } else if (parent[x] != y) {
          const std::size_t len = dist[x] + dist[y] + 1;
          if (!best || len < *best) best = len;
        }
      }
    }
  }
  return best;
}

inline std::size_t connected_component_count(const Graph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<bool> seen(n, false);
  std::size_t count = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++count;
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      for (std::size_t y : g.neighbors(x)) {
        if (!seen[y]) {
          seen[y] = true;
          stack.push_back(y);
        }
      }
    }
  }
  return count;
}

}  // namespace hrush
