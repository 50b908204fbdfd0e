#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hrush/encoding.hpp"
#include "hrush/graph.hpp"

namespace hrush {

enum class GadgetKind { T0, T1 };

// Rooted half-binary tree (or its one-cycle modification). Vertex ids follow
// heap numbering of the binary words: the root c is 0, the word "0" is 1 and
// a word of length L ≥ 1 gets 2^(L-1) plus the value of its bits after the
// leading 0. The parent of v ≥ 2 is v/2.
struct RootedGadget {
  Graph graph;
  Vertex root = 0;
  VertexSet left_leaves;   // S_0: leaves whose word ends in 0
  VertexSet right_leaves;  // S_1: leaves whose word ends in 1
  std::size_t height = 0;
  GadgetKind kind = GadgetKind::T0;
  std::map<Vertex, std::string> words;

  // Every edge directed away from the root, with out-degree cap 2.
  Orientation outward() const {
    const std::size_t n = graph.vertex_count();
    std::vector<std::size_t> depth(n, n);
    std::deque<std::size_t> queue{graph.index_of(root)};
    depth[graph.index_of(root)] = 0;
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      for (std::size_t y : graph.neighbors(x)) {
        if (depth[y] == n) {
          depth[y] = depth[x] + 1;
          queue.push_back(y);
        }
      }
    }
    std::vector<Arc> arcs;
    for (const Edge& e : graph.edges()) {
      const bool forward = depth[graph.index_of(e.u)] < depth[graph.index_of(e.v)];
      arcs.push_back(forward ? Arc{e.u, e.v} : Arc{e.v, e.u});
    }
    return Orientation(graph.vertices(), std::move(arcs), 2);
  }

  VertexSet leaves() const {
    VertexSet out = left_leaves;
    out.insert(right_leaves.begin(), right_leaves.end());
    return out;
  }
};

namespace detail {

inline std::string heap_word(Vertex v) {
  if (v == 0) return "c";
  std::string bits;
  for (Vertex x = v; x > 1; x /= 2) bits.insert(bits.begin(), static_cast<char>('0' + (x & 1)));
  return "0" + bits;
}

inline Vertex heap_id(const std::string& word) {
  Vertex id = 1;
  for (std::size_t i = 1; i < word.size(); ++i) id = id * 2 + static_cast<Vertex>(word[i] - '0');
  return id;
}

}  // namespace detail

// Words in {0,1}^{<n} that are empty or start with 0, ordered by the
// initial-segment relation.
inline RootedGadget build_t0(std::size_t n) {
  if (n < 2) throw DomainError("T_0(n) needs n >= 2");
  if (n > 24) throw ResourceError("T_0(n) with n > 24 is too large to build");
  const Vertex count = Vertex{1} << (n - 1);
  RootedGadget t;
  t.height = n;
  t.kind = GadgetKind::T0;
  std::vector<Vertex> vertices(count);
  std::vector<Edge> edges;
  for (Vertex v = 0; v < count; ++v) {
    vertices[v] = v;
    t.words[v] = detail::heap_word(v);
    if (v >= 1) edges.push_back({v == 1 ? 0 : v / 2, v});
  }
  t.graph = Graph(std::move(vertices), std::move(edges));
  for (Vertex v = count / 2; v < count; ++v) {
    if (v == 0) continue;
    (t.words[v].back() == '0' ? t.left_leaves : t.right_leaves).insert(v);
  }
  return t;
}

// T_0(3m) with the subtree below 0^m 1 0^(m-1) folded onto the subtree below
// 0^(2m), so the two height-2m words become one vertex with two parents and
// out-degrees stay at most 2. The result has a single cycle, of length 2m.
inline RootedGadget build_t1(std::size_t m) {
  if (m < 3) throw DomainError("T_1(3m) needs m >= 3");
  RootedGadget t0 = build_t0(3 * m);
  const std::string kept_word(2 * m, '0');
  const std::string folded_word = std::string(m, '0') + "1" + std::string(m - 1, '0');
  const Vertex kept = detail::heap_id(kept_word);
  const Vertex folded = detail::heap_id(folded_word);

  // v lies below `folded` at relative depth d when v >> d == folded.
  auto fold = [&](Vertex v) -> std::optional<Vertex> {
    for (std::size_t d = 0; (v >> d) >= folded; ++d) {
      if ((v >> d) == folded) return (kept << d) | (v & ((Vertex{1} << d) - 1));
    }
    return std::nullopt;
  };

  RootedGadget t;
  t.height = 3 * m;
  t.kind = GadgetKind::T1;
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  for (Vertex v : t0.graph.vertices()) {
    if (fold(v)) continue;
    vertices.push_back(v);
    t.words[v] = t0.words[v];
  }
  for (const Edge& e : t0.graph.edges()) {
    const Vertex u = fold(e.u).value_or(e.u);
    const Vertex v = fold(e.v).value_or(e.v);
    if (u == e.u && v == e.v) {
      edges.push_back(e);
    } else if (!fold(e.u)) {
      edges.push_back({std::min(u, v), std::max(u, v)});  // the new edge into `kept`
    }
  }
  t.graph = Graph(std::move(vertices), std::move(edges));
  for (Vertex v : t0.left_leaves) {
    if (!fold(v)) t.left_leaves.insert(v);
  }
  for (Vertex v : t0.right_leaves) {
    if (!fold(v)) t.right_leaves.insert(v);
  }
  return t;
}

struct GadgetAttachment {
  Graph graph;             // E
  VertexSet left;          // S^0
  VertexSet right;         // S^1
  Orientation orientation; // b plus every copy directed away from its root
  std::vector<Embedding> copies;  // gadget vertex -> E vertex, per copy
};

// Glues 2 − k_i copies of t to every vertex a_i of out-degree k_i < 2 in b,
// identifying a_i with the root. Copies are numbered in ascending order of
// a_i, non-root gadget vertices taking consecutive fresh ids above max(b).
inline GadgetAttachment attach_gadgets(const Orientation& b, const RootedGadget& t) {
  if (b.k() != 2) throw DomainError("gadgets attach to 2-orientations only");
  const Orientation tree = t.outward();
  Vertex next = b.vertices().empty() ? 0 : b.vertices().back() + 1;
  std::vector<Vertex> vertices = b.vertices();
  std::vector<Arc> arcs = b.arcs();
  GadgetAttachment out;
  for (std::size_t i = 0; i < b.vertex_count(); ++i) {
    for (std::size_t c = b.out_degree(i); c < 2; ++c) {
      Embedding f;
      for (Vertex v : t.graph.vertices()) {
        if (v == t.root) {
          f.map[v] = b.vertex_at(i);
        } else {
          f.map[v] = next;
          vertices.push_back(next++);
        }
      }
      for (const Arc& a : tree.arcs()) arcs.push_back({f(a.tail), f(a.head)});
      const VertexSet l = f.image_of(t.left_leaves), r = f.image_of(t.right_leaves);
      out.left.insert(l.begin(), l.end());
      out.right.insert(r.begin(), r.end());
      out.copies.push_back(std::move(f));
    }
  }
  out.orientation = Orientation(std::move(vertices), std::move(arcs), 2);
  out.graph = out.orientation.reduct();
  return out;
}

template <Structure S>
struct IteratedAmalgam {
  S structure;
  std::vector<Embedding> copies;
};

// `copies` copies of x glued along the identity on `over`. Copy 0 keeps the
// ids of x; later copies number their remaining vertices consecutively above
// every id used so far.
template <Structure S>
IteratedAmalgam<S> iterated_free_amalgam(const S& x, const VertexSet& over, std::size_t copies) {
  if (copies < 1) throw DomainError("need at least one copy");
  for (Vertex v : over) (void)x.index_of(v);
  IteratedAmalgam<S> out;
  Vertex next = x.vertices().empty() ? 0 : x.vertices().back() + 1;
  std::vector<Vertex> vertices = x.vertices();
  std::vector<std::pair<Vertex, Vertex>> relations;
  if constexpr (std::same_as<S, Graph>) {
    for (const Edge& e : x.edges()) relations.push_back({e.u, e.v});
  } else {
    for (const Arc& a : x.arcs()) relations.push_back({a.tail, a.head});
  }
  std::set<std::pair<Vertex, Vertex>> glued(relations.begin(), relations.end());
  out.copies.push_back(Embedding::identity(all_vertices(x)));
  for (std::size_t c = 1; c < copies; ++c) {
    Embedding f;
    for (Vertex v : x.vertices()) {
      if (over.count(v)) {
        f.map[v] = v;
      } else {
        f.map[v] = next;
        vertices.push_back(next++);
      }
    }
    for (const auto& [u, v] : relations) glued.insert({f(u), f(v)});
    out.copies.push_back(std::move(f));
  }
  if constexpr (std::same_as<S, Graph>) {
    std::vector<Edge> edges;
    for (const auto& [u, v] : glued) edges.push_back({u, v});
    out.structure = Graph(std::move(vertices), std::move(edges));
  } else {
    std::vector<Arc> arcs;
    std::map<Vertex, int> degree;
    int cap = x.k();
    for (const auto& [u, v] : glued) {
      arcs.push_back({u, v});
      cap = std::max(cap, ++degree[u]);
    }
    out.structure = Orientation(std::move(vertices), std::move(arcs), cap);
  }
  return out;
}

// The single vertex 0 with two outward copies of t attached.
inline GadgetAttachment gadget_extension(const RootedGadget& t) {
  return attach_gadgets(Orientation({0}, {}, 2), t);
}

}  // namespace hrush
