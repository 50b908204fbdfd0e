#pragma once

#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "hrush/graph.hpp"

namespace hrush {

struct SparsityVerdict {
  bool sparse = false;
  std::optional<Orientation> witness;  // present iff sparse
  VertexSet violator;                  // non-empty iff not sparse
};

struct ArcConstraint {
  std::vector<Arc> forced_arcs;
  // Every edge between inward_set and its complement must point into it.
  std::optional<VertexSet> inward_set;
};

struct OrientationSpace {
  Graph graph;
  int k = 1;
  std::vector<Orientation> points;
  bool truncated = false;
};

namespace detail {

// Edges are matched to one of the k slots of their tail. Slots of one vertex
// are interchangeable, so a vertex is a bin of capacity k and augmenting paths
// move edges between their two endpoints.
class SlotMatcher {
 public:
  SlotMatcher(const Graph& g, int k)
      : g_(g),
        k_(static_cast<std::size_t>(k)),
        tail_(g.edge_count(), kUnassigned),
        fixed_(g.edge_count(), false),
        owned_(g.vertex_count()),
        visited_(g.vertex_count(), false) {
    ends_.reserve(g.edge_count());
    for (const Edge& e : g.edges()) ends_.push_back({g.index_of(e.u), g.index_of(e.v)});
  }

  // Pins edge e to tail t. False when t has no free slot left.
  bool fix(std::size_t e, std::size_t t) {
    if (owned_[t].size() >= k_) return false;
    tail_[e] = t;
    fixed_[e] = true;
    owned_[t].push_back(e);
    return true;
  }

  bool assigned(std::size_t e) const { return tail_[e] != kUnassigned; }

  // Places edge e, trying the lower endpoint first. On failure the vertices
  // explored by the search are available through blocking().
  bool place(std::size_t e) {
    std::fill(visited_.begin(), visited_.end(), false);
    explored_.clear();
    for (std::size_t x : {ends_[e].first, ends_[e].second}) {
      if (!visited_[x] && make_room(x)) {
        tail_[e] = x;
        owned_[x].push_back(e);
        return true;
      }
    }
    return false;
  }

  VertexSet blocking() const {
    VertexSet out;
    for (std::size_t x : explored_) out.insert(g_.vertex_at(x));
    return out;
  }

  Orientation orientation() const {
    std::vector<Arc> arcs;
    arcs.reserve(tail_.size());
    for (std::size_t e = 0; e < tail_.size(); ++e) {
      const auto [a, b] = ends_[e];
      const std::size_t head = tail_[e] == a ? b : a;
      arcs.push_back({g_.vertex_at(tail_[e]), g_.vertex_at(head)});
    }
    return Orientation(g_.vertices(), std::move(arcs), static_cast<int>(k_));
  }

 private:
  static constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);

  bool make_room(std::size_t x) {
    visited_[x] = true;
    explored_.push_back(x);
    if (owned_[x].size() < k_) return true;
    for (std::size_t pos = 0; pos < owned_[x].size(); ++pos) {
      const std::size_t f = owned_[x][pos];
      if (fixed_[f]) continue;
      const std::size_t y = ends_[f].first == x ? ends_[f].second : ends_[f].first;
      if (visited_[y] || !make_room(y)) continue;
      owned_[x].erase(owned_[x].begin() + static_cast<std::ptrdiff_t>(pos));
      tail_[f] = y;
      owned_[y].push_back(f);
      return true;
    }
    return false;
  }

  const Graph& g_;
  std::size_t k_;
  std::vector<std::pair<std::size_t, std::size_t>> ends_;
  std::vector<std::size_t> tail_;
  std::vector<bool> fixed_;
  std::vector<std::vector<std::size_t>> owned_;
  std::vector<bool> visited_;
  std::vector<std::size_t> explored_;
};

inline void require_positive_k(int k) {
  if (k < 1) throw DomainError("k must be a positive integer");
}

}  // namespace detail

inline SparsityVerdict check_sparsity(const Graph& g, int k) {
  detail::require_positive_k(k);
  detail::SlotMatcher matcher(g, k);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (!matcher.place(e)) return {false, std::nullopt, matcher.blocking()};
  }
  return {true, matcher.orientation(), {}};
}

inline bool is_sparse(const Graph& g, int k) { return check_sparsity(g, k).sparse; }

// Result of a constrained orientation search. When infeasible, `blocking` is
// the set of vertices explored by the failed augmenting search.
struct OrientOutcome {
  std::optional<Orientation> orientation;
  VertexSet blocking;
};

inline OrientOutcome orient_with_certificate(const Graph& g, int k, const ArcConstraint& c) {
  detail::require_positive_k(k);
  std::map<Edge, Vertex> forced_tail;
  for (const Arc& a : c.forced_arcs) {
    if (!g.contains(a.tail) || !g.contains(a.head) || !g.adjacent(a.tail, a.head)) {
      throw DomainError("forced arc (" + std::to_string(a.tail) + "," + std::to_string(a.head) +
                        ") is not an edge");
    }
    const Edge e{std::min(a.tail, a.head), std::max(a.tail, a.head)};
    auto [it, inserted] = forced_tail.emplace(e, a.tail);
    if (!inserted && it->second != a.tail) {
      throw DomainError("forced arcs contain both directions of edge {" + std::to_string(e.u) +
                        "," + std::to_string(e.v) + "}");
    }
  }
  if (c.inward_set) {
    for (Vertex v : *c.inward_set) (void)g.index_of(v);
    for (const Edge& e : g.edges()) {
      const bool in_u = c.inward_set->count(e.u) > 0;
      const bool in_v = c.inward_set->count(e.v) > 0;
      if (in_u == in_v) continue;
      const Vertex tail = in_u ? e.v : e.u;
      auto [it, inserted] = forced_tail.emplace(e, tail);
      if (!inserted && it->second != tail) return {std::nullopt, {it->second}};
    }
  }

  detail::SlotMatcher matcher(g, k);
  const auto& edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto it = forced_tail.find(edges[e]);
    if (it == forced_tail.end()) continue;
    if (!matcher.fix(e, g.index_of(it->second))) return {std::nullopt, {it->second}};
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (matcher.assigned(e)) continue;
    if (!matcher.place(e)) return {std::nullopt, matcher.blocking()};
  }
  return {matcher.orientation(), {}};
}

// A k-orientation satisfying the constraint, or nullopt when none exists.
inline std::optional<Orientation> orient(const Graph& g, int k, const ArcConstraint& c = {}) {
  return orient_with_certificate(g, k, c).orientation;
}

// All k-orientations of g in lexicographic order of the per-edge choices
// (edges ascending, lower endpoint as tail tried first).
inline OrientationSpace enumerate_orientations(const Graph& g, int k,
                                               std::optional<std::size_t> cap = std::nullopt) {
  detail::require_positive_k(k);
  OrientationSpace space{g, k, {}, false};
  const auto& edges = g.edges();
  std::vector<std::size_t> out(g.vertex_count(), 0);
  std::vector<Arc> arcs(edges.size());
  const std::size_t limit = static_cast<std::size_t>(k);

  auto recurse = [&](auto&& self, std::size_t e) -> bool {
    if (e == edges.size()) {
      if (cap && space.points.size() >= *cap) {
        space.truncated = true;
        return false;
      }
      space.points.emplace_back(g.vertices(), arcs, k);
      return true;
    }
    const std::size_t iu = g.index_of(edges[e].u);
    const std::size_t iv = g.index_of(edges[e].v);
    for (auto [tail, head, it] : {std::tuple{edges[e].u, edges[e].v, iu},
                                  std::tuple{edges[e].v, edges[e].u, iv}}) {
      if (out[it] >= limit) continue;
      ++out[it];
      arcs[e] = {tail, head};
      const bool keep_going = self(self, e + 1);
      --out[it];
      if (!keep_going) return false;
    }
    return true;
  };
  recurse(recurse, 0);
  return space;
}

}  // namespace hrush
