#pragma once

// Exponential reference implementations used to cross-check the library.
// They work on plain adjacency bitmasks and share no code with hrush beyond
// the Graph and Orientation containers.

#include <algorithm>
#include <cstdint>
#include <map>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hrush/graph.hpp"

namespace oracle {

using hrush::Arc;
using hrush::Edge;
using hrush::Graph;
using hrush::Orientation;
using hrush::Vertex;
using hrush::VertexSet;
using Bits = std::uint32_t;

inline int popcount(Bits x) { return __builtin_popcount(x); }

// Undirected adjacency over vertex positions.
inline std::vector<Bits> adjacency(const Graph& g) {
  std::vector<Bits> adj(g.vertex_count(), 0);
  for (const Edge& e : g.edges()) {
    const auto i = g.index_of(e.u), j = g.index_of(e.v);
    adj[i] |= Bits{1} << j;
    adj[j] |= Bits{1} << i;
  }
  return adj;
}

inline std::vector<Bits> out_adjacency(const Orientation& o) {
  std::vector<Bits> out(o.vertex_count(), 0);
  for (const Arc& a : o.arcs()) out[o.index_of(a.tail)] |= Bits{1} << o.index_of(a.head);
  return out;
}

inline int edges_in(const std::vector<Bits>& adj, Bits m) {
  int twice = 0;
  for (std::size_t i = 0; i < adj.size(); ++i) {
    if (m >> i & 1) twice += popcount(adj[i] & m);
  }
  return twice / 2;
}

inline long delta(const std::vector<Bits>& adj, Bits m, int k) {
  return static_cast<long>(k) * popcount(m) - edges_in(adj, m);
}

// δ of every subset, indexed by bitmask.
inline std::vector<long> all_deltas(const std::vector<Bits>& adj, int k) {
  const Bits n = static_cast<Bits>(adj.size());
  std::vector<long> d(Bits{1} << n);
  for (Bits m = 0; m < d.size(); ++m) d[m] = delta(adj, m, k);
  return d;
}

template <class S>
Bits mask_of(const S& s, const VertexSet& members) {
  Bits m = 0;
  for (Vertex v : members) m |= Bits{1} << s.index_of(v);
  return m;
}

template <class S>
VertexSet set_of(const S& s, Bits m) {
  VertexSet out;
  for (std::size_t i = 0; i < s.vertex_count(); ++i) {
    if (m >> i & 1) out.insert(s.vertex_at(i));
  }
  return out;
}

inline Bits full(std::size_t n) { return n >= 32 ? ~Bits{0} : (Bits{1} << n) - 1; }

// Every subset B satisfies |R^B| ≤ k|B|.
inline bool sparse(const Graph& g, int k) {
  const auto adj = adjacency(g);
  for (Bits m = 0; m <= full(g.vertex_count()); ++m) {
    if (delta(adj, m, k) < 0) return false;
    if (m == full(g.vertex_count())) break;
  }
  return true;
}

// A ≤_s B: δ(A) ≤ δ(C) for all A ⊆ C. A ≤_d B: δ(A) < δ(C) for all A ⊂ C.
inline bool strong(const std::vector<long>& deltas, std::size_t n, Bits a, bool strict) {
  const Bits rest = full(n) & ~a;
  for (Bits x = rest;; x = (x - 1) & rest) {
    if (x != 0) {
      const long dc = deltas[a | x];
      if (strict ? dc <= deltas[a] : dc < deltas[a]) return false;
    }
    if (x == 0) break;
  }
  return true;
}

inline bool strong(const Graph& g, const VertexSet& a, bool strict, int k) {
  const auto d = all_deltas(adjacency(g), k);
  return strong(d, g.vertex_count(), mask_of(g, a), strict);
}

// Closure under out-arcs, by fixpoint iteration.
inline Bits successor_closure(const std::vector<Bits>& out, Bits seed) {
  Bits c = seed;
  while (true) {
    Bits next = c;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (c >> i & 1) next |= out[i];
    }
    if (next == c) return c;
    c = next;
  }
}

inline bool successor_closed(const std::vector<Bits>& out, Bits m) {
  return successor_closure(out, m) == m;
}

// Smallest superset of seed that is successor-closed and d-closed in the
// undirected reduct, found as the intersection of all such supersets. Fails
// (nullopt) if that intersection is not itself one of them.
inline std::optional<Bits> sdcl(const Orientation& o, Bits seed) {
  const auto out = out_adjacency(o);
  const auto d = all_deltas(adjacency(o.reduct()), o.k());
  const std::size_t n = o.vertex_count();
  Bits meet = full(n);
  std::vector<bool> good(Bits{1} << n, false);
  for (Bits m = 0; m <= full(n); ++m) {
    good[m] = successor_closed(out, m) && strong(d, n, m, true);
    if ((m & seed) == seed && good[m]) meet &= m;
    if (m == full(n)) break;
  }
  if (!good[meet]) return std::nullopt;
  return meet;
}

// closed[X]: δ(X) < δ(Y) for every Y ⊋ X, by a superset-minimum sweep.
inline std::vector<bool> d_closed_table(const Graph& g, int k) {
  const auto d = all_deltas(adjacency(g), k);
  const std::size_t n = g.vertex_count();
  std::vector<long> at_or_above(d);  // min δ over supersets, X included
  std::vector<bool> closed(d.size());
  for (Bits x = full(n);; --x) {
    long above = std::numeric_limits<long>::max();
    for (std::size_t i = 0; i < n; ++i) {
      if (!(x >> i & 1)) above = std::min(above, at_or_above[x | Bits{1} << i]);
    }
    closed[x] = d[x] < above;
    at_or_above[x] = std::min(d[x], above);
    if (x == 0) break;
  }
  return closed;
}

// Intersection of all d-closed supersets of seed.
inline Bits d_closure(const std::vector<bool>& closed, std::size_t n, Bits seed) {
  Bits meet = full(n);
  const Bits rest = full(n) & ~seed;
  for (Bits x = rest;; x = (x - 1) & rest) {
    if (closed[seed | x]) meet &= seed | x;
    if (x == 0) break;
  }
  return meet;
}

inline Bits d_closure(const Graph& g, Bits seed, int k) {
  return d_closure(d_closed_table(g, k), g.vertex_count(), seed);
}

// Every assignment of directions to the edges, filtered by out-degree.
inline std::vector<Orientation> orientations(const Graph& g, int k) {
  std::vector<Orientation> out;
  const auto& edges = g.edges();
  const std::size_t m = edges.size();
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << m); ++bits) {
    std::map<Vertex, int> outdeg;
    std::vector<Arc> arcs;
    bool ok = true;
    for (std::size_t e = 0; e < m && ok; ++e) {
      const bool flip = bits >> e & 1;
      const Vertex t = flip ? edges[e].v : edges[e].u;
      const Vertex h = flip ? edges[e].u : edges[e].v;
      arcs.push_back({t, h});
      ok = ++outdeg[t] <= k;
    }
    if (ok) out.emplace_back(g.vertices(), std::move(arcs), k);
  }
  return out;
}

// Adjacency bits of g relabelled by perm (perm[i] = new position of i).
inline std::uint64_t relabelled_code(const std::vector<Bits>& adj, const std::vector<int>& perm) {
  const std::size_t n = adj.size();
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!(adj[i] >> j & 1)) continue;
      int a = perm[i], b = perm[j];
      if (a > b) std::swap(a, b);
      code |= std::uint64_t{1} << (b * (b - 1) / 2 + a);
    }
  }
  return code;
}

// Least relabelled code over labellings that list vertices by descending
// degree; an isomorphism invariant that separates non-isomorphic graphs.
inline std::uint64_t canonical_code(const Graph& g) {
  const auto adj = adjacency(g);
  const std::size_t n = adj.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto deg = [&](int v) { return popcount(adj[v]); };
  std::sort(order.begin(), order.end(), [&](int a, int b) { return deg(a) > deg(b); });
  std::uint64_t best = ~std::uint64_t{0};
  std::vector<int> perm(n);
  // Permute within blocks of equal degree.
  auto recurse = [&](auto&& self, std::size_t start) -> void {
    if (start == n) {
      for (std::size_t p = 0; p < n; ++p) perm[order[p]] = static_cast<int>(p);
      best = std::min(best, relabelled_code(adj, perm));
      return;
    }
    std::size_t end = start;
    while (end < n && deg(order[end]) == deg(order[start])) ++end;
    std::sort(order.begin() + start, order.begin() + end);
    do {
      self(self, end);
    } while (std::next_permutation(order.begin() + start, order.begin() + end));
  };
  recurse(recurse, 0);
  return best;
}

// All graphs on 0..n-1 up to isomorphism, for n = 0..max_n, by adding a
// vertex with every possible neighbourhood and discarding isomorphs.
inline std::vector<std::vector<Graph>> graph_corpus(std::size_t max_n) {
  std::vector<std::vector<Graph>> by_size{{Graph()}};
  for (std::size_t n = 1; n <= max_n; ++n) {
    std::set<std::uint64_t> seen;
    std::vector<Graph> level;
    for (const Graph& g : by_size.back()) {
      for (Bits nb = 0; nb < (Bits{1} << (n - 1)); ++nb) {
        std::vector<Edge> edges = g.edges();
        for (std::size_t i = 0; i + 1 < n; ++i) {
          if (nb >> i & 1) edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>(n - 1)});
        }
        Graph h = Graph::on_range(n, std::move(edges));
        if (seen.insert(canonical_code(h)).second) level.push_back(std::move(h));
      }
    }
    by_size.push_back(std::move(level));
  }
  return by_size;
}

inline Graph random_graph(std::mt19937_64& rng, std::size_t n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) {
      if (coin(rng)) edges.push_back({u, v});
    }
  }
  return Graph::on_range(n, std::move(edges));
}

// Length of a shortest cycle by breadth-first search from every vertex.
inline std::optional<std::size_t> girth(const Graph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<std::vector<std::size_t>> nb(n);
  for (const Edge& e : g.edges()) {
    nb[g.index_of(e.u)].push_back(g.index_of(e.v));
    nb[g.index_of(e.v)].push_back(g.index_of(e.u));
  }
  std::optional<std::size_t> best;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<long> dist(n, -1), parent(n, -1);
    std::vector<std::size_t> queue{s};
    dist[s] = 0;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t x = queue[q];
      for (std::size_t y : nb[x]) {
        if (dist[y] < 0) {
          dist[y] = dist[x] + 1;
          parent[y] = static_cast<long>(x);
          queue.push_back(y);
        } else if (parent[x] != static_cast<long>(y)) {
          const auto len = static_cast<std::size_t>(dist[x] + dist[y] + 1);
          if (!best || len < *best) best = len;
        }
      }
    }
  }
  return best;
}

// Number of vertex permutations preserving adjacency.
inline std::uint64_t automorphism_count(const Graph& g) {
  const auto adj = adjacency(g);
  std::vector<int> perm(g.vertex_count());
  std::iota(perm.begin(), perm.end(), 0);
  const auto code = relabelled_code(adj, perm);
  std::uint64_t count = 0;
  do {
    if (relabelled_code(adj, perm) == code) ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return count;
}

// Orbits of all k-orientations under every automorphism, as a list of orbit
// sizes in ascending order.
inline std::vector<std::size_t> orientation_orbit_sizes(const Graph& g, int k) {
  const auto points = orientations(g, k);
  const auto adj = adjacency(g);
  std::vector<int> perm(g.vertex_count());
  std::iota(perm.begin(), perm.end(), 0);
  const auto code = relabelled_code(adj, perm);
  std::vector<std::vector<int>> autos;
  do {
    if (relabelled_code(adj, perm) == code) autos.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  auto key = [&](const Orientation& o, const std::vector<int>& p) {
    std::set<std::pair<Vertex, Vertex>> arcs;
    for (const Arc& a : o.arcs()) {
      arcs.insert({g.vertex_at(p[g.index_of(a.tail)]), g.vertex_at(p[g.index_of(a.head)])});
    }
    return arcs;
  };
  std::vector<bool> done(points.size(), false);
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (done[i]) continue;
    std::set<std::set<std::pair<Vertex, Vertex>>> orbit;
    for (const auto& p : autos) orbit.insert(key(points[i], p));
    for (std::size_t j = i; j < points.size(); ++j) {
      if (orbit.count(key(points[j], autos.front()))) done[j] = true;
    }
    sizes.push_back(orbit.size());
  }
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

// Closed subsets of an orientation: successor-closed (kind s) or
// successor-closed and d-closed in the reduct (kind d).
inline std::vector<Bits> closed_sets(const Orientation& o, bool kind_d) {
  const auto out = out_adjacency(o);
  const auto d = all_deltas(adjacency(o.reduct()), o.k());
  std::vector<Bits> sets;
  for (Bits m = 0; m <= full(o.vertex_count()); ++m) {
    if (successor_closed(out, m) && (!kind_d || strong(d, o.vertex_count(), m, true))) sets.push_back(m);
    if (m == full(o.vertex_count())) break;
  }
  return sets;
}

inline bool refines(const Orientation& a, const Orientation& b, bool kind_d) {
  const auto cb = closed_sets(b, kind_d);
  for (Bits m : closed_sets(a, kind_d)) {
    if (!std::binary_search(cb.begin(), cb.end(), m)) return false;
  }
  return true;
}

// No other orientation of the same graph strictly refines o.
inline bool fine(const Orientation& o, bool kind_d) {
  for (const Orientation& p : orientations(o.reduct(), o.k())) {
    if (refines(o, p, kind_d) && !refines(p, o, kind_d)) return false;
  }
  return true;
}

// Vertices reachable from a by directed paths of length at most r.
inline Bits ball(const Orientation& o, std::size_t a, std::size_t r) {
  const auto out = out_adjacency(o);
  Bits reached = Bits{1} << a, frontier = reached;
  for (std::size_t step = 0; step < r; ++step) {
    Bits next = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (frontier >> i & 1) next |= out[i];
    }
    frontier = next & ~reached;
    reached |= next;
  }
  return reached;
}

inline Graph cycle(std::size_t n) {
  std::vector<Edge> edges;
  for (Vertex i = 0; i < n; ++i) edges.push_back({i, static_cast<Vertex>((i + 1) % n)});
  return Graph::on_range(n, std::move(edges));
}

inline Graph complete(std::size_t n) {
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) edges.push_back({u, v});
  }
  return Graph::on_range(n, std::move(edges));
}

inline Graph path(std::size_t n) {
  std::vector<Edge> edges;
  for (Vertex i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph::on_range(n, std::move(edges));
}

// Centre 0 joined to leaves 1..r.
inline Graph star(std::size_t r) {
  std::vector<Edge> edges;
  for (Vertex i = 1; i <= r; ++i) edges.push_back({0, i});
  return Graph::on_range(r + 1, std::move(edges));
}

}  // namespace oracle
