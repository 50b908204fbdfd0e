#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hrush/graph.hpp"
#include "hrush/orientability.hpp"

namespace hrush {

struct PredimensionReport {
  VertexSet subset;
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  long long delta = 0;
};

inline PredimensionReport delta(const Graph& g, const VertexSet& subset, int k) {
  detail::require_positive_k(k);
  for (Vertex v : subset) (void)g.index_of(v);
  std::size_t edges = 0;
  for (const Edge& e : g.edges()) {
    if (subset.count(e.u) && subset.count(e.v)) ++edges;
  }
  return {subset, subset.size(), edges,
          static_cast<long long>(k) * static_cast<long long>(subset.size()) -
              static_cast<long long>(edges)};
}

// Vertex -> multiplicity k - out-degree, for every vertex of out-degree < k.
using RootSet = std::map<Vertex, int>;

inline RootSet roots(const Orientation& o) {
  RootSet out;
  long long total = 0;
  for (std::size_t i = 0; i < o.vertex_count(); ++i) {
    const int deficit = o.k() - static_cast<int>(o.out_degree(i));
    if (deficit > 0) {
      out.emplace(o.vertex_at(i), deficit);
      total += deficit;
    }
  }
  const long long expected = static_cast<long long>(o.k()) * static_cast<long long>(o.vertex_count()) -
                             static_cast<long long>(o.arc_count());
  if (total != expected) throw std::logic_error("root multiplicities do not sum to the predimension");
  return out;
}

enum class ClosureKind { scl, sdcl, cl_d };

struct ClosureResult {
  VertexSet seed;
  VertexSet closure;
  ClosureKind kind = ClosureKind::scl;
  // Vertices absorbed at each step; seed plus all steps is the closure.
  std::vector<VertexSet> trace;
};

namespace detail {

inline std::vector<bool> scl_flags(const Orientation& o, const std::vector<std::size_t>& start) {
  std::vector<bool> in(o.vertex_count(), false);
  std::vector<std::size_t> stack;
  for (std::size_t i : start) {
    if (!in[i]) {
      in[i] = true;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    for (std::size_t y : o.out_neighbors(x)) {
      if (!in[y]) {
        in[y] = true;
        stack.push_back(y);
      }
    }
  }
  return in;
}

// Indices of roots inside scl(v), ascending.
inline std::vector<std::size_t> root_signature(const Orientation& o, std::size_t v) {
  const auto in = scl_flags(o, {v});
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < o.vertex_count(); ++i) {
    if (in[i] && o.out_degree(i) < static_cast<std::size_t>(o.k())) out.push_back(i);
  }
  return out;
}

}  // namespace detail

inline ClosureResult successor_closure(const Orientation& o, const VertexSet& seed) {
  ClosureResult result{seed, seed, ClosureKind::scl, {}};
  std::vector<bool> in(o.vertex_count(), false);
  std::vector<std::size_t> layer;
  for (Vertex v : seed) {
    const std::size_t i = o.index_of(v);
    in[i] = true;
    layer.push_back(i);
  }
  while (!layer.empty()) {
    std::vector<std::size_t> next;
    VertexSet absorbed;
    for (std::size_t x : layer) {
      for (std::size_t y : o.out_neighbors(x)) {
        if (in[y]) continue;
        in[y] = true;
        next.push_back(y);
        absorbed.insert(o.vertex_at(y));
      }
    }
    if (!absorbed.empty()) {
      result.closure.insert(absorbed.begin(), absorbed.end());
      result.trace.push_back(std::move(absorbed));
    }
    layer = std::move(next);
  }
  return result;
}

inline bool is_successor_closed(const Orientation& o, const VertexSet& members) {
  for (Vertex v : members) {
    for (std::size_t j : o.out_neighbors(o.index_of(v))) {
      if (!members.count(o.vertex_at(j))) return false;
    }
  }
  return true;
}

// Roots of o lying in scl(seed).
inline RootSet roots_within_closure(const Orientation& o, const VertexSet& seed) {
  const VertexSet closure = successor_closure(o, seed).closure;
  RootSet out;
  for (const auto& [v, mult] : roots(o)) {
    if (closure.count(v)) out.emplace(v, mult);
  }
  return out;
}

// All v whose successor closure has its roots among the roots of scl(seed).
inline ClosureResult successor_d_closure(const Orientation& o, const VertexSet& seed) {
  const ClosureResult scl = successor_closure(o, seed);
  std::vector<bool> allowed(o.vertex_count(), false);
  for (Vertex v : scl.closure) {
    const std::size_t i = o.index_of(v);
    if (o.out_degree(i) < static_cast<std::size_t>(o.k())) allowed[i] = true;
  }
  ClosureResult result{seed, scl.closure, ClosureKind::sdcl, {}};
  VertexSet first(scl.closure);
  for (Vertex v : seed) first.erase(v);
  if (!first.empty()) result.trace.push_back(std::move(first));
  VertexSet extra;
  for (std::size_t i = 0; i < o.vertex_count(); ++i) {
    const Vertex v = o.vertex_at(i);
    if (result.closure.count(v)) continue;
    bool inside = true;
    for (std::size_t r : detail::root_signature(o, i)) inside = inside && allowed[r];
    if (inside) extra.insert(v);
  }
  if (!extra.empty()) {
    result.closure.insert(extra.begin(), extra.end());
    result.trace.push_back(std::move(extra));
  }
  return result;
}

enum class StrongKind { s, d };
enum class StrongMethod { predimension, orientation };

struct StrongVerdict {
  bool strong = false;
  std::optional<Orientation> witness;       // orientation route, when strong
  std::optional<VertexSet> violating_set;   // some C with A ⊂ C and δ(C) too small
};

namespace detail {

// For a fixed C, gain[X] = δ(C ∪ X) − δ(C) for every X ⊆ V∖C, indexed by
// masks over the positions of `rest`.
struct SupersetGains {
  std::vector<std::size_t> rest;
  std::vector<std::int32_t> gain;
};

inline SupersetGains superset_gains(const std::vector<Mask>& adj, Mask c, std::size_t n, int k,
                                    std::size_t limit, const char* what) {
  SupersetGains out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(c >> i & 1)) out.rest.push_back(i);
  }
  const std::size_t f = out.rest.size();
  require_within_limit(f, std::min<std::size_t>(limit, 30), what);
  std::vector<std::uint32_t> local(f, 0);
  std::vector<std::int32_t> to_c(f, 0);
  for (std::size_t p = 0; p < f; ++p) {
    const Mask nb = adj[out.rest[p]];
    to_c[p] = std::popcount(nb & c);
    for (std::size_t q = 0; q < f; ++q) {
      if (nb >> out.rest[q] & 1) local[p] |= std::uint32_t{1} << q;
    }
  }
  out.gain.assign(std::size_t{1} << f, 0);
  for (std::uint32_t x = 1; x < out.gain.size(); ++x) {
    const int p = std::countr_zero(x);
    const std::uint32_t y = x & (x - 1);
    out.gain[x] = out.gain[y] + k - std::popcount(local[static_cast<std::size_t>(p)] & y) -
                  to_c[static_cast<std::size_t>(p)];
  }
  return out;
}

// Order used to pick among candidate supersets: gain, then size, then the
// lexicographic order of the sorted member lists.
inline bool better_candidate(const SupersetGains& t, std::uint32_t x, std::uint32_t best) {
  if (t.gain[x] != t.gain[best]) return t.gain[x] < t.gain[best];
  const int px = std::popcount(x), pb = std::popcount(best);
  if (px != pb) return px < pb;
  const std::uint32_t diff = x ^ best;
  return diff != 0 && (x & (diff & (~diff + 1))) != 0;
}

inline Mask expand(const SupersetGains& t, std::uint32_t x) {
  Mask m = 0;
  for (; x; x &= x - 1) m |= Mask{1} << t.rest[static_cast<std::size_t>(std::countr_zero(x))];
  return m;
}

inline void require_sparse(const Graph& g, int k) {
  if (!is_sparse(g, k)) throw DomainError("graph is not " + std::to_string(k) + "-sparse");
}

inline StrongVerdict strong_by_predimension(const Graph& g, const VertexSet& a, StrongKind kind,
                                            int k, std::size_t limit) {
  const auto adj = neighbor_masks(g);
  const Mask am = to_mask(g, a);
  const auto t = superset_gains(adj, am, g.vertex_count(), k, limit, "predimension strong test");
  std::optional<std::uint32_t> worst;
  for (std::uint32_t x = 1; x < t.gain.size(); ++x) {
    const bool bad = kind == StrongKind::s ? t.gain[x] < 0 : t.gain[x] <= 0;
    if (bad && (!worst || better_candidate(t, x, *worst))) worst = x;
  }
  if (!worst) return {true, std::nullopt, std::nullopt};
  return {false, std::nullopt, from_mask(g, am | expand(t, *worst))};
}

inline StrongVerdict strong_by_orientation(const Graph& g, const VertexSet& a, StrongKind kind,
                                           int k) {
  ArcConstraint c;
  c.inward_set = a;
  OrientOutcome outcome = orient_with_certificate(g, k, c);
  if (!outcome.orientation) {
    VertexSet violator = a;
    violator.insert(outcome.blocking.begin(), outcome.blocking.end());
    if (delta(g, violator, k).delta >= delta(g, a, k).delta) {
      throw std::logic_error("augmenting search returned a non-violating blocking set");
    }
    return {false, std::nullopt, std::move(violator)};
  }
  if (kind == StrongKind::d) {
    VertexSet closure = successor_d_closure(*outcome.orientation, a).closure;
    if (closure != a) return {false, std::nullopt, std::move(closure)};
  }
  return {true, std::move(outcome.orientation), std::nullopt};
}

}  // namespace detail

// A ≤_s B (kind s) or A ≤_d B (kind d) for A = a inside the k-sparse graph g.
inline StrongVerdict is_strong(const Graph& g, const VertexSet& a, StrongKind kind, int k,
                               StrongMethod method = StrongMethod::orientation,
                               std::size_t limit = default_search_limit()) {
  detail::require_positive_k(k);
  for (Vertex v : a) (void)g.index_of(v);
  detail::require_sparse(g, k);
  if (method == StrongMethod::predimension) {
    return detail::strong_by_predimension(g, a, kind, k, limit);
  }
  return detail::strong_by_orientation(g, a, kind, k);
}

// Least d-closed superset of seed, computed by repeated absorption of the
// superset D minimising (δ(D), |D|, lexicographic order) while δ(D) ≤ δ(C).
inline ClosureResult d_closure(const Graph& g, const VertexSet& seed, int k,
                               std::size_t limit = default_search_limit()) {
  detail::require_positive_k(k);
  detail::require_sparse(g, k);
  const auto adj = neighbor_masks(g);
  Mask c = to_mask(g, seed);
  ClosureResult result{seed, seed, ClosureKind::cl_d, {}};
  while (true) {
    const auto t = detail::superset_gains(adj, c, g.vertex_count(), k, limit, "d-closure");
    if (t.gain.size() <= 1) break;
    std::uint32_t best = 1;
    for (std::uint32_t x = 2; x < t.gain.size(); ++x) {
      if (detail::better_candidate(t, x, best)) best = x;
    }
    if (t.gain[best] > 0) break;
    const Mask added = detail::expand(t, best);
    result.trace.push_back(from_mask(g, added));
    c |= added;
  }
  result.closure = from_mask(g, c);
  return result;
}

enum class ReductVariant { circle, bullet };

struct ClosureReduct {
  Graph base;
  ReductVariant variant = ReductVariant::circle;
  std::map<Vertex, VertexSet> unary_closure;
  // Sorted root tuple -> every u whose scl(u) has exactly those roots.
  std::map<std::vector<Vertex>, VertexSet> root_tuple_map;
};

inline ClosureReduct closure_reduct(const Orientation& o, ReductVariant variant) {
  ClosureReduct out{o.reduct(), variant, {}, {}};
  for (std::size_t i = 0; i < o.vertex_count(); ++i) {
    const Vertex v = o.vertex_at(i);
    out.unary_closure.emplace(v, successor_closure(o, {v}).closure);
    if (variant != ReductVariant::bullet) continue;
    std::vector<Vertex> tuple;
    for (std::size_t r : detail::root_signature(o, i)) tuple.push_back(o.vertex_at(r));
    // Closures without roots give the empty tuple, on which the map is undefined.
    if (!tuple.empty()) out.root_tuple_map[tuple].insert(v);
  }
  return out;
}

}  // namespace hrush
