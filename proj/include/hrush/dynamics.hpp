#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hrush/encoding.hpp"
#include "hrush/graph.hpp"
#include "hrush/orientability.hpp"
#include "hrush/predimension.hpp"

namespace hrush {

// perm[i] is the index of the image of vertex_at(i).
using Permutation = std::vector<std::size_t>;

namespace detail {

// Runs fn(i) for i in [0, count) on up to `threads` workers. Callers write
// results into per-index slots, so the outcome does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

template <Structure S>
std::size_t out_or_degree(const S& s, std::size_t i) {
  if constexpr (std::same_as<S, Graph>) {
    return s.degree(i);
  } else {
    return s.out_degree(i);
  }
}

template <Structure S>
std::size_t in_degree(const S& s, std::size_t i) {
  if constexpr (std::same_as<S, Graph>) {
    return s.degree(i);
  } else {
    return s.in_neighbors(i).size();
  }
}

template <Structure S>
std::vector<std::size_t> undirected_neighbors(const S& s, std::size_t i) {
  if constexpr (std::same_as<S, Graph>) {
    return s.neighbors(i);
  } else {
    std::vector<std::size_t> out = s.out_neighbors(i);
    out.insert(out.end(), s.in_neighbors(i).begin(), s.in_neighbors(i).end());
    std::sort(out.begin(), out.end());
    return out;
  }
}

// Colour refinement. Colours are ranks of iso-invariant signatures, so equal
// inputs up to relabelling give equal colour multisets and orders.
template <Structure S>
std::vector<int> refine_colors(const S& s, std::vector<int> colors) {
  const std::size_t n = s.vertex_count();
  std::size_t classes = 0;
  while (true) {
    std::vector<std::vector<int>> sig(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<int> outs, ins;
      if constexpr (std::same_as<S, Graph>) {
        for (std::size_t j : s.neighbors(i)) outs.push_back(colors[j]);
      } else {
        for (std::size_t j : s.out_neighbors(i)) outs.push_back(colors[j]);
        for (std::size_t j : s.in_neighbors(i)) ins.push_back(colors[j]);
      }
      std::sort(outs.begin(), outs.end());
      std::sort(ins.begin(), ins.end());
      sig[i].push_back(colors[i]);
      sig[i].push_back(static_cast<int>(outs.size()));
      sig[i].insert(sig[i].end(), outs.begin(), outs.end());
      sig[i].push_back(-1);
      sig[i].insert(sig[i].end(), ins.begin(), ins.end());
    }
    std::vector<std::vector<int>> distinct = sig;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::size_t i = 0; i < n; ++i) {
      colors[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), sig[i]) -
                                   distinct.begin());
    }
    if (distinct.size() == classes) return colors;
    classes = distinct.size();
  }
}

// Backtracking search for isomorphisms a -> b extending a partial map.
template <Structure S>
class IsoSearch {
 public:
  static constexpr std::size_t kFree = static_cast<std::size_t>(-1);

  IsoSearch(const S& a, const S& b, std::vector<int> colors_a = {}, std::vector<int> colors_b = {})
      : a_(a), b_(b) {
    const std::size_t n = a.vertex_count();
    if (colors_a.empty()) colors_a.assign(n, 0);
    if (colors_b.empty()) colors_b.assign(b.vertex_count(), 0);
    compatible_ = n == b.vertex_count() && edge_total(a) == edge_total(b);
    if (!compatible_) return;
    // Refine both structures as one disjoint union so colours are comparable.
    inv_a_ = joint_invariants(colors_a, colors_b, true);
    inv_b_ = joint_invariants(colors_a, colors_b, false);
    order_ = search_order();
  }

  // Calls visit(perm) for each isomorphism extending `partial` (kFree marks
  // unassigned) in lexicographic order; stops when visit returns false.
  template <class Visit>
  void for_each(std::vector<std::size_t> partial, Visit&& visit) {
    if (!compatible_) return;
    const std::size_t n = a_.vertex_count();
    used_.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      if (partial[i] == kFree) continue;
      if (partial[i] >= n || used_[partial[i]] || inv_a_[i] != inv_b_[partial[i]]) return;
      used_[partial[i]] = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (partial[i] != kFree && partial[j] != kFree &&
            relation_code(a_, i, j) != relation_code(b_, partial[i], partial[j])) {
          return;
        }
      }
    }
    map_ = std::move(partial);
    stop_ = false;
    recurse(0, visit);
  }

  std::optional<Permutation> first(std::vector<std::size_t> partial) {
    std::optional<Permutation> found;
    for_each(std::move(partial), [&](const Permutation& p) {
      found = p;
      return false;
    });
    return found;
  }

 private:
  static std::size_t edge_total(const S& s) {
    if constexpr (std::same_as<S, Graph>) {
      return s.edge_count();
    } else {
      return s.arc_count();
    }
  }

  std::vector<int> joint_invariants(const std::vector<int>& ca, const std::vector<int>& cb,
                                    bool first_half) const {
    // Combined structure: vertices of a followed by vertices of b.
    const std::size_t na = a_.vertex_count();
    std::vector<Vertex> vs(na + b_.vertex_count());
    std::iota(vs.begin(), vs.end(), Vertex{0});
    std::vector<int> colors(ca);
    colors.insert(colors.end(), cb.begin(), cb.end());
    std::vector<int> refined;
    if constexpr (std::same_as<S, Graph>) {
      std::vector<Edge> es;
      for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j : a_.neighbors(i))
          if (i < j) es.push_back({static_cast<Vertex>(i), static_cast<Vertex>(j)});
      for (std::size_t i = 0; i < b_.vertex_count(); ++i)
        for (std::size_t j : b_.neighbors(i))
          if (i < j) es.push_back({static_cast<Vertex>(na + i), static_cast<Vertex>(na + j)});
      refined = refine_colors(Graph(vs, es), colors);
    } else {
      std::vector<Arc> as;
      for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j : a_.out_neighbors(i))
          as.push_back({static_cast<Vertex>(i), static_cast<Vertex>(j)});
      for (std::size_t i = 0; i < b_.vertex_count(); ++i)
        for (std::size_t j : b_.out_neighbors(i))
          as.push_back({static_cast<Vertex>(na + i), static_cast<Vertex>(na + j)});
      int cap = 1;
      for (std::size_t i = 0; i < na; ++i) cap = std::max(cap, static_cast<int>(a_.out_degree(i)));
      for (std::size_t i = 0; i < b_.vertex_count(); ++i)
        cap = std::max(cap, static_cast<int>(b_.out_degree(i)));
      refined = refine_colors(Orientation(vs, as, cap), colors);
    }
    if (first_half) return {refined.begin(), refined.begin() + static_cast<std::ptrdiff_t>(na)};
    return {refined.begin() + static_cast<std::ptrdiff_t>(na), refined.end()};
  }

  // Connected-first order so each new vertex is constrained by earlier ones.
  std::vector<std::size_t> search_order() const {
    const std::size_t n = a_.vertex_count();
    std::vector<std::size_t> order;
    std::vector<bool> placed(n, false);
    while (order.size() < n) {
      std::size_t start = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (!placed[i] && (start == n || undirected_neighbors(a_, i).size() >
                                             undirected_neighbors(a_, start).size())) {
          start = i;
        }
      }
      std::vector<std::size_t> queue{start};
      placed[start] = true;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        order.push_back(queue[head]);
        for (std::size_t j : undirected_neighbors(a_, queue[head])) {
          if (!placed[j]) {
            placed[j] = true;
            queue.push_back(j);
          }
        }
      }
    }
    return order;
  }

  template <class Visit>
  void recurse(std::size_t depth, Visit& visit) {
    if (stop_) return;
    const std::size_t n = a_.vertex_count();
    while (depth < n && map_[order_[depth]] != kFree) ++depth;
    if (depth == n) {
      if (!visit(static_cast<const Permutation&>(map_))) stop_ = true;
      return;
    }
    const std::size_t v = order_[depth];
    for (std::size_t w = 0; w < n && !stop_; ++w) {
      if (used_[w] || inv_a_[v] != inv_b_[w]) continue;
      bool ok = true;
      for (std::size_t u = 0; u < n && ok; ++u) {
        if (map_[u] == kFree || u == v) continue;
        ok = relation_code(a_, v, u) == relation_code(b_, w, map_[u]);
      }
      if (!ok) continue;
      map_[v] = w;
      used_[w] = true;
      recurse(depth + 1, visit);
      used_[w] = false;
      map_[v] = kFree;
    }
  }

  const S& a_;
  const S& b_;
  bool compatible_ = false;
  bool stop_ = false;
  std::vector<int> inv_a_, inv_b_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> map_;
  std::vector<bool> used_;
};

}  // namespace detail

struct AutomorphismGroup {
  Graph base;
  std::vector<Permutation> generators;
  std::uint64_t order = 1;
  std::optional<std::vector<Permutation>> elements;
};

template <Structure S>
struct GroupData {
  std::vector<Permutation> generators;
  std::uint64_t order = 1;
  std::optional<std::vector<Permutation>> elements;
};

// Exact automorphism group via a point-stabiliser chain: at each level the
// orbit of the next base point under the current stabiliser is found by
// searching for one automorphism per candidate image.
template <Structure S>
GroupData<S> automorphism_group(const S& s, std::size_t limit = default_search_limit(),
                                std::uint64_t list_up_to = 5040) {
  const std::size_t n = s.vertex_count();
  require_within_limit(n, limit, "automorphism search");
  constexpr std::size_t kFree = detail::IsoSearch<S>::kFree;
  detail::IsoSearch<S> search(s, s);
  GroupData<S> out;
  std::vector<std::size_t> fixed(n, kFree);
  for (std::size_t b = 0; b < n; ++b) {
    std::uint64_t orbit = 0;
    for (std::size_t w = 0; w < n; ++w) {
      auto partial = fixed;
      partial[b] = w;
      if (auto perm = search.first(partial)) {
        ++orbit;
        if (w != b) out.generators.push_back(*perm);
      }
    }
    out.order *= orbit;
    fixed[b] = b;
  }
  if (out.order <= list_up_to) {
    std::vector<Permutation> all;
    search.for_each(std::vector<std::size_t>(n, kFree), [&](const Permutation& p) {
      all.push_back(p);
      return true;
    });
    out.elements = std::move(all);
  }
  return out;
}

inline AutomorphismGroup automorphisms(const Graph& g, std::size_t limit = default_search_limit()) {
  auto data = automorphism_group(g, limit);
  return {g, std::move(data.generators), data.order, std::move(data.elements)};
}

// Some automorphism of s agreeing with `partial` (vertex ids), if any.
template <Structure S>
std::optional<std::map<Vertex, Vertex>> extend_to_automorphism(
    const S& s, const std::map<Vertex, Vertex>& partial) {
  detail::IsoSearch<S> search(s, s);
  std::vector<std::size_t> seed(s.vertex_count(), detail::IsoSearch<S>::kFree);
  for (const auto& [from, to] : partial) seed[s.index_of(from)] = s.index_of(to);
  auto perm = search.first(seed);
  if (!perm) return std::nullopt;
  std::map<Vertex, Vertex> out;
  for (std::size_t i = 0; i < perm->size(); ++i) out[s.vertex_at(i)] = s.vertex_at((*perm)[i]);
  return out;
}

// Some isomorphism a -> b (vertex ids), if any.
template <Structure S>
std::optional<std::map<Vertex, Vertex>> find_isomorphism(const S& a, const S& b) {
  detail::IsoSearch<S> search(a, b);
  auto perm = search.first(std::vector<std::size_t>(a.vertex_count(), detail::IsoSearch<S>::kFree));
  if (!perm) return std::nullopt;
  std::map<Vertex, Vertex> out;
  for (std::size_t i = 0; i < perm->size(); ++i) out[a.vertex_at(i)] = b.vertex_at((*perm)[i]);
  return out;
}

struct CanonicalForm {
  // labeling[r] = index of the vertex receiving canonical label r.
  std::vector<std::size_t> labeling;
  std::string code;
};

// Isomorphism-invariant code: the least adjacency string over all labellings
// reached by individualisation-refinement. Optional colours must be preserved.
template <Structure S>
CanonicalForm canonical_form(const S& s, std::vector<int> colors = {}) {
  const std::size_t n = s.vertex_count();
  if (colors.empty()) colors.assign(n, 0);
  std::vector<int> base = colors;
  {
    std::vector<int> distinct = base;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (int& c : base) {
      c = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), c) - distinct.begin());
    }
  }
  CanonicalForm best;
  bool have = false;

  auto leaf = [&](const std::vector<int>& cell) {
    std::vector<std::size_t> labeling(n);
    for (std::size_t i = 0; i < n; ++i) labeling[static_cast<std::size_t>(cell[i])] = i;
    std::string code;
    code.reserve(n + n * n);
    for (std::size_t r = 0; r < n; ++r) code += std::to_string(base[labeling[r]]) + ",";
    code += "|";
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t q = r + 1; q < n; ++q) {
        code += static_cast<char>('0' + relation_code(s, labeling[r], labeling[q]));
      }
    }
    if (!have || code < best.code) {
      best = {std::move(labeling), std::move(code)};
      have = true;
    }
  };

  auto recurse = [&](auto&& self, std::vector<int> cell) -> void {
    cell = detail::refine_colors(s, std::move(cell));
    std::vector<std::size_t> counts(n, 0);
    for (int c : cell) ++counts[static_cast<std::size_t>(c)];
    std::size_t target = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (counts[c] > 1) {
        target = c;
        break;
      }
    }
    if (target == n) {
      leaf(cell);
      return;
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (static_cast<std::size_t>(cell[v]) != target) continue;
      std::vector<int> next(n);
      for (std::size_t u = 0; u < n; ++u) next[u] = 2 * cell[u] + 1;
      next[v] = 2 * cell[v];
      self(self, std::move(next));
    }
  };
  if (n == 0) return {{}, "|"};
  recurse(recurse, base);
  return best;
}

template <Structure S>
S apply_permutation(const S& s, const Permutation& p) {
  if constexpr (std::same_as<S, Graph>) {
    std::vector<Edge> edges;
    for (const Edge& e : s.edges()) {
      edges.push_back({s.vertex_at(p[s.index_of(e.u)]), s.vertex_at(p[s.index_of(e.v)])});
    }
    return Graph(s.vertices(), std::move(edges));
  } else {
    std::vector<Arc> arcs;
    for (const Arc& a : s.arcs()) {
      arcs.push_back({s.vertex_at(p[s.index_of(a.tail)]), s.vertex_at(p[s.index_of(a.head)])});
    }
    return Orientation(s.vertices(), std::move(arcs), s.k());
  }
}

struct OrbitPartition {
  OrientationSpace space;
  // Point indices per orbit, ascending; orbits ordered by representative.
  std::vector<std::vector<std::size_t>> orbits;
  // Member of each orbit with the least canonical encoding.
  std::vector<std::size_t> representatives;
};

inline OrbitPartition orientation_orbits(const Graph& g, int k,
                                         std::size_t limit = default_search_limit()) {
  OrbitPartition out{enumerate_orientations(g, k), {}, {}};
  const auto group = automorphisms(g, limit);
  const auto& points = out.space.points;
  std::vector<std::string> codes(points.size());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < points.size(); ++i) {
    codes[i] = canonical_encode(points[i]);
    index.emplace(codes[i], i);
  }
  std::vector<std::size_t> parent(points.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Permutation& p : group.generators) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::size_t j = index.at(canonical_encode(apply_permutation(points[i], p)));
      const std::size_t a = find(i), b = find(j);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t i = 0; i < points.size(); ++i) by_root[find(i)].push_back(i);
  std::vector<std::pair<std::string, std::vector<std::size_t>>> keyed;
  for (auto& [root, members] : by_root) {
    std::size_t rep = members.front();
    for (std::size_t m : members) {
      if (codes[m] < codes[rep]) rep = m;
    }
    keyed.emplace_back(codes[rep], std::move(members));
  }
  std::sort(keyed.begin(), keyed.end());
  for (auto& [code, members] : keyed) {
    out.representatives.push_back(index.at(code));
    out.orbits.push_back(std::move(members));
  }
  return out;
}

struct DirectionReport {
  Vertex center = 0;
  std::vector<Vertex> neighbors;
  std::size_t point_count = 0;
  std::size_t max_count = 0;                 // max over points of #{i : (a,b_i) present}
  std::vector<std::size_t> arc_counts;       // points containing (a,b_i)
  std::vector<double> frequencies;           // arc_counts / point_count
  double frequency_sum = 0.0;
  bool holds = false;                        // max_count ≤ k and Σ arc_counts ≤ k·point_count
};

inline DirectionReport direction_count_check(const Graph& g, int k, Vertex a,
                                             const std::vector<Vertex>& neighbors) {
  for (Vertex b : neighbors) {
    if (!g.adjacent(a, b)) {
      throw DomainError("vertex " + std::to_string(b) + " is not adjacent to " + std::to_string(a));
    }
  }
  const auto space = enumerate_orientations(g, k);
  DirectionReport r;
  r.center = a;
  r.neighbors = neighbors;
  r.point_count = space.points.size();
  r.arc_counts.assign(neighbors.size(), 0);
  for (const Orientation& o : space.points) {
    std::size_t here = 0;
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
      if (o.has_arc(a, neighbors[i])) {
        ++here;
        ++r.arc_counts[i];
      }
    }
    r.max_count = std::max(r.max_count, here);
  }
  std::size_t total = 0;
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    total += r.arc_counts[i];
    const double p = r.point_count == 0 ? 0.0
                                        : static_cast<double>(r.arc_counts[i]) /
                                              static_cast<double>(r.point_count);
    r.frequencies.push_back(p);
    r.frequency_sum += p;
  }
  r.holds = r.max_count <= static_cast<std::size_t>(k) &&
            total <= static_cast<std::size_t>(k) * r.point_count;
  return r;
}

// Bound on the number of vertices reachable within `radius` steps:
// k^{radius+1} − 1 for k ≥ 2 and radius + 1 for k = 1. Saturates at UINT64_MAX.
inline std::uint64_t ball_bound(int k, std::size_t radius) {
  if (k == 1) return radius + 1;
  std::uint64_t power = 1;
  for (std::size_t i = 0; i <= radius; ++i) {
    if (power > UINT64_MAX / static_cast<std::uint64_t>(k)) return UINT64_MAX;
    power *= static_cast<std::uint64_t>(k);
  }
  return power - 1;
}

inline VertexSet reachability_ball(const Orientation& o, Vertex a, std::size_t radius) {
  std::vector<std::size_t> dist(o.vertex_count(), static_cast<std::size_t>(-1));
  std::vector<std::size_t> layer{o.index_of(a)};
  dist[layer.front()] = 0;
  VertexSet ball{a};
  for (std::size_t d = 1; d <= radius && !layer.empty(); ++d) {
    std::vector<std::size_t> next;
    for (std::size_t x : layer) {
      for (std::size_t y : o.out_neighbors(x)) {
        if (dist[y] != static_cast<std::size_t>(-1)) continue;
        dist[y] = d;
        next.push_back(y);
        ball.insert(o.vertex_at(y));
      }
    }
    layer = std::move(next);
  }
  if (ball.size() > ball_bound(o.k(), radius)) {
    throw std::logic_error("reachability ball exceeds the out-degree bound");
  }
  return ball;
}

// s(1) = 1, s(n+1) = k^{s(n)+1}; nullopt once the value leaves 64 bits.
inline std::optional<std::uint64_t> s_recursion(int k, std::size_t n) {
  if (k < 1 || n < 1) throw DomainError("s(n) needs k ≥ 1 and n ≥ 1");
  std::uint64_t s = 1;
  for (std::size_t i = 1; i < n; ++i) {
    std::uint64_t next = 1;
    for (std::uint64_t e = 0; e < s + 1; ++e) {
      if (next > UINT64_MAX / static_cast<std::uint64_t>(k)) return std::nullopt;
      next *= static_cast<std::uint64_t>(k);
      if (k == 1) break;
    }
    s = next;
  }
  return s;
}

struct RefinementVerdict {
  bool is_refinement = false;
  std::optional<VertexSet> witness;  // closed in the first, not in the second
  bool proper = false;
};

namespace detail {

inline void require_same_graph(const Orientation& a, const Orientation& b) {
  if (a.k() != b.k() || !(a.reduct() == b.reduct())) {
    throw DomainError("orientations do not orient the same graph with the same k");
  }
}

// The ⊑_d-closed sets of o: {v : roots(scl(v)) ⊆ R'} over root subsets R'.
inline std::vector<VertexSet> d_closed_sets(const Orientation& o, std::size_t limit) {
  std::vector<std::size_t> root_index;
  std::vector<std::size_t> position(o.vertex_count(), 0);
  for (std::size_t i = 0; i < o.vertex_count(); ++i) {
    if (o.out_degree(i) < static_cast<std::size_t>(o.k())) {
      position[i] = root_index.size();
      root_index.push_back(i);
    }
  }
  require_within_limit(root_index.size(), std::min<std::size_t>(limit, 30),
                       "closed-set enumeration over roots");
  std::vector<std::uint32_t> need(o.vertex_count(), 0);
  for (std::size_t v = 0; v < o.vertex_count(); ++v) {
    for (std::size_t r : root_signature(o, v)) need[v] |= std::uint32_t{1} << position[r];
  }
  std::set<VertexSet> seen;
  std::vector<VertexSet> out;
  for (std::uint32_t allowed = 0; allowed < (std::uint32_t{1} << root_index.size()); ++allowed) {
    VertexSet y;
    for (std::size_t v = 0; v < o.vertex_count(); ++v) {
      if ((need[v] & ~allowed) == 0) y.insert(o.vertex_at(v));
    }
    if (seen.insert(y).second) out.push_back(std::move(y));
  }
  return out;
}

inline std::optional<VertexSet> refinement_gap(const Orientation& a, const Orientation& b,
                                               StrongKind kind, std::size_t limit) {
  if (kind == StrongKind::s) {
    for (std::size_t i = 0; i < a.vertex_count(); ++i) {
      const VertexSet in_a = successor_closure(a, {a.vertex_at(i)}).closure;
      const VertexSet in_b = successor_closure(b, {b.vertex_at(i)}).closure;
      if (!std::includes(in_a.begin(), in_a.end(), in_b.begin(), in_b.end())) return in_a;
    }
    return std::nullopt;
  }
  for (const VertexSet& y : d_closed_sets(a, limit)) {
    if (successor_d_closure(b, y).closure != y) return y;
  }
  return std::nullopt;
}

}  // namespace detail

// Whether every closed set of a (for the given kind) is closed in b.
inline RefinementVerdict is_refinement(const Orientation& a, const Orientation& b, StrongKind kind,
                                       std::size_t limit = default_search_limit()) {
  detail::require_same_graph(a, b);
  RefinementVerdict r;
  r.witness = detail::refinement_gap(a, b, kind, limit);
  r.is_refinement = !r.witness;
  r.proper = r.is_refinement && detail::refinement_gap(b, a, kind, limit).has_value();
  return r;
}

namespace detail {

inline bool fine_within(const OrientationSpace& space, std::size_t i, StrongKind kind,
                        std::size_t limit) {
  const Orientation& o = space.points[i];
  for (std::size_t j = 0; j < space.points.size(); ++j) {
    if (j == i) continue;
    const Orientation& p = space.points[j];
    if (!refinement_gap(o, p, kind, limit) && refinement_gap(p, o, kind, limit)) return false;
  }
  return true;
}

}  // namespace detail

inline bool is_fine(const Orientation& o, StrongKind kind, std::size_t limit = default_search_limit()) {
  auto space = enumerate_orientations(o.reduct(), o.k());
  auto it = std::find(space.points.begin(), space.points.end(), o);
  return detail::fine_within(space, static_cast<std::size_t>(it - space.points.begin()), kind, limit);
}

inline std::vector<Orientation> fine_orientations(const Graph& g, int k, StrongKind kind,
                                                  std::size_t threads = 1,
                                                  std::size_t limit = default_search_limit()) {
  const auto space = enumerate_orientations(g, k);
  std::vector<char> fine(space.points.size(), 0);
  detail::parallel_for(space.points.size(), threads, [&](std::size_t i) {
    fine[i] = detail::fine_within(space, i, kind, limit) ? 1 : 0;
  });
  std::vector<Orientation> out;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    if (fine[i]) out.push_back(space.points[i]);
  }
  return out;
}

// o itself when fine, otherwise the fine refinement of o with the least
// canonical encoding.
inline Orientation refine_to_fine(const Orientation& o, StrongKind kind,
                                  std::size_t limit = default_search_limit()) {
  const auto space = enumerate_orientations(o.reduct(), o.k());
  const auto self = static_cast<std::size_t>(
      std::find(space.points.begin(), space.points.end(), o) - space.points.begin());
  if (detail::fine_within(space, self, kind, limit)) return o;
  std::optional<std::size_t> best;
  std::string best_code;
  for (std::size_t j = 0; j < space.points.size(); ++j) {
    if (detail::refinement_gap(o, space.points[j], kind, limit)) continue;
    if (!detail::fine_within(space, j, kind, limit)) continue;
    std::string code = canonical_encode(space.points[j]);
    if (!best || code < best_code) {
      best = j;
      best_code = std::move(code);
    }
  }
  if (!best) throw std::logic_error("no fine refinement found");
  return space.points[*best];
}

}  // namespace hrush
