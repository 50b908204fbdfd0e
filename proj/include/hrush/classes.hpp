#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hrush/dynamics.hpp"
#include "hrush/encoding.hpp"
#include "hrush/growth.hpp"
#include "hrush/orientability.hpp"
#include "hrush/predimension.hpp"

namespace hrush {

enum class ClassKind { C0_s, CF_d, D0_s, DF_d, E0_fine, EF_dfine };

inline const char* class_name(ClassKind kind) {
  switch (kind) {
    case ClassKind::C0_s: return "C0_s";
    case ClassKind::CF_d: return "CF_d";
    case ClassKind::D0_s: return "D0_s";
    case ClassKind::DF_d: return "DF_d";
    case ClassKind::E0_fine: return "E0_fine";
    case ClassKind::EF_dfine: return "EF_dfine";
  }
  return "?";
}

inline ClassKind parse_class_kind(std::string_view name) {
  for (ClassKind kind : {ClassKind::C0_s, ClassKind::CF_d, ClassKind::D0_s, ClassKind::DF_d,
                         ClassKind::E0_fine, ClassKind::EF_dfine}) {
    if (name == class_name(kind)) return kind;
  }
  throw DomainError("unknown class \"" + std::string(name) +
                    "\" (expected C0_s, CF_d, D0_s, DF_d, E0_fine or EF_dfine)");
}

struct ClassSpec {
  ClassKind kind = ClassKind::C0_s;
  int k = 2;
  std::optional<GrowthFunction> growth;

  ClassSpec(ClassKind kind_, int k_, std::optional<GrowthFunction> growth_ = std::nullopt)
      : kind(kind_), k(k_), growth(std::move(growth_)) {
    detail::require_positive_k(k);
    if (uses_growth() && !growth) {
      throw DomainError(std::string("class ") + class_name(kind) + " needs a growth function");
    }
    if (!uses_growth() && growth) {
      throw DomainError(std::string("class ") + class_name(kind) + " takes no growth function");
    }
  }

  bool uses_growth() const {
    return kind == ClassKind::CF_d || kind == ClassKind::DF_d || kind == ClassKind::EF_dfine;
  }
  bool orientation_class() const {
    return kind != ClassKind::C0_s && kind != ClassKind::CF_d;
  }
  StrongKind relation() const { return uses_growth() ? StrongKind::d : StrongKind::s; }
  bool amalgamation_variant() const {
    return kind != ClassKind::E0_fine && kind != ClassKind::EF_dfine;
  }

  Json to_json() const {
    Json j{{"class", class_name(kind)}, {"k", k}};
    j["growth"] = growth ? growth->to_json() : Json(nullptr);
    return j;
  }
};

struct MembershipVerdict {
  bool member = false;
  std::optional<VertexSet> violator;
  std::string reason;
};

namespace detail {

template <Structure S>
void require_class_for(const ClassSpec& spec) {
  constexpr bool oriented = std::same_as<S, Orientation>;
  if (oriented != spec.orientation_class()) {
    throw DomainError(std::string("class ") + class_name(spec.kind) + " holds " +
                      (spec.orientation_class() ? "orientations" : "graphs") + ", got " +
                      (oriented ? "an orientation" : "a graph"));
  }
}

inline Orientation with_cap(const Orientation& o, int k) {
  if (o.k() == k) return o;
  return Orientation(o.vertices(), o.arcs(), k);
}

// Smallest (by size, then lexicographically) X with δ(X) < F(|X|). Only
// connected X are tried when F is concave: F is then subadditive and δ is
// additive over components, so a minimal violator is connected.
inline std::optional<VertexSet> growth_violator(const Graph& g, int k, const GrowthFunction& f,
                                                std::size_t limit) {
  const std::size_t n = g.vertex_count();
  if (n == 0) return std::nullopt;
  const auto adj = neighbor_masks(g);
  constexpr double kTolerance = 1e-9;
  std::optional<Mask> best;
  auto consider = [&](Mask m, long long d) {
    const auto size = static_cast<double>(std::popcount(m));
    if (static_cast<double>(d) >= f(size) - kTolerance) return;
    if (!best) {
      best = m;
      return;
    }
    const int pm = std::popcount(m), pb = std::popcount(*best);
    if (pm != pb) {
      if (pm < pb) best = m;
      return;
    }
    const Mask diff = m ^ *best;
    if (diff && (m & (diff & (~diff + 1)))) best = m;
  };

  if (f.concave()) {
    for (std::size_t r = 0; r < n; ++r) {
      const Mask allowed = ~full_mask(r + 1);
      auto grow = [&](auto&& self, Mask set, Mask frontier, Mask excluded, long long d) -> void {
        consider(set, d);
        while (frontier) {
          const Mask bit = frontier & (~frontier + 1);
          frontier &= frontier - 1;
          const std::size_t v = static_cast<std::size_t>(std::countr_zero(bit));
          const Mask next_set = set | bit;
          const Mask next_frontier = (frontier | (adj[v] & allowed)) & ~next_set & ~excluded;
          self(self, next_set, next_frontier, excluded,
               d + k - std::popcount(adj[v] & set));
          excluded |= bit;
        }
      };
      const Mask start = Mask{1} << r;
      grow(grow, start, adj[r] & allowed, 0, k);
    }
  } else {
    require_within_limit(n, limit, "growth check over all subsets");
    for (Mask m = 1; m <= full_mask(n); ++m) {
      consider(m, static_cast<long long>(k) * std::popcount(m) -
                      static_cast<long long>(edges_inside(adj, m)));
      if (m == full_mask(n)) break;
    }
  }
  if (!best) return std::nullopt;
  return from_mask(g, *best);
}

}  // namespace detail

inline MembershipVerdict class_membership(const Graph& g, const ClassSpec& spec,
                                          std::size_t limit = default_search_limit()) {
  detail::require_class_for<Graph>(spec);
  SparsityVerdict sparse = check_sparsity(g, spec.k);
  if (!sparse.sparse) {
    return {false, std::move(sparse.violator), "not " + std::to_string(spec.k) + "-sparse"};
  }
  if (spec.growth) {
    if (auto bad = detail::growth_violator(g, spec.k, *spec.growth, limit)) {
      return {false, std::move(bad), "predimension below F"};
    }
  }
  return {true, std::nullopt, ""};
}

inline MembershipVerdict class_membership(const Orientation& o, const ClassSpec& spec,
                                          std::size_t limit = default_search_limit()) {
  detail::require_class_for<Orientation>(spec);
  for (std::size_t i = 0; i < o.vertex_count(); ++i) {
    if (o.out_degree(i) > static_cast<std::size_t>(spec.k)) {
      return {false, VertexSet{o.vertex_at(i)}, "out-degree exceeds " + std::to_string(spec.k)};
    }
  }
  const Orientation capped = detail::with_cap(o, spec.k);
  if (spec.growth) {
    if (auto bad = detail::growth_violator(capped.reduct(), spec.k, *spec.growth, limit)) {
      return {false, std::move(bad), "predimension below F"};
    }
  }
  if (spec.kind == ClassKind::E0_fine || spec.kind == ClassKind::EF_dfine) {
    if (!is_fine(capped, spec.relation(), limit)) {
      return {false, std::nullopt, "orientation has a proper refinement"};
    }
  }
  return {true, std::nullopt, ""};
}

// Native strong substructure: ≤_s / ≤_d for graphs, successor closed /
// successor-d-closed for orientations.
inline bool strong_in(const Graph& g, const VertexSet& a, const ClassSpec& spec) {
  return is_strong(g, a, spec.relation(), spec.k).strong;
}

inline bool strong_in(const Orientation& o, const VertexSet& a, const ClassSpec& spec) {
  for (Vertex v : a) (void)o.index_of(v);
  const Orientation capped = detail::with_cap(o, spec.k);
  if (spec.relation() == StrongKind::s) return is_successor_closed(capped, a);
  return successor_d_closure(capped, a).closure == a;
}

// Strength of the undirected reduct, the relation used for embeddings
// between orientations in the probes.
inline bool reduct_strong_in(const Graph& g, const VertexSet& a, const ClassSpec& spec) {
  return strong_in(g, a, spec);
}

inline bool reduct_strong_in(const Orientation& o, const VertexSet& a, const ClassSpec& spec) {
  return is_strong(o.reduct(), a, spec.relation(), spec.k).strong;
}

template <Structure S>
struct AmalgamResult {
  S amalgam;
  Embedding left;
  Embedding right;
  bool in_class = false;  // only computed when a class was supplied
};

namespace detail {

template <Structure S>
bool same_relations(const S& x, const S& y) {
  if (x.vertices() != y.vertices()) return false;
  if constexpr (std::same_as<S, Graph>) {
    return x.edges() == y.edges();
  } else {
    return x.arcs() == y.arcs();
  }
}

// f1, f2 have the same domain (the ids of A) and pull back the same
// structure from b1 and b2.
template <Structure S>
void check_base_maps(const S& b1, const S& b2, const Embedding& f1, const Embedding& f2) {
  if (f1.map.size() != f2.map.size()) throw DomainError("base embeddings have different sources");
  std::vector<std::size_t> i1, i2;
  VertexSet seen1, seen2;
  for (auto it1 = f1.map.begin(), it2 = f2.map.begin(); it1 != f1.map.end(); ++it1, ++it2) {
    if (it1->first != it2->first) throw DomainError("base embeddings have different sources");
    if (!b1.contains(it1->second) || !b2.contains(it2->second)) {
      throw DomainError("base embedding maps outside its target");
    }
    if (!seen1.insert(it1->second).second || !seen2.insert(it2->second).second) {
      throw DomainError("base embedding is not injective");
    }
    i1.push_back(b1.index_of(it1->second));
    i2.push_back(b2.index_of(it2->second));
  }
  for (std::size_t p = 0; p < i1.size(); ++p) {
    for (std::size_t q = p + 1; q < i1.size(); ++q) {
      if (relation_code(b1, i1[p], i1[q]) != relation_code(b2, i2[p], i2[q])) {
        throw DomainError("base images are not isomorphic copies of the same structure");
      }
    }
  }
}

// Free amalgam: b1 keeps its ids, the rest of b2 gets fresh ids above
// max(b1) in ascending order. An orientation whose glued out-degrees exceed k
// is returned with the larger cap.
template <Structure S>
AmalgamResult<S> glue(const S& b1, const S& b2, const Embedding& f1, const Embedding& f2) {
  std::map<Vertex, Vertex> onto;  // b2 id -> amalgam id
  for (auto it1 = f1.map.begin(), it2 = f2.map.begin(); it1 != f1.map.end(); ++it1, ++it2) {
    onto[it2->second] = it1->second;
  }
  Vertex next = b1.vertices().empty() ? 0 : b1.vertices().back() + 1;
  std::vector<Vertex> vertices = b1.vertices();
  for (Vertex v : b2.vertices()) {
    if (onto.count(v)) continue;
    onto[v] = next;
    vertices.push_back(next++);
  }
  Embedding left = Embedding::identity(all_vertices(b1));
  Embedding right{onto};
  if constexpr (std::same_as<S, Graph>) {
    std::set<Edge> edges(b1.edges().begin(), b1.edges().end());
    for (const Edge& e : b2.edges()) {
      const Vertex u = onto.at(e.u), v = onto.at(e.v);
      edges.insert({std::min(u, v), std::max(u, v)});
    }
    return {Graph(std::move(vertices), {edges.begin(), edges.end()}), std::move(left),
            std::move(right), false};
  } else {
    if (b1.k() != b2.k()) throw DomainError("orientations to amalgamate have different k");
    std::set<Arc> arcs(b1.arcs().begin(), b1.arcs().end());
    for (const Arc& a : b2.arcs()) arcs.insert({onto.at(a.tail), onto.at(a.head)});
    std::map<Vertex, int> out;
    int cap = b1.k();
    for (const Arc& a : arcs) cap = std::max(cap, ++out[a.tail]);
    for (const Arc& a : arcs) {
      if (arcs.count(Arc{a.head, a.tail})) {
        throw DomainError("amalgam would contain both directions of an edge");
      }
    }
    return {Orientation(std::move(vertices), {arcs.begin(), arcs.end()}, cap), std::move(left),
            std::move(right), false};
  }
}

}  // namespace detail

// Disjoint union of b1 and b2 over the common substructure A that f1, f2
// embed (the map keys are A's vertex ids). With a class, both base images
// must be strong and in_class reports membership of the amalgam.
template <Structure S>
AmalgamResult<S> free_amalgam(const S& b1, const S& b2, const Embedding& f1, const Embedding& f2,
                              const std::optional<ClassSpec>& spec = std::nullopt,
                              std::size_t limit = default_search_limit()) {
  detail::check_base_maps(b1, b2, f1, f2);
  if (spec) {
    detail::require_class_for<S>(*spec);
    if (!strong_in(b1, f1.image(), *spec)) throw DomainError("base image is not strong in b1");
    if (!strong_in(b2, f2.image(), *spec)) throw DomainError("base image is not strong in b2");
  }
  AmalgamResult<S> result = detail::glue(b1, b2, f1, f2);
  if (spec) {
    if constexpr (std::same_as<S, Orientation>) {
      result.in_class = result.amalgam.k() == spec->k &&
                        class_membership(result.amalgam, *spec, limit).member;
    } else {
      result.in_class = class_membership(result.amalgam, *spec, limit).member;
    }
  }
  return result;
}

// Every embedding of a into b with strong image, ordered lexicographically by
// the images of a's vertices in ascending id order.
template <Structure S>
std::vector<Embedding> enumerate_strong_copies(const S& a, const S& b, const ClassSpec& spec) {
  detail::require_class_for<S>(spec);
  const std::size_t n = a.vertex_count();
  std::vector<std::size_t> image(n);
  std::vector<bool> used(b.vertex_count(), false);
  std::vector<Embedding> out;
  auto recurse = [&](auto&& self, std::size_t i) -> void {
    if (i == n) {
      Embedding f;
      for (std::size_t p = 0; p < n; ++p) f.map[a.vertex_at(p)] = b.vertex_at(image[p]);
      if (strong_in(b, f.image(), spec)) out.push_back(std::move(f));
      return;
    }
    for (std::size_t j = 0; j < b.vertex_count(); ++j) {
      if (used[j]) continue;
      bool ok = true;
      for (std::size_t p = 0; p < i && ok; ++p) {
        ok = relation_code(a, p, i) == relation_code(b, image[p], j);
      }
      if (!ok) continue;
      used[j] = true;
      image[i] = j;
      self(self, i + 1);
      used[j] = false;
    }
  };
  recurse(recurse, 0);
  return out;
}

// ---- weak amalgamation probe ----

template <Structure S>
struct WapResult {
  std::optional<AmalgamResult<S>> amalgam;
  std::size_t nodes = 0;
  // Set when the forced out-successor layers of c1 and c2 already differ,
  // which rules out every amalgam whatever its size.
  std::optional<std::size_t> refuted_at_depth;
  bool exhausted() const { return !amalgam; }
};

namespace detail {

struct LayerProfile {
  std::size_t depth_limit = 0;
  // Per depth, the sorted (in, out) degrees inside the forced part.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> layers;
};

inline std::vector<std::size_t> out_depths(const Orientation& o, const VertexSet& a) {
  constexpr std::size_t kFar = static_cast<std::size_t>(-1);
  std::vector<std::size_t> depth(o.vertex_count(), kFar);
  std::deque<std::size_t> queue;
  for (Vertex v : a) {
    depth[o.index_of(v)] = 0;
    queue.push_back(o.index_of(v));
  }
  while (!queue.empty()) {
    const std::size_t x = queue.front();
    queue.pop_front();
    for (std::size_t y : o.out_neighbors(x)) {
      if (depth[y] == kFar) {
        depth[y] = depth[x] + 1;
        queue.push_back(y);
      }
    }
  }
  return depth;
}

// First depth holding an unsaturated vertex, or one past the deepest layer.
inline std::size_t saturated_depth(const Orientation& o, const std::vector<std::size_t>& depth,
                                   int k) {
  std::size_t first = 0;
  std::size_t deepest = 0;
  bool any_unsaturated = false;
  for (std::size_t i = 0; i < o.vertex_count(); ++i) {
    if (depth[i] == static_cast<std::size_t>(-1)) continue;
    deepest = std::max(deepest, depth[i]);
    if (o.out_degree(i) < static_cast<std::size_t>(k) && (!any_unsaturated || depth[i] < first)) {
      first = depth[i];
      any_unsaturated = true;
    }
  }
  return any_unsaturated ? first : deepest + 1;
}

inline LayerProfile layer_profile(const Orientation& o, const std::vector<std::size_t>& depth,
                                  std::size_t limit) {
  LayerProfile p{limit, std::vector<std::vector<std::pair<std::size_t, std::size_t>>>(limit + 1)};
  for (std::size_t i = 0; i < o.vertex_count(); ++i) {
    if (depth[i] > limit) continue;
    std::size_t in = 0;
    for (std::size_t u : o.in_neighbors(i)) in += depth[u] < limit ? 1 : 0;
    p.layers[depth[i]].push_back({in, depth[i] < limit ? o.out_degree(i) : 0});
  }
  for (auto& layer : p.layers) std::sort(layer.begin(), layer.end());
  return p;
}

// In any D of out-degree ≤ k, every vertex at depth < R of a saturated
// prefix has exactly its own out-arcs, so both forced parts map onto the
// same part of D layer by layer. The first depth where they differ refutes
// the amalgam.
inline std::optional<std::size_t> layer_refutation(const Orientation& c1, const Orientation& c2,
                                                   const VertexSet& a, int k) {
  const auto d1 = out_depths(c1, a), d2 = out_depths(c2, a);
  const std::size_t r = std::min(saturated_depth(c1, d1, k), saturated_depth(c2, d2, k));
  const LayerProfile p1 = layer_profile(c1, d1, r), p2 = layer_profile(c2, d2, r);
  for (std::size_t d = 0; d <= r; ++d) {
    if (p1.layers[d] != p2.layers[d]) return d;
  }
  return std::nullopt;
}

template <Structure S>
class WapSearch {
 public:
  static constexpr std::size_t kUndecided = static_cast<std::size_t>(-1);
  static constexpr std::size_t kNone = static_cast<std::size_t>(-2);

  WapSearch(const ClassSpec& spec, const VertexSet& a, const S& c1, const S& c2,
            std::size_t bound, std::size_t limit)
      : spec_(spec), a_(a), c1_(c1), c2_(c2), bound_(bound), limit_(limit) {
    const std::size_t n1 = c1.vertex_count(), n2 = c2.vertex_count();
    phi_.assign(n1, kUndecided);
    inv_.assign(n2, kNone);
    nb1_.resize(n1);
    nb2_.resize(n2);
    for (std::size_t i = 0; i < n1; ++i) nb1_[i] = undirected_neighbors(c1, i);
    for (std::size_t j = 0; j < n2; ++j) nb2_[j] = undirected_neighbors(c2, j);
    for (Vertex v : a) {
      phi_[c1.index_of(v)] = c2.index_of(v);
      inv_[c2.index_of(v)] = c1.index_of(v);
    }
    identified_ = a.size();
    free2_ = n2 - a.size();
    order_ = variable_order();
  }

  std::optional<AmalgamResult<S>> run() {
    recurse(0);
    return std::move(found_);
  }

  std::size_t nodes() const { return nodes_; }

 private:
  std::vector<std::size_t> variable_order() const {
    std::vector<std::size_t> order;
    std::vector<bool> seen(c1_.vertex_count(), false);
    std::deque<std::size_t> queue;
    for (Vertex v : a_) {
      seen[c1_.index_of(v)] = true;
      queue.push_back(c1_.index_of(v));
    }
    auto drain = [&] {
      while (!queue.empty()) {
        const std::size_t x = queue.front();
        queue.pop_front();
        for (std::size_t y : nb1_[x]) {
          if (seen[y]) continue;
          seen[y] = true;
          order.push_back(y);
          queue.push_back(y);
        }
      }
    };
    drain();
    for (std::size_t i = 0; i < c1_.vertex_count(); ++i) {
      if (seen[i]) continue;
      seen[i] = true;
      order.push_back(i);
      queue.push_back(i);
      drain();
    }
    return order;
  }

  bool compatible(std::size_t x, std::size_t y) const {
    for (std::size_t u : nb1_[x]) {
      const std::size_t j = phi_[u];
      if (j == kUndecided || j == kNone) continue;
      if (relation_code(c1_, x, u) != relation_code(c2_, y, j)) return false;
    }
    for (std::size_t w : nb2_[y]) {
      const std::size_t u = inv_[w];
      if (u == kNone) continue;
      if (relation_code(c1_, x, u) != relation_code(c2_, y, w)) return false;
    }
    return true;
  }

  std::vector<std::size_t> candidates(std::size_t x) const {
    std::vector<std::size_t> pool;
    std::optional<std::size_t> anchor;
    for (std::size_t u : nb1_[x]) {
      if (phi_[u] != kUndecided && phi_[u] != kNone) {
        anchor = phi_[u];
        break;
      }
    }
    if (anchor) {
      pool = nb2_[*anchor];
    } else {
      for (std::size_t j = 0; j < c2_.vertex_count(); ++j) pool.push_back(j);
    }
    std::vector<std::size_t> out;
    const Vertex id = c1_.vertex_at(x);
    for (std::size_t y : pool) {
      if (inv_[y] == kNone && compatible(x, y)) out.push_back(y);
    }
    std::stable_sort(out.begin(), out.end(), [&](std::size_t p, std::size_t q) {
      const bool sp = c2_.vertex_at(p) == id, sq = c2_.vertex_at(q) == id;
      return sp && !sq;
    });
    return out;
  }

  // Lower bound on the out-degree of the vertex where u and j are glued.
  std::size_t out_lower_bound(std::size_t u, std::size_t j) const {
    const auto& s1 = c1_.out_neighbors(u);
    const auto& s2 = c2_.out_neighbors(j);
    std::size_t matched = 0, undecided = 0, open = 0;
    for (std::size_t t : s1) {
      if (phi_[t] == kUndecided) {
        ++undecided;
      } else if (phi_[t] != kNone && std::binary_search(s2.begin(), s2.end(), phi_[t])) {
        ++matched;
      }
    }
    for (std::size_t w : s2) open += inv_[w] == kNone ? 1 : 0;
    return s1.size() + s2.size() - matched - std::min(undecided, open);
  }

  bool degrees_feasible(std::size_t x) const {
    if constexpr (std::same_as<S, Graph>) {
      (void)x;
      return true;
    } else {
      const auto k = static_cast<std::size_t>(spec_.k);
      auto ok = [&](std::size_t u) {
        const std::size_t j = phi_[u];
        return j == kUndecided || j == kNone || out_lower_bound(u, j) <= k;
      };
      for (std::size_t u : c1_.in_neighbors(x)) {
        if (!ok(u)) return false;
      }
      const std::size_t y = phi_[x];
      if (y == kNone) return true;
      if (out_lower_bound(x, y) > k) return false;
      for (std::size_t w : c2_.in_neighbors(y)) {
        if (inv_[w] != kNone && !ok(inv_[w])) return false;
      }
      return true;
    }
  }

  bool size_feasible(std::size_t depth) const {
    const std::size_t remaining = order_.size() - depth;
    const std::size_t best = identified_ + std::min(remaining, free2_);
    return c1_.vertex_count() + c2_.vertex_count() - best <= bound_;
  }

  void leaf() {
    Embedding f1, f2;
    for (std::size_t i = 0; i < phi_.size(); ++i) {
      if (phi_[i] == kNone) continue;
      f1.map[c1_.vertex_at(i)] = c1_.vertex_at(i);
      f2.map[c1_.vertex_at(i)] = c2_.vertex_at(phi_[i]);
    }
    AmalgamResult<S> r = glue(c1_, c2_, f1, f2);
    if constexpr (std::same_as<S, Orientation>) {
      if (r.amalgam.k() != spec_.k) return;
    }
    if (!class_membership(r.amalgam, spec_, limit_).member) return;
    if (!reduct_strong_in(r.amalgam, r.left.image(), spec_)) return;
    if (!reduct_strong_in(r.amalgam, r.right.image(), spec_)) return;
    r.in_class = true;
    found_ = std::move(r);
  }

  void recurse(std::size_t depth) {
    ++nodes_;
    if (found_ || !size_feasible(depth)) return;
    if (depth == order_.size()) {
      leaf();
      return;
    }
    const std::size_t x = order_[depth];
    phi_[x] = kNone;
    if (degrees_feasible(x)) recurse(depth + 1);
    if (found_) return;
    for (std::size_t y : candidates(x)) {
      phi_[x] = y;
      inv_[y] = x;
      ++identified_;
      --free2_;
      if (degrees_feasible(x)) recurse(depth + 1);
      ++free2_;
      --identified_;
      inv_[y] = kNone;
      if (found_) break;
    }
    phi_[x] = kUndecided;
  }

  const ClassSpec& spec_;
  const VertexSet& a_;
  const S& c1_;
  const S& c2_;
  std::size_t bound_;
  std::size_t limit_;
  std::vector<std::size_t> phi_, inv_, order_;
  std::vector<std::vector<std::size_t>> nb1_, nb2_;
  std::size_t identified_ = 0, free2_ = 0, nodes_ = 0;
  std::optional<AmalgamResult<S>> found_;
};

}  // namespace detail

// Searches amalgams D of c1 and c2 over their common substructure a (the
// vertices with the same ids in both, inducing the same structure) with
// |D| ≤ bound. Every such D is the free amalgam of c1 and c2 over some
// identification of their vertices, so the search ranges over partial
// identifications: leaving a vertex unglued is tried first, then gluing to
// the vertex with the same id, then ascending ids. For orientation classes
// the embeddings must be strong in the undirected reducts.
template <Structure S>
WapResult<S> wap_probe(const ClassSpec& spec, const VertexSet& a, const S& c1, const S& c2,
                       std::size_t bound, bool use_layer_refutation = true,
                       std::size_t limit = default_search_limit()) {
  detail::require_class_for<S>(spec);
  if (bound < std::max(c1.vertex_count(), c2.vertex_count())) {
    throw DomainError("bound " + std::to_string(bound) + " is smaller than the larger extension (" +
                      std::to_string(std::max(c1.vertex_count(), c2.vertex_count())) + ")");
  }
  for (Vertex v : a) {
    if (!c1.contains(v) || !c2.contains(v)) {
      throw DomainError("base vertex " + std::to_string(v) + " missing from an extension");
    }
  }
  if (!detail::same_relations(induced(c1, a), induced(c2, a))) {
    throw DomainError("the base induces different structures in c1 and c2");
  }
  for (const S* c : {&c1, &c2}) {
    const MembershipVerdict m = class_membership(*c, spec, limit);
    if (!m.member) throw DomainError("extension is not in the class: " + m.reason);
    if (!reduct_strong_in(*c, a, spec)) throw DomainError("base is not strong in an extension");
  }
  WapResult<S> result;
  if constexpr (std::same_as<S, Orientation>) {
    if (use_layer_refutation) {
      result.refuted_at_depth = detail::layer_refutation(detail::with_cap(c1, spec.k),
                                                         detail::with_cap(c2, spec.k), a, spec.k);
      if (result.refuted_at_depth) return result;
    }
  }
  detail::WapSearch<S> search(spec, a, c1, c2, bound, limit);
  result.amalgam = search.run();
  result.nodes = search.nodes();
  return result;
}

// ---- EPPA probe ----

template <Structure S>
struct EppaResult {
  std::optional<S> extension;
  std::size_t partial_automorphisms = 0;  // non-identity maps between strong subsets of a
  std::size_t candidates = 0;
  bool exhausted() const { return !extension; }
};

namespace detail {

template <Structure S>
std::vector<std::map<Vertex, Vertex>> strong_partial_automorphisms(const S& a,
                                                                   const ClassSpec& spec) {
  const std::size_t n = a.vertex_count();
  std::vector<VertexSet> strong;
  for (Mask m = 0; m <= full_mask(n); ++m) {
    VertexSet s = from_mask(a, m);
    if (strong_in(a, s, spec)) strong.push_back(std::move(s));
    if (m == full_mask(n)) break;
  }
  std::vector<std::map<Vertex, Vertex>> out;
  for (const VertexSet& d : strong) {
    const S sd = induced(a, d);
    for (const VertexSet& e : strong) {
      if (e.size() != d.size()) continue;
      const S se = induced(a, e);
      IsoSearch<S> search(sd, se);
      search.for_each(std::vector<std::size_t>(sd.vertex_count(), IsoSearch<S>::kFree),
                      [&](const Permutation& p) {
                        std::map<Vertex, Vertex> f;
                        bool identity = true;
                        for (std::size_t i = 0; i < p.size(); ++i) {
                          f[sd.vertex_at(i)] = se.vertex_at(p[i]);
                          identity = identity && sd.vertex_at(i) == se.vertex_at(p[i]);
                        }
                        if (!identity) out.push_back(std::move(f));
                        return true;
                      });
    }
  }
  return out;
}

}  // namespace detail

// Searches B ⊇ a in the class with a strong in B and |B| ≤ bound such that
// every strong partial automorphism of a extends to an automorphism of B.
// Candidates: fewer new vertices first, then relation patterns on the pairs
// meeting a new vertex in counting order.
template <Structure S>
EppaResult<S> eppa_probe(const ClassSpec& spec, const S& a, std::size_t bound,
                         std::size_t limit = default_search_limit()) {
  detail::require_class_for<S>(spec);
  const MembershipVerdict m = class_membership(a, spec, limit);
  if (!m.member) throw DomainError("structure is not in the class: " + m.reason);
  require_within_limit(std::max(bound, a.vertex_count()), limit, "EPPA search");
  EppaResult<S> result;
  const auto maps = detail::strong_partial_automorphisms(a, spec);
  result.partial_automorphisms = maps.size();
  const Vertex first_new = a.vertices().empty() ? 0 : a.vertices().back() + 1;
  constexpr std::size_t kStates = std::same_as<S, Graph> ? 2 : 3;

  for (std::size_t extra = 0; a.vertex_count() + extra <= std::max(bound, a.vertex_count());
       ++extra) {
    std::vector<Vertex> vertices = a.vertices();
    for (std::size_t t = 0; t < extra; ++t) vertices.push_back(first_new + static_cast<Vertex>(t));
    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (std::size_t p = 0; p < vertices.size(); ++p) {
      for (std::size_t q = p + 1; q < vertices.size(); ++q) {
        if (vertices[q] >= first_new) pairs.push_back({vertices[p], vertices[q]});
      }
    }
    const double bits = static_cast<double>(pairs.size()) * std::log2(static_cast<double>(kStates));
    if (bits > 24) {
      throw ResourceError("EPPA search: " + std::to_string(pairs.size()) +
                          " free vertex pairs exceed the candidate budget");
    }
    std::vector<std::size_t> pattern(pairs.size(), 0);
    while (true) {
      ++result.candidates;
      std::optional<S> b;
      if constexpr (std::same_as<S, Graph>) {
        std::vector<Edge> edges = a.edges();
        for (std::size_t p = 0; p < pairs.size(); ++p) {
          if (pattern[p]) edges.push_back({pairs[p].first, pairs[p].second});
        }
        b = Graph(vertices, std::move(edges));
      } else {
        std::vector<Arc> arcs = a.arcs();
        std::map<Vertex, int> out;
        for (const Arc& arc : arcs) ++out[arc.tail];
        bool ok = true;
        for (std::size_t p = 0; p < pairs.size() && ok; ++p) {
          if (pattern[p] == 0) continue;
          const Arc arc = pattern[p] == 1 ? Arc{pairs[p].first, pairs[p].second}
                                          : Arc{pairs[p].second, pairs[p].first};
          ok = ++out[arc.tail] <= spec.k;
          arcs.push_back(arc);
        }
        if (ok) b = Orientation(vertices, std::move(arcs), spec.k);
      }
      if (b && class_membership(*b, spec, limit).member &&
          strong_in(*b, all_vertices(a), spec)) {
        bool all_extend = true;
        for (const auto& f : maps) {
          if (!extend_to_automorphism(*b, f)) {
            all_extend = false;
            break;
          }
        }
        if (all_extend) {
          result.extension = std::move(b);
          return result;
        }
      }
      std::size_t p = 0;
      while (p < pattern.size() && ++pattern[p] == kStates) pattern[p++] = 0;
      if (p == pattern.size()) break;
    }
  }
  return result;
}

}  // namespace hrush
