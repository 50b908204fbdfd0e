#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hrush/classes.hpp"
#include "hrush/dynamics.hpp"
#include "hrush/encoding.hpp"

namespace hrush {

// A strong extension A ≤ B up to isomorphism over A. B lives on 0..|B|-1 with
// A on 0..|A|-1 in the canonical order of A.
template <Structure S>
struct ExtensionType {
  S structure;
  std::size_t base_size = 0;
  std::string code;
};

struct BuildEvent {
  VertexSet base;
  std::string extension;  // canonical code of the extension type
  std::string status;     // discharged | present | no_room | left_class
  std::size_t stage = 0;  // index of the stage current after the event
};

template <Structure S>
struct GenericApproximation {
  ClassSpec spec;
  std::size_t target_size = 1;
  std::size_t obligation_bound = 1;
  std::uint64_t seed = 0;
  std::vector<S> stages;
  std::vector<BuildEvent> events;

  const S& final_stage() const { return stages.back(); }
};

namespace detail {

template <Structure S>
S make_structure(std::vector<Vertex> vertices, const std::vector<std::pair<Vertex, Vertex>>& rel,
                 int k) {
  if constexpr (std::same_as<S, Graph>) {
    std::vector<Edge> edges;
    for (const auto& [u, v] : rel) edges.push_back({u, v});
    return Graph(std::move(vertices), std::move(edges));
  } else {
    std::vector<Arc> arcs;
    for (const auto& [u, v] : rel) arcs.push_back({u, v});
    return Orientation(std::move(vertices), std::move(arcs), k);
  }
}

template <Structure S>
std::vector<std::pair<Vertex, Vertex>> relation_pairs(const S& s) {
  std::vector<std::pair<Vertex, Vertex>> out;
  if constexpr (std::same_as<S, Graph>) {
    for (const Edge& e : s.edges()) out.push_back({e.u, e.v});
  } else {
    for (const Arc& a : s.arcs()) out.push_back({a.tail, a.head});
  }
  return out;
}

struct CanonicalBase {
  std::string code;
  std::vector<Vertex> order;  // base vertices in canonical label order
};

template <Structure S>
CanonicalBase canonical_base(const S& stage, const VertexSet& a) {
  const S sub = induced(stage, a);
  const CanonicalForm cf = canonical_form(sub);
  CanonicalBase out{cf.code, {}};
  for (std::size_t idx : cf.labeling) out.order.push_back(sub.vertex_at(idx));
  return out;
}

// All extension types of the canonical base (on 0..a-1) with at most `bound`
// vertices, in order of size and then relation pattern.
template <Structure S>
std::vector<ExtensionType<S>> extension_types(const ClassSpec& spec, const S& base,
                                              std::size_t bound, std::size_t limit) {
  const std::size_t a = base.vertex_count();
  constexpr std::size_t kStates = std::same_as<S, Graph> ? 2 : 3;
  std::vector<ExtensionType<S>> out;
  std::set<std::string> seen;
  VertexSet base_ids = all_vertices(base);
  for (std::size_t total = a + 1; total <= bound; ++total) {
    std::vector<Vertex> vertices(total);
    for (std::size_t i = 0; i < total; ++i) vertices[i] = static_cast<Vertex>(i);
    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (Vertex q = static_cast<Vertex>(a); q < total; ++q) {
      for (Vertex p = 0; p < q; ++p) pairs.push_back({p, q});
    }
    if (static_cast<double>(pairs.size()) * std::log2(static_cast<double>(kStates)) > 24) {
      throw ResourceError("extension enumeration: " + std::to_string(pairs.size()) +
                          " free vertex pairs exceed the candidate budget");
    }
    std::vector<int> colors(total, 0);
    for (std::size_t i = 0; i < a; ++i) colors[i] = static_cast<int>(i) + 1;
    std::vector<std::size_t> pattern(pairs.size(), 0);
    while (true) {
      auto rel = relation_pairs(base);
      std::vector<int> out_degree(total, 0);
      for (const auto& [u, v] : rel) ++out_degree[u];
      bool ok = true;
      for (std::size_t p = 0; p < pairs.size() && ok; ++p) {
        if (pattern[p] == 0) continue;
        auto [u, v] = pairs[p];
        if (pattern[p] == 2) std::swap(u, v);
        rel.push_back({u, v});
        if constexpr (std::same_as<S, Orientation>) ok = ++out_degree[u] <= spec.k;
      }
      if (ok) {
        S b = make_structure<S>(vertices, rel, spec.k);
        if (class_membership(b, spec, limit).member && strong_in(b, base_ids, spec)) {
          std::string code = canonical_form(b, colors).code;
          if (seen.insert(code).second) out.push_back({std::move(b), a, std::move(code)});
        }
      }
      std::size_t p = 0;
      while (p < pattern.size() && ++pattern[p] == kStates) pattern[p++] = 0;
      if (p == pattern.size()) break;
    }
  }
  return out;
}

template <Structure S>
S canonical_structure(const S& stage, const CanonicalBase& cb) {
  std::map<Vertex, Vertex> label;
  for (std::size_t r = 0; r < cb.order.size(); ++r) label[cb.order[r]] = static_cast<Vertex>(r);
  std::vector<Vertex> vertices;
  for (std::size_t r = 0; r < cb.order.size(); ++r) vertices.push_back(static_cast<Vertex>(r));
  std::vector<std::pair<Vertex, Vertex>> rel;
  for (const auto& [u, v] : relation_pairs(stage)) {
    auto iu = label.find(u), iv = label.find(v);
    if (iu != label.end() && iv != label.end()) rel.push_back({iu->second, iv->second});
  }
  int k = 1;
  if constexpr (std::same_as<S, Orientation>) k = stage.k();
  return make_structure<S>(std::move(vertices), rel, k);
}

// The extension type placed over the base vertices `order`, new vertices
// numbered from `first_new`.
template <Structure S>
S instantiate(const ExtensionType<S>& t, const std::vector<Vertex>& order, Vertex first_new,
              int k) {
  auto id = [&](Vertex v) {
    return v < t.base_size ? order[v] : first_new + (v - static_cast<Vertex>(t.base_size));
  };
  std::vector<Vertex> vertices;
  for (Vertex v : t.structure.vertices()) vertices.push_back(id(v));
  std::vector<std::pair<Vertex, Vertex>> rel;
  for (const auto& [u, v] : relation_pairs(t.structure)) rel.push_back({id(u), id(v)});
  return make_structure<S>(std::move(vertices), rel, k);
}

// A strong embedding of the extension into `stage` fixing the base.
template <Structure S>
std::optional<Embedding> find_witness(const S& stage, const ClassSpec& spec,
                                      const ExtensionType<S>& t, const std::vector<Vertex>& order) {
  const std::size_t total = t.structure.vertex_count();
  std::vector<std::size_t> image(total);
  std::vector<bool> used(stage.vertex_count(), false);
  for (std::size_t r = 0; r < t.base_size; ++r) {
    image[r] = stage.index_of(order[r]);
    used[image[r]] = true;
  }
  std::optional<Embedding> found;
  auto recurse = [&](auto&& self, std::size_t p) -> void {
    if (found) return;
    if (p == total) {
      Embedding f;
      for (std::size_t q = 0; q < total; ++q) f.map[static_cast<Vertex>(q)] = stage.vertex_at(image[q]);
      if (strong_in(stage, f.image(), spec)) found = std::move(f);
      return;
    }
    for (std::size_t j = 0; j < stage.vertex_count(); ++j) {
      if (used[j]) continue;
      bool ok = true;
      for (std::size_t q = 0; q < p && ok; ++q) {
        ok = relation_code(t.structure, q, p) == relation_code(stage, image[q], j);
      }
      if (!ok) continue;
      used[j] = true;
      image[p] = j;
      self(self, p + 1);
      used[j] = false;
      if (found) return;
    }
  };
  recurse(recurse, t.base_size);
  return found;
}

// Subsets of `stage` with at most max_size vertices, in size then
// lexicographic order; with `touching`, only those meeting it.
template <Structure S>
std::vector<VertexSet> small_subsets(const S& stage, std::size_t max_size,
                                     const std::optional<VertexSet>& touching) {
  std::vector<VertexSet> out;
  const auto& vs = stage.vertices();
  std::vector<std::size_t> pick;
  for (std::size_t size = 0; size <= std::min(max_size, vs.size()); ++size) {
    pick.resize(size);
    for (std::size_t i = 0; i < size; ++i) pick[i] = i;
    while (true) {
      VertexSet s;
      bool meets = !touching;
      for (std::size_t i : pick) {
        s.insert(vs[i]);
        if (touching && touching->count(vs[i])) meets = true;
      }
      if (meets) out.push_back(std::move(s));
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == vs.size() - size + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

template <Structure S>
class TypeCache {
 public:
  TypeCache(const ClassSpec& spec, std::size_t bound, std::size_t limit)
      : spec_(spec), bound_(bound), limit_(limit) {}

  const std::vector<ExtensionType<S>>& types(const S& stage, const CanonicalBase& cb) {
    auto it = cache_.find(cb.code);
    if (it != cache_.end()) return it->second;
    const S base = canonical_structure(stage, cb);
    return cache_.emplace(cb.code, extension_types(spec_, base, bound_, limit_)).first->second;
  }

 private:
  const ClassSpec& spec_;
  std::size_t bound_;
  std::size_t limit_;
  std::map<std::string, std::vector<ExtensionType<S>>> cache_;
};

template <Structure S>
S single_vertex(int k) {
  if constexpr (std::same_as<S, Graph>) {
    return Graph::on_range(1);
  } else {
    return Orientation({0}, {}, k);
  }
}

}  // namespace detail

// Builds a strong chain A_1 ≤ A_2 ≤ … starting from one vertex. Each new
// stage queues, in seed-shuffled order, every pair (A, B) with A strong in the
// stage and meeting its new vertices, |A| < bound, and B a strong extension
// of A with |B| ≤ bound up to isomorphism over A. Obligations are taken
// first in, first out; one without a witness is discharged by the free
// amalgam of the stage and B over A while the stage stays within target_size.
template <Structure S>
GenericApproximation<S> build_generic(const ClassSpec& spec, std::size_t target_size,
                                      std::size_t obligation_bound, std::uint64_t seed,
                                      std::size_t limit = default_search_limit()) {
  detail::require_class_for<S>(spec);
  if (!spec.amalgamation_variant()) {
    throw DomainError(std::string("class ") + class_name(spec.kind) +
                      " is not an amalgamation class variant");
  }
  if (target_size < 1) throw DomainError("target size must be at least 1");
  if (obligation_bound < 1) throw DomainError("obligation bound must be at least 1");

  GenericApproximation<S> g{spec, target_size, obligation_bound, seed, {}, {}};
  g.stages.push_back(detail::single_vertex<S>(spec.k));
  if (target_size == 1) return g;

  struct Obligation {
    VertexSet base;
    detail::CanonicalBase cb;
    std::size_t type = 0;
  };
  std::mt19937_64 rng(seed);
  detail::TypeCache<S> cache(spec, obligation_bound, limit);
  std::deque<Obligation> queue;

  auto enqueue = [&](const S& stage, const std::optional<VertexSet>& fresh) {
    std::vector<Obligation> batch;
    for (VertexSet& a : detail::small_subsets(stage, obligation_bound - 1, fresh)) {
      if (!strong_in(stage, a, spec)) continue;
      detail::CanonicalBase cb = detail::canonical_base(stage, a);
      const std::size_t count = cache.types(stage, cb).size();
      for (std::size_t t = 0; t < count; ++t) batch.push_back({a, cb, t});
    }
    for (std::size_t i = batch.size(); i > 1; --i) {
      std::swap(batch[i - 1], batch[rng() % i]);
    }
    for (Obligation& o : batch) queue.push_back(std::move(o));
  };

  enqueue(g.stages.back(), std::nullopt);
  while (!queue.empty()) {
    Obligation o = std::move(queue.front());
    queue.pop_front();
    const S& stage = g.stages.back();
    const auto& t = cache.types(stage, o.cb)[o.type];
    BuildEvent event{o.base, t.code, "", 0};
    const std::size_t added = t.structure.vertex_count() - t.base_size;
    if (detail::find_witness(stage, spec, t, o.cb.order)) {
      event.status = "present";
    } else if (stage.vertex_count() + added > target_size) {
      event.status = "no_room";
    } else {
      const Vertex first_new = stage.vertices().back() + 1;
      const S b = detail::instantiate(t, o.cb.order, first_new, spec.k);
      const Embedding id = Embedding::identity(o.base);
      AmalgamResult<S> r = detail::glue(stage, b, id, id);
      bool member = class_membership(r.amalgam, spec, limit).member;
      if constexpr (std::same_as<S, Orientation>) member = member && r.amalgam.k() == spec.k;
      if (!member) {
        event.status = "left_class";
      } else {
        VertexSet fresh;
        for (Vertex v : r.amalgam.vertices()) {
          if (v >= first_new) fresh.insert(v);
        }
        event.status = "discharged";
        g.stages.push_back(std::move(r.amalgam));
        enqueue(g.stages.back(), fresh);
      }
    }
    event.stage = g.stages.size() - 1;
    g.events.push_back(std::move(event));
  }
  return g;
}

struct ExtensionReport {
  std::size_t size_bound = 0;
  std::size_t total = 0;      // obligations over the final stage
  std::size_t satisfied = 0;
  std::size_t open = 0;
  std::vector<std::size_t> open_per_stage;  // obligations of stage i with no witness at the end
  std::size_t completed_stages = 0;         // leading stages with nothing open
};

// For every strong A in a stage and strong extension A ≤ B with |B| ≤
// size_bound, looks for a strong embedding of B into the final stage over A.
template <Structure S>
ExtensionReport verify_extension_property(const GenericApproximation<S>& g, std::size_t size_bound,
                                          std::size_t limit = default_search_limit()) {
  if (size_bound < 1) throw DomainError("size bound must be at least 1");
  ExtensionReport report;
  report.size_bound = size_bound;
  const S& last = g.final_stage();
  detail::TypeCache<S> cache(g.spec, size_bound, limit);
  std::map<std::pair<VertexSet, std::size_t>, bool> satisfied;
  for (const VertexSet& a : detail::small_subsets(last, size_bound - 1, std::nullopt)) {
    if (!strong_in(last, a, g.spec)) continue;
    const detail::CanonicalBase cb = detail::canonical_base(last, a);
    const auto& types = cache.types(last, cb);
    for (std::size_t t = 0; t < types.size(); ++t) {
      const bool ok = detail::find_witness(last, g.spec, types[t], cb.order).has_value();
      satisfied[{a, t}] = ok;
      ++report.total;
      ++(ok ? report.satisfied : report.open);
    }
  }
  bool leading = true;
  for (const S& stage : g.stages) {
    std::size_t open = 0;
    for (const VertexSet& a : detail::small_subsets(stage, size_bound - 1, std::nullopt)) {
      if (!strong_in(stage, a, g.spec)) continue;
      for (auto it = satisfied.lower_bound({a, 0}); it != satisfied.end() && it->first.first == a;
           ++it) {
        open += it->second ? 0 : 1;
      }
    }
    report.open_per_stage.push_back(open);
    leading = leading && open == 0;
    if (leading) ++report.completed_stages;
  }
  return report;
}

struct ReductReport {
  bool pass = true;
  std::optional<std::size_t> failing_stage;
  std::string reason;
};

// Each stage's undirected reduct lies in the matching graph class and is
// strong in the next stage's reduct.
inline ReductReport reduct_consistency(const GenericApproximation<Orientation>& g,
                                       std::size_t limit = default_search_limit()) {
  if (g.spec.kind != ClassKind::D0_s && g.spec.kind != ClassKind::DF_d) {
    throw DomainError("reduct consistency applies to D0_s and DF_d builds");
  }
  const ClassSpec graphs(g.spec.kind == ClassKind::D0_s ? ClassKind::C0_s : ClassKind::CF_d,
                         g.spec.k, g.spec.growth);
  for (std::size_t i = 0; i < g.stages.size(); ++i) {
    const Graph r = g.stages[i].reduct();
    const MembershipVerdict m = class_membership(r, graphs, limit);
    if (!m.member) return {false, i, "reduct not in " + std::string(class_name(graphs.kind)) + ": " + m.reason};
    if (i + 1 < g.stages.size()) {
      const Graph next = g.stages[i + 1].reduct();
      for (Vertex v : r.vertices()) {
        if (!next.contains(v)) return {false, i, "stage is not contained in the next"};
      }
      if (!(induced(next, all_vertices(r)) == r)) {
        return {false, i, "stage is not an induced substructure of the next"};
      }
      if (!is_strong(next, all_vertices(r), graphs.relation(), graphs.k).strong) {
        return {false, i, "reduct is not strong in the next reduct"};
      }
    }
  }
  return {true, std::nullopt, ""};
}

// ---- build log ----

template <Structure S>
Json to_json(const GenericApproximation<S>& g) {
  Json stages = Json::array();
  for (const S& s : g.stages) stages.push_back(to_json(s));
  Json events = Json::array();
  for (const BuildEvent& e : g.events) {
    events.push_back({{"base", to_json(e.base)},
                      {"extension", e.extension},
                      {"status", e.status},
                      {"stage", e.stage}});
  }
  return Json{{"spec", g.spec.to_json()},
              {"target_size", g.target_size},
              {"obligation_bound", g.obligation_bound},
              {"seed", g.seed},
              {"stages", std::move(stages)},
              {"events", std::move(events)}};
}

inline ClassSpec class_spec_from_json(const Json& j, const std::string& where = "") {
  const Json& name = detail::field(j, "class", where);
  if (!name.is_string()) detail::schema_error(where + "/class", "expected a class name");
  const Json& k = detail::field(j, "k", where);
  if (!k.is_number_integer() || k.get<std::int64_t>() < 1) {
    detail::schema_error(where + "/k", "expected a positive integer");
  }
  std::optional<GrowthFunction> growth;
  if (auto it = j.find("growth"); it != j.end() && !it->is_null()) {
    growth = GrowthFunction::from_json(*it, where + "/growth");
  }
  try {
    return ClassSpec(parse_class_kind(name.get<std::string>()), k.get<int>(), std::move(growth));
  } catch (const DomainError& e) {
    detail::schema_error(where, e.what());
  }
}

template <Structure S>
GenericApproximation<S> generic_from_json(const Json& j) {
  const ClassSpec spec = class_spec_from_json(detail::field(j, "spec", ""), "/spec");
  detail::require_class_for<S>(spec);
  auto count = [&](const char* name) {
    const Json& v = detail::field(j, name, "");
    if (!v.is_number_unsigned()) detail::schema_error(std::string("/") + name, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  };
  GenericApproximation<S> g{spec, count("target_size"), count("obligation_bound"), count("seed"), {}, {}};
  const Json& stages = detail::field(j, "stages", "");
  if (!stages.is_array() || stages.empty()) detail::schema_error("/stages", "expected a non-empty array");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const std::string where = "/stages/" + std::to_string(i);
    if constexpr (std::same_as<S, Graph>) {
      g.stages.push_back(graph_from_json(stages[i], where));
    } else {
      g.stages.push_back(orientation_from_json(stages[i], where));
    }
  }
  if (auto it = j.find("events"); it != j.end()) {
    if (!it->is_array()) detail::schema_error("/events", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const Json& e = (*it)[i];
      const std::string where = "/events/" + std::to_string(i);
      BuildEvent ev;
      ev.base = vertex_set_from_json(detail::field(e, "base", where), where + "/base");
      ev.extension = detail::field(e, "extension", where).get<std::string>();
      ev.status = detail::field(e, "status", where).get<std::string>();
      ev.stage = detail::field(e, "stage", where).get<std::size_t>();
      g.events.push_back(std::move(ev));
    }
  }
  return g;
}

}  // namespace hrush
