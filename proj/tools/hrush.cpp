#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hrush/hrush.hpp"

using namespace hrush;

namespace {

struct Options {
  std::string input = "-";
  std::string format = "json";
  int k = 2;
  std::string set;
  std::string kind;
  std::string method = "orientation";
  std::string variant = "circle";
  std::string class_name;
  std::string growth;
  std::size_t bound = 0;
  std::size_t size = 0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::size_t cap = 0;
  std::size_t radius = 0;
  Vertex vertex = 0;
  std::string neighbors;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t copies = 1;
  std::string gadget = "t0";
  double grid = 0.5;
  double max_x = 0.0;
  bool no_layer_refutation = false;
};

// Negative decisions exit with 1 but still print their JSON result.
struct Outcome {
  Json result;
  bool positive = true;
  std::optional<std::string> dot = std::nullopt;
};

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read input file " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Json input_json(const Options& o) {
  return parse_json(read_input(o.input), o.input == "-" ? "stdin" : o.input);
}

std::vector<Vertex> parse_list(const std::string& text, const char* what) {
  std::vector<Vertex> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long value = 0;
    try {
      value = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw DomainError(std::string(what) + ": bad vertex id \"" + item + "\"");
    out.push_back(static_cast<Vertex>(value));
  }
  return out;
}

VertexSet parse_set(const std::string& text) {
  const auto list = parse_list(text, "--set");
  return VertexSet(list.begin(), list.end());
}

std::optional<GrowthFunction> load_growth(const std::string& text) {
  if (text.empty()) return std::nullopt;
  if (text == "example") return GrowthFunction::example();
  if (text.front() == '{') return GrowthFunction::from_json(parse_json(text, "--growth"));
  std::ifstream in(text);
  if (!in) throw DomainError("--growth: expected example, inline JSON or a readable file");
  const std::string body{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return GrowthFunction::from_json(parse_json(body, text));
}

ClassSpec class_spec(const Options& o) {
  if (o.class_name.empty()) throw DomainError("--class is required");
  const ClassKind kind = parse_class_kind(o.class_name);
  auto growth = load_growth(o.growth);
  if (!growth && (kind == ClassKind::CF_d || kind == ClassKind::DF_d || kind == ClassKind::EF_dfine)) {
    throw DomainError("class " + o.class_name + " needs --growth");
  }
  return ClassSpec(kind, o.k, std::move(growth));
}

StrongKind strong_kind(const std::string& s) {
  if (s == "s") return StrongKind::s;
  if (s == "d") return StrongKind::d;
  throw DomainError("--kind must be s or d");
}

bool is_oriented(const Json& j) { return j.is_object() && j.contains("arcs"); }

Json orientation_or_null(const std::optional<Orientation>& o) {
  return o ? to_json(*o) : Json(nullptr);
}

Json set_or_null(const std::optional<VertexSet>& s) { return s ? to_json(*s) : Json(nullptr); }

DotStyle highlight(const VertexSet& left, const VertexSet& right = {}) {
  DotStyle style;
  style.left = left;
  style.right = right;
  return style;
}

template <Structure S>
std::string dot_of(const S& s, const DotStyle& style = {}) {
  return to_dot(s, style);
}

// ---- commands ----

Outcome cmd_check_sparse(const Options& o) {
  const Graph g = graph_from_json(input_json(o));
  const SparsityVerdict v = check_sparsity(g, o.k);
  Json r{{"sparse", v.sparse}, {"witness", orientation_or_null(v.witness)}};
  if (v.sparse) {
    r["violator"] = nullptr;
    return {r, true, dot_of(*v.witness)};
  }
  r["violator"] = to_json(v.violator);
  r["violator_delta"] = delta(g, v.violator, o.k).delta;
  return {r, false, dot_of(g, highlight(v.violator))};
}

Outcome cmd_orient(const Options& o) {
  const Json j = input_json(o);
  const Graph g = graph_from_json(j);
  ArcConstraint c;
  if (auto it = j.find("forced_arcs"); it != j.end()) {
    if (!it->is_array()) detail::schema_error("/forced_arcs", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      auto [t, h] = detail::pair_from_json((*it)[i], "/forced_arcs/" + std::to_string(i));
      c.forced_arcs.push_back({t, h});
    }
  }
  if (!o.set.empty()) c.inward_set = parse_set(o.set);
  const OrientOutcome out = orient_with_certificate(g, o.k, c);
  Json r{{"feasible", out.orientation.has_value()},
         {"orientation", orientation_or_null(out.orientation)},
         {"blocking", out.orientation ? Json(nullptr) : to_json(out.blocking)}};
  if (out.orientation) return {r, true, dot_of(*out.orientation)};
  return {r, false, dot_of(g, highlight(out.blocking))};
}

Outcome cmd_enumerate(const Options& o) {
  const Graph g = graph_from_json(input_json(o));
  const auto space = enumerate_orientations(g, o.k, o.cap ? std::optional(o.cap) : std::nullopt);
  Json points = Json::array();
  for (const Orientation& p : space.points) points.push_back(to_json(p));
  return {Json{{"count", space.points.size()},
               {"truncated", space.truncated},
               {"orientations", std::move(points)}}};
}

Outcome cmd_delta(const Options& o) {
  const Graph g = graph_from_json(input_json(o));
  const auto d = delta(g, parse_set(o.set), o.k);
  return {Json{{"subset", to_json(d.subset)},
               {"vertex_count", d.vertex_count},
               {"edge_count", d.edge_count},
               {"delta", d.delta}}};
}

Json closure_json(const ClosureResult& c) {
  Json trace = Json::array();
  for (const VertexSet& step : c.trace) trace.push_back(to_json(step));
  return Json{{"seed", to_json(c.seed)}, {"closure", to_json(c.closure)}, {"trace", std::move(trace)}};
}

Outcome cmd_closure(const Options& o) {
  const Json j = input_json(o);
  const VertexSet seed = parse_set(o.set);
  if (o.kind == "scl" || o.kind == "sdcl") {
    const Orientation or_ = orientation_from_json(j);
    const ClosureResult c = o.kind == "scl" ? successor_closure(or_, seed)
                                            : successor_d_closure(or_, seed);
    Json r = closure_json(c);
    r["kind"] = o.kind;
    return {r, true, dot_of(or_, highlight(c.seed, c.closure))};
  }
  if (o.kind != "dcl") throw DomainError("--kind must be scl, sdcl or dcl");
  const Graph g = graph_from_json(j);
  const ClosureResult c = d_closure(g, seed, o.k);
  Json r = closure_json(c);
  r["kind"] = "dcl";
  if (auto f = load_growth(o.growth)) {
    const double bound = f->inverse(static_cast<double>(o.k) * static_cast<double>(seed.size()));
    const auto whole = static_cast<std::size_t>(std::floor(bound + 1e-9));
    r["size_bound"] = whole;
    r["within_bound"] = c.closure.size() <= whole;
  }
  return {r, true, dot_of(g, highlight(c.seed, c.closure))};
}

Outcome cmd_strong(const Options& o) {
  const Graph g = graph_from_json(input_json(o));
  StrongMethod method;
  if (o.method == "orientation") {
    method = StrongMethod::orientation;
  } else if (o.method == "predimension") {
    method = StrongMethod::predimension;
  } else {
    throw DomainError("--method must be orientation or predimension");
  }
  const StrongVerdict v = is_strong(g, parse_set(o.set), strong_kind(o.kind), o.k, method);
  return {Json{{"strong", v.strong},
               {"witness", orientation_or_null(v.witness)},
               {"violating_set", set_or_null(v.violating_set)}},
          v.strong};
}

Outcome cmd_reduct(const Options& o) {
  const Orientation or_ = orientation_from_json(input_json(o));
  ReductVariant variant;
  if (o.variant == "circle") {
    variant = ReductVariant::circle;
  } else if (o.variant == "bullet") {
    variant = ReductVariant::bullet;
  } else {
    throw DomainError("--variant must be circle or bullet");
  }
  const ClosureReduct r = closure_reduct(or_, variant);
  Json unary = Json::array();
  for (const auto& [v, c] : r.unary_closure) unary.push_back({v, to_json(c)});
  Json tuples = Json::array();
  for (const auto& [tuple, members] : r.root_tuple_map) tuples.push_back({tuple, to_json(members)});
  Json out{{"graph", to_json(r.base)}, {"variant", o.variant}, {"unary_closure", std::move(unary)}};
  if (variant == ReductVariant::bullet) out["root_tuple_map"] = std::move(tuples);
  return {out};
}

Outcome cmd_member(const Options& o) {
  const ClassSpec spec = class_spec(o);
  const Json j = input_json(o);
  const MembershipVerdict v = spec.orientation_class()
                                  ? class_membership(orientation_from_json(j), spec)
                                  : class_membership(graph_from_json(j), spec);
  return {Json{{"class", spec.to_json()},
               {"member", v.member},
               {"violator", set_or_null(v.violator)},
               {"reason", v.reason}},
          v.member};
}

template <Structure S>
S structure_from(const Json& j, const std::string& where) {
  if constexpr (std::same_as<S, Graph>) {
    return graph_from_json(j, where);
  } else {
    return orientation_from_json(j, where);
  }
}

template <Structure S>
Outcome amalgamate_as(const Options& o, const Json& j) {
  const S b1 = structure_from<S>(detail::field(j, "b1", ""), "/b1");
  const S b2 = structure_from<S>(detail::field(j, "b2", ""), "/b2");
  const Embedding f1 = embedding_from_json(detail::field(j, "f1", ""), "/f1");
  const Embedding f2 = embedding_from_json(detail::field(j, "f2", ""), "/f2");
  std::optional<ClassSpec> spec;
  if (!o.class_name.empty()) spec = class_spec(o);
  const AmalgamResult<S> r = free_amalgam(b1, b2, f1, f2, spec);
  Json out{{"amalgam", to_json(r.amalgam)}, {"left", to_json(r.left)}, {"right", to_json(r.right)}};
  out["in_class"] = spec ? Json(r.in_class) : Json(nullptr);
  const VertexSet base = r.left.image_of(f1.image());
  VertexSet right_only;
  for (Vertex v : r.right.image()) {
    if (!base.count(v)) right_only.insert(v);
  }
  return {out, !spec || r.in_class, dot_of(r.amalgam, highlight(base, right_only))};
}

Outcome cmd_amalgamate(const Options& o) {
  const Json j = input_json(o);
  return is_oriented(detail::field(j, "b1", "")) ? amalgamate_as<Orientation>(o, j)
                                                  : amalgamate_as<Graph>(o, j);
}

template <Structure S>
Outcome copies_as(const ClassSpec& spec, const Json& j) {
  const S a = structure_from<S>(detail::field(j, "a", ""), "/a");
  const S b = structure_from<S>(detail::field(j, "b", ""), "/b");
  Json list = Json::array();
  const auto copies = enumerate_strong_copies(a, b, spec);
  for (const Embedding& f : copies) list.push_back(to_json(f));
  return {Json{{"count", copies.size()}, {"embeddings", std::move(list)}}};
}

Outcome cmd_copies(const Options& o) {
  const ClassSpec spec = class_spec(o);
  const Json j = input_json(o);
  return spec.orientation_class() ? copies_as<Orientation>(spec, j) : copies_as<Graph>(spec, j);
}

template <Structure S>
Outcome wap_as(const Options& o, const ClassSpec& spec, const Json& j) {
  const VertexSet a = vertex_set_from_json(detail::field(j, "a", ""), "/a");
  const S c1 = structure_from<S>(detail::field(j, "c1", ""), "/c1");
  const S c2 = structure_from<S>(detail::field(j, "c2", ""), "/c2");
  const WapResult<S> w = wap_probe(spec, a, c1, c2, o.bound, !o.no_layer_refutation);
  Json out{{"found", !w.exhausted()}, {"nodes", w.nodes}};
  out["refuted_at_depth"] = w.refuted_at_depth ? Json(*w.refuted_at_depth) : Json(nullptr);
  if (w.amalgam) {
    out["amalgam"] = to_json(w.amalgam->amalgam);
    out["left"] = to_json(w.amalgam->left);
    out["right"] = to_json(w.amalgam->right);
    return {out, true, dot_of(w.amalgam->amalgam, highlight(w.amalgam->left.image()))};
  }
  out["amalgam"] = nullptr;
  return {out, false};
}

Outcome cmd_wap(const Options& o) {
  const ClassSpec spec = class_spec(o);
  const Json j = input_json(o);
  return spec.orientation_class() ? wap_as<Orientation>(o, spec, j) : wap_as<Graph>(o, spec, j);
}

template <Structure S>
Outcome eppa_as(const Options& o, const ClassSpec& spec, const Json& j) {
  const S a = structure_from<S>(j, "");
  const EppaResult<S> r = eppa_probe(spec, a, o.bound);
  Json out{{"found", !r.exhausted()},
           {"partial_automorphisms", r.partial_automorphisms},
           {"candidates", r.candidates}};
  out["extension"] = r.extension ? to_json(*r.extension) : Json(nullptr);
  if (r.extension) return {out, true, dot_of(*r.extension, highlight(all_vertices(a)))};
  return {out, false};
}

Outcome cmd_eppa(const Options& o) {
  const ClassSpec spec = class_spec(o);
  const Json j = input_json(o);
  return spec.orientation_class() ? eppa_as<Orientation>(o, spec, j) : eppa_as<Graph>(o, spec, j);
}

Json gadget_json(const RootedGadget& t) {
  Json words = Json::object();
  for (const auto& [v, w] : t.words) words[std::to_string(v)] = w;
  return Json{{"kind", t.kind == GadgetKind::T0 ? "T0" : "T1"},
              {"height", t.height},
              {"root", t.root},
              {"graph", to_json(t.graph)},
              {"orientation", to_json(t.outward())},
              {"left_leaves", to_json(t.left_leaves)},
              {"right_leaves", to_json(t.right_leaves)},
              {"words", std::move(words)}};
}

std::string gadget_dot(const RootedGadget& t) {
  DotStyle style;
  style.name = t.kind == GadgetKind::T0 ? "T0" : "T1";
  style.labels = t.words;
  style.boxed = {t.root};
  style.left = t.left_leaves;
  style.right = t.right_leaves;
  return to_dot(t.outward(), style);
}

RootedGadget chosen_gadget(const Options& o) {
  if (o.gadget == "t0") return build_t0(o.n);
  if (o.gadget == "t1") return build_t1(o.m);
  throw DomainError("--gadget must be t0 or t1");
}

Outcome cmd_gadget_t0(const Options& o) {
  const RootedGadget t = build_t0(o.n);
  return {gadget_json(t), true, gadget_dot(t)};
}

Outcome cmd_gadget_t1(const Options& o) {
  const RootedGadget t = build_t1(o.m);
  return {gadget_json(t), true, gadget_dot(t)};
}

Outcome cmd_gadget_attach(const Options& o) {
  const Orientation b = orientation_from_json(input_json(o));
  const GadgetAttachment a = attach_gadgets(b, chosen_gadget(o));
  Json copies = Json::array();
  for (const Embedding& f : a.copies) copies.push_back(to_json(f));
  DotStyle style = highlight(a.left, a.right);
  style.name = "E";
  return {Json{{"graph", to_json(a.graph)},
               {"orientation", to_json(a.orientation)},
               {"left", to_json(a.left)},
               {"right", to_json(a.right)},
               {"copies", std::move(copies)}},
          true, to_dot(a.orientation, style)};
}

template <Structure S>
Outcome iterate_as(const Options& o, const Json& j) {
  const S x = structure_from<S>(j, "");
  const VertexSet over = parse_set(o.set);
  const IteratedAmalgam<S> it = iterated_free_amalgam(x, over, o.copies);
  Json copies = Json::array();
  for (const Embedding& f : it.copies) copies.push_back(to_json(f));
  return {Json{{"structure", to_json(it.structure)}, {"copies", std::move(copies)}}, true,
          dot_of(it.structure, highlight(over))};
}

Outcome cmd_gadget_iterate(const Options& o) {
  const Json j = input_json(o);
  return is_oriented(j) ? iterate_as<Orientation>(o, j) : iterate_as<Graph>(o, j);
}

template <Structure S>
Outcome build_as(const Options& o, const ClassSpec& spec) {
  const auto g = build_generic<S>(spec, o.size, o.bound, o.seed);
  return {Json{{"final_stage", to_json(g.final_stage())}, {"log", to_json(g)}}, true,
          dot_of(g.final_stage())};
}

Outcome cmd_build(const Options& o) {
  const ClassSpec spec = class_spec(o);
  return spec.orientation_class() ? build_as<Orientation>(o, spec) : build_as<Graph>(o, spec);
}

template <Structure S>
Json verify_as(const Options& o, const Json& j) {
  const auto g = generic_from_json<S>(j);
  const ExtensionReport r = verify_extension_property(g, o.bound);
  Json out{{"size_bound", r.size_bound},
           {"total", r.total},
           {"satisfied", r.satisfied},
           {"open", r.open},
           {"open_per_stage", r.open_per_stage},
           {"completed_stages", r.completed_stages},
           {"stage_count", g.stages.size()}};
  if constexpr (std::same_as<S, Orientation>) {
    const ReductReport rc = reduct_consistency(g);
    out["reduct_consistency"] = Json{{"pass", rc.pass},
                                     {"failing_stage", rc.failing_stage ? Json(*rc.failing_stage) : Json(nullptr)},
                                     {"reason", rc.reason}};
  }
  return out;
}

Outcome cmd_verify(const Options& o) {
  Json j = input_json(o);
  if (j.is_object() && j.contains("result")) j = j["result"];
  if (j.is_object() && j.contains("log")) j = j["log"];
  const ClassSpec spec = class_spec_from_json(detail::field(j, "spec", ""), "/spec");
  return {spec.orientation_class() ? verify_as<Orientation>(o, j) : verify_as<Graph>(o, j)};
}

Json permutation_json(const Graph& g, const Permutation& p) {
  Json out = Json::array();
  for (std::size_t i = 0; i < p.size(); ++i) out.push_back({g.vertex_at(i), g.vertex_at(p[i])});
  return out;
}

Outcome cmd_aut(const Options& o) {
  const Graph g = graph_from_json(input_json(o));
  const AutomorphismGroup group = automorphisms(g);
  Json gens = Json::array();
  for (const Permutation& p : group.generators) gens.push_back(permutation_json(g, p));
  Json out{{"order", group.order}, {"generators", std::move(gens)}};
  out["element_count"] = group.elements ? Json(group.elements->size()) : Json(nullptr);
  return {out};
}

Outcome cmd_orbits(const Options& o) {
  const Graph g = graph_from_json(input_json(o));
  const OrbitPartition p = orientation_orbits(g, o.k);
  Json orbits = Json::array();
  for (std::size_t i = 0; i < p.orbits.size(); ++i) {
    orbits.push_back({{"size", p.orbits[i].size()},
                      {"representative", to_json(p.space.points[p.representatives[i]])}});
  }
  return {Json{{"point_count", p.space.points.size()},
               {"orbit_count", p.orbits.size()},
               {"orbits", std::move(orbits)}}};
}

Outcome cmd_fine(const Options& o) {
  const Graph g = graph_from_json(input_json(o));
  const auto fine = fine_orientations(g, o.k, strong_kind(o.kind), o.threads);
  Json list = Json::array();
  for (const Orientation& f : fine) list.push_back(to_json(f));
  return {Json{{"count", fine.size()}, {"orientations", std::move(list)}}};
}

Outcome cmd_refine(const Options& o) {
  const Orientation or_ = orientation_from_json(input_json(o));
  const StrongKind kind = strong_kind(o.kind);
  const Orientation fine = refine_to_fine(or_, kind);
  return {Json{{"was_fine", fine == or_}, {"refinement", to_json(fine)}}, true, dot_of(fine)};
}

Outcome cmd_ball(const Options& o) {
  const Orientation or_ = orientation_from_json(input_json(o));
  const VertexSet ball = reachability_ball(or_, o.vertex, o.radius);
  return {Json{{"center", o.vertex},
               {"radius", o.radius},
               {"ball", to_json(ball)},
               {"size", ball.size()},
               {"bound", ball_bound(or_.k(), o.radius)}},
          true, dot_of(or_, highlight(ball))};
}

Outcome cmd_direction(const Options& o) {
  const Graph g = graph_from_json(input_json(o));
  std::vector<Vertex> nbrs = parse_list(o.neighbors, "--neighbors");
  if (nbrs.empty()) {
    for (std::size_t i : g.neighbors(g.index_of(o.vertex))) nbrs.push_back(g.vertex_at(i));
  }
  const DirectionReport r = direction_count_check(g, o.k, o.vertex, nbrs);
  return {Json{{"center", r.center},
               {"neighbors", r.neighbors},
               {"point_count", r.point_count},
               {"max_count", r.max_count},
               {"arc_counts", r.arc_counts},
               {"frequencies", r.frequencies},
               {"frequency_sum", r.frequency_sum},
               {"holds", r.holds}},
          r.holds};
}

Outcome cmd_growth(const Options& o) {
  const auto f = load_growth(o.growth.empty() ? "example" : o.growth);
  const GrowthReport r = growth_check(*f, o.grid, o.max_x);
  Json samples = Json::array();
  for (const GrowthSample& s : r.samples) {
    samples.push_back({{"x", s.x}, {"value", s.value}, {"slope", s.slope}, {"bound", s.bound},
                       {"flagged", s.flagged}});
  }
  return {Json{{"function", f->to_json()},
               {"concave", f->concave()},
               {"monotone", r.monotone},
               {"slope_nonincreasing", r.slope_nonincreasing},
               {"flagged_count", r.flagged_count},
               {"samples", std::move(samples)}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse graphs, orientations and their amalgamation classes"};
  app.require_subcommand(1);
  Options o;
  using Handler = Outcome (*)(const Options&);
  std::vector<std::pair<CLI::App*, Handler>> handlers;
  std::map<CLI::App*, std::string> names;

  auto add = [&](CLI::App* parent, const std::string& name, const std::string& help, Handler h,
                 const std::string& full_name) {
    CLI::App* sub = parent->add_subcommand(name, help);
    sub->add_option("--input,-i", o.input, "input JSON file, - for stdin")->capture_default_str();
    sub->add_option("--format", o.format, "json or dot")
        ->check(CLI::IsMember({"json", "dot"}))
        ->capture_default_str();
    handlers.emplace_back(sub, h);
    names[sub] = full_name;
    return sub;
  };
  auto with_k = [&](CLI::App* s) { s->add_option("--k", o.k, "out-degree bound")->capture_default_str(); };
  auto with_class = [&](CLI::App* s) {
    s->add_option("--class", o.class_name, "C0_s, CF_d, D0_s, DF_d, E0_fine or EF_dfine");
    s->add_option("--growth", o.growth, "example, inline JSON or a JSON file");
    with_k(s);
  };

  auto* s = add(&app, "check-sparse", "decide k-sparsity", cmd_check_sparse, "check-sparse");
  with_k(s);
  s = add(&app, "orient", "find a k-orientation", cmd_orient, "orient");
  with_k(s);
  s->add_option("--set", o.set, "vertices every crossing edge must point into");
  s = add(&app, "enumerate", "list all k-orientations", cmd_enumerate, "enumerate");
  with_k(s);
  s->add_option("--cap", o.cap, "stop after this many (0 = no cap)");
  s = add(&app, "delta", "predimension of a vertex set", cmd_delta, "delta");
  with_k(s);
  s->add_option("--set", o.set, "comma separated vertex ids");
  s = add(&app, "closure", "scl, sdcl or d-closure of a set", cmd_closure, "closure");
  with_k(s);
  s->add_option("--kind", o.kind, "scl, sdcl or dcl")->required();
  s->add_option("--set", o.set, "comma separated vertex ids");
  s->add_option("--growth", o.growth, "report the F^-1(k|A|) size bound");
  s = add(&app, "strong", "decide A <=_s B or A <=_d B", cmd_strong, "strong");
  with_k(s);
  s->add_option("--kind", o.kind, "s or d")->required();
  s->add_option("--set", o.set, "comma separated vertex ids");
  s->add_option("--method", o.method, "orientation or predimension")->capture_default_str();
  s = add(&app, "reduct", "closure reduct of an orientation", cmd_reduct, "reduct");
  s->add_option("--variant", o.variant, "circle or bullet")->capture_default_str();
  s = add(&app, "member", "class membership", cmd_member, "member");
  with_class(s);
  s = add(&app, "amalgamate", "free amalgam of b1 and b2 over f1, f2", cmd_amalgamate, "amalgamate");
  with_class(s);
  s = add(&app, "copies", "strong copies of a in b", cmd_copies, "copies");
  with_class(s);
  s = add(&app, "wap-probe", "bounded weak amalgamation search", cmd_wap, "wap-probe");
  with_class(s);
  s->add_option("--bound", o.bound, "largest amalgam size")->required();
  s->add_flag("--no-layer-refutation", o.no_layer_refutation, "skip the forced-layer comparison");
  s = add(&app, "eppa-probe", "bounded EPPA search", cmd_eppa, "eppa-probe");
  with_class(s);
  s->add_option("--bound", o.bound, "largest extension size")->required();

  CLI::App* gadget = app.add_subcommand("gadget", "half-binary tree gadgets");
  gadget->require_subcommand(1);
  s = add(gadget, "t0", "build T_0(n)", cmd_gadget_t0, "gadget t0");
  s->add_option("--n", o.n, "height")->required();
  s = add(gadget, "t1", "build T_1(3m)", cmd_gadget_t1, "gadget t1");
  s->add_option("--m", o.m, "cycle half-length")->required();
  s = add(gadget, "attach", "attach gadget copies to an orientation", cmd_gadget_attach,
          "gadget attach");
  s->add_option("--gadget", o.gadget, "t0 or t1")->capture_default_str();
  s->add_option("--n", o.n, "height for t0");
  s->add_option("--m", o.m, "cycle half-length for t1");
  s = add(gadget, "iterate", "copies of a structure glued over a set", cmd_gadget_iterate,
          "gadget iterate");
  s->add_option("--set", o.set, "vertices shared by all copies");
  s->add_option("--copies", o.copies, "number of copies")->capture_default_str();

  s = add(&app, "build-generic", "finite approximation of the generic structure", cmd_build,
          "build-generic");
  with_class(s);
  s->add_option("--size", o.size, "target size")->required();
  s->add_option("--bound", o.bound, "obligation bound")->required();
  s->add_option("--seed", o.seed, "shuffle seed")->capture_default_str();
  s = add(&app, "verify-ep", "check the extension property of a build log", cmd_verify, "verify-ep");
  s->add_option("--bound", o.bound, "extension size bound")->required();
  s = add(&app, "aut", "automorphism group", cmd_aut, "aut");
  s = add(&app, "orbits", "Aut-orbits on the k-orientations", cmd_orbits, "orbits");
  with_k(s);
  s = add(&app, "fine", "fine k-orientations", cmd_fine, "fine");
  with_k(s);
  s->add_option("--kind", o.kind, "s or d")->required();
  s->add_option("--threads", o.threads, "worker threads")->capture_default_str();
  s = add(&app, "refine", "a fine refinement of an orientation", cmd_refine, "refine");
  s->add_option("--kind", o.kind, "s or d")->required();
  s = add(&app, "ball", "vertices reachable within a radius", cmd_ball, "ball");
  s->add_option("--vertex", o.vertex, "centre")->required();
  s->add_option("--radius", o.radius, "radius")->required();
  s = add(&app, "direction-check", "arc frequencies at a vertex over all k-orientations",
          cmd_direction, "direction-check");
  with_k(s);
  s->add_option("--vertex", o.vertex, "centre")->required();
  s->add_option("--neighbors", o.neighbors, "comma separated neighbours (default: all)");
  s = add(&app, "growth", "sample a growth function", cmd_growth, "growth");
  s->add_option("--growth", o.growth, "example, inline JSON or a JSON file");
  s->add_option("--grid", o.grid, "sample spacing")->capture_default_str();
  s->add_option("--max", o.max_x, "largest sample (default: twice the last breakpoint)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  for (const auto& [sub, handler] : handlers) {
    if (!sub->parsed()) continue;
    try {
      const Outcome out = handler(o);
      if (o.format == "dot") {
        if (!out.dot) throw DomainError("command " + names[sub] + " has no DOT output");
        std::cout << *out.dot;
      } else {
        const Json doc{{"schema_version", kSchemaVersion}, {"command", names[sub]},
                       {"result", out.result}};
        std::cout << doc.dump(2) << "\n";
      }
      return out.positive ? 0 : 1;
    } catch (const ResourceError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 3;
    } catch (const DomainError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    } catch (const Json::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  return 2;
}
