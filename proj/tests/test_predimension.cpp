#include <gtest/gtest.h>

#include <random>

#include "hrush/hrush.hpp"
#include "support/oracles.hpp"

using namespace hrush;

namespace {

// a=0 → b=1 → c=2
Orientation directed_path(int k) { return Orientation({0, 1, 2}, {{0, 1}, {1, 2}}, k); }

const std::vector<std::vector<Graph>>& corpus() {
  static const auto c = oracle::graph_corpus(7);
  return c;
}

VertexSet replay(const ClosureResult& r) {
  VertexSet out = r.seed;
  for (const VertexSet& step : r.trace) out.insert(step.begin(), step.end());
  return out;
}

Graph random_sparse(std::mt19937_64& rng, std::size_t n, int k) {
  while (true) {
    Graph g = oracle::random_graph(rng, n, 0.45);
    if (oracle::sparse(g, k)) return g;
  }
}

VertexSet random_subset(std::mt19937_64& rng, std::size_t n) {
  VertexSet s;
  for (Vertex v = 0; v < n; ++v) {
    if (rng() % 2) s.insert(v);
  }
  return s;
}

}  // namespace

TEST(Delta, Examples) {
  EXPECT_EQ(delta(Graph::on_range(1), {0}, 2).delta, 2);
  EXPECT_EQ(delta(Graph::on_range(2), {0, 1}, 2).delta, 4);
  const auto r = delta(oracle::cycle(5), {0, 1, 2, 3, 4}, 2);
  EXPECT_EQ(r.delta, 5);
  EXPECT_EQ(r.vertex_count, 5u);
  EXPECT_EQ(r.edge_count, 5u);
  EXPECT_THROW(delta(oracle::cycle(5), {9}, 2), DomainError);
}

TEST(Delta, NonNegativeOnSparseGraphs) {
  for (std::size_t n = 0; n <= 6; ++n) {
    for (const Graph& g : corpus()[n]) {
      for (int k : {1, 2}) {
        if (!oracle::sparse(g, k)) continue;
        for (oracle::Bits m = 0; m < (oracle::Bits{1} << n); ++m) {
          EXPECT_GE(delta(g, oracle::set_of(g, m), k).delta, 0);
        }
      }
    }
  }
}

TEST(Roots, DirectedPath) {
  const RootSet r = roots(directed_path(2));
  EXPECT_EQ(r, (RootSet{{0, 1}, {1, 1}, {2, 2}}));
  EXPECT_EQ(delta(directed_path(2).reduct(), {0, 1, 2}, 2).delta, 4);
}

TEST(Roots, TightK5HasNone) {
  const auto v = check_sparsity(oracle::complete(5), 2);
  ASSERT_TRUE(v.sparse);
  EXPECT_TRUE(roots(*v.witness).empty());
  EXPECT_EQ(delta(oracle::complete(5), all_vertices(oracle::complete(5)), 2).delta, 0);
}

TEST(Roots, SingleVertex) { EXPECT_EQ(roots(Orientation({7}, {}, 2)), (RootSet{{7, 2}})); }

TEST(Roots, MultiplicitiesSumToDelta) {
  for (std::size_t n = 0; n <= 5; ++n) {
    for (const Graph& g : corpus()[n]) {
      for (int k : {1, 2}) {
        for (const Orientation& o : oracle::orientations(g, k)) {
          long total = 0;
          for (const auto& [v, m] : roots(o)) total += m;
          EXPECT_EQ(total, oracle::delta(oracle::adjacency(g), oracle::full(n), k));
        }
      }
    }
  }
}

TEST(SuccessorClosure, Examples) {
  const Orientation o = directed_path(2);
  EXPECT_EQ(successor_closure(o, {0}).closure, (VertexSet{0, 1, 2}));
  EXPECT_EQ(successor_closure(o, {2}).closure, (VertexSet{2}));
  EXPECT_EQ(successor_closure(o, {0, 1, 2}).closure, (VertexSet{0, 1, 2}));
  const auto r = successor_closure(o, {0});
  EXPECT_EQ(replay(r), r.closure);
}

TEST(SuccessorDClosure, Examples) {
  const Orientation o = directed_path(2);
  EXPECT_EQ(successor_d_closure(o, {0}).closure, (VertexSet{0, 1, 2}));
  EXPECT_EQ(successor_d_closure(o, {2}).closure, (VertexSet{2}));
  EXPECT_EQ(successor_d_closure(o, {0, 1, 2}).closure, (VertexSet{0, 1, 2}));
  EXPECT_EQ(oracle::set_of(o, *oracle::sdcl(o, 0b001)), (VertexSet{0, 1, 2}));
  EXPECT_EQ(oracle::set_of(o, *oracle::sdcl(o, 0b100)), (VertexSet{2}));
}

TEST(SuccessorDClosure, SmallestSuccessorClosedAndDClosedSuperset) {
  for (std::size_t n = 0; n <= 5; ++n) {
    for (const Graph& g : corpus()[n]) {
      for (int k : {1, 2}) {
        for (const Orientation& o : oracle::orientations(g, k)) {
          for (oracle::Bits seed = 0; seed < (oracle::Bits{1} << n); ++seed) {
            const auto expected = oracle::sdcl(o, seed);
            ASSERT_TRUE(expected) << canonical_encode(o);
            const auto r = successor_d_closure(o, oracle::set_of(o, seed));
            ASSERT_EQ(r.closure, oracle::set_of(o, *expected)) << canonical_encode(o) << " seed " << seed;
            EXPECT_EQ(replay(r), r.closure);
          }
        }
      }
    }
  }
}

TEST(IsStrong, Examples) {
  const ClassSpec cf(ClassKind::CF_d, 2, GrowthFunction::example());
  const Graph c5 = oracle::cycle(5);
  ASSERT_TRUE(class_membership(c5, cf).member);
  for (const Edge& e : c5.edges()) EXPECT_TRUE(is_strong(c5, {e.u, e.v}, StrongKind::d, 2).strong);
  EXPECT_TRUE(is_strong(oracle::complete(4), {}, StrongKind::s, 2).strong);
  const auto v = is_strong(oracle::path(2), {0}, StrongKind::d, 1);
  EXPECT_FALSE(v.strong);
  ASSERT_TRUE(v.violating_set);
  EXPECT_EQ(*v.violating_set, (VertexSet{0, 1}));
  EXPECT_FALSE(is_strong(oracle::path(2), {0}, StrongKind::d, 1, StrongMethod::predimension).strong);
  EXPECT_THROW(is_strong(oracle::complete(4), {0}, StrongKind::s, 1), DomainError);
}

TEST(IsStrong, BothMethodsAgreeWithBruteForce) {
  for (std::size_t n = 0; n <= 6; ++n) {
    for (const Graph& g : corpus()[n]) {
      for (int k : {1, 2}) {
        if (!oracle::sparse(g, k)) continue;
        const auto deltas = oracle::all_deltas(oracle::adjacency(g), k);
        for (oracle::Bits a = 0; a < (oracle::Bits{1} << n); ++a) {
          const VertexSet s = oracle::set_of(g, a);
          for (StrongKind kind : {StrongKind::s, StrongKind::d}) {
            const bool expected = oracle::strong(deltas, n, a, kind == StrongKind::d);
            const auto by_orientation = is_strong(g, s, kind, k, StrongMethod::orientation);
            const auto by_predimension = is_strong(g, s, kind, k, StrongMethod::predimension);
            ASSERT_EQ(by_orientation.strong, expected) << canonical_encode(g) << " a=" << a;
            ASSERT_EQ(by_predimension.strong, expected) << canonical_encode(g) << " a=" << a;
            if (by_orientation.strong) {
              ASSERT_TRUE(by_orientation.witness);
              EXPECT_TRUE(is_successor_closed(*by_orientation.witness, s));
              if (kind == StrongKind::d) { EXPECT_EQ(successor_d_closure(*by_orientation.witness, s).closure, s); }
            }
            for (const auto* v : {&by_orientation, &by_predimension}) {
              if (v->strong) continue;
              ASSERT_TRUE(v->violating_set);
              const oracle::Bits c = oracle::mask_of(g, *v->violating_set);
              EXPECT_EQ(c & a, a);
              EXPECT_NE(c, a);
              EXPECT_TRUE(kind == StrongKind::d ? deltas[c] <= deltas[a] : deltas[c] < deltas[a]);
            }
          }
        }
      }
    }
  }
}

TEST(IsStrong, HereditaryTransitiveAndIntersecting) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 2);
    const std::size_t n = 3 + rng() % 6;
    const Graph g = random_sparse(rng, n, k);
    const VertexSet a = random_subset(rng, n), b = random_subset(rng, n), x = random_subset(rng, n);
    for (StrongKind kind : {StrongKind::s, StrongKind::d}) {
      auto strong = [&](const Graph& h, const VertexSet& s) { return is_strong(h, s, kind, k).strong; };
      if (strong(g, a)) {
        VertexSet ax;
        std::set_intersection(a.begin(), a.end(), x.begin(), x.end(), std::inserter(ax, ax.end()));
        EXPECT_TRUE(strong(induced(g, x), ax));
      }
      if (strong(g, a) && strong(g, b)) {
        VertexSet ab;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(ab, ab.end()));
        EXPECT_TRUE(strong(g, ab));
      }
      VertexSet inner;
      for (Vertex v : a) {
        if (rng() % 2) inner.insert(v);
      }
      if (strong(induced(g, a), inner) && strong(g, a)) { EXPECT_TRUE(strong(g, inner)); }
    }
  }
}

TEST(Delta, Submodular) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const Graph g = oracle::random_graph(rng, 9, 0.4);
    const VertexSet b = random_subset(rng, 9), c = random_subset(rng, 9);
    VertexSet uni = b, meet;
    uni.insert(c.begin(), c.end());
    std::set_intersection(b.begin(), b.end(), c.begin(), c.end(), std::inserter(meet, meet.end()));
    for (int k : {1, 2, 3}) {
      EXPECT_LE(delta(g, uni, k).delta, delta(g, b, k).delta + delta(g, c, k).delta - delta(g, meet, k).delta);
    }
  }
}

TEST(DClosure, Examples) {
  const Graph p = oracle::path(3);  // a=0, m=1, b=2
  EXPECT_EQ(d_closure(p, {0, 1, 2}, 2).closure, (VertexSet{0, 1, 2}));
  EXPECT_EQ(d_closure(p, {0, 2}, 2).closure, (VertexSet{0, 1, 2}));
  EXPECT_EQ(oracle::set_of(p, oracle::d_closure(p, 0b101, 2)), (VertexSet{0, 1, 2}));
  const Graph c5 = oracle::cycle(5);
  EXPECT_LE(d_closure(c5, {0, 2}, 2).closure.size(), 3u);
  EXPECT_EQ(d_closure(c5, {0, 1}, 2).closure, (VertexSet{0, 1}));
}

TEST(DClosure, IsIntersectionOfDClosedSupersets) {
  for (std::size_t n = 0; n <= 6; ++n) {
    for (const Graph& g : corpus()[n]) {
      for (int k : {1, 2}) {
        if (!oracle::sparse(g, k)) continue;
        const auto adj = oracle::adjacency(g);
        for (oracle::Bits seed = 0; seed < (oracle::Bits{1} << n); ++seed) {
          const auto r = d_closure(g, oracle::set_of(g, seed), k);
          ASSERT_EQ(r.closure, oracle::set_of(g, oracle::d_closure(g, seed, k))) << canonical_encode(g);
          EXPECT_EQ(replay(r), r.closure);
          EXPECT_GE(oracle::delta(adj, seed, k), oracle::delta(adj, oracle::mask_of(g, r.closure), k));
        }
      }
    }
  }
}

TEST(DClosure, MonotoneAndIdempotent) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 2);
    const Graph g = random_sparse(rng, 8, k);
    const VertexSet b = random_subset(rng, 8);
    VertexSet a;
    for (Vertex v : b) {
      if (rng() % 2) a.insert(v);
    }
    const VertexSet ca = d_closure(g, a, k).closure, cb = d_closure(g, b, k).closure;
    EXPECT_EQ(d_closure(g, ca, k).closure, ca);
    EXPECT_TRUE(std::includes(cb.begin(), cb.end(), ca.begin(), ca.end()));
  }
}

TEST(ClosureReduct, CircleOnDirectedPath) {
  const auto r = closure_reduct(directed_path(2), ReductVariant::circle);
  EXPECT_EQ(r.unary_closure.at(0), (VertexSet{0, 1, 2}));
  EXPECT_EQ(r.unary_closure.at(1), (VertexSet{1, 2}));
  EXPECT_EQ(r.unary_closure.at(2), (VertexSet{2}));
  EXPECT_TRUE(r.root_tuple_map.empty());
  EXPECT_EQ(r.base, directed_path(2).reduct());
}

TEST(ClosureReduct, CircleOnEdgeless) {
  const auto r = closure_reduct(Orientation({0, 1}, {}, 2), ReductVariant::circle);
  EXPECT_EQ(r.unary_closure.at(0), (VertexSet{0}));
  EXPECT_EQ(r.unary_closure.at(1), (VertexSet{1}));
}

TEST(ClosureReduct, BulletOnDirectedPath) {
  const auto r = closure_reduct(directed_path(2), ReductVariant::bullet);
  using Tuple = std::vector<Vertex>;
  EXPECT_EQ(r.root_tuple_map, (std::map<Tuple, VertexSet>{{{0, 1, 2}, {0}}, {{1, 2}, {1}}, {{2}, {2}}}));
}

TEST(ClosureReduct, UnaryClosuresAreSuccessorClosed) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = random_sparse(rng, 7, 2);
    const Orientation o = *orient(g, 2);
    const auto r = closure_reduct(o, ReductVariant::bullet);
    const auto out = oracle::out_adjacency(o);
    for (const auto& [v, c] : r.unary_closure) {
      EXPECT_TRUE(c.count(v));
      EXPECT_TRUE(oracle::successor_closed(out, oracle::mask_of(o, c)));
    }
    for (const auto& [tuple, members] : r.root_tuple_map) {
      for (Vertex u : members) {
        std::vector<Vertex> found;
        for (Vertex w : r.unary_closure.at(u)) {
          if (o.out_degree(o.index_of(w)) < 2) found.push_back(w);
        }
        EXPECT_EQ(found, tuple);
      }
    }
  }
}
