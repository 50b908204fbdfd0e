#pragma once

// Random strong amalgamation problems and other shared fixtures.

#include <optional>
#include <random>

#include "hrush/hrush.hpp"
#include "support/oracles.hpp"

namespace fixture {

using namespace hrush;

// δ(X) ≥ F(|X|) for every X, over all subsets.
inline bool in_cf(const Graph& g, int k, const GrowthFunction& f) {
  const auto adj = oracle::adjacency(g);
  const oracle::Bits all = oracle::full(g.vertex_count());
  for (oracle::Bits m = 1; m <= all && all != 0; ++m) {
    if (static_cast<double>(oracle::delta(adj, m, k)) < f(oracle::popcount(m)) - 1e-9) return false;
    if (m == all) break;
  }
  return true;
}

inline bool in_class(const Graph& g, const ClassSpec& spec) {
  if (!oracle::sparse(g, spec.k)) return false;
  return !spec.growth || in_cf(g, spec.k, *spec.growth);
}

inline bool strong(const Graph& g, const VertexSet& a, const ClassSpec& spec) {
  return oracle::strong(g, a, spec.relation() == StrongKind::d, spec.k);
}

struct AmalgamationProblem {
  Graph b1, b2;
  Embedding f1, f2;  // A = 0..|A|-1
};

// B1 and B2 in the class, both containing A strongly, |B1| + |B2| − |A| ≤ max_total.
inline AmalgamationProblem random_problem(std::mt19937_64& rng, const ClassSpec& spec,
                                          std::size_t max_total = 10) {
  while (true) {
    const std::size_t n1 = 1 + rng() % 6;
    const Graph b1 = oracle::random_graph(rng, n1, 0.35);
    if (!in_class(b1, spec)) continue;
    VertexSet a;
    for (Vertex v = 0; v < n1; ++v) {
      if (rng() % 2) a.insert(v);
    }
    if (!strong(b1, a, spec)) continue;
    const std::size_t room = max_total - n1;
    if (room == 0) continue;
    const std::size_t extra = 1 + rng() % std::min<std::size_t>(room, 5);
    const std::size_t n2 = a.size() + extra;
    std::vector<Vertex> ids(a.begin(), a.end());
    std::vector<Edge> edges;
    for (Vertex p = 0; p < ids.size(); ++p) {
      for (Vertex q = p + 1; q < ids.size(); ++q) {
        if (b1.adjacent(ids[p], ids[q])) edges.push_back({p, q});
      }
    }
    std::bernoulli_distribution coin(0.35);
    for (Vertex q = static_cast<Vertex>(ids.size()); q < n2; ++q) {
      for (Vertex p = 0; p < q; ++p) {
        if (coin(rng)) edges.push_back({p, q});
      }
    }
    const Graph b2 = Graph::on_range(n2, std::move(edges));
    VertexSet base2;
    for (Vertex p = 0; p < ids.size(); ++p) base2.insert(p);
    if (!in_class(b2, spec) || !strong(b2, base2, spec)) continue;
    AmalgamationProblem out{b1, b2, {}, {}};
    for (Vertex p = 0; p < ids.size(); ++p) {
      out.f1.map[p] = ids[p];
      out.f2.map[p] = p;
    }
    return out;
  }
}

}  // namespace fixture
