#pragma once

#include <cstddef>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include "rectspec/tensor.hpp"

namespace rectspec {

// G_A: tail vertices 0..n-1 (lower indices), head vertices 0..m-1 (upper).
struct BipartiteGraph {
  std::size_t tail_count = 0;
  std::size_t head_count = 0;
  std::set<std::pair<Index, Index>> arcs;  // (tail, head)

  friend bool operator==(const BipartiteGraph&, const BipartiteGraph&) = default;
};

// Arc (i, j) whenever some positive entry has i among its lower indices and j
// among its upper indices.
inline BipartiteGraph induced_bipartite(const RectTensor& a) {
  BipartiteGraph g{a.n(), a.m(), {}};
  const std::size_t r = a.r();
  a.for_each_nonzero([&](std::span<const Index> idx, double v) {
    if (!(v > 0.0)) return;
    for (std::size_t k = 0; k < r; ++k)
      for (std::size_t l = r; l < idx.size(); ++l) g.arcs.emplace(idx[k], idx[l]);
  });
  return g;
}

// Connectivity of the undirected graph underlying g, over all n + m vertices.
inline bool is_connected(const BipartiteGraph& g) {
  const std::size_t total = g.tail_count + g.head_count;
  if (total == 0) return true;
  std::vector<std::vector<std::size_t>> adj(total);
  for (const auto& [i, j] : g.arcs) {
    adj[i].push_back(g.tail_count + j);
    adj[g.tail_count + j].push_back(i);
  }
  std::vector<char> seen(total, 0);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop();
    for (auto w : adj[u])
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        frontier.push(w);
      }
  }
  return reached == total;
}

// A is weakly irreducible iff G_A is connected. Isolated vertices on either
// side make the tensor reducible.
inline bool is_weakly_irreducible(const RectTensor& a) {
  return is_connected(induced_bipartite(a));
}

}  // namespace rectspec
