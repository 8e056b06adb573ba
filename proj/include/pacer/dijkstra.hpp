#pragma once

#include <queue>
#include <vector>

#include "pacer/model.hpp"

namespace pacer {

// Single-source shortest path costs over dense indices. `reverse` follows
// in-edges, yielding costs TO src.
inline std::vector<double> dijkstra_all(const PoiMap& map, std::uint32_t src,
                                        bool reverse = false) {
  std::vector<double> dist(map.size(), kInfCost);
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0;
  pq.emplace(0.0, src);
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    const auto& nbrs = reverse ? map.in_edges(v) : map.out_edges(v);
    for (const auto& [w, c] : nbrs) {
      double nd = d + c;
      if (nd < dist[w]) {
        dist[w] = nd;
        pq.emplace(nd, w);
      }
    }
  }
  return dist;
}

// Validation oracle for the hop-label index.
inline double dijkstra_cost(const PoiMap& map, PoiId from, PoiId to) {
  std::uint32_t s = map.index_of(from);
  std::uint32_t t = map.index_of(to);
  double d = dijkstra_all(map, s)[t];
  if (!(d < kInfCost)) throw UnreachableError("no path from " + std::to_string(from) +
                                              " to " + std::to_string(to));
  return d;
}

}  // namespace pacer
