#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace krf {

/// Undirected weighted graph in adjacency-list form.
class WeightedGraph {
 public:
  explicit WeightedGraph(std::size_t n) : adj_(n) {}

  std::size_t size() const { return adj_.size(); }

  void add_edge(std::size_t a, std::size_t b, double w) {
    if (!(w >= 0.0)) throw Error("negative or NaN edge weight");
    adj_[a].push_back({b, w});
    adj_[b].push_back({a, w});
  }

  const std::vector<std::pair<std::size_t, double>>& neighbours(std::size_t i) const { return adj_[i]; }

 private:
  std::vector<std::vector<std::pair<std::size_t, double>>> adj_;
};

/// Single-source shortest paths. Unreachable nodes keep +infinity.
inline std::vector<double> shortest_paths(const WeightedGraph& g, std::size_t source) {
  std::vector<double> dist(g.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.push({0.0, source});
  while (!queue.empty()) {
    const auto [d, i] = queue.top();
    queue.pop();
    if (d > dist[i]) continue;
    for (const auto& [j, w] : g.neighbours(i)) {
      const double nd = d + w;
      if (nd < dist[j]) {
        dist[j] = nd;
        queue.push({nd, j});
      }
    }
  }
  return dist;
}

/// Throws if any node is unreachable from `source`.
inline std::vector<double> connected_shortest_paths(const WeightedGraph& g, std::size_t source) {
  auto dist = shortest_paths(g, source);
  for (double d : dist) {
    if (d == std::numeric_limits<double>::infinity()) throw Error("disconnected graph");
  }
  return dist;
}

}  // namespace krf
