// Copyright 2026 The compactcore Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "compactcore/graph.hpp"

namespace compactcore {

inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

/// Subgraph induced by a node set, relabelled to local ids [0, k).
/// Edge lengths are 1 / weight.
struct InducedSubgraph {
  std::vector<NodeId> nodes;           // local -> global
  std::vector<std::size_t> offsets;    // CSR, size k + 1
  std::vector<std::uint32_t> targets;  // local neighbour ids
  std::vector<double> lengths;         // parallel to targets; empty when unweighted
  std::size_t internal_edges = 0;
  double internal_weight = 0.0;

  std::size_t size() const noexcept { return nodes.size(); }
  bool weighted() const noexcept { return !lengths.empty(); }
  std::size_t degree(std::uint32_t v) const { return offsets[v + 1] - offsets[v]; }
};

/// Builds induced subgraphs against a fixed graph, reusing an n-sized
/// global-to-local table between calls.
class SubgraphBuilder {
 public:
  explicit SubgraphBuilder(const Graph& g) : g_(&g), local_(g.node_count(), kUnset) {}

  void build(std::span<const NodeId> cluster, InducedSubgraph& out) {
    const Graph& g = *g_;
    const std::size_t k = cluster.size();
    out.nodes.assign(cluster.begin(), cluster.end());
    for (std::uint32_t i = 0; i < k; ++i) {
      if (local_[cluster[i]] != kUnset) {
        reset(cluster.first(i));
        throw std::invalid_argument("cluster lists a node twice");
      }
      local_[cluster[i]] = i;
    }
    out.offsets.assign(k + 1, 0);
    out.targets.clear();
    out.lengths.clear();
    out.internal_edges = 0;
    out.internal_weight = 0.0;
    const bool weighted = g.weighted();
    for (std::uint32_t i = 0; i < k; ++i) {
      for (const Incidence& inc : g.neighbors(cluster[i])) {
        const std::uint32_t j = local_[inc.neighbor];
        if (j == kUnset) continue;
        out.targets.push_back(j);
        if (weighted) out.lengths.push_back(1.0 / g.weight(inc.edge));
        if (i < j) {
          ++out.internal_edges;
          out.internal_weight += g.weight(inc.edge);
        }
      }
      out.offsets[i + 1] = out.targets.size();
    }
    reset(cluster);
  }

 private:
  static constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

  void reset(std::span<const NodeId> cluster) {
    for (NodeId v : cluster) local_[v] = kUnset;
  }

  const Graph* g_;
  std::vector<std::uint32_t> local_;
};

/// Single-source shortest path distances inside an induced subgraph.
class DistanceSolver {
 public:
  /// Fills `dist` (infinity where unreachable) and returns the eccentricity
  /// of `source`, or infinity if some node is unreachable.
  double distances(const InducedSubgraph& sub, std::uint32_t source, std::vector<double>& dist) {
    return sub.weighted() ? dijkstra(sub, source, dist) : bfs(sub, source, dist);
  }

 private:
  double bfs(const InducedSubgraph& sub, std::uint32_t source, std::vector<double>& dist) {
    const std::size_t k = sub.size();
    dist.assign(k, kInfiniteDistance);
    queue_.resize(k);
    std::size_t head = 0, tail = 0;
    dist[source] = 0.0;
    queue_[tail++] = source;
    while (head < tail) {
      const std::uint32_t v = queue_[head++];
      const double next = dist[v] + 1.0;
      for (std::size_t p = sub.offsets[v]; p < sub.offsets[v + 1]; ++p) {
        const std::uint32_t w = sub.targets[p];
        if (dist[w] == kInfiniteDistance) {
          dist[w] = next;
          queue_[tail++] = w;
        }
      }
    }
    if (tail < k) return kInfiniteDistance;
    return dist[queue_[tail - 1]];
  }

  double dijkstra(const InducedSubgraph& sub, std::uint32_t source, std::vector<double>& dist) {
    using Item = std::pair<double, std::uint32_t>;
    const std::size_t k = sub.size();
    dist.assign(k, kInfiniteDistance);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    std::size_t settled = 0;
    double ecc = 0.0;
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (d > dist[v]) continue;
      ++settled;
      ecc = std::max(ecc, d);
      for (std::size_t p = sub.offsets[v]; p < sub.offsets[v + 1]; ++p) {
        const std::uint32_t w = sub.targets[p];
        const double nd = d + sub.lengths[p];
        if (nd < dist[w]) {
          dist[w] = nd;
          heap.emplace(nd, w);
        }
      }
    }
    return settled < k ? kInfiniteDistance : ecc;
  }

  std::vector<std::uint32_t> queue_;
};

/// Exact diameter by eccentricity bounding: every BFS from a node v tightens
/// max(d(v,w), ecc(v) - d(v,w)) <= ecc(w) <= ecc(v) + d(v,w) for all w, and
/// the search stops once no node can have an eccentricity above the best
/// lower bound. Integral (unweighted) distances only.
inline double bounded_diameter(const InducedSubgraph& sub, DistanceSolver& solver,
                               std::vector<double>& dist) {
  const std::size_t k = sub.size();
  if (k <= 1) return 0.0;
  std::vector<double> lower(k, 0.0), upper(k, kInfiniteDistance);
  std::vector<std::uint32_t> candidates(k);
  for (std::uint32_t i = 0; i < k; ++i) candidates[i] = i;

  std::uint32_t source = 0;
  for (std::uint32_t i = 1; i < k; ++i)
    if (sub.degree(i) > sub.degree(source)) source = i;

  double best = 0.0;
  bool pick_upper = true;
  while (true) {
    const double ecc = solver.distances(sub, source, dist);
    if (ecc == kInfiniteDistance) return kInfiniteDistance;
    best = std::max(best, ecc);
    lower[source] = upper[source] = ecc;
    std::size_t kept = 0;
    for (std::uint32_t w : candidates) {
      lower[w] = std::max({lower[w], dist[w], ecc - dist[w]});
      upper[w] = std::min(upper[w], ecc + dist[w]);
      best = std::max(best, lower[w]);
    }
    for (std::uint32_t w : candidates)
      if (upper[w] > best) candidates[kept++] = w;
    candidates.resize(kept);
    if (candidates.empty()) return best;

    auto better = [&](std::uint32_t a, std::uint32_t b) {
      if (pick_upper) {
        if (upper[a] != upper[b]) return upper[a] > upper[b];
      } else if (lower[a] != lower[b]) {
        return lower[a] < lower[b];
      }
      if (sub.degree(a) != sub.degree(b)) return sub.degree(a) > sub.degree(b);
      return a < b;
    };
    source = candidates.front();
    for (std::uint32_t w : candidates)
      if (better(w, source)) source = w;
    pick_upper = !pick_upper;
  }
}

/// Maximum eccentricity by running a shortest-path search from every node.
inline double all_sources_diameter(const InducedSubgraph& sub, DistanceSolver& solver,
                                   std::vector<double>& dist) {
  double diam = 0.0;
  for (std::uint32_t s = 0; s < sub.size(); ++s) {
    const double ecc = solver.distances(sub, s, dist);
    if (ecc == kInfiniteDistance) return kInfiniteDistance;
    diam = std::max(diam, ecc);
  }
  return diam;
}

/// Mean eccentricity over all nodes of the subgraph.
inline double mean_eccentricity(const InducedSubgraph& sub, DistanceSolver& solver,
                                std::vector<double>& dist) {
  if (sub.size() == 0) return 0.0;
  double total = 0.0;
  for (std::uint32_t s = 0; s < sub.size(); ++s) {
    const double ecc = solver.distances(sub, s, dist);
    if (ecc == kInfiniteDistance) return kInfiniteDistance;
    total += ecc;
  }
  return total / static_cast<double>(sub.size());
}

/// Double sweep: eccentricity of the farthest node from the max-degree node.
/// A lower bound on the diameter, often tight. Approximate.
inline double double_sweep_diameter(const InducedSubgraph& sub, DistanceSolver& solver,
                                    std::vector<double>& dist) {
  if (sub.size() <= 1) return 0.0;
  std::uint32_t start = 0;
  for (std::uint32_t i = 1; i < sub.size(); ++i)
    if (sub.degree(i) > sub.degree(start)) start = i;
  const double first = solver.distances(sub, start, dist);
  if (first == kInfiniteDistance) return kInfiniteDistance;
  const auto far = static_cast<std::uint32_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
  return std::max(first, solver.distances(sub, far, dist));
}

}  // namespace compactcore
