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
#include <queue>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "compactcore/graph.hpp"
#include "compactcore/hierarchy.hpp"
#include "compactcore/quality.hpp"

namespace compactcore {

namespace detail {

struct CommunityLink {
  std::int64_t edges = 0;  // edges between the two communities
  EdgeId first_edge = 0;   // smallest such edge id
};

// Candidate merge. gain = 2m * E_ab - Vol_a * Vol_b, i.e. the modularity
// change scaled by 2m^2, kept integral so that ties are exact.
struct PairGain {
  __int128 gain;
  std::uint32_t a;  // a < b
  std::uint32_t b;
};

struct PairGainLess {
  bool operator()(const PairGain& x, const PairGain& y) const {
    if (x.gain != y.gain) return x.gain < y.gain;
    return std::tie(x.a, x.b) > std::tie(y.a, y.b);
  }
};

}  // namespace detail

/// Greedy agglomerative modularity maximization in the style of Clauset,
/// Newman and Moore: start from singletons and repeatedly merge the pair of
/// adjacent communities with the largest modularity gain (ties: smallest
/// label pair). Merging continues past the modularity peak until each
/// connected component is a single community, so the full trace exists.
///
/// Community adjacency is kept in sparse per-community maps, merged
/// small-into-large; candidate pairs sit in a lazily invalidated max-heap
/// that is rebuilt when stale entries dominate.
inline Dendrogram cnm_dendrogram(const Graph& g) {
  using detail::CommunityLink;
  using detail::PairGain;
  const std::size_t n = g.node_count();
  const std::size_t m = g.edge_count();
  if (m == 0) throw std::invalid_argument("greedy modularity needs at least one edge");
  const __int128 two_m = static_cast<__int128>(2 * m);

  std::vector<std::unordered_map<std::uint32_t, CommunityLink>> links(n);
  std::vector<std::int64_t> vol(n);
  std::vector<char> alive(n, 1);
  for (NodeId v = 0; v < n; ++v) vol[v] = static_cast<std::int64_t>(g.degree(v));
  for (EdgeId e = 0; e < m; ++e) {
    const Edge& ends = g.endpoints(e);
    links[ends.u][ends.v] = {1, e};
    links[ends.v][ends.u] = {1, e};
  }

  auto gain_of = [&](std::uint32_t a, std::uint32_t b, const CommunityLink& link) {
    return two_m * link.edges - static_cast<__int128>(vol[a]) * vol[b];
  };
  auto make_pair_gain = [&](std::uint32_t a, std::uint32_t b, const CommunityLink& link) {
    return PairGain{gain_of(a, b, link), std::min(a, b), std::max(a, b)};
  };

  std::priority_queue<PairGain, std::vector<PairGain>, detail::PairGainLess> heap;
  std::size_t live_pairs = m;
  auto rebuild = [&] {
    std::vector<PairGain> entries;
    entries.reserve(live_pairs);
    for (std::uint32_t a = 0; a < n; ++a) {
      if (!alive[a]) continue;
      for (const auto& [b, link] : links[a])
        if (a < b) entries.push_back(make_pair_gain(a, b, link));
    }
    heap = decltype(heap)(detail::PairGainLess{}, std::move(entries));
  };
  rebuild();

  std::vector<MergeEvent> events;
  const double scale = 2.0 * static_cast<double>(m) * static_cast<double>(m);
  while (!heap.empty()) {
    const PairGain top = heap.top();
    heap.pop();
    if (!alive[top.a] || !alive[top.b]) continue;
    auto found = links[top.a].find(top.b);
    if (found == links[top.a].end() || gain_of(top.a, top.b, found->second) != top.gain) continue;

    const CommunityLink joined = found->second;
    std::uint32_t keep = top.a, gone = top.b;
    if (links[gone].size() > links[keep].size()) std::swap(keep, gone);

    links[keep].erase(gone);
    links[gone].erase(keep);
    --live_pairs;
    for (const auto& [k, link] : links[gone]) {
      auto& other = links[k];
      other.erase(gone);
      auto [it, inserted] = links[keep].try_emplace(k, link);
      if (!inserted) {
        it->second.edges += link.edges;
        it->second.first_edge = std::min(it->second.first_edge, link.first_edge);
        --live_pairs;
      }
      other[keep] = it->second;
    }
    std::unordered_map<std::uint32_t, CommunityLink>().swap(links[gone]);
    vol[keep] += vol[gone];
    vol[gone] = 0;
    alive[gone] = 0;

    events.push_back({events.size() + 1, joined.first_edge, gone, keep,
                      static_cast<double>(top.gain) / scale});

    for (const auto& [k, link] : links[keep]) heap.push(make_pair_gain(keep, k, link));
    if (heap.size() > 4 * live_pairs + 1024) rebuild();
  }
  return Dendrogram(n, std::move(events));
}

enum class GlobalQuality { modularity, compactness, normalized_compactness };

/// Step (smallest on ties) whose clustering maximizes `f`, evaluated
/// incrementally along the dendrogram.
inline StepValue max_quality_step(const Dendrogram& d, const Graph& g, GlobalQuality f,
                                  QualityOptions options = {}) {
  const bool need_compactness = f != GlobalQuality::modularity;
  IncrementalQuality tracker(g, options, need_compactness);
  auto value = [&] {
    switch (f) {
      case GlobalQuality::modularity:
        return tracker.modularity();
      case GlobalQuality::compactness:
        return tracker.compactness();
      case GlobalQuality::normalized_compactness:
        return g.edge_count() ? tracker.compactness() / static_cast<double>(g.edge_count()) : 0.0;
    }
    return 0.0;
  };
  StepValue best{0, value()};
  for (const MergeEvent& ev : d.events()) {
    tracker.apply(ev);
    const double v = value();
    if (v > best.value) best = {ev.step, v};
  }
  return best;
}

/// Generic form: evaluates `f(const Clustering&)` on every materialized
/// clustering. Quadratic; intended for small graphs and cross-checks.
template <class Quality>
StepValue max_quality_step(const Dendrogram& d, Quality&& f) {
  StepValue best{0, f(d.clustering_at(0))};
  for (std::size_t s = 1; s <= d.steps(); ++s) {
    const double v = f(d.clustering_at(s));
    if (v > best.value) best = {s, v};
  }
  return best;
}

}  // namespace compactcore
