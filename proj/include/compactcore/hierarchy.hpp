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

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "compactcore/graph.hpp"
#include "compactcore/lexdfs.hpp"

namespace compactcore {

/// Union-find with union by size and path compression.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0u);
  }

  std::uint32_t find(std::uint32_t x) {
    std::uint32_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const std::uint32_t up = parent_[x];
      parent_[x] = root;
      x = up;
    }
    return root;
  }

  std::size_t size_of_root(std::uint32_t root) const { return size_[root]; }

  /// Attaches root `absorbed` under root `surviving`.
  void link(std::uint32_t absorbed, std::uint32_t surviving) {
    parent_[absorbed] = surviving;
    size_[surviving] += size_[absorbed];
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::size_t> size_;
};

/// One agglomeration: the cluster labelled `absorbed` joins the cluster
/// labelled `surviving`. Labels are node ids of cluster representatives.
struct MergeEvent {
  std::size_t step = 0;
  EdgeId edge = 0;  // an edge joining the two clusters
  std::uint32_t absorbed = 0;
  std::uint32_t surviving = 0;
  double score = 0.0;  // mean edge score, or the modularity gain for greedy merges
};

/// A dendrogram step with the value some quality function takes there.
struct StepValue {
  std::size_t step = 0;
  double value = 0.0;
};

/// Ordered merge history starting from singletons. Any prefix of the events
/// materializes a clustering; replays start from checkpoints memoized every
/// ~sqrt(|events|) steps on first use.
class Dendrogram {
 public:
  Dendrogram() = default;

  Dendrogram(std::size_t n, std::vector<MergeEvent> events, std::vector<EdgeId> edge_order = {})
      : n_(n), events_(std::move(events)), edge_order_(std::move(edge_order)) {
    if (events_.size() >= std::max<std::size_t>(n_, 1))
      throw std::invalid_argument("a dendrogram holds at most n - 1 merges");
    interval_ = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(events_.size())))));

    std::vector<std::uint32_t> parent(n_);
    std::iota(parent.begin(), parent.end(), 0u);
    for (std::size_t k = 0; k < events_.size(); ++k) {
      const MergeEvent& ev = events_[k];
      if (ev.step != k + 1) throw std::invalid_argument("merge steps must be 1, 2, ...");
      if (ev.absorbed >= n_ || ev.surviving >= n_ || ev.absorbed == ev.surviving ||
          parent[ev.absorbed] != ev.absorbed || parent[ev.surviving] != ev.surviving)
        throw std::invalid_argument("merge event does not name two live clusters");
      parent[ev.absorbed] = ev.surviving;
    }
    cache_->slots.resize(events_.size() / interval_ + 1);
  }

  std::size_t node_count() const noexcept { return n_; }
  std::size_t steps() const noexcept { return events_.size(); }
  std::span<const MergeEvent> events() const noexcept { return events_; }
  std::span<const EdgeId> edge_order() const noexcept { return edge_order_; }

  /// Per-node cluster labels after the first `step` merges.
  std::vector<std::uint32_t> labels_at(std::size_t step) const {
    if (step > events_.size()) throw std::out_of_range("dendrogram step out of range");
    const std::size_t cp = step / interval_;
    std::vector<std::uint32_t> parent = checkpoint(cp);
    replay(parent, cp * interval_, step);
    return parent;
  }

  Clustering clustering_at(std::size_t step) const { return Clustering(labels_at(step)); }

 private:
  std::size_t n_ = 0;
  std::vector<MergeEvent> events_;
  std::vector<EdgeId> edge_order_;
  std::size_t interval_ = 1;

  // Labels after every interval_-th step, filled in on first use. Copies of
  // a dendrogram share the cache; its contents depend only on the events.
  struct Checkpoints {
    std::mutex mutex;
    std::vector<std::vector<std::uint32_t>> slots;
  };
  std::shared_ptr<Checkpoints> cache_ = std::make_shared<Checkpoints>();

  /// Applies events [from, to) to root labels and compresses to roots.
  void replay(std::vector<std::uint32_t>& parent, std::size_t from, std::size_t to) const {
    for (std::size_t k = from; k < to; ++k) parent[events_[k].absorbed] = events_[k].surviving;
    for (NodeId v = 0; v < n_; ++v) {
      std::uint32_t r = parent[v];
      while (parent[r] != r) r = parent[r];
      std::uint32_t x = v;
      while (parent[x] != r) {
        const std::uint32_t up = parent[x];
        parent[x] = r;
        x = up;
      }
    }
  }

  std::vector<std::uint32_t> checkpoint(std::size_t cp) const {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto& slots = cache_->slots;
    if (slots[cp].empty() && n_ > 0) {
      std::size_t base = cp;
      while (base > 0 && slots[base].empty()) --base;
      std::vector<std::uint32_t> parent;
      if (slots[base].empty()) {
        parent.resize(n_);
        std::iota(parent.begin(), parent.end(), 0u);
      } else {
        parent = slots[base];
      }
      replay(parent, base * interval_, cp * interval_);
      slots[cp] = std::move(parent);
    }
    if (n_ == 0) return {};
    return slots[cp];
  }
};

/// Processes every edge in descending mean-score order (ties by ascending
/// id) and merges the endpoint clusters whenever they differ. The larger
/// cluster survives; equal sizes keep the smaller label.
inline Dendrogram build_dendrogram(const Graph& g, const EdgeScores& scores) {
  if (scores.mean.size() != g.edge_count())
    throw std::invalid_argument("edge scores do not cover the graph");
  std::vector<EdgeId> order = descending_edge_order(scores.mean);
  DisjointSets sets(g.node_count());
  std::vector<MergeEvent> events;
  events.reserve(g.node_count() > 0 ? g.node_count() - 1 : 0);
  for (EdgeId e : order) {
    const Edge& ends = g.endpoints(e);
    std::uint32_t a = sets.find(ends.u);
    std::uint32_t b = sets.find(ends.v);
    if (a == b) continue;
    const std::size_t sa = sets.size_of_root(a);
    const std::size_t sb = sets.size_of_root(b);
    if (sa > sb || (sa == sb && a < b)) std::swap(a, b);
    // now a is absorbed, b survives
    sets.link(a, b);
    events.push_back({events.size() + 1, e, a, b, scores.mean[e]});
  }
  return Dendrogram(g.node_count(), std::move(events), std::move(order));
}

inline Clustering clustering_at(const Dendrogram& d, std::size_t step) {
  return d.clustering_at(step);
}

/// Callback receives the merge event and the member list of the newly
/// formed cluster (valid only during the call).
using MergeVisitor = std::function<void(const MergeEvent& event, std::span<const NodeId> merged)>;

/// Walks the merges in order, maintaining member lists by appending the
/// smaller list onto the larger one.
inline void for_each_merge(const Dendrogram& d, const MergeVisitor& visit) {
  std::vector<std::vector<NodeId>> members(d.node_count());
  for (NodeId v = 0; v < d.node_count(); ++v) members[v] = {v};
  for (const MergeEvent& ev : d.events()) {
    auto& keep = members[ev.surviving];
    auto& gone = members[ev.absorbed];
    if (keep.size() < gone.size()) keep.swap(gone);
    keep.insert(keep.end(), gone.begin(), gone.end());
    gone.clear();
    gone.shrink_to_fit();
    visit(ev, keep);
  }
}

}  // namespace compactcore
