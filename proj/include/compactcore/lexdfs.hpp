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
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "compactcore/graph.hpp"

namespace compactcore {

/// Visit iteration per node: 0 while unvisited, otherwise 1-based.
struct VisitOrder {
  std::vector<std::uint32_t> visited;

  std::uint32_t operator[](NodeId v) const { return visited[v]; }
  std::size_t size() const noexcept { return visited.size(); }
};

struct LexDfsOptions {
  // Verify label monotonicity and length bounds on every prepend.
  bool check_invariants = false;
};

/// Lexicographic depth-first traversal.
///
/// Visiting the i-th node prepends i to the label of each unvisited
/// neighbour; the pending node with the lexicographically highest label is
/// visited next. Equal labels are ordered uniformly at random. When the
/// pending stack runs dry before every node is visited, the traversal resumes
/// from a uniformly random unvisited node and the iteration counter keeps
/// counting.
///
/// The object owns reusable buffers so that repeated runs on the same graph
/// do not reallocate. Not thread-safe; use one instance per thread.
class LexDfs {
 public:
  explicit LexDfs(const Graph& g, LexDfsOptions options = {})
      : g_(&g), options_(options), nodes_(g.node_count()), pool_(g.node_count()) {
    order_.visited.assign(g.node_count(), 0);
    // A label gains at most one entry per incident edge.
    std::uint64_t offset = 0;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      nodes_[v].label_offset = offset;
      offset += g.degree(v);
    }
    labels_.resize(offset);
  }

  template <class Rng>
  const VisitOrder& run(NodeId start, Rng& rng) {
    const std::size_t n = g_->node_count();
    if (start >= n) throw std::out_of_range("start node out of range");

    for (NodeId v = 0; v < n; ++v) {
      NodeState& st = nodes_[v];
      st.visited = 0;
      st.label_size = 0;
      st.in_stack = 0;
      st.pool_pos = v;
      pool_[v] = v;
    }
    top_ = kInvalidNode;
    pool_size_ = n;

    push(start);
    std::uint32_t iteration = 1;
    while (pool_size_ > 0) {
      if (top_ == kInvalidNode) {
        std::uniform_int_distribution<std::size_t> pick(0, pool_size_ - 1);
        push(pool_[pick(rng)]);
      }
      const NodeId node = pop();
      nodes_[node].visited = iteration;
      take_from_pool(node);

      batch_.clear();
      for (const Incidence& inc : g_->neighbors(node)) {
        const NodeId v = inc.neighbor;
        NodeState& st = nodes_[v];
        if (st.visited != 0) continue;
        if (st.in_stack) remove(v);
        if (options_.check_invariants) {
          if (st.label_size > 0 && labels_[st.label_offset + st.label_size - 1] >= iteration)
            throw std::logic_error("lexdfs label is not strictly decreasing");
          if (st.label_size + 1 > g_->degree(v))
            throw std::logic_error("lexdfs label longer than node degree");
        }
        labels_[st.label_offset + st.label_size++] = iteration;
        batch_.push_back(v);
      }
      if (batch_.size() > 1) {
        std::shuffle(batch_.begin(), batch_.end(), rng);
        std::stable_sort(batch_.begin(), batch_.end(), [this](NodeId a, NodeId b) {
          return label_less(stored_label(a), stored_label(b));
        });
      }
      // Ascending push leaves the highest label on top.
      for (NodeId v : batch_) push(v);
      ++iteration;
    }
    for (NodeId v = 0; v < n; ++v) order_.visited[v] = nodes_[v].visited;
    return order_;
  }

  const VisitOrder& order() const noexcept { return order_; }

  /// Label of `v` after the last run, most recent entry first.
  std::vector<std::uint32_t> label(NodeId v) const {
    const auto stored = stored_label(v);
    return {stored.rbegin(), stored.rend()};
  }

  /// Lexicographic order on labels stored oldest-entry-first. Entries are
  /// compared most-recent first; a strict prefix ranks lower.
  static bool label_less(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
    const std::size_t common = std::min(a.size(), b.size());
    for (std::size_t k = 1; k <= common; ++k) {
      const auto x = a[a.size() - k];
      const auto y = b[b.size() - k];
      if (x != y) return x < y;
    }
    return a.size() < b.size();
  }

 private:
  // Everything touched when a neighbour is examined, kept in one record so
  // that each visit costs one cache line per neighbour.
  struct NodeState {
    std::uint64_t label_offset = 0;
    std::uint32_t label_size = 0;
    std::uint32_t visited = 0;
    NodeId prev = kInvalidNode;
    NodeId next = kInvalidNode;
    std::uint32_t pool_pos = 0;
    std::uint32_t in_stack = 0;
  };

  std::span<const std::uint32_t> stored_label(NodeId v) const {
    return {labels_.data() + nodes_[v].label_offset, nodes_[v].label_size};
  }

  void push(NodeId v) {
    NodeState& st = nodes_[v];
    st.prev = kInvalidNode;
    st.next = top_;
    if (top_ != kInvalidNode) nodes_[top_].prev = v;
    top_ = v;
    st.in_stack = 1;
  }

  NodeId pop() {
    const NodeId v = top_;
    remove(v);
    return v;
  }

  void remove(NodeId v) {
    NodeState& st = nodes_[v];
    if (st.prev != kInvalidNode) nodes_[st.prev].next = st.next;
    else top_ = st.next;
    if (st.next != kInvalidNode) nodes_[st.next].prev = st.prev;
    st.in_stack = 0;
  }

  void take_from_pool(NodeId v) {
    const std::uint32_t pos = nodes_[v].pool_pos;
    const NodeId last = pool_[--pool_size_];
    pool_[pos] = last;
    nodes_[last].pool_pos = pos;
  }

  const Graph* g_;
  LexDfsOptions options_;
  VisitOrder order_;
  std::vector<NodeState> nodes_;
  std::vector<std::uint32_t> labels_;  // per-node slices, oldest entry first
  NodeId top_ = kInvalidNode;
  std::vector<NodeId> pool_;  // unvisited nodes, first pool_size_ entries
  std::size_t pool_size_ = 0;
  std::vector<NodeId> batch_;
};

template <class Rng>
VisitOrder lexdfs_run(const Graph& g, NodeId start, Rng& rng, LexDfsOptions options = {}) {
  LexDfs traversal(g, options);
  return traversal.run(start, rng);
}

/// 1 - |t_u - t_v| / m.
inline double edge_score(std::uint32_t visit_u, std::uint32_t visit_v, std::size_t m) {
  const double gap = visit_u > visit_v ? visit_u - visit_v : visit_v - visit_u;
  return 1.0 - gap / static_cast<double>(m);
}

inline double score_edge(const Graph& g, const VisitOrder& order, EdgeId e) {
  const Edge& ends = g.endpoints(e);
  if (order[ends.u] == 0 || order[ends.v] == 0)
    throw std::logic_error("edge score requested for an unvisited endpoint");
  return edge_score(order[ends.u], order[ends.v], g.edge_count());
}

/// Running mean of edge scores over completed traversals.
struct EdgeScores {
  std::vector<double> mean;
  std::size_t runs = 0;
};

/// Edges sorted by descending score, ties by ascending id.
inline std::vector<EdgeId> descending_edge_order(std::span<const double> score) {
  std::vector<EdgeId> order(score.size());
  for (EdgeId e = 0; e < order.size(); ++e) order[e] = e;
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return a < b;
  });
  return order;
}

/// 1-based rank of each edge in descending_edge_order.
inline std::vector<std::uint32_t> edge_ranks(std::span<const double> score) {
  const auto order = descending_edge_order(score);
  std::vector<std::uint32_t> rank(order.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos)
    rank[order[pos]] = static_cast<std::uint32_t>(pos + 1);
  return rank;
}

/// Called after each traversal with the 1-based run index, that run's visit
/// order and the updated running mean.
using RunObserver =
    std::function<void(std::size_t run, const VisitOrder& order, const EdgeScores& scores)>;

/// Runs `runs` traversals from uniformly random start nodes (sampled with
/// replacement) and folds each run's edge scores into the running mean with
/// mean_i = (mean_{i-1} * (i - 1) + s) / i.
template <class Rng>
EdgeScores accumulate_scores(const Graph& g, std::size_t runs, Rng& rng,
                             const RunObserver& observer = {}, LexDfsOptions options = {}) {
  if (runs == 0) throw std::invalid_argument("at least one traversal is required");
  if (g.node_count() == 0) throw std::invalid_argument("graph has no nodes");
  const std::size_t m = g.edge_count();
  EdgeScores scores;
  scores.mean.assign(m, 0.0);
  LexDfs traversal(g, options);
  std::uniform_int_distribution<NodeId> pick_start(0, static_cast<NodeId>(g.node_count() - 1));
  for (std::size_t i = 1; i <= runs; ++i) {
    const VisitOrder& order = traversal.run(pick_start(rng), rng);
    const double prior = static_cast<double>(i - 1);
    const double count = static_cast<double>(i);
    for (EdgeId e = 0; e < m; ++e) {
      const Edge& ends = g.endpoints(e);
      const double s = edge_score(order[ends.u], order[ends.v], m);
      scores.mean[e] = (scores.mean[e] * prior + s) / count;
    }
    scores.runs = i;
    if (observer) observer(i, order, scores);
  }
  return scores;
}

struct ScoreHistory {
  EdgeScores scores;
  // orderings[i][e]: rank of edge e after run i + 1.
  std::vector<std::vector<std::uint32_t>> orderings;
};

/// accumulate_scores that also keeps the descending-score edge ranking after
/// every run. Memory grows as runs * m.
template <class Rng>
ScoreHistory accumulate_scores_with_history(const Graph& g, std::size_t runs, Rng& rng) {
  ScoreHistory history;
  history.orderings.reserve(runs);
  history.scores = accumulate_scores(g, runs, rng, [&](std::size_t, const VisitOrder&,
                                                       const EdgeScores& s) {
    history.orderings.push_back(edge_ranks(s.mean));
  });
  return history;
}

}  // namespace compactcore
