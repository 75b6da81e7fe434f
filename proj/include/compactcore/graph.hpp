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
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace compactcore {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr NodeId kInvalidNode = std::numeric_limits<NodeId>::max();

struct Edge {
  NodeId u;
  NodeId v;
};

struct Incidence {
  NodeId neighbor;
  EdgeId edge;
};

// Thrown by the edge-list reader; carries the 1-based offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Immutable undirected simple graph in CSR form.
///
/// Edge weights are optional. An unweighted graph reports weight 1 for every
/// edge so that weighted and unweighted quality evaluation coincide.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an explicit edge list. Rejects self-loops,
  /// duplicate edges (in either orientation), out-of-range endpoints and
  /// non-positive weights.
  Graph(std::size_t n, std::vector<Edge> edges, std::vector<double> weights = {})
      : n_(n), endpoints_(std::move(edges)), weights_(std::move(weights)) {
    if (n_ >= kInvalidNode) throw std::invalid_argument("too many nodes");
    if (endpoints_.size() >= std::numeric_limits<EdgeId>::max())
      throw std::invalid_argument("too many edges");
    if (!weights_.empty() && weights_.size() != endpoints_.size())
      throw std::invalid_argument("weight count does not match edge count");
    for (double w : weights_) {
      if (!(w > 0.0) || !std::isfinite(w))
        throw std::invalid_argument("edge weights must be finite and strictly positive");
    }

    offsets_.assign(n_ + 1, 0);
    for (const Edge& e : endpoints_) {
      if (e.u >= n_ || e.v >= n_) throw std::invalid_argument("edge endpoint out of range");
      if (e.u == e.v) throw std::invalid_argument("self-loops are not allowed");
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    adjacency_.resize(offsets_.back());
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (EdgeId id = 0; id < endpoints_.size(); ++id) {
      const Edge& e = endpoints_[id];
      adjacency_[cursor[e.u]++] = {e.v, id};
      adjacency_[cursor[e.v]++] = {e.u, id};
    }
    for (NodeId v = 0; v < n_; ++v) {
      auto first = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]);
      auto last = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]);
      std::sort(first, last, [](const Incidence& a, const Incidence& b) {
        return a.neighbor < b.neighbor;
      });
      if (std::adjacent_find(first, last, [](const Incidence& a, const Incidence& b) {
            return a.neighbor == b.neighbor;
          }) != last) {
        throw std::invalid_argument("duplicate edges are not allowed");
      }
    }
  }

  std::size_t node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return endpoints_.size(); }
  bool weighted() const noexcept { return !weights_.empty(); }

  std::span<const Incidence> neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  const Edge& endpoints(EdgeId e) const { return endpoints_[e]; }
  std::span<const Edge> edges() const noexcept { return endpoints_; }

  double weight(EdgeId e) const { return weights_.empty() ? 1.0 : weights_[e]; }

  /// Same topology, every weight multiplied by `factor`.
  Graph scaled(double factor) const {
    std::vector<double> w(edge_count());
    for (EdgeId e = 0; e < edge_count(); ++e) w[e] = weight(e) * factor;
    return Graph(n_, endpoints_, std::move(w));
  }

  /// Same topology with one edge weight replaced.
  Graph with_weight(EdgeId e, double w) const {
    std::vector<double> ws(edge_count());
    for (EdgeId i = 0; i < edge_count(); ++i) ws[i] = weight(i);
    ws.at(e) = w;
    return Graph(n_, endpoints_, std::move(ws));
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> endpoints_;
  std::vector<double> weights_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Incidence> adjacency_;
};

/// A graph read from an external edge list, together with the table mapping
/// dense ids back to the ids used in the file.
struct LoadedGraph {
  Graph graph;
  std::vector<std::uint64_t> external_ids;
};

/// Reads a SNAP-style edge list: whitespace separated integer pairs, one per
/// line, '#' starting a comment line. Self-loops are dropped, duplicate pairs
/// collapse to a single edge, and ids are remapped densely in order of first
/// appearance.
inline LoadedGraph load_edge_list(std::istream& in) {
  std::unordered_map<std::uint64_t, NodeId> dense;
  std::vector<std::uint64_t> external;
  std::vector<Edge> edges;
  std::unordered_map<std::uint64_t, char> seen;
  bool any_pair = false;

  auto intern = [&](std::uint64_t id) {
    auto [it, inserted] = dense.try_emplace(id, static_cast<NodeId>(external.size()));
    if (inserted) external.push_back(id);
    return it->second;
  };
  auto parse_id = [](const std::string& token, std::size_t line) {
    if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos)
      throw ParseError(line, "malformed node id '" + token + "'");
    try {
      return static_cast<std::uint64_t>(std::stoull(token));
    } catch (const std::out_of_range&) {
      throw ParseError(line, "node id out of range '" + token + "'");
    }
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string a, b, extra;
    fields >> a >> b;
    if (b.empty()) throw ParseError(lineno, "expected two node ids");
    if (fields >> extra) throw ParseError(lineno, "unexpected token '" + extra + "'");
    const std::uint64_t ea = parse_id(a, lineno);
    const std::uint64_t eb = parse_id(b, lineno);
    any_pair = true;
    if (ea == eb) continue;
    const NodeId u = intern(ea);
    const NodeId v = intern(eb);
    const std::uint64_t key = (std::uint64_t{std::min(u, v)} << 32) | std::max(u, v);
    if (!seen.emplace(key, 0).second) continue;
    edges.push_back({u, v});
  }
  if (!any_pair) throw ParseError(lineno, "empty edge list");

  const std::size_t n = external.size();
  return {Graph(n, std::move(edges)), std::move(external)};
}

inline LoadedGraph load_edge_list(const std::string& text) {
  std::istringstream in(text);
  return load_edge_list(in);
}

inline LoadedGraph load_edge_list_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_edge_list(in);
}

/// Canonical form: one "u v" line per edge with u < v, sorted. Ids are
/// written through `ids` (dense -> external) when given.
inline void write_canonical(std::ostream& out, const Graph& g,
                            std::span<const std::uint64_t> ids = {}) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> sorted;
  sorted.reserve(g.edge_count());
  for (const Edge& e : g.edges()) {
    std::uint64_t u = ids.empty() ? e.u : ids[e.u];
    std::uint64_t v = ids.empty() ? e.v : ids[e.v];
    if (u > v) std::swap(u, v);
    sorted.emplace_back(u, v);
  }
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [u, v] : sorted) out << u << ' ' << v << '\n';
}

inline std::size_t degree(const Graph& g, NodeId v) { return g.degree(v); }

inline std::size_t volume(const Graph& g, std::span<const NodeId> cluster) {
  std::size_t vol = 0;
  for (NodeId v : cluster) vol += g.degree(v);
  return vol;
}

/// Number of edges with both endpoints in `cluster`. `cluster` must not
/// contain repeated nodes.
inline std::size_t internal_edge_count(const Graph& g, std::span<const NodeId> cluster) {
  std::vector<char> member(g.node_count(), 0);
  for (NodeId v : cluster) member[v] = 1;
  std::size_t twice = 0;
  for (NodeId v : cluster)
    for (const Incidence& inc : g.neighbors(v)) twice += member[inc.neighbor];
  return twice / 2;
}

/// Connected component label per node (labels dense, in order of smallest member).
inline std::vector<std::uint32_t> connected_components(const Graph& g, std::size_t* count = nullptr) {
  std::vector<std::uint32_t> comp(g.node_count(), std::numeric_limits<std::uint32_t>::max());
  std::vector<NodeId> stack;
  std::uint32_t next = 0;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (comp[s] != std::numeric_limits<std::uint32_t>::max()) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (const Incidence& inc : g.neighbors(v)) {
        if (comp[inc.neighbor] == std::numeric_limits<std::uint32_t>::max()) {
          comp[inc.neighbor] = next;
          stack.push_back(inc.neighbor);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return comp;
}

/// Partition of the node set. Labels are arbitrary integers; clusters are
/// enumerated in ascending label order.
class Clustering {
 public:
  Clustering() = default;

  explicit Clustering(std::vector<std::uint32_t> assignment) : assignment_(std::move(assignment)) {
    labels_ = assignment_;
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
    members_.resize(labels_.size());
    cluster_of_.resize(assignment_.size());
    for (NodeId v = 0; v < assignment_.size(); ++v) {
      auto idx = static_cast<std::size_t>(
          std::lower_bound(labels_.begin(), labels_.end(), assignment_[v]) - labels_.begin());
      cluster_of_[v] = static_cast<std::uint32_t>(idx);
      members_[idx].push_back(v);
    }
  }

  static Clustering singletons(std::size_t n) {
    std::vector<std::uint32_t> a(n);
    std::iota(a.begin(), a.end(), 0u);
    return Clustering(std::move(a));
  }

  static Clustering whole(std::size_t n) { return Clustering(std::vector<std::uint32_t>(n, 0)); }

  std::size_t node_count() const noexcept { return assignment_.size(); }
  std::size_t cluster_count() const noexcept { return labels_.size(); }

  std::uint32_t label_of(NodeId v) const { return assignment_[v]; }
  /// Dense index in [0, cluster_count()) of the cluster holding `v`.
  std::uint32_t cluster_index(NodeId v) const { return cluster_of_[v]; }
  std::uint32_t label(std::size_t cluster) const { return labels_[cluster]; }
  std::span<const NodeId> members(std::size_t cluster) const { return members_[cluster]; }
  const std::vector<std::uint32_t>& assignment() const noexcept { return assignment_; }

  friend bool operator==(const Clustering& a, const Clustering& b) {
    return a.assignment_ == b.assignment_;
  }

  /// Same partition regardless of labels.
  bool same_partition(const Clustering& other) const {
    if (node_count() != other.node_count() || cluster_count() != other.cluster_count())
      return false;
    std::vector<std::uint32_t> map(cluster_count(), std::numeric_limits<std::uint32_t>::max());
    for (NodeId v = 0; v < node_count(); ++v) {
      auto& m = map[cluster_of_[v]];
      if (m == std::numeric_limits<std::uint32_t>::max()) m = other.cluster_of_[v];
      else if (m != other.cluster_of_[v]) return false;
    }
    return true;
  }

 private:
  std::vector<std::uint32_t> assignment_;
  std::vector<std::uint32_t> labels_;
  std::vector<std::uint32_t> cluster_of_;
  std::vector<std::vector<NodeId>> members_;
};

}  // namespace compactcore
