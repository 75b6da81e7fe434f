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
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "compactcore/diameter.hpp"
#include "compactcore/graph.hpp"
#include "compactcore/hierarchy.hpp"

namespace compactcore {

/// How path length inside a cluster is summarized for compactness.
enum class PathSpread {
  diameter,              // exact
  mean_eccentricity,     // exact, all sources
  approximate_diameter,  // double sweep lower bound
};

struct QualityOptions {
  PathSpread spread = PathSpread::diameter;
};

struct ClusterQuality {
  std::uint32_t label = 0;
  std::size_t size = 0;
  std::size_t internal_edges = 0;
  double internal_weight = 0.0;
  std::size_t volume = 0;
  std::size_t cut = 0;
  double diameter = 0.0;  // or the configured spread; infinite if disconnected
  double compactness = 0.0;
  double conductance = std::numeric_limits<double>::quiet_NaN();
  bool conductance_defined = false;
  bool connected = true;
};

/// Internal weight over spread; zero for edgeless or disconnected clusters.
inline double compactness_value(std::size_t internal_edges, double internal_weight, double spread) {
  if (internal_edges == 0 || spread == kInfiniteDistance || spread <= 0.0) return 0.0;
  return internal_weight / spread;
}

/// Per-cluster evaluation with reusable scratch space. One instance per thread.
class ClusterEvaluator {
 public:
  explicit ClusterEvaluator(const Graph& g, QualityOptions options = {})
      : g_(&g), options_(options), builder_(g) {}

  const Graph& graph() const noexcept { return *g_; }
  const QualityOptions& options() const noexcept { return options_; }

  /// Diameter of the induced subgraph (hop count, or sum of 1/w when
  /// weighted); infinity when disconnected.
  double diameter(std::span<const NodeId> cluster) {
    if (cluster.empty()) throw std::invalid_argument("diameter of an empty cluster");
    builder_.build(cluster, sub_);
    return exact_diameter();
  }

  ClusterQuality evaluate(std::span<const NodeId> cluster, std::uint32_t label = 0) {
    if (cluster.empty()) throw std::invalid_argument("cannot evaluate an empty cluster");
    builder_.build(cluster, sub_);
    ClusterQuality q;
    q.label = label;
    q.size = cluster.size();
    q.internal_edges = sub_.internal_edges;
    q.internal_weight = sub_.internal_weight;
    q.volume = volume(*g_, cluster);
    q.cut = q.volume - 2 * q.internal_edges;
    q.diameter = spread();
    q.connected = q.diameter != kInfiniteDistance;
    q.compactness = compactness_value(q.internal_edges, q.internal_weight, q.diameter);
    const std::size_t two_m = 2 * g_->edge_count();
    const std::size_t denom = std::min(q.volume, two_m - q.volume);
    if (denom > 0) {
      q.conductance = static_cast<double>(q.cut) / static_cast<double>(denom);
      q.conductance_defined = true;
    }
    return q;
  }

 private:
  double exact_diameter() {
    if (options_.spread == PathSpread::approximate_diameter)
      return double_sweep_diameter(sub_, solver_, dist_);
    if (sub_.weighted()) return all_sources_diameter(sub_, solver_, dist_);
    return bounded_diameter(sub_, solver_, dist_);
  }

  double spread() {
    if (options_.spread == PathSpread::mean_eccentricity)
      return mean_eccentricity(sub_, solver_, dist_);
    return exact_diameter();
  }

  const Graph* g_;
  QualityOptions options_;
  SubgraphBuilder builder_;
  InducedSubgraph sub_;
  DistanceSolver solver_;
  std::vector<double> dist_;
};

inline double cluster_diameter(const Graph& g, std::span<const NodeId> cluster,
                               QualityOptions options = {}) {
  ClusterEvaluator eval(g, options);
  return eval.diameter(cluster);
}

inline double compactness_cluster(const Graph& g, std::span<const NodeId> cluster,
                                  QualityOptions options = {}) {
  ClusterEvaluator eval(g, options);
  return eval.evaluate(cluster).compactness;
}

/// One ClusterQuality per cluster, in ascending label order.
inline std::vector<ClusterQuality> evaluate_clusters(const Graph& g, const Clustering& c,
                                                     QualityOptions options = {}) {
  ClusterEvaluator eval(g, options);
  std::vector<ClusterQuality> out;
  out.reserve(c.cluster_count());
  for (std::size_t k = 0; k < c.cluster_count(); ++k) out.push_back(eval.evaluate(c.members(k), c.label(k)));
  return out;
}

inline double compactness_clustering(const Graph& g, const Clustering& c,
                                     QualityOptions options = {}, bool normalized = false) {
  ClusterEvaluator eval(g, options);
  double total = 0.0;
  for (std::size_t k = 0; k < c.cluster_count(); ++k) total += eval.evaluate(c.members(k)).compactness;
  if (normalized && g.edge_count() > 0) total /= static_cast<double>(g.edge_count());
  return total;
}

namespace detail {

struct ClusterCounts {
  std::vector<std::size_t> internal;
  std::vector<std::size_t> volume;
};

inline ClusterCounts count_by_cluster(const Graph& g, const Clustering& c) {
  if (c.node_count() != g.node_count())
    throw std::invalid_argument("clustering does not cover the graph");
  ClusterCounts counts{std::vector<std::size_t>(c.cluster_count(), 0),
                       std::vector<std::size_t>(c.cluster_count(), 0)};
  for (NodeId v = 0; v < g.node_count(); ++v) counts.volume[c.cluster_index(v)] += g.degree(v);
  for (const Edge& e : g.edges()) {
    const auto cu = c.cluster_index(e.u);
    if (cu == c.cluster_index(e.v)) ++counts.internal[cu];
  }
  return counts;
}

}  // namespace detail

/// Sum over clusters of E(c)/m - (Vol(c)/2m)^2.
inline double modularity(const Graph& g, const Clustering& c) {
  const std::size_t m = g.edge_count();
  if (m == 0) throw std::domain_error("modularity is undefined on an edgeless graph");
  const auto counts = detail::count_by_cluster(g, c);
  const double md = static_cast<double>(m);
  double q = 0.0;
  for (std::size_t k = 0; k < c.cluster_count(); ++k) {
    const double share = static_cast<double>(counts.volume[k]) / (2.0 * md);
    q += static_cast<double>(counts.internal[k]) / md - share * share;
  }
  return q;
}

/// Fraction of edges that fall inside clusters.
inline double coverage(const Graph& g, const Clustering& c) {
  const std::size_t m = g.edge_count();
  if (m == 0) throw std::domain_error("coverage is undefined on an edgeless graph");
  const auto counts = detail::count_by_cluster(g, c);
  std::size_t inside = 0;
  for (std::size_t e : counts.internal) inside += e;
  return static_cast<double>(inside) / static_cast<double>(m);
}

/// Cut edges over min(Vol(c), 2m - Vol(c)). Throws std::domain_error when
/// that denominator is zero.
inline double conductance_cluster(const Graph& g, std::span<const NodeId> cluster) {
  const std::size_t vol = volume(g, cluster);
  const std::size_t two_m = 2 * g.edge_count();
  const std::size_t denom = std::min(vol, two_m - vol);
  if (denom == 0) throw std::domain_error("conductance undefined: zero-volume side");
  const std::size_t cut = vol - 2 * internal_edge_count(g, cluster);
  return static_cast<double>(cut) / static_cast<double>(denom);
}

/// Minimum cluster conductance.
inline double conductance_clustering(const Graph& g, const Clustering& c) {
  const auto counts = detail::count_by_cluster(g, c);
  const std::size_t two_m = 2 * g.edge_count();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < c.cluster_count(); ++k) {
    const std::size_t vol = counts.volume[k];
    const std::size_t denom = std::min(vol, two_m - vol);
    if (denom == 0)
      throw std::domain_error("conductance undefined for cluster " + std::to_string(c.label(k)));
    const double phi = static_cast<double>(vol - 2 * counts.internal[k]) / static_cast<double>(denom);
    best = std::min(best, phi);
  }
  return best;
}

/// Outcome of check_axiom_properties; `violations` is empty when every check held.
struct AxiomReport {
  std::size_t checks = 0;
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// Verifies on concrete instances that compactness
///  (a) scales by alpha^2 per cluster when all weights scale by alpha, and
///      keeps the ordering (and argmax) of the given clusterings;
///  (b) is additive over disjoint cluster sets, each cluster's term being
///      unaffected by weights of edges outside that cluster;
///  (c) does not decrease when an intra-cluster edge weight is raised.
/// `max_raised_edges` caps the number of edges tried per clustering in (c).
inline AxiomReport check_axiom_properties(const Graph& g, std::span<const Clustering> clusterings,
                                          double alpha, std::size_t max_raised_edges = 64) {
  if (!(alpha > 0.0)) throw std::invalid_argument("scale factor must be positive");
  AxiomReport report;
  auto fail = [&](const std::string& what) { report.violations.push_back(what); };
  auto close = [](double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
  };
  constexpr double kRel = 1e-9;

  const Graph scaled = g.scaled(alpha);
  ClusterEvaluator base_eval(g), scaled_eval(scaled);

  std::vector<double> totals, scaled_totals;
  for (std::size_t ci = 0; ci < clusterings.size(); ++ci) {
    const Clustering& c = clusterings[ci];
    double total = 0.0, scaled_total = 0.0;
    std::vector<double> terms(c.cluster_count());
    for (std::size_t k = 0; k < c.cluster_count(); ++k) {
      terms[k] = base_eval.evaluate(c.members(k)).compactness;
      const double s = scaled_eval.evaluate(c.members(k)).compactness;
      ++report.checks;
      if (!close(s, alpha * alpha * terms[k], kRel)) {
        std::ostringstream msg;
        msg << "scale: clustering " << ci << " cluster " << c.label(k) << " L=" << terms[k]
            << " scaled L=" << s;
        fail(msg.str());
      }
      total += terms[k];
      scaled_total += s;
    }
    totals.push_back(total);
    scaled_totals.push_back(scaled_total);

    // (b) additivity over the even / odd cluster halves, with weights of
    // edges outside the first half perturbed.
    double first = 0.0, second = 0.0;
    std::vector<char> in_first(g.node_count(), 0);
    for (std::size_t k = 0; k < c.cluster_count(); ++k) {
      if (k % 2 == 0) {
        first += terms[k];
        for (NodeId v : c.members(k)) in_first[v] = 1;
      } else {
        second += terms[k];
      }
    }
    ++report.checks;
    if (!close(first + second, total, 1e-12)) fail("locality: halves do not sum to the total");
    std::vector<double> perturbed(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      const Edge& ends = g.endpoints(e);
      const bool inside_first = in_first[ends.u] && in_first[ends.v] &&
                                c.cluster_index(ends.u) == c.cluster_index(ends.v);
      perturbed[e] = inside_first ? g.weight(e) : g.weight(e) * 1.75 + 0.5;
    }
    const Graph other(g.node_count(), std::vector<Edge>(g.edges().begin(), g.edges().end()),
                      std::move(perturbed));
    ClusterEvaluator other_eval(other);
    for (std::size_t k = 0; k < c.cluster_count(); k += 2) {
      ++report.checks;
      if (other_eval.evaluate(c.members(k)).compactness != terms[k])
        fail("locality: cluster " + std::to_string(c.label(k)) +
             " changed when only outside edges changed");
    }

    // (c) raising one intra-cluster edge weight.
    std::size_t tried = 0;
    for (EdgeId e = 0; e < g.edge_count() && tried < max_raised_edges; ++e) {
      const Edge& ends = g.endpoints(e);
      const auto k = c.cluster_index(ends.u);
      if (k != c.cluster_index(ends.v)) continue;
      ++tried;
      ++report.checks;
      const Graph raised = g.with_weight(e, g.weight(e) * 1.5 + 0.25);
      ClusterEvaluator raised_eval(raised);
      const double after = raised_eval.evaluate(c.members(k)).compactness;
      if (after < terms[k]) {
        std::ostringstream msg;
        msg << "monotonicity: raising edge " << e << " lowered L from " << terms[k] << " to "
            << after;
        fail(msg.str());
      }
    }
  }

  // (a) ordering of whole clusterings survives scaling.
  for (std::size_t i = 0; i < totals.size(); ++i) {
    for (std::size_t j = 0; j < totals.size(); ++j) {
      if (totals[i] > totals[j] && !close(totals[i], totals[j], kRel)) {
        ++report.checks;
        if (!(scaled_totals[i] > scaled_totals[j]))
          fail("scale: ordering of clusterings " + std::to_string(i) + " and " +
               std::to_string(j) + " flipped");
      }
    }
  }
  if (!totals.empty()) {
    ++report.checks;
    const auto best = std::max_element(totals.begin(), totals.end()) - totals.begin();
    const double scaled_best = *std::max_element(scaled_totals.begin(), scaled_totals.end());
    if (!close(scaled_totals[static_cast<std::size_t>(best)], scaled_best, kRel))
      fail("scale: argmax clustering changed");
  }
  return report;
}

/// Global modularity and compactness maintained across merges. Each merge
/// recomputes only the merged cluster's terms. The modularity sums are kept
/// in integers, so the value is exact up to the final division.
class IncrementalQuality {
 public:
  explicit IncrementalQuality(const Graph& g, QualityOptions options = {}, bool track_compactness = true)
      : g_(&g),
        eval_(g, options),
        track_compactness_(track_compactness),
        label_of_(g.node_count()),
        members_(g.node_count()),
        internal_(g.node_count(), 0),
        volume_(g.node_count(), 0),
        compactness_(g.node_count(), 0.0) {
    for (NodeId v = 0; v < g.node_count(); ++v) {
      label_of_[v] = v;
      members_[v] = {v};
      volume_[v] = g.degree(v);
      volume_sq_ += static_cast<unsigned __int128>(volume_[v]) * volume_[v];
    }
  }

  /// Applies one merge and returns the merged cluster's quality.
  ClusterQuality apply(const MergeEvent& ev) {
    const std::uint32_t a = ev.absorbed, b = ev.surviving;
    if (label_of_[a] != a || label_of_[b] != b || a == b)
      throw std::invalid_argument("merge event does not name two live clusters");
    auto& small = members_[a].size() <= members_[b].size() ? members_[a] : members_[b];
    const std::uint32_t other = &small == &members_[a] ? b : a;
    std::size_t cross = 0;
    for (NodeId v : small)
      for (const Incidence& inc : g_->neighbors(v)) cross += label_of_[inc.neighbor] == other;

    auto& keep = members_[b];
    auto& gone = members_[a];
    for (NodeId v : gone) label_of_[v] = b;
    if (keep.size() < gone.size()) keep.swap(gone);
    keep.insert(keep.end(), gone.begin(), gone.end());
    std::vector<NodeId>().swap(gone);

    internal_sum_ += cross;
    const std::size_t merged_internal = internal_[a] + internal_[b] + cross;
    const std::size_t merged_volume = volume_[a] + volume_[b];
    volume_sq_ -= static_cast<unsigned __int128>(volume_[a]) * volume_[a];
    volume_sq_ -= static_cast<unsigned __int128>(volume_[b]) * volume_[b];
    volume_sq_ += static_cast<unsigned __int128>(merged_volume) * merged_volume;

    ClusterQuality q;
    if (track_compactness_) {
      q = eval_.evaluate(keep, b);
      if (q.internal_edges != merged_internal)
        throw std::logic_error("incremental internal edge count diverged");
      compactness_sum_ += q.compactness - compactness_[a] - compactness_[b];
    } else {
      q.label = b;
      q.size = keep.size();
      q.internal_edges = merged_internal;
      q.internal_weight = static_cast<double>(merged_internal);
      q.volume = merged_volume;
      q.cut = merged_volume - 2 * merged_internal;
      const std::size_t two_m = 2 * g_->edge_count();
      const std::size_t denom = std::min(merged_volume, two_m - merged_volume);
      if (denom > 0) {
        q.conductance = static_cast<double>(q.cut) / static_cast<double>(denom);
        q.conductance_defined = true;
      }
    }
    internal_[b] = merged_internal;
    volume_[b] = merged_volume;
    compactness_[b] = q.compactness;
    internal_[a] = 0;
    volume_[a] = 0;
    compactness_[a] = 0.0;
    ++step_;
    return q;
  }

  std::size_t step() const noexcept { return step_; }

  double modularity() const {
    const std::size_t m = g_->edge_count();
    if (m == 0) throw std::domain_error("modularity is undefined on an edgeless graph");
    const double md = static_cast<double>(m);
    return static_cast<double>(internal_sum_) / md -
           static_cast<double>(volume_sq_) / (4.0 * md * md);
  }

  double compactness() const noexcept { return compactness_sum_; }

  std::span<const NodeId> members(std::uint32_t label) const { return members_[label]; }

 private:
  const Graph* g_;
  ClusterEvaluator eval_;
  bool track_compactness_;
  std::vector<std::uint32_t> label_of_;
  std::vector<std::vector<NodeId>> members_;
  std::vector<std::size_t> internal_;
  std::vector<std::size_t> volume_;
  std::vector<double> compactness_;
  std::size_t internal_sum_ = 0;
  unsigned __int128 volume_sq_ = 0;
  double compactness_sum_ = 0.0;
  std::size_t step_ = 0;
};

}  // namespace compactcore
