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
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "compactcore/experiments.hpp"
#include "compactcore/graph.hpp"
#include "compactcore/hierarchy.hpp"
#include "compactcore/lexdfs.hpp"
#include "compactcore/quality.hpp"

namespace compactcore::csv {

// Node ids are written through `ids` (dense id -> external id) when given.
inline std::uint64_t external(std::span<const std::uint64_t> ids, NodeId v) {
  return ids.empty() ? v : ids[v];
}

/// Shortest round-trip representation; "nan"/"inf" for non-finite values.
inline std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return out.str();
}

inline void write_dendrogram(std::ostream& out, const Graph& g, const Dendrogram& d,
                             std::span<const std::uint64_t> ids = {}) {
  out << "step,edge_u,edge_v,score\n";
  for (const MergeEvent& ev : d.events()) {
    const Edge& e = g.endpoints(ev.edge);
    out << ev.step << ',' << external(ids, e.u) << ',' << external(ids, e.v) << ','
        << number(ev.score) << '\n';
  }
}

/// `label_ids` translates cluster labels; pass the node table when labels
/// are representative node ids (as in dendrogram clusterings).
inline void write_clustering(std::ostream& out, const Clustering& c,
                             std::span<const std::uint64_t> ids = {},
                             std::span<const std::uint64_t> label_ids = {}) {
  out << "node_id,cluster_label\n";
  for (NodeId v = 0; v < c.node_count(); ++v)
    out << external(ids, v) << ',' << external(label_ids, c.label_of(v)) << '\n';
}

inline void write_visit_order(std::ostream& out, const VisitOrder& order,
                              std::span<const std::uint64_t> ids = {}) {
  out << "node_id,visit_iteration\n";
  for (NodeId v = 0; v < order.size(); ++v) out << external(ids, v) << ',' << order[v] << '\n';
}

inline void write_cluster_quality(std::ostream& out, std::span<const ClusterQuality> clusters,
                                  std::span<const std::uint64_t> label_ids = {}) {
  out << "cluster_label,size,internal_edges,volume,cut,diameter,compactness,conductance\n";
  for (const ClusterQuality& q : clusters) {
    out << external(label_ids, q.label) << ',' << q.size << ',' << q.internal_edges << ',' << q.volume
        << ',' << q.cut << ',' << number(q.diameter) << ',' << number(q.compactness) << ','
        << (q.conductance_defined ? number(q.conductance) : std::string("nan")) << '\n';
  }
}

inline void write_convergence(std::ostream& out, std::span<const ConvergenceSeries> series) {
  out << "run_index,w,c_i\n";
  for (const ConvergenceSeries& s : series)
    for (std::size_t i = 0; i < s.values.size(); ++i)
      out << i + 1 << ',' << s.window << ',' << s.values[i] << '\n';
}

inline void write_profile_header(std::ostream& out) {
  out << "algorithm,size,conductance,compactness\n";
}

inline void write_profile(std::ostream& out, const std::string& algorithm, const ClusterProfile& p) {
  for (const ClusterProfilePoint& pt : p.points)
    out << algorithm << ',' << pt.size << ',' << number(pt.conductance) << ','
        << number(pt.compactness) << '\n';
}

inline void write_trace_header(std::ostream& out) {
  out << "algorithm,step,modularity,compactness,modularity_min,modularity_mean,modularity_max,"
         "compactness_min,compactness_mean,compactness_max\n";
}

inline void write_trace(std::ostream& out, const std::string& algorithm,
                        std::span<const TracePoint> trace) {
  for (const TracePoint& p : trace) {
    out << algorithm << ',' << p.step << ',' << number(p.modularity) << ','
        << number(p.compactness) << ",,,,,,\n";
  }
}

inline void write_envelope(std::ostream& out, const std::string& algorithm,
                           std::span<const EnvelopeRow> rows) {
  for (const EnvelopeRow& r : rows) {
    out << algorithm << ',' << r.step << ',' << number(r.modularity_mean) << ','
        << number(r.compactness_mean) << ',' << number(r.modularity_min) << ','
        << number(r.modularity_mean) << ',' << number(r.modularity_max) << ','
        << number(r.compactness_min) << ',' << number(r.compactness_mean) << ','
        << number(r.compactness_max) << '\n';
  }
}

/// Result of reading a clustering file against a loaded graph.
struct ClusteringRead {
  Clustering clustering;
  std::vector<std::uint64_t> missing;  // external ids with no label
};

/// Reads "node_id,cluster_label" rows (an optional header line and '#'
/// comments are skipped; commas or whitespace separate the fields). Node ids
/// are external ids, resolved through `ids`.
inline ClusteringRead read_clustering(std::istream& in, std::span<const std::uint64_t> ids) {
  std::unordered_map<std::uint64_t, NodeId> dense;
  for (NodeId v = 0; v < ids.size(); ++v) dense.emplace(ids[v], v);
  constexpr auto kNone = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> label(ids.size(), kNone);

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (char& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t' || ch == '\r') ch = ' ';
    std::istringstream fields(line);
    std::string a, b;
    if (!(fields >> a) || a[0] == '#') continue;
    if (!(fields >> b)) throw ParseError(lineno, "expected node id and cluster label");
    const bool numeric = a.find_first_not_of("0123456789") == std::string::npos &&
                         b.find_first_not_of("0123456789") == std::string::npos;
    if (!numeric) {
      if (lineno == 1) continue;  // header
      throw ParseError(lineno, "malformed clustering row");
    }
    const auto node = std::stoull(a);
    const auto it = dense.find(node);
    if (it == dense.end()) throw ParseError(lineno, "unknown node id " + a);
    label[it->second] = std::stoull(b);
  }

  // Labels are kept as given when they fit, otherwise renumbered densely.
  ClusteringRead out;
  bool fits = true;
  for (std::uint64_t l : label)
    if (l != kNone && l >= std::numeric_limits<std::uint32_t>::max()) fits = false;
  std::unordered_map<std::uint64_t, std::uint32_t> compact;
  std::vector<std::uint32_t> assignment(ids.size());
  for (NodeId v = 0; v < ids.size(); ++v) {
    if (label[v] == kNone) {
      out.missing.push_back(ids[v]);
      continue;
    }
    if (fits) {
      assignment[v] = static_cast<std::uint32_t>(label[v]);
    } else {
      auto [it, inserted] =
          compact.try_emplace(label[v], static_cast<std::uint32_t>(compact.size()));
      assignment[v] = it->second;
    }
  }
  if (out.missing.empty()) out.clustering = Clustering(std::move(assignment));
  return out;
}

}  // namespace compactcore::csv
