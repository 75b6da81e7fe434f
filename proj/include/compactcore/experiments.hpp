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
#include <future>
#include <limits>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <vector>

#include "compactcore/graph.hpp"
#include "compactcore/hierarchy.hpp"
#include "compactcore/lexdfs.hpp"
#include "compactcore/quality.hpp"

namespace compactcore {

// ---------------------------------------------------------------------------
// Pipeline

/// splitmix64 step; used to derive independent per-trial seeds.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct LexDfsClustering {
  EdgeScores scores;
  Dendrogram dendrogram;
};

/// `runs` traversals followed by score-ordered agglomeration.
inline LexDfsClustering lexdfs_clustering(const Graph& g, std::size_t runs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  EdgeScores scores = accumulate_scores(g, runs, rng);
  Dendrogram d = build_dendrogram(g, scores);
  return {std::move(scores), std::move(d)};
}

// ---------------------------------------------------------------------------
// Convergence of the edge ordering

/// Window rounding of the "1%" window: 2w ~ 0.01 m.
inline std::size_t one_percent_window(std::size_t m) {
  return static_cast<std::size_t>(std::llround(0.005 * static_cast<double>(m)));
}

/// Number of edges whose rank moved by more than `window` between two
/// consecutive rankings.
inline std::size_t edges_outside_window(std::span<const std::uint32_t> before,
                                        std::span<const std::uint32_t> after, std::size_t window) {
  if (before.size() != after.size()) throw std::invalid_argument("rankings differ in length");
  std::size_t outside = 0;
  for (std::size_t e = 0; e < before.size(); ++e) {
    const std::size_t shift = before[e] > after[e] ? before[e] - after[e] : after[e] - before[e];
    outside += shift > window;
  }
  return outside;
}

struct ConvergenceSeries {
  std::size_t window = 0;
  std::vector<std::size_t> values;  // values[i - 1] = c_i for i = 1 .. l-1
};

inline ConvergenceSeries convergence_series(std::span<const std::vector<std::uint32_t>> orderings,
                                            std::int64_t window) {
  if (window < 0) throw std::invalid_argument("window must be non-negative");
  if (orderings.size() < 2) throw std::invalid_argument("need at least two orderings");
  ConvergenceSeries series{static_cast<std::size_t>(window), {}};
  for (std::size_t i = 0; i + 1 < orderings.size(); ++i)
    series.values.push_back(edges_outside_window(orderings[i], orderings[i + 1], series.window));
  return series;
}

/// Streaming variant: feed one ranking per run, keeping only the previous one.
class ConvergenceTracker {
 public:
  explicit ConvergenceTracker(std::vector<std::size_t> windows) {
    for (std::size_t w : windows) series_.push_back({w, {}});
  }

  void add(std::vector<std::uint32_t> ranking) {
    if (!previous_.empty())
      for (auto& s : series_) s.values.push_back(edges_outside_window(previous_, ranking, s.window));
    previous_ = std::move(ranking);
  }

  const std::vector<ConvergenceSeries>& series() const noexcept { return series_; }

 private:
  std::vector<std::uint32_t> previous_;
  std::vector<ConvergenceSeries> series_;
};

// ---------------------------------------------------------------------------
// Per-step traces and single-cluster profiles

struct TracePoint {
  std::size_t step = 0;
  double modularity = 0.0;
  double compactness = 0.0;
};

struct ClusterProfilePoint {
  std::size_t step = 0;
  std::size_t size = 0;
  double compactness = 0.0;
  double conductance = std::numeric_limits<double>::quiet_NaN();  // NaN when undefined
};

struct ClusterProfile {
  std::vector<ClusterProfilePoint> points;
  std::size_t undefined_conductance = 0;  // clusters whose conductance was skipped
};

struct DendrogramAnalysis {
  std::vector<TracePoint> trace;  // steps 0 .. |events|
  ClusterProfile profile;
};

struct AnalysisOptions {
  QualityOptions quality;
  // Keep only the first occurrence of each (size, compactness, conductance).
  bool dedupe_profile = true;
};

/// Single pass over the merges producing both the global quality trace and
/// the per-cluster profile. Step 0 contributes every singleton.
inline DendrogramAnalysis analyze_dendrogram(const Dendrogram& d, const Graph& g,
                                             AnalysisOptions options = {}) {
  if (d.node_count() != g.node_count()) throw std::invalid_argument("dendrogram/graph mismatch");
  DendrogramAnalysis out;
  const bool has_edges = g.edge_count() > 0;
  IncrementalQuality tracker(g, options.quality);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.trace.reserve(d.steps() + 1);
  out.trace.push_back({0, has_edges ? tracker.modularity() : nan, tracker.compactness()});

  std::set<std::tuple<std::size_t, double, double>> seen;
  auto record = [&](std::size_t step, const ClusterQuality& q) {
    if (!q.conductance_defined) ++out.profile.undefined_conductance;
    const double phi = q.conductance_defined ? q.conductance : nan;
    if (options.dedupe_profile) {
      // NaN never compares equal; key undefined conductance as -1.
      if (!seen.emplace(q.size, q.compactness, q.conductance_defined ? phi : -1.0).second) return;
    }
    out.profile.points.push_back({step, q.size, q.compactness, phi});
  };

  ClusterEvaluator singles(g, options.quality);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const NodeId one[] = {v};
    record(0, singles.evaluate(one, v));
  }
  for (const MergeEvent& ev : d.events()) {
    const ClusterQuality q = tracker.apply(ev);
    record(ev.step, q);
    out.trace.push_back({ev.step, has_edges ? tracker.modularity() : nan, tracker.compactness()});
  }
  return out;
}

inline std::vector<TracePoint> quality_trace(const Dendrogram& d, const Graph& g,
                                             QualityOptions options = {}) {
  return analyze_dendrogram(d, g, {options, true}).trace;
}

inline ClusterProfile cluster_profile(const Dendrogram& d, const Graph& g,
                                      AnalysisOptions options = {}) {
  return analyze_dendrogram(d, g, options).profile;
}

// ---------------------------------------------------------------------------
// Repeated trials

struct EnvelopeRow {
  std::size_t step = 0;
  double modularity_min = 0.0, modularity_mean = 0.0, modularity_max = 0.0;
  double compactness_min = 0.0, compactness_mean = 0.0, compactness_max = 0.0;
};

struct TrialEnvelope {
  std::vector<EnvelopeRow> rows;
  std::vector<StepValue> best_modularity;   // per trial
  std::vector<StepValue> best_compactness;  // per trial
  ClusterProfile first_profile;             // profile of trial 0
};

struct TrialOptions {
  std::size_t trials = 20;
  std::size_t runs = 20;
  std::uint64_t seed = 0;
  QualityOptions quality;
  unsigned threads = 0;  // 0: hardware concurrency
  bool dedupe_profile = true;
};

struct TrialResult {
  std::vector<TracePoint> trace;
  ClusterProfile profile;
  StepValue best_modularity;
  StepValue best_compactness;
};

inline TrialResult run_trial(const Graph& g, std::size_t runs, std::uint64_t seed,
                             QualityOptions quality, bool dedupe_profile = true) {
  const LexDfsClustering result = lexdfs_clustering(g, runs, seed);
  TrialResult out;
  DendrogramAnalysis analysis = analyze_dendrogram(result.dendrogram, g, {quality, dedupe_profile});
  out.trace = std::move(analysis.trace);
  out.profile = std::move(analysis.profile);
  out.best_modularity = {0, -std::numeric_limits<double>::infinity()};
  out.best_compactness = {0, -std::numeric_limits<double>::infinity()};
  for (const TracePoint& p : out.trace) {
    if (p.modularity > out.best_modularity.value) out.best_modularity = {p.step, p.modularity};
    if (p.compactness > out.best_compactness.value) out.best_compactness = {p.step, p.compactness};
  }
  return out;
}

/// Runs the full traversal + agglomeration pipeline `trials` times with
/// seeds derive_seed(seed, t) and aggregates the traces pointwise. Trials
/// run concurrently; aggregation is in trial order.
inline TrialEnvelope repeated_trial_envelope(const Graph& g, const TrialOptions& options) {
  if (options.trials == 0) throw std::invalid_argument("at least one trial is required");
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  std::vector<TrialResult> results(options.trials);
  for (std::size_t first = 0; first < options.trials; first += threads) {
    const std::size_t last = std::min<std::size_t>(options.trials, first + threads);
    std::vector<std::future<TrialResult>> pending;
    for (std::size_t t = first; t < last; ++t) {
      pending.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred,
                                   [&g, &options, t] {
                                     return run_trial(g, options.runs, derive_seed(options.seed, t),
                                                      options.quality, options.dedupe_profile);
                                   }));
    }
    for (std::size_t t = first; t < last; ++t) results[t] = pending[t - first].get();
  }

  TrialEnvelope env;
  const std::size_t steps = results.front().trace.size();
  env.rows.resize(steps);
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < steps; ++s) {
    EnvelopeRow& row = env.rows[s];
    row.step = s;
    row.modularity_min = row.compactness_min = inf;
    row.modularity_max = row.compactness_max = -inf;
    double mod_sum = 0.0, comp_sum = 0.0;
    for (const TrialResult& r : results) {
      const TracePoint& p = r.trace[s];
      row.modularity_min = std::min(row.modularity_min, p.modularity);
      row.modularity_max = std::max(row.modularity_max, p.modularity);
      row.compactness_min = std::min(row.compactness_min, p.compactness);
      row.compactness_max = std::max(row.compactness_max, p.compactness);
      mod_sum += p.modularity;
      comp_sum += p.compactness;
    }
    const double count = static_cast<double>(results.size());
    // Clamp so rounding in the mean never escapes [min, max].
    row.modularity_mean = std::clamp(mod_sum / count, row.modularity_min, row.modularity_max);
    row.compactness_mean = std::clamp(comp_sum / count, row.compactness_min, row.compactness_max);
  }
  for (const TrialResult& r : results) {
    env.best_modularity.push_back(r.best_modularity);
    env.best_compactness.push_back(r.best_compactness);
  }
  env.first_profile = std::move(results.front().profile);
  return env;
}

}  // namespace compactcore
