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

// Command implementations behind the compactcore executable. Kept in a
// header so the test suite can drive them in-process.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "compactcore/compactcore.hpp"

namespace compactcore::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kDataError = 2 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string input;
  std::string algorithm = "lexdfs";
  std::size_t runs = 20;
  std::uint64_t seed = 1;
  std::size_t trials = 20;
  std::vector<std::string> windows;  // integers or "1%"
  bool mean_eccentricity = false;
  bool approximate_diameter = false;
  bool normalize = false;
  std::string out_dir = ".";
  std::string clustering;  // quality subcommand
  bool dump_visits = false;
  bool raw_profile = false;
  bool gnuplot = false;
  unsigned threads = 0;
};

struct KnownDataset {
  const char* stem;
  std::size_t nodes;
  std::size_t edges;
};

// Sizes as published for the SNAP files used in the experiments.
inline constexpr KnownDataset kKnownDatasets[] = {
    {"facebook_combined", 4039, 88234},
    {"ca-AstroPh", 18772, 198110},
    {"email-Enron", 36692, 183831},
};

inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

inline QualityOptions quality_options(const RunConfig& cfg) {
  QualityOptions q;
  if (cfg.mean_eccentricity) q.spread = PathSpread::mean_eccentricity;
  else if (cfg.approximate_diameter) q.spread = PathSpread::approximate_diameter;
  return q;
}

/// Collects the manifest and writes it however the command ends.
class Session {
 public:
  Session(std::string command, const RunConfig& cfg, std::ostream& err)
      : cfg_(cfg), err_(err), started_(std::chrono::steady_clock::now()) {
    manifest_["command"] = std::move(command);
    manifest_["config"] = {
        {"input", cfg.input},          {"algorithm", cfg.algorithm},
        {"runs", cfg.runs},            {"seed", cfg.seed},
        {"trials", cfg.trials},        {"windows", cfg.windows},
        {"mean_eccentricity", cfg.mean_eccentricity},
        {"approximate_diameter", cfg.approximate_diameter},
        {"normalize", cfg.normalize},  {"clustering", cfg.clustering},
    };
  }

  json& manifest() { return manifest_; }

  void time(const std::string& phase, const std::function<void()>& work) {
    const auto t0 = std::chrono::steady_clock::now();
    work();
    timings_[phase] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  LoadedGraph load() {
    std::ifstream in(cfg_.input, std::ios::binary);
    if (!in) throw DataError("cannot read input '" + cfg_.input + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    LoadedGraph loaded;
    time("load", [&] {
      try {
        loaded = load_edge_list(bytes);
      } catch (const ParseError& e) {
        throw DataError(cfg_.input + ": " + e.what());
      }
    });
    json dataset = {{"path", cfg_.input},
                    {"fnv1a64", fnv1a_hex(bytes)},
                    {"nodes", loaded.graph.node_count()},
                    {"edges", loaded.graph.edge_count()}};
    const std::string stem = fs::path(cfg_.input).stem().string();
    for (const KnownDataset& known : kKnownDatasets) {
      if (stem != known.stem) continue;
      const bool match = loaded.graph.node_count() == known.nodes && loaded.graph.edge_count() == known.edges;
      dataset["expected"] = {{"nodes", known.nodes}, {"edges", known.edges}, {"match", match}};
      if (!match) {
        err_ << "warning: " << stem << " expected n=" << known.nodes << " m=" << known.edges
             << ", got n=" << loaded.graph.node_count() << " m=" << loaded.graph.edge_count() << '\n';
      }
    }
    manifest_["dataset"] = dataset;
    return loaded;
  }

  std::ofstream output(const std::string& name) {
    const fs::path path = fs::path(cfg_.out_dir) / name;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    outputs_.push_back(name);
    return out;
  }

  void finish(const std::string& status, const std::string& error = {}) {
    manifest_["status"] = status;
    if (!error.empty()) manifest_["error"] = error;
    manifest_["outputs"] = outputs_;
    timings_["total"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    try {
      fs::create_directories(cfg_.out_dir);
      std::ofstream(fs::path(cfg_.out_dir) / "manifest.json", std::ios::binary) << manifest_.dump(2) << '\n';
      // Wall-clock numbers live apart from the manifest so that repeated runs
      // with the same seed produce identical files.
      std::ofstream(fs::path(cfg_.out_dir) / "timings.json", std::ios::binary) << timings_.dump(2) << '\n';
    } catch (const std::exception& e) {
      err_ << "warning: could not write manifest: " << e.what() << '\n';
    }
  }

 private:
  const RunConfig& cfg_;
  std::ostream& err_;
  json manifest_;
  json timings_ = json::object();
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point started_;
};

inline json step_json(const StepValue& s) { return {{"step", s.step}, {"value", s.value}}; }

inline void check_runs(const RunConfig& cfg, std::size_t minimum) {
  if (cfg.runs < minimum)
    throw UsageError("--runs must be at least " + std::to_string(minimum));
}

inline Dendrogram build_for(const RunConfig& cfg, const Graph& g, Session& session,
                            const std::span<const std::uint64_t> ids) {
  Dendrogram d;
  if (cfg.algorithm == "cnm") {
    if (g.edge_count() == 0) throw DataError("greedy modularity needs at least one edge");
    session.time("cnm", [&] { d = cnm_dendrogram(g); });
    return d;
  }
  std::mt19937_64 rng(cfg.seed);
  EdgeScores scores;
  session.time("lexdfs", [&] {
    RunObserver observer;
    if (cfg.dump_visits) {
      observer = [&](std::size_t i, const VisitOrder& order, const EdgeScores&) {
        std::ostringstream name;
        name << "visits/run_" << std::setw(4) << std::setfill('0') << i << ".csv";
        auto out = session.output(name.str());
        csv::write_visit_order(out, order, ids);
      };
    }
    scores = accumulate_scores(g, cfg.runs, rng, observer);
  });
  session.time("merge", [&] { d = build_dendrogram(g, scores); });
  return d;
}

inline void cmd_cluster(const RunConfig& cfg, Session& session) {
  check_runs(cfg, 1);
  const LoadedGraph loaded = session.load();
  const Graph& g = loaded.graph;
  const auto ids = std::span<const std::uint64_t>(loaded.external_ids);
  const Dendrogram d = build_for(cfg, g, session, ids);
  {
    auto out = session.output("dendrogram.csv");
    csv::write_dendrogram(out, g, d, ids);
  }
  const QualityOptions q = quality_options(cfg);
  json best = json::object();
  session.time("quality", [&] {
    const GlobalQuality compact_kind =
        cfg.normalize ? GlobalQuality::normalized_compactness : GlobalQuality::compactness;
    const StepValue by_compactness = max_quality_step(d, g, compact_kind, q);
    {
      auto out = session.output("best_compactness_clustering.csv");
      csv::write_clustering(out, d.clustering_at(by_compactness.step), ids, ids);
    }
    best["compactness"] = step_json(by_compactness);
    if (g.edge_count() > 0) {
      const StepValue by_modularity = max_quality_step(d, g, GlobalQuality::modularity, q);
      auto out = session.output("best_modularity_clustering.csv");
      csv::write_clustering(out, d.clustering_at(by_modularity.step), ids, ids);
      best["modularity"] = step_json(by_modularity);
    }
  });
  session.manifest()["result"] = {{"merge_events", d.steps()}, {"best", best}};
}

inline void cmd_quality(const RunConfig& cfg, Session& session) {
  if (cfg.clustering.empty()) throw UsageError("--clustering is required");
  const LoadedGraph loaded = session.load();
  const Graph& g = loaded.graph;
  std::ifstream in(cfg.clustering);
  if (!in) throw DataError("cannot read clustering '" + cfg.clustering + "'");
  csv::ClusteringRead read;
  try {
    read = csv::read_clustering(in, loaded.external_ids);
  } catch (const ParseError& e) {
    throw DataError(cfg.clustering + ": " + e.what());
  }
  if (!read.missing.empty()) {
    std::ostringstream msg;
    msg << read.missing.size() << " node(s) have no cluster label:";
    for (std::size_t i = 0; i < read.missing.size() && i < 20; ++i) msg << ' ' << read.missing[i];
    if (read.missing.size() > 20) msg << " ...";
    throw DataError(msg.str());
  }
  const Clustering& c = read.clustering;
  const QualityOptions q = quality_options(cfg);
  std::vector<ClusterQuality> clusters;
  session.time("quality", [&] { clusters = evaluate_clusters(g, c, q); });
  {
    auto out = session.output("cluster_quality.csv");
    csv::write_cluster_quality(out, clusters);
  }
  double compact = 0.0;
  for (const ClusterQuality& cq : clusters) compact += cq.compactness;
  const double m = static_cast<double>(g.edge_count());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double phi = nan;
  try {
    phi = conductance_clustering(g, c);
  } catch (const std::domain_error&) {
  }
  auto out = session.output("global_quality.csv");
  out << "clusters,modularity,compactness,normalized_compactness,conductance,coverage\n"
      << c.cluster_count() << ',' << csv::number(g.edge_count() ? modularity(g, c) : nan) << ','
      << csv::number(compact) << ',' << csv::number(g.edge_count() ? compact / m : nan) << ','
      << csv::number(phi) << ',' << csv::number(g.edge_count() ? coverage(g, c) : nan) << '\n';
  session.manifest()["result"] = {{"clusters", c.cluster_count()}};
}

inline std::vector<std::size_t> parse_windows(const RunConfig& cfg, std::size_t m) {
  std::vector<std::string> requested = cfg.windows;
  if (requested.empty()) requested = {"0", "20", "1%"};
  std::vector<std::size_t> out;
  for (const std::string& w : requested) {
    if (w == "1%") {
      out.push_back(one_percent_window(m));
      continue;
    }
    if (w.empty() || w.find_first_not_of("0123456789") != std::string::npos)
      throw UsageError("invalid --window '" + w + "' (non-negative integer or 1%)");
    out.push_back(std::stoull(w));
  }
  return out;
}

inline void write_gnuplot(std::ostream& out) {
  out << "set datafile separator ','\n"
         "set terminal pngcairo size 900,600\n"
         "set key autotitle columnhead\n"
         "set output 'profile_conductance.png'\n"
         "set logscale x\n"
         "set xlabel 'cluster size'\nset ylabel 'conductance'\n"
         "plot 'profile.csv' using ($1 eq 'lexdfs' ? $2 : 1/0):3 title 'lexdfs' with points, \\\n"
         "     'profile.csv' using ($1 eq 'cnm' ? $2 : 1/0):3 title 'cnm' with points\n"
         "set output 'profile_compactness.png'\n"
         "set ylabel 'compactness'\nset logscale y\n"
         "plot 'profile.csv' using ($1 eq 'lexdfs' ? $2 : 1/0):4 title 'lexdfs' with points, \\\n"
         "     'profile.csv' using ($1 eq 'cnm' ? $2 : 1/0):4 title 'cnm' with points\n"
         "unset logscale\n"
         "set xlabel 'step'\n"
         "set output 'trace_modularity.png'\nset ylabel 'modularity'\n"
         "plot 'trace.csv' using ($1 eq 'cnm' ? $2 : 1/0):3 title 'cnm' with lines, \\\n"
         "     'trace.csv' using ($1 eq 'lexdfs' ? $2 : 1/0):5:7 title 'lexdfs min/max' with filledcurves, \\\n"
         "     'trace.csv' using ($1 eq 'lexdfs' ? $2 : 1/0):6 title 'lexdfs mean' with lines\n"
         "set output 'trace_compactness.png'\nset ylabel 'compactness'\n"
         "plot 'trace.csv' using ($1 eq 'cnm' ? $2 : 1/0):4 title 'cnm' with lines, \\\n"
         "     'trace.csv' using ($1 eq 'lexdfs' ? $2 : 1/0):8:10 title 'lexdfs min/max' with filledcurves, \\\n"
         "     'trace.csv' using ($1 eq 'lexdfs' ? $2 : 1/0):9 title 'lexdfs mean' with lines\n";
}

inline void cmd_compare(const RunConfig& cfg, Session& session) {
  check_runs(cfg, 1);
  if (cfg.trials == 0) throw UsageError("--trials must be at least 1");
  const LoadedGraph loaded = session.load();
  const Graph& g = loaded.graph;
  if (g.edge_count() == 0) throw DataError("input graph has no edges");
  const QualityOptions q = quality_options(cfg);
  const AnalysisOptions analysis{q, !cfg.raw_profile};

  TrialEnvelope env;
  session.time("lexdfs_trials", [&] {
    env = repeated_trial_envelope(g, {.trials = cfg.trials, .runs = cfg.runs, .seed = cfg.seed,
                                      .quality = q, .threads = cfg.threads,
                                      .dedupe_profile = !cfg.raw_profile});
  });
  Dendrogram greedy;
  DendrogramAnalysis greedy_analysis;
  session.time("cnm", [&] { greedy = cnm_dendrogram(g); });
  session.time("cnm_quality", [&] { greedy_analysis = analyze_dendrogram(greedy, g, analysis); });

  {
    auto out = session.output("profile.csv");
    csv::write_profile_header(out);
    csv::write_profile(out, "lexdfs", env.first_profile);
    csv::write_profile(out, "cnm", greedy_analysis.profile);
  }
  {
    auto out = session.output("trace.csv");
    csv::write_trace_header(out);
    csv::write_envelope(out, "lexdfs", env.rows);
    csv::write_trace(out, "cnm", greedy_analysis.trace);
  }
  if (cfg.gnuplot) {
    auto out = session.output("plots.gp");
    write_gnuplot(out);
  }

  auto best_of = [](const std::vector<TracePoint>& trace, bool compact) {
    StepValue best{0, -std::numeric_limits<double>::infinity()};
    for (const TracePoint& p : trace) {
      const double v = compact ? p.compactness : p.modularity;
      if (v > best.value) best = {p.step, v};
    }
    return best;
  };
  auto mean_best = [&](bool compact) {
    StepValue best{0, -std::numeric_limits<double>::infinity()};
    for (const EnvelopeRow& r : env.rows) {
      const double v = compact ? r.compactness_mean : r.modularity_mean;
      if (v > best.value) best = {r.step, v};
    }
    return best;
  };
  json lex_mod = json::array(), lex_comp = json::array();
  for (const StepValue& s : env.best_modularity) lex_mod.push_back(step_json(s));
  for (const StepValue& s : env.best_compactness) lex_comp.push_back(step_json(s));
  json summary = {
      {"lexdfs",
       {{"max_modularity", step_json(mean_best(false))},
        {"max_compactness", step_json(mean_best(true))},
        {"per_trial_max_modularity", lex_mod},
        {"per_trial_max_compactness", lex_comp}}},
      {"cnm",
       {{"max_modularity", step_json(best_of(greedy_analysis.trace, false))},
        {"max_compactness", step_json(best_of(greedy_analysis.trace, true))}}},
      {"skipped_undefined_conductance",
       {{"lexdfs", env.first_profile.undefined_conductance},
        {"cnm", greedy_analysis.profile.undefined_conductance}}},
  };
  {
    auto out = session.output("summary.json");
    out << summary.dump(2) << '\n';
  }
  session.manifest()["result"] = summary;
}

inline void cmd_convergence(const RunConfig& cfg, Session& session) {
  check_runs(cfg, 2);
  const LoadedGraph loaded = session.load();
  const Graph& g = loaded.graph;
  const std::vector<std::size_t> windows = parse_windows(cfg, g.edge_count());
  ConvergenceTracker tracker(windows);
  std::mt19937_64 rng(cfg.seed);
  session.time("lexdfs", [&] {
    accumulate_scores(g, cfg.runs, rng, [&](std::size_t, const VisitOrder&, const EdgeScores& s) {
      tracker.add(edge_ranks(s.mean));
    });
  });
  {
    auto out = session.output("convergence.csv");
    csv::write_convergence(out, tracker.series());
  }
  json below = json::object();
  for (const ConvergenceSeries& s : tracker.series()) {
    json first = nullptr;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (static_cast<double>(s.values[i]) < 0.1 * static_cast<double>(g.edge_count())) {
        first = i + 1;
        break;
      }
    }
    below[std::to_string(s.window)] = first;
  }
  session.manifest()["result"] = {{"windows", windows}, {"first_run_below_10_percent", below}};
}

/// Parses arguments and dispatches; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Compact community detection by repeated LexDFS traversal", "compactcore"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--input,-i", cfg.input, "Edge-list file (SNAP format)")->required();
    sub->add_option("--out-dir,-o", cfg.out_dir, "Output directory");
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_flag("--mean-eccentricity", cfg.mean_eccentricity,
                  "Compactness over mean eccentricity instead of diameter");
    sub->add_flag("--approximate-diameter", cfg.approximate_diameter,
                  "Double-sweep diameter estimate (lower bound)");
    sub->add_flag("--normalize", cfg.normalize, "Report compactness divided by m");
  };

  auto* cluster = app.add_subcommand("cluster", "Build a dendrogram and pick the best steps");
  common(cluster);
  cluster->add_option("--algo", cfg.algorithm, "lexdfs or cnm")
      ->check(CLI::IsMember({"lexdfs", "cnm"}));
  cluster->add_option("--runs,-l", cfg.runs, "Number of LexDFS traversals");
  cluster->add_flag("--dump-visits", cfg.dump_visits, "Write each traversal's visit order");

  auto* quality = app.add_subcommand("quality", "Evaluate an external clustering");
  common(quality);
  quality->add_option("--clustering,-c", cfg.clustering, "CSV of node_id,cluster_label")->required();

  auto* compare = app.add_subcommand("compare", "LexDFS trials against greedy modularity");
  common(compare);
  compare->add_option("--runs,-l", cfg.runs, "Number of LexDFS traversals per trial");
  compare->add_option("--trials", cfg.trials, "Number of independent trials");
  compare->add_option("--threads", cfg.threads, "Concurrent trials (0: all cores)");
  compare->add_flag("--raw-profile", cfg.raw_profile, "Keep duplicate profile points");
  compare->add_flag("--gnuplot", cfg.gnuplot, "Also write a gnuplot script");

  auto* convergence = app.add_subcommand("convergence", "Edge-ordering convergence across traversals");
  common(convergence);
  convergence->add_option("--runs,-l", cfg.runs, "Number of LexDFS traversals");
  convergence->add_option("--window,-w", cfg.windows, "Window size, or 1% (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }
  if (cfg.mean_eccentricity && cfg.approximate_diameter) {
    err << "error: --mean-eccentricity and --approximate-diameter are exclusive\n";
    return kUsageError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  Session session(chosen->get_name(), cfg, err);
  try {
    if (chosen == cluster) cmd_cluster(cfg, session);
    else if (chosen == quality) cmd_quality(cfg, session);
    else if (chosen == compare) cmd_compare(cfg, session);
    else cmd_convergence(cfg, session);
  } catch (const UsageError& e) {
    session.finish("failed", e.what());
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    session.finish("failed", e.what());
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  session.finish("ok");
  out << "wrote results to " << cfg.out_dir << '\n';
  return kSuccess;
}

}  // namespace compactcore::cli
