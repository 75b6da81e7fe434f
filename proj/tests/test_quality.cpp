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

#include "compactcore/quality.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"

namespace compactcore {
namespace {

using testing::two_triangles_bridge;

const std::vector<NodeId> kA{0, 1, 2};
const std::vector<NodeId> kB{3, 4, 5};
const Clustering kAB({0, 0, 0, 1, 1, 1});

TEST(ClusterDiameter, Basics) {
  const Graph p5 = testing::path_graph(5);
  EXPECT_EQ(cluster_diameter(p5, std::vector<NodeId>{2}), 0.0);
  EXPECT_EQ(cluster_diameter(p5, std::vector<NodeId>{0, 1, 2, 3, 4}), 4.0);
  EXPECT_EQ(cluster_diameter(p5, std::vector<NodeId>{0, 1, 3}), kInfiniteDistance);
  EXPECT_THROW(cluster_diameter(p5, std::vector<NodeId>{}), std::invalid_argument);
  EXPECT_THROW(cluster_diameter(p5, std::vector<NodeId>{1, 1}), std::invalid_argument);

  const Graph weighted(3, {{0, 1}, {1, 2}, {0, 2}}, {2.0, 2.0, 2.0});
  EXPECT_DOUBLE_EQ(cluster_diameter(weighted, std::vector<NodeId>{0, 1, 2}), 0.5);
}

TEST(ClusterDiameter, InducedSubgraphOnly) {
  // 0-1-2 plus shortcut 0-3-2 through a node outside the cluster.
  const Graph g(4, {{0, 1}, {1, 2}, {0, 3}, {3, 2}});
  EXPECT_EQ(cluster_diameter(g, std::vector<NodeId>{0, 1, 2}), 2.0);
  EXPECT_EQ(cluster_diameter(g, std::vector<NodeId>{0, 2, 3}), 2.0);
  EXPECT_EQ(cluster_diameter(g, std::vector<NodeId>{0, 2}), kInfiniteDistance);
}

TEST(ClusterDiameter, BoundedSearchMatchesOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 150; ++trial) {
    const double p = 0.02 + 0.01 * (trial % 30);
    const Graph g = testing::random_graph(35, p, rng);
    const auto assignment = testing::random_assignment(35, 1 + trial % 3, rng);
    for (const auto& grp : testing::groups_of(assignment))
      EXPECT_EQ(cluster_diameter(g, grp), testing::oracle_diameter(g, grp));
  }
}

TEST(ClusterDiameter, ApproximateIsALowerBound) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 50; ++trial) {
    const Graph g = testing::random_cyclic_graph(30, 0.05, rng);
    std::vector<NodeId> all(30);
    for (NodeId v = 0; v < 30; ++v) all[v] = v;
    const double exact = cluster_diameter(g, all);
    const double approx = cluster_diameter(g, all, {PathSpread::approximate_diameter});
    EXPECT_LE(approx, exact);
    EXPECT_GE(approx, exact / 2);
  }
}

TEST(Compactness, ClusterValues) {
  const Graph tri = testing::triangle();
  EXPECT_DOUBLE_EQ(compactness_cluster(tri, kA), 3.0);
  const Graph p3 = testing::path_graph(3);
  EXPECT_DOUBLE_EQ(compactness_cluster(p3, std::vector<NodeId>{0, 1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(compactness_cluster(p3, std::vector<NodeId>{1}), 0.0);
  for (std::size_t n = 2; n <= 7; ++n) {
    std::vector<NodeId> all(n);
    for (NodeId v = 0; v < n; ++v) all[v] = v;
    EXPECT_DOUBLE_EQ(compactness_cluster(testing::clique(n), all), n * (n - 1) / 2.0);
  }
}

TEST(Compactness, DisconnectedClusterScoresZero) {
  const Graph g(4, {{0, 1}, {2, 3}});
  ClusterEvaluator eval(g);
  const ClusterQuality q = eval.evaluate(std::vector<NodeId>{0, 1, 2, 3});
  EXPECT_FALSE(q.connected);
  EXPECT_EQ(q.compactness, 0.0);
  EXPECT_EQ(q.internal_edges, 2u);
}

TEST(Compactness, CliqueIsMaximalAmongAllFiveNodeGraphs) {
  // Enumerates all 2^10 graphs on 5 labelled nodes.
  std::vector<Edge> pairs;
  for (NodeId u = 0; u < 5; ++u)
    for (NodeId v = u + 1; v < 5; ++v) pairs.push_back({u, v});
  const std::vector<NodeId> all{0, 1, 2, 3, 4};
  double best = 0.0;
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if (mask & (1u << i)) edges.push_back(pairs[i]);
    const double l = compactness_cluster(Graph(5, edges), all);
    EXPECT_DOUBLE_EQ(l, testing::oracle_compactness(Graph(5, edges), all));
    if (l > best) {
      best = l;
      best_mask = mask;
    }
  }
  EXPECT_EQ(best_mask, (1u << pairs.size()) - 1);
  EXPECT_DOUBLE_EQ(best, 10.0);
}

TEST(Compactness, ClusteringTotals) {
  const Graph g = two_triangles_bridge();
  EXPECT_EQ(compactness_clustering(g, Clustering::singletons(6)), 0.0);
  EXPECT_DOUBLE_EQ(compactness_clustering(g, kAB), 6.0);
  EXPECT_DOUBLE_EQ(compactness_clustering(g, kAB, {}, true), 6.0 / 7.0);
  EXPECT_DOUBLE_EQ(compactness_clustering(g, Clustering::whole(6)), 7.0 / 3.0);  // diameter 0-2-3-5

  const Graph disjoint(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
  EXPECT_DOUBLE_EQ(compactness_clustering(disjoint, kAB), 6.0);
}

TEST(Compactness, MeanEccentricityVariant) {
  const Graph p3 = testing::path_graph(3);
  const std::vector<NodeId> all{0, 1, 2};
  EXPECT_DOUBLE_EQ(compactness_cluster(p3, all, {PathSpread::mean_eccentricity}), 2.0 / (5.0 / 3.0));
  const Graph tri = testing::triangle();
  EXPECT_DOUBLE_EQ(compactness_cluster(tri, all, {PathSpread::mean_eccentricity}), 3.0);
}

TEST(Modularity, Values) {
  const Graph g = two_triangles_bridge();
  EXPECT_EQ(modularity(g, Clustering::whole(6)), 0.0);
  double singles = 0.0;
  for (NodeId v = 0; v < 6; ++v) singles -= std::pow(g.degree(v) / 14.0, 2);
  EXPECT_NEAR(modularity(g, Clustering::singletons(6)), singles, 1e-15);
  EXPECT_NEAR(modularity(g, kAB), 5.0 / 14.0, 1e-15);
  EXPECT_THROW(modularity(Graph(3, {}), Clustering::whole(3)), std::domain_error);
  EXPECT_THROW(modularity(g, Clustering::whole(5)), std::invalid_argument);
}

TEST(Conductance, ClusterValues) {
  const Graph g = two_triangles_bridge();
  EXPECT_NEAR(conductance_cluster(g, kA), 1.0 / 7.0, 1e-15);
  const Graph s = testing::star(4);
  EXPECT_DOUBLE_EQ(conductance_cluster(s, std::vector<NodeId>{2}), 1.0);
  EXPECT_THROW(conductance_cluster(g, std::vector<NodeId>{0, 1, 2, 3, 4, 5}), std::domain_error);
  const Graph iso(3, {{0, 1}});
  EXPECT_THROW(conductance_cluster(iso, std::vector<NodeId>{2}), std::domain_error);
}

TEST(Conductance, ClusteringIsMinimum) {
  const Graph g = two_triangles_bridge();
  EXPECT_NEAR(conductance_clustering(g, kAB), 1.0 / 7.0, 1e-15);
  EXPECT_DOUBLE_EQ(conductance_clustering(testing::triangle(), Clustering::singletons(3)), 1.0);
  // a satellite singleton (conductance 1) does not lift the minimum
  const Graph sat(7, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}, {5, 6}});
  const Clustering c({0, 0, 0, 1, 1, 1, 2});
  EXPECT_NEAR(conductance_clustering(sat, c), 1.0 / 7.0, 1e-15);
  EXPECT_THROW(conductance_clustering(g, Clustering::whole(6)), std::domain_error);
}

TEST(Coverage, Values) {
  const Graph g = two_triangles_bridge();
  EXPECT_EQ(coverage(g, Clustering::whole(6)), 1.0);
  EXPECT_EQ(coverage(g, Clustering::singletons(6)), 0.0);
  EXPECT_DOUBLE_EQ(coverage(g, kAB), 6.0 / 7.0);
  EXPECT_THROW(coverage(Graph(2, {}), Clustering::whole(2)), std::domain_error);
}

TEST(ClusterQuality, CutIdentityAndOracleCounts) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const Graph g = testing::random_graph(30, 0.1, rng);
    const Clustering c(testing::random_assignment(30, 4, rng));
    for (const ClusterQuality& q : evaluate_clusters(g, c)) {
      EXPECT_EQ(q.cut + 2 * q.internal_edges, q.volume);
      EXPECT_EQ(q.compactness == 0.0, q.internal_edges == 0 || !q.connected);
    }
  }
}

TEST(Axioms, ScaleExample) {
  const Graph tri = testing::triangle();
  EXPECT_DOUBLE_EQ(compactness_cluster(tri.scaled(3.0), kA), 27.0);
  const std::vector<Clustering> cs{Clustering::whole(3), Clustering::singletons(3)};
  EXPECT_TRUE(check_axiom_properties(tri, cs, 3.0).ok());
}

TEST(Axioms, RaisingAnEdgeWeightOnAPath) {
  const Graph p3 = testing::path_graph(3);
  const std::vector<NodeId> all{0, 1, 2};
  const Graph raised = p3.with_weight(1, 2.0);
  EXPECT_DOUBLE_EQ(cluster_diameter(raised, all), 1.5);
  EXPECT_DOUBLE_EQ(compactness_cluster(p3, all), 1.0);
  EXPECT_DOUBLE_EQ(compactness_cluster(raised, all), 2.0);
}

TEST(Axioms, HoldOnRandomWeightedGraphs) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = testing::random_graph(18, 0.3, rng, true);
    std::vector<Clustering> cs;
    for (int k = 0; k < 4; ++k) cs.emplace_back(testing::random_assignment(18, 1 + k, rng));
    for (double alpha : {0.5, 2.0, 3.0}) {
      const AxiomReport r = check_axiom_properties(g, cs, alpha, 8);
      EXPECT_TRUE(r.ok()) << r.violations.front();
      EXPECT_GT(r.checks, 0u);
    }
  }
  EXPECT_THROW(check_axiom_properties(testing::triangle(), {}, 0.0), std::invalid_argument);
}

TEST(IncrementalQuality, MatchesFromScratchEveryStep) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = testing::random_graph(40, 0.08, rng);
    if (g.edge_count() == 0) continue;
    EdgeScores s;
    for (std::size_t e = 0; e < g.edge_count(); ++e) s.mean.push_back(score(rng));
    const Dendrogram d = build_dendrogram(g, s);
    IncrementalQuality tracker(g);
    for (const MergeEvent& ev : d.events()) {
      const ClusterQuality q = tracker.apply(ev);
      const Clustering c = d.clustering_at(ev.step);
      EXPECT_NEAR(tracker.modularity(), modularity(g, c), 1e-12);
      EXPECT_NEAR(tracker.compactness(), compactness_clustering(g, c), 1e-9);
      EXPECT_EQ(q.size, tracker.members(ev.surviving).size());
    }
  }
}

TEST(IncrementalQuality, RejectsDeadLabels) {
  const Graph g = testing::triangle();
  IncrementalQuality tracker(g);
  tracker.apply({1, 0, 0, 1, 0.0});
  EXPECT_THROW(tracker.apply({2, 1, 0, 2, 0.0}), std::invalid_argument);
}

}  // namespace
}  // namespace compactcore
