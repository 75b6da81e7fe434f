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

#include "compactcore/graph.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <random>
#include <sstream>

#include "support/oracles.hpp"

namespace compactcore {
namespace {

using testing::two_triangles_bridge;

TEST(LoadEdgeList, Triangle) {
  const auto loaded = load_edge_list("0 1\n1 2\n2 0\n");
  EXPECT_EQ(loaded.graph.node_count(), 3u);
  EXPECT_EQ(loaded.graph.edge_count(), 3u);
}

TEST(LoadEdgeList, DropsSelfLoopsAndDuplicates) {
  const auto loaded = load_edge_list("5 5\n0 1\n1 0\n");
  EXPECT_EQ(loaded.graph.node_count(), 2u);
  EXPECT_EQ(loaded.graph.edge_count(), 1u);
}

TEST(LoadEdgeList, RemapsInFirstAppearanceOrder) {
  const auto loaded = load_edge_list("# header\n\n  # indented comment\n100 7\n7 42\r\n");
  ASSERT_EQ(loaded.external_ids.size(), 3u);
  EXPECT_EQ(loaded.external_ids[0], 100u);
  EXPECT_EQ(loaded.external_ids[1], 7u);
  EXPECT_EQ(loaded.external_ids[2], 42u);
  EXPECT_EQ(loaded.graph.endpoints(1).u, 1u);
  EXPECT_EQ(loaded.graph.endpoints(1).v, 2u);
}

TEST(LoadEdgeList, MalformedTokenReportsLine) {
  try {
    load_edge_list("0 1\n1 x\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(load_edge_list("0 1 2\n"), ParseError);
  EXPECT_THROW(load_edge_list("-1 2\n"), ParseError);
  EXPECT_THROW(load_edge_list("3\n"), ParseError);
}

TEST(LoadEdgeList, EmptyInputIsAnError) {
  EXPECT_THROW(load_edge_list(""), ParseError);
  EXPECT_THROW(load_edge_list("# only comments\n"), ParseError);
}

TEST(LoadEdgeList, ReadsFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "compactcore_load_test.txt";
  std::ofstream(path) << "# comment\n10 20\n20 30\n30 10\n";
  const LoadedGraph loaded = load_edge_list_file(path);
  std::filesystem::remove(path);
  EXPECT_EQ(loaded.graph.node_count(), 3u);
  EXPECT_EQ(loaded.graph.edge_count(), 3u);
  EXPECT_EQ(loaded.external_ids, (std::vector<std::uint64_t>{10, 20, 30}));
  EXPECT_THROW(load_edge_list_file(path), std::runtime_error);
}

TEST(LoadEdgeList, IdempotentOnCanonicalOutput) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = testing::random_graph(30, 0.15, rng);
    std::ostringstream first;
    write_canonical(first, g);
    if (g.edge_count() == 0) continue;
    const auto again = load_edge_list(first.str());
    std::ostringstream second;
    write_canonical(second, again.graph, again.external_ids);
    EXPECT_EQ(first.str(), second.str());
    const auto third = load_edge_list(second.str());
    std::ostringstream fourth;
    write_canonical(fourth, third.graph, third.external_ids);
    EXPECT_EQ(second.str(), fourth.str());
    EXPECT_EQ(again.graph.edge_count(), g.edge_count());
  }
}

TEST(Graph, RejectsInvalidInput) {
  EXPECT_THROW(Graph(2, {{0, 0}}), std::invalid_argument);
  EXPECT_THROW(Graph(2, {{0, 1}, {1, 0}}), std::invalid_argument);
  EXPECT_THROW(Graph(2, {{0, 2}}), std::invalid_argument);
  EXPECT_THROW(Graph(2, {{0, 1}}, {0.0}), std::invalid_argument);
  EXPECT_THROW(Graph(2, {{0, 1}}, {-1.0}), std::invalid_argument);
  EXPECT_THROW(Graph(2, {{0, 1}}, {1.0, 2.0}), std::invalid_argument);
}

TEST(Graph, Degrees) {
  const Graph tri = testing::triangle();
  for (NodeId v = 0; v < 3; ++v) EXPECT_EQ(degree(tri, v), 2u);
  const Graph s = testing::star(4);
  EXPECT_EQ(degree(s, 0), 4u);
  EXPECT_EQ(degree(s, 3), 1u);
}

TEST(Graph, AdjacencyIsSymmetricAndDegreesSumToTwiceM) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = testing::random_graph(40, 0.1, rng);
    std::size_t sum = 0;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      sum += g.degree(v);
      for (const Incidence& inc : g.neighbors(v)) {
        const auto back = g.neighbors(inc.neighbor);
        EXPECT_TRUE(std::any_of(back.begin(), back.end(), [&](const Incidence& x) {
          return x.neighbor == v && x.edge == inc.edge;
        }));
      }
    }
    EXPECT_EQ(sum, 2 * g.edge_count());
  }
}

TEST(Graph, VolumeAndInternalEdges) {
  const Graph tri = testing::triangle();
  const std::vector<NodeId> all{0, 1, 2};
  EXPECT_EQ(volume(tri, all), 6u);
  EXPECT_EQ(volume(tri, std::vector<NodeId>{}), 0u);
  EXPECT_EQ(internal_edge_count(tri, all), 3u);
  EXPECT_EQ(internal_edge_count(tri, std::vector<NodeId>{1}), 0u);

  const Graph g = two_triangles_bridge();
  const std::vector<NodeId> a{0, 1, 2};
  EXPECT_EQ(volume(g, a), 7u);
  EXPECT_EQ(internal_edge_count(g, a), 3u);
  const std::vector<NodeId> every{0, 1, 2, 3, 4, 5};
  EXPECT_EQ(internal_edge_count(g, every), g.edge_count());
  EXPECT_EQ(volume(g, every), 2 * g.edge_count());
}

TEST(Graph, UnweightedReportsUnitWeights) {
  const Graph g = testing::triangle();
  EXPECT_FALSE(g.weighted());
  EXPECT_EQ(g.weight(1), 1.0);
  const Graph s = g.scaled(2.5);
  EXPECT_TRUE(s.weighted());
  EXPECT_EQ(s.weight(2), 2.5);
}

TEST(Graph, ConnectedComponents) {
  const Graph g(5, {{0, 1}, {3, 4}});
  std::size_t count = 0;
  const auto comp = connected_components(g, &count);
  EXPECT_EQ(count, 3u);
  EXPECT_EQ(comp[0], comp[1]);
  EXPECT_NE(comp[1], comp[2]);
  EXPECT_EQ(comp[3], comp[4]);
}

TEST(Clustering, PartitionBookkeeping) {
  const Clustering c({7, 3, 7, 3, 9});
  EXPECT_EQ(c.cluster_count(), 3u);
  EXPECT_EQ(c.label(0), 3u);
  EXPECT_EQ(c.members(1).size(), 2u);
  EXPECT_EQ(c.cluster_index(4), 2u);
  EXPECT_TRUE(c.same_partition(Clustering({1, 0, 1, 0, 2})));
  EXPECT_FALSE(c.same_partition(Clustering({1, 0, 1, 1, 2})));
}

}  // namespace
}  // namespace compactcore
