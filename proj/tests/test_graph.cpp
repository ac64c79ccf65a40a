#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "support.hpp"

using namespace nmmc;

namespace {

MappedGraph parse(const std::string& text, LoadOptions options = {}) {
  std::istringstream in(text);
  return read_edge_list(in, options);
}

}  // namespace

TEST(EdgeList, TwoCycle) {
  const auto m = parse("0 1\n1 0\n");
  EXPECT_EQ(m.graph.num_nodes(), 2u);
  EXPECT_EQ(m.graph.num_edges(), 2u);
  for (node_t i = 0; i < 2; ++i) {
    EXPECT_EQ(m.graph.out_degree(i), 1u);
    EXPECT_EQ(m.graph.in_degree(i), 1u);
  }
}

TEST(EdgeList, DropsSelfLoopsAndDuplicates) {
  const auto m = parse("0 0\n0 1\n0 1\n");
  EXPECT_EQ(m.graph.num_nodes(), 2u);
  EXPECT_EQ(m.graph.num_edges(), 1u);
  EXPECT_TRUE(m.graph.has_edge(0, 1));
}

TEST(EdgeList, StrictModesReject) {
  EXPECT_THROW(parse("0 0\n0 1\n", {.drop_self_loops = false, .dedup = true}), IoError);
  EXPECT_THROW(parse("0 1\n0 1\n", {.drop_self_loops = true, .dedup = false}), IoError);
}

TEST(EdgeList, SparseIdsAndComments) {
  const auto m = load_edge_list(std::string(NMMC_TEST_DATA) + "/sparse_ids.txt");
  EXPECT_EQ(m.graph.num_nodes(), 3u);
  EXPECT_EQ(m.graph.num_edges(), 4u);
  EXPECT_EQ(m.map.to_original(0), 7);
  EXPECT_EQ(m.map.to_original(1), 42);
  EXPECT_EQ(m.map.to_original(2), 100);
  EXPECT_EQ(m.map.to_compact(100), node_t{2});
  EXPECT_FALSE(m.map.to_compact(5).has_value());
  EXPECT_TRUE(m.graph.has_edge(2, 0));
}

TEST(EdgeList, MalformedLineReportsLineNumber) {
  try {
    parse("0 1\n1 2\n2 x\n");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse("0 1 2\n"), IoError);
  EXPECT_THROW(parse("5\n"), IoError);
}

TEST(EdgeList, EmptyInputRejected) {
  EXPECT_THROW(parse(""), IoError);
  EXPECT_THROW(parse("# only a comment\n\n"), IoError);
}

TEST(EdgeList, UnreadableFile) { EXPECT_THROW(load_edge_list("/nonexistent/graph.txt"), IoError); }

TEST(EdgeList, WriteReadRoundTrip) {
  const auto m = load_edge_list(std::string(NMMC_TEST_DATA) + "/sparse_ids.txt");
  std::ostringstream out;
  write_edge_list(out, m.graph, m.map);
  const auto again = parse(out.str());
  EXPECT_EQ(again.graph.edges(), m.graph.edges());
  EXPECT_EQ(again.map.originals(), m.map.originals());
}

TEST(DirectedGraph, RejectsInvalidEdges) {
  EXPECT_THROW(DirectedGraph(2, {{0, 0}}), InvalidArgument);
  EXPECT_THROW(DirectedGraph(2, {{0, 1}, {0, 1}}), InvalidArgument);
  EXPECT_THROW(DirectedGraph(2, {{0, 2}}), InvalidArgument);
}

TEST(DirectedGraph, DegreesMatchBruteForce) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<std::size_t> size(1, 100);
    const std::size_t n = size(rng);
    std::uniform_int_distribution<node_t> node(0, static_cast<node_t>(n - 1));
    std::set<Edge> edge_set;
    for (std::size_t k = 0; k < 3 * n; ++k) {
      const node_t u = node(rng), v = node(rng);
      if (u != v) edge_set.emplace(u, v);
    }
    std::vector<Edge> edges(edge_set.begin(), edge_set.end());
    std::shuffle(edges.begin(), edges.end(), rng);
    const DirectedGraph g(n, edges);
    std::vector<std::size_t> out(n, 0), in(n, 0);
    for (const auto& [u, v] : edge_set) {
      ++out[u];
      ++in[v];
    }
    std::size_t out_total = 0, in_total = 0;
    for (node_t i = 0; i < n; ++i) {
      ASSERT_EQ(g.out_degree(i), out[i]);
      ASSERT_EQ(g.in_degree(i), in[i]);
      ASSERT_EQ(g.out_neighbors(i).size(), out[i]);
      ASSERT_EQ(g.in_neighbors(i).size(), in[i]);
      ASSERT_TRUE(std::is_sorted(g.in_neighbors(i).begin(), g.in_neighbors(i).end()));
      for (node_t j : g.in_neighbors(i)) ASSERT_TRUE(g.has_edge(j, i));
      out_total += g.out_degree(i);
      in_total += g.in_degree(i);
    }
    EXPECT_EQ(out_total, g.num_edges());
    EXPECT_EQ(in_total, g.num_edges());
  }
}

TEST(Scc, ThreeCycleIsWholeGraph) {
  const auto g = fixture::three_cycle();
  const auto l = largest_scc(g);
  EXPECT_EQ(l.graph.num_nodes(), 3u);
  EXPECT_EQ(l.graph.num_edges(), 3u);
  EXPECT_TRUE(is_strongly_connected(l.graph));
}

TEST(Scc, PathPicksSmallestNode) {
  const DirectedGraph g(3, {{0, 1}, {1, 2}});
  const auto l = largest_scc(g);
  EXPECT_EQ(l.graph.num_nodes(), 1u);
  EXPECT_EQ(l.map.to_original(0), 0);
}

TEST(Scc, TieBreakBySmallestId) {
  // {3,4} and {0,1} both have two nodes; the component holding node 0 wins.
  const DirectedGraph g(5, {{3, 4}, {4, 3}, {0, 1}, {1, 0}, {1, 2}, {2, 3}});
  const auto l = largest_scc(g);
  ASSERT_EQ(l.graph.num_nodes(), 2u);
  EXPECT_EQ(l.map.to_original(0), 0);
  EXPECT_EQ(l.map.to_original(1), 1);
}

TEST(Scc, DeepPathIsStackSafe) {
  const std::size_t n = 400000;
  std::vector<Edge> edges;
  for (node_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  edges.emplace_back(static_cast<node_t>(n - 1), 0);
  const DirectedGraph g(n, std::move(edges));
  EXPECT_EQ(largest_scc(g).graph.num_nodes(), n);
}

TEST(Scc, PropertiesOnRandomGraphs) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<std::size_t> size(2, 60);
    const std::size_t n = size(rng);
    std::uniform_int_distribution<node_t> node(0, static_cast<node_t>(n - 1));
    std::set<Edge> edge_set;
    for (std::size_t k = 0; k < 2 * n; ++k) {
      const node_t u = node(rng), v = node(rng);
      if (u != v) edge_set.emplace(u, v);
    }
    const DirectedGraph g(n, {edge_set.begin(), edge_set.end()});
    const auto l = largest_scc(g);
    ASSERT_TRUE(is_strongly_connected(l.graph));
    const auto twice = largest_scc(l.graph);
    EXPECT_EQ(twice.graph.num_nodes(), l.graph.num_nodes());
    EXPECT_EQ(twice.graph.edges(), l.graph.edges());

    // No component is larger than the chosen one.
    const auto comp = strongly_connected_components(g);
    std::vector<std::size_t> sizes(n, 0);
    for (auto c : comp) ++sizes[c];
    EXPECT_EQ(*std::max_element(sizes.begin(), sizes.end()), l.graph.num_nodes());
  }
}

TEST(Reachable, ForwardClosure) {
  const DirectedGraph g(3, {{0, 1}, {1, 2}});
  const node_t seeds[] = {1};
  const auto r = reachable_set(g, seeds);
  ASSERT_EQ(r.graph.num_nodes(), 2u);
  EXPECT_EQ(r.map.to_original(0), 1);
  EXPECT_EQ(r.map.to_original(1), 2);
  EXPECT_EQ(r.graph.num_edges(), 1u);
  EXPECT_TRUE(r.graph.has_edge(0, 1));
}

TEST(Reachable, AllSeedsGiveSameGraph) {
  const DirectedGraph g(4, {{0, 1}, {2, 1}, {3, 0}});
  std::vector<node_t> seeds{0, 1, 2, 3};
  const auto r = reachable_set(g, seeds);
  EXPECT_EQ(r.graph.edges(), g.edges());
}

TEST(Reachable, EmptySeedsRejected) {
  const auto g = fixture::three_cycle();
  EXPECT_THROW(reachable_set(g, std::vector<node_t>{}), InvalidArgument);
  EXPECT_THROW(reachable_set(g, std::vector<node_t>{7}), InvalidArgument);
}

TEST(Reachable, ContainsSeedsAndClosedUnderOutEdges) {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 40;
    std::uniform_int_distribution<node_t> node(0, n - 1);
    std::set<Edge> edge_set;
    for (int k = 0; k < 50; ++k) {
      const node_t u = node(rng), v = node(rng);
      if (u != v) edge_set.emplace(u, v);
    }
    const DirectedGraph g(n, {edge_set.begin(), edge_set.end()});
    std::vector<node_t> seeds{node(rng), node(rng)};
    const auto nodes = reachable_nodes(g, seeds);
    const std::set<node_t> in_set(nodes.begin(), nodes.end());
    for (node_t s : seeds) EXPECT_TRUE(in_set.count(s));
    for (node_t u : nodes)
      for (node_t v : g.out_neighbors(u)) EXPECT_TRUE(in_set.count(v));
  }
}

TEST(NodeMap, BijectionAndCompose) {
  const NodeMap parent(std::vector<std::int64_t>{10, 20, 30, 40});
  const NodeMap child(std::vector<std::int64_t>{1, 3});
  const auto composed = child.compose(parent);
  EXPECT_EQ(composed.to_original(0), 20);
  EXPECT_EQ(composed.to_original(1), 40);
  for (node_t i = 0; i < parent.size(); ++i) EXPECT_EQ(parent.to_compact(parent.to_original(i)), i);
  EXPECT_THROW(NodeMap(std::vector<std::int64_t>{1, 1}), InvalidArgument);
}
