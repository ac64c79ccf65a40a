#pragma once

// Synthetic directed graphs for tests and experiments without the real
// datasets.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <unordered_set>
#include <vector>

#include "nmmc/error.hpp"
#include "nmmc/graph.hpp"

namespace nmmc {

namespace detail {

inline std::uint64_t edge_key(node_t u, node_t v) { return (static_cast<std::uint64_t>(u) << 32) | v; }

}  // namespace detail

/**
 * Strongly connected digraph on n nodes: a random Hamiltonian cycle plus
 * `extra_edges` distinct random chords (capped by the number of free pairs).
 */
template <typename Rng>
DirectedGraph random_strongly_connected(std::size_t n, std::size_t extra_edges, Rng& rng) {
  if (n < 2) throw InvalidArgument("a strongly connected digraph without self-loops needs n >= 2");
  std::vector<node_t> order(n);
  std::iota(order.begin(), order.end(), node_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> present;
  for (std::size_t k = 0; k < n; ++k) {
    const node_t u = order[k], v = order[(k + 1) % n];
    if (present.insert(detail::edge_key(u, v)).second) edges.emplace_back(u, v);
  }
  const std::size_t capacity = n * (n - 1) - edges.size();
  extra_edges = std::min(extra_edges, capacity);
  std::uniform_int_distribution<node_t> pick(0, static_cast<node_t>(n - 1));
  while (extra_edges > 0) {
    const node_t u = pick(rng), v = pick(rng);
    if (u == v || !present.insert(detail::edge_key(u, v)).second) continue;
    edges.emplace_back(u, v);
    --extra_edges;
  }
  return DirectedGraph(n, std::move(edges));
}

/// Node counts and edge counts of the layered crawl-graph generator.
struct CrawlGraphShape {
  std::size_t core_nodes = 3234;
  std::size_t core_edges = 13453;
  std::size_t sink_nodes = 5332;    ///< reachable from the core, no out-edges
  std::size_t sink_edges = 17826;   ///< core -> sink edges
  std::size_t source_nodes = 280;   ///< point into the core, unreachable from it
  std::size_t source_out_degree = 2;
  double degree_skew = 1.5;         ///< Pareto shape of the core out-degree propensities
};

/**
 * Three-layer digraph resembling a peer-to-peer crawl: a strongly connected
 * core with skewed out-degrees, a layer of sinks fed by the core, and a
 * layer of sources pointing into the core. Nodes are shuffled so the layers
 * are not contiguous in index order.
 */
template <typename Rng>
DirectedGraph layered_crawl_graph(const CrawlGraphShape& shape, Rng& rng) {
  const std::size_t nc = shape.core_nodes, ns = shape.sink_nodes, nq = shape.source_nodes;
  if (nc < 2) throw InvalidArgument("core needs at least two nodes");
  if (shape.core_edges < nc || shape.core_edges > nc * (nc - 1)) throw InvalidArgument("core edge count out of range");
  if (shape.sink_edges < ns || shape.sink_edges > ns * nc) throw InvalidArgument("sink edge count out of range");
  if (shape.source_out_degree < 1 || shape.source_out_degree > nc) throw InvalidArgument("source out-degree out of range");
  const std::size_t n = nc + ns + nq;

  std::vector<node_t> label(n);
  std::iota(label.begin(), label.end(), node_t{0});
  std::shuffle(label.begin(), label.end(), rng);
  // Layer positions: core [0, nc), sinks [nc, nc + ns), sources after.
  auto core = [&](std::size_t k) { return label[k]; };
  auto sink = [&](std::size_t k) { return label[nc + k]; };
  auto source = [&](std::size_t k) { return label[nc + ns + k]; };

  std::vector<double> propensity(nc);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (double& p : propensity) p = std::min(100.0, std::pow(1.0 - uniform(rng), -1.0 / shape.degree_skew));
  std::discrete_distribution<std::size_t> skewed(propensity.begin(), propensity.end());
  std::uniform_int_distribution<std::size_t> any_core(0, nc - 1);

  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> present;
  auto add = [&](node_t u, node_t v) {
    if (u == v || !present.insert(detail::edge_key(u, v)).second) return false;
    edges.emplace_back(u, v);
    return true;
  };

  std::vector<std::size_t> cycle(nc);
  std::iota(cycle.begin(), cycle.end(), std::size_t{0});
  std::shuffle(cycle.begin(), cycle.end(), rng);
  for (std::size_t k = 0; k < nc; ++k) add(core(cycle[k]), core(cycle[(k + 1) % nc]));
  for (std::size_t added = nc; added < shape.core_edges;)
    if (add(core(skewed(rng)), core(any_core(rng)))) ++added;

  for (std::size_t k = 0; k < ns; ++k) add(core(skewed(rng)), sink(k));
  std::uniform_int_distribution<std::size_t> any_sink(0, ns - 1);
  for (std::size_t added = ns; added < shape.sink_edges;)
    if (add(core(skewed(rng)), sink(any_sink(rng)))) ++added;

  for (std::size_t k = 0; k < nq; ++k)
    for (std::size_t added = 0; added < shape.source_out_degree;)
      if (add(source(k), core(any_core(rng)))) ++added;

  return DirectedGraph(n, std::move(edges));
}

}  // namespace nmmc
