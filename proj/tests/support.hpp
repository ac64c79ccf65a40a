#pragma once

// Shared fixtures: the random small-graph suites and a few hand-made graphs.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "nmmc/nmmc.hpp"

namespace nmmc::fixture {

/// Chord count giving a mean out-degree of about 1 + 2 ln n.
inline std::size_t suite_chords(std::size_t n) {
  return static_cast<std::size_t>(std::llround(2.0 * static_cast<double>(n - 1) * std::log(static_cast<double>(n))));
}

/// `count` random strongly connected digraphs with n uniform in [n_min, n_max].
inline std::vector<DirectedGraph> small_graph_suite(std::size_t count, std::size_t n_min, std::size_t n_max, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> size(n_min, n_max);
  std::vector<DirectedGraph> graphs;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t n = size(rng);
    graphs.push_back(random_strongly_connected(n, suite_chords(n), rng));
  }
  return graphs;
}

/// Random positive probability vector bounded away from zero.
inline std::vector<double> random_distribution(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> pi(n);
  double sum = 0.0;
  for (double& x : pi) sum += x = u(rng);
  for (double& x : pi) x /= sum;
  return pi;
}

inline double l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

inline DirectedGraph three_cycle() { return DirectedGraph(3, {{0, 1}, {1, 2}, {2, 0}}); }

inline DirectedGraph complete_digraph(std::size_t n) {
  std::vector<Edge> edges;
  for (node_t i = 0; i < n; ++i)
    for (node_t j = 0; j < n; ++j)
      if (i != j) edges.emplace_back(i, j);
  return DirectedGraph(n, std::move(edges));
}

}  // namespace nmmc::fixture
