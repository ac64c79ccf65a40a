#pragma once

// Comparison samplers: Metropolis-Hastings walks on the undirected version of
// a directed graph, and the directed unbiased random walk (DURW), which
// undirects edges on the fly, mixes in random jumps and reweights its visits
// with a ratio estimator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nmmc/engine.hpp"
#include "nmmc/error.hpp"
#include "nmmc/graph.hpp"
#include "nmmc/metrics.hpp"
#include "nmmc/oracle.hpp"

namespace nmmc {

/// Every directed edge taken in both directions, parallel pairs merged.
class UndirectedView {
public:
  explicit UndirectedView(const DirectedGraph& g) {
    std::vector<Edge> edges;
    edges.reserve(2 * g.num_edges());
    for (node_t i = 0; i < g.num_nodes(); ++i)
      for (node_t j : g.out_neighbors(i)) {
        edges.emplace_back(i, j);
        edges.emplace_back(j, i);
      }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    graph_ = DirectedGraph(g.num_nodes(), std::move(edges));
    for (node_t i = 0; i < graph_.num_nodes(); ++i) d_max_ = std::max(d_max_, graph_.out_degree(i));
  }

  const DirectedGraph& graph() const noexcept { return graph_; }
  std::size_t num_nodes() const noexcept { return graph_.num_nodes(); }
  std::span<const node_t> neighbors(node_t i) const { return graph_.out_neighbors(i); }
  std::size_t degree(node_t i) const { return graph_.out_degree(i); }
  std::size_t max_degree() const noexcept { return d_max_; }

private:
  DirectedGraph graph_;
  std::size_t d_max_ = 0;
};

enum class MhVariant { MaxDegree, SimpleRandomWalk };

namespace detail {

inline double mh_acceptance(const UndirectedView& view, MhVariant variant, std::span<const double> pi, node_t i, node_t j) {
  const double ratio = pi[j] / pi[i];
  if (variant == MhVariant::MaxDegree) return std::min(1.0, ratio);
  return std::min(1.0, ratio * static_cast<double>(view.degree(i)) / static_cast<double>(view.degree(j)));
}

inline void check_mh_inputs(const UndirectedView& view, std::span<const double> pi) {
  if (pi.size() != view.num_nodes()) throw InvalidArgument("target has wrong length");
  for (node_t i = 0; i < view.num_nodes(); ++i)
    if (view.degree(i) == 0) throw InvalidArgument("isolated node " + std::to_string(i) + " in the undirected view");
}

}  // namespace detail

/**
 * One Metropolis-Hastings transition. MaxDegree proposes each neighbour with
 * probability 1/d_max (staying put otherwise); SimpleRandomWalk proposes a
 * uniform neighbour. A rejected proposal leaves the walker where it is.
 */
template <typename Rng>
node_t mh_step(const UndirectedView& view, MhVariant variant, std::span<const double> pi, node_t current, Rng& rng) {
  const auto nbrs = view.neighbors(current);
  node_t j;
  if (variant == MhVariant::MaxDegree) {
    std::uniform_int_distribution<std::size_t> slot(0, view.max_degree() - 1);
    const std::size_t s = slot(rng);
    if (s >= nbrs.size()) return current;
    j = nbrs[s];
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
    j = nbrs[pick(rng)];
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  return uniform(rng) <= detail::mh_acceptance(view, variant, pi, current, j) ? j : current;
}

/// The full MH transition matrix, rejection mass on the diagonal.
inline SparseOperator mh_kernel(const UndirectedView& view, MhVariant variant, std::span<const double> pi) {
  detail::check_mh_inputs(view, pi);
  std::vector<Triplet> entries;
  for (node_t i = 0; i < view.num_nodes(); ++i) {
    const double q = variant == MhVariant::MaxDegree ? 1.0 / static_cast<double>(view.max_degree())
                                                     : 1.0 / static_cast<double>(view.degree(i));
    double stay = 1.0;
    for (node_t j : view.neighbors(i)) {
      const double p = q * detail::mh_acceptance(view, variant, pi, i, j);
      entries.push_back({i, j, p});
      stay -= p;
    }
    if (stay > 0.0) entries.push_back({i, i, stay});
  }
  return SparseOperator(view.num_nodes(), std::move(entries));
}

struct BaselineResult {
  MetricsLog log;
  std::vector<double> estimate;
  double query_cost = 0.0;
  std::uint64_t steps = 0;
};

struct MhConfig {
  MhVariant variant = MhVariant::MaxDegree;
  std::uint64_t steps = 1;
  std::uint64_t seed = 0;
  std::uint64_t checkpoint_stride = 0;
  std::size_t log_checkpoints = 0;
  std::string config_hash;
};

/// Single MH walker from a uniform start; the estimate is its visit frequency.
inline BaselineResult mh_run(const UndirectedView& view, std::span<const double> pi, const MhConfig& config) {
  detail::check_mh_inputs(view, pi);
  if (config.steps < 1) throw InvalidArgument("steps must be >= 1");
  const std::size_t n = view.num_nodes();
  Rng rng(config.seed);
  std::uniform_int_distribution<node_t> start(0, static_cast<node_t>(n - 1));
  node_t current = start(rng);

  std::vector<double> counts(n, 0.0);
  std::vector<bool> visited(n, false);
  std::uint64_t unique = 1;
  visited[current] = true;
  counts[current] = 1.0;
  double total = 1.0;

  BaselineResult result;
  result.log.config_hash = config.config_hash;
  result.log.seed = config.seed;
  const auto checkpoints = checkpoint_steps(config.steps, config.checkpoint_stride, config.log_checkpoints);
  std::size_t next = 0;
  std::vector<double> estimate(n);
  for (std::uint64_t t = 1; t <= config.steps; ++t) {
    current = mh_step(view, config.variant, pi, current, rng);
    if (!visited[current]) {
      visited[current] = true;
      ++unique;
    }
    counts[current] += 1.0;
    total += 1.0;
    if (next < checkpoints.size() && t == checkpoints[next]) {
      for (std::size_t i = 0; i < n; ++i) estimate[i] = counts[i] / total;
      MetricsRow row;
      row.step = t;
      row.tvd = tvd(estimate, pi);
      row.unique_queries = static_cast<double>(unique);
      row.unique_query_pct = 100.0 * row.unique_queries / static_cast<double>(n);
      result.log.rows.push_back(row);
      ++next;
    }
  }
  for (std::size_t i = 0; i < n; ++i) estimate[i] = counts[i] / total;
  result.estimate = std::move(estimate);
  result.query_cost = static_cast<double>(unique);
  result.steps = config.steps;
  return result;
}

/// One visit of a reweighted walk: the node and its unnormalised stationary weight.
struct WeightedSample {
  node_t node;
  double weight;
};

/// x(i) = sum_k 1{X_k = i} / w_k, normalised.
inline std::vector<double> ratio_estimate(std::span<const WeightedSample> samples, std::size_t n) {
  if (samples.empty()) throw InvalidArgument("ratio estimate of an empty sample log");
  std::vector<double> x(n, 0.0);
  double total = 0.0;
  for (const auto& s : samples) {
    if (s.node >= n) throw InvalidArgument("sample node out of range");
    if (!(s.weight > 0.0) || !std::isfinite(s.weight)) throw InvalidArgument("sample weights must be positive");
    x[s.node] += 1.0 / s.weight;
    total += 1.0 / s.weight;
  }
  for (double& v : x) v /= total;
  return x;
}

struct DurwConfig {
  double w = 1.0;          ///< jump weight
  double c_jump = 10.0;    ///< query cost of one random jump
  std::uint64_t max_steps = 1;
  /// Stop once the accumulated query cost reaches this budget.
  double budget = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  std::uint64_t checkpoint_stride = 0;
  std::size_t log_checkpoints = 0;
  bool record_samples = false;
  std::string config_hash;

  void validate() const {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("DURW jump weight w must be positive");
    if (!(c_jump >= 1.0)) throw InvalidArgument("DURW jump cost must be >= 1");
    if (max_steps < 1) throw InvalidArgument("steps must be >= 1");
  }
};

struct DurwResult : BaselineResult {
  std::vector<WeightedSample> samples;
  std::uint64_t jumps = 0;
  std::vector<std::vector<node_t>> pruned;  ///< undirected neighbour lists built during the walk
};

/**
 * Directed unbiased random walk. On its first visit a node converts its
 * directed out-edges towards not-yet-visited nodes into undirected edges; its
 * neighbour list is then frozen. At node i of current degree d_i the walker
 * moves to a uniform neighbour with probability d_i / (d_i + w) and otherwise
 * jumps to a uniform node of the whole graph at cost c_jump. Visits are
 * reweighted by 1 / (d_i + w). The walk starts with a jump.
 */
inline DurwResult durw_run(const DirectedGraph& g, std::span<const double> reference, const DurwConfig& config) {
  config.validate();
  const std::size_t n = g.num_nodes();
  if (n == 0) throw InvalidArgument("empty graph");
  if (reference.size() != n) throw InvalidArgument("reference distribution has wrong length");

  Rng rng(config.seed);
  std::uniform_int_distribution<node_t> any_node(0, static_cast<node_t>(n - 1));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  DurwResult result;
  result.log.config_hash = config.config_hash;
  result.log.seed = config.seed;
  result.pruned.assign(n, {});
  std::vector<bool> visited(n, false);
  std::uint64_t unique = 0;
  auto first_visit = [&](node_t i) {
    visited[i] = true;
    ++unique;
    for (node_t j : g.out_neighbors(i))
      if (!visited[j]) {
        result.pruned[i].push_back(j);
        result.pruned[j].push_back(i);
      }
  };

  std::vector<double> inv_weight(n, 0.0);
  double inv_total = 0.0;
  auto record = [&](node_t i) {
    const double weight = static_cast<double>(result.pruned[i].size()) + config.w;
    inv_weight[i] += 1.0 / weight;
    inv_total += 1.0 / weight;
    if (config.record_samples) result.samples.push_back({i, weight});
  };
  std::vector<double> estimate(n);
  auto current_estimate = [&]() {
    for (std::size_t i = 0; i < n; ++i) estimate[i] = inv_weight[i] / inv_total;
    return std::span<const double>(estimate);
  };

  node_t current = any_node(rng);
  result.query_cost = config.c_jump;
  ++result.jumps;
  first_visit(current);
  record(current);

  const auto checkpoints = checkpoint_steps(config.max_steps, config.checkpoint_stride, config.log_checkpoints);
  std::size_t next = 0;
  std::uint64_t t = 0;
  auto log_row = [&]() {
    MetricsRow row;
    row.step = t;
    row.tvd = tvd(current_estimate(), reference);
    row.unique_queries = result.query_cost;
    row.unique_query_pct = 100.0 * result.query_cost / static_cast<double>(n);
    row.absorptions = result.jumps;
    result.log.rows.push_back(row);
  };

  while (t < config.max_steps && result.query_cost < config.budget) {
    ++t;
    const auto& nbrs = result.pruned[current];
    const double d = static_cast<double>(nbrs.size());
    if (uniform(rng) < d / (d + config.w)) {
      std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
      current = nbrs[pick(rng)];
      if (!visited[current]) {
        result.query_cost += 1.0;
        first_visit(current);
      }
    } else {
      current = any_node(rng);
      result.query_cost += config.c_jump;
      ++result.jumps;
      if (!visited[current]) first_visit(current);
    }
    record(current);
    while (next < checkpoints.size() && checkpoints[next] < t) ++next;
    if (next < checkpoints.size() && checkpoints[next] == t) {
      log_row();
      ++next;
    }
  }
  if (result.log.rows.empty() || result.log.rows.back().step != t) log_row();
  const auto final_estimate = current_estimate();
  result.estimate.assign(final_estimate.begin(), final_estimate.end());
  result.steps = t;
  return result;
}

/// TVD of the last checkpoint whose query cost does not exceed `budget` (nullopt if none).
inline std::optional<double> tvd_at_budget(const MetricsLog& log, double budget) {
  std::optional<double> value;
  for (const auto& row : log.rows)
    if (row.unique_queries <= budget) value = row.tvd;
  return value;
}

}  // namespace nmmc
