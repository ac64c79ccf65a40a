#pragma once

// History-dependent walkers estimating a quasi-stationary distribution.
//
// Each tick an agent proposes j ~ Q(i, .) and accepts with probability
// min(1, b_ij / c). On rejection it is redistributed to a node drawn from its
// own weighted empirical measure (history up to the previous step). The new
// position is then recorded into that measure. In static mode c is the exact
// maximum of b over the graph; in dynamic mode every agent learns its own c_t
// from the ratios it observes, updating with probability p.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "nmmc/empirical.hpp"
#include "nmmc/error.hpp"
#include "nmmc/graph.hpp"
#include "nmmc/metrics.hpp"
#include "nmmc/target.hpp"

namespace nmmc {

using Rng = std::mt19937_64;

enum class InDegreeMode { Exact, OnlineEstimate };

struct RunConfig {
  TargetSpec target = TargetSpec::uniform();
  ProposalChain chain = ProposalChain::simple_random_walk();
  WeightSchedule schedule = WeightSchedule::constant();
  bool dynamic = false;
  double p = 0.01;  ///< c_t-updating probability (dynamic mode)
  std::size_t agents = 1;
  std::uint64_t steps = 1;
  std::uint64_t seed = 0;
  InDegreeMode indegree_mode = InDegreeMode::Exact;
  /// Metrics every `checkpoint_stride` steps (0: none); the final step is always recorded.
  std::uint64_t checkpoint_stride = 0;
  /// Additional roughly log-spaced checkpoints between 1 and `steps`.
  std::size_t log_checkpoints = 0;
  /// Initial measure mu_0 for every agent (default: point mass at a uniformly drawn start).
  std::vector<std::pair<node_t, double>> initial_measure;
  /// Fixed start nodes, agent a starts at start_nodes[a % size] (ignored when initial_measure is set).
  std::vector<node_t> start_nodes;
  MergeMode merge = MergeMode::Pooled;
  /// All agents share one running constant instead of learning their own.
  bool shared_c = false;
  /// Keep the merged distribution of every checkpoint in the result.
  bool keep_estimates = false;
  std::string config_hash;

  void validate() const {
    if (agents < 1) throw InvalidArgument("at least one agent is required");
    if (steps < 1) throw InvalidArgument("steps must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("updating probability p must lie in [0, 1]");
  }
};

/// One crawler.
struct Agent {
  node_t current = 0;
  EmpiricalMeasure measure;
  double c = 1.0;  ///< running constant c_t (dynamic mode)
  Rng rng;
  std::uint64_t absorptions = 0;
};

/// State every agent reads and writes: the query cache and the in-degree estimates.
class SharedKnowledge {
public:
  explicit SharedKnowledge(std::size_t n) : visited_(n, false), in_found_(n, 0), in_estimate_(n, 1.0) {}

  /// Charges one unique query if `node` has never been visited. Returns true when charged.
  bool visit(node_t node) {
    if (visited_[node]) return false;
    visited_[node] = true;
    ++unique_queries_;
    return true;
  }

  bool visited(node_t node) const { return visited_[node]; }
  std::uint64_t unique_queries() const noexcept { return unique_queries_; }

  /// Registers the in-edge (i, j) seen while proposing i -> j; the estimate of
  /// d_j^- is the number of distinct in-edges found so far, and 1 before the first.
  void discover_edge(node_t i, node_t j) {
    const std::uint64_t key = (static_cast<std::uint64_t>(i) << 32) | j;
    if (discovered_.insert(key).second) {
      ++in_found_[j];
      in_estimate_[j] = static_cast<double>(std::max<std::uint32_t>(1, in_found_[j]));
    }
  }

  std::span<const double> in_degree_estimates() const noexcept { return in_estimate_; }
  std::size_t discovered_edges() const noexcept { return discovered_.size(); }

  double shared_c = 1.0;

private:
  std::vector<bool> visited_;
  std::uint64_t unique_queries_ = 0;
  std::unordered_set<std::uint64_t> discovered_;
  std::vector<std::uint32_t> in_found_;
  std::vector<double> in_estimate_;
};

/// b_ij as the agent sees it: exact, or with the shared in-degree estimates
/// after registering the proposed edge.
inline double observed_ratio(const AcceptanceModel& model, SharedKnowledge& shared, InDegreeMode mode, node_t i, node_t j) {
  if (mode == InDegreeMode::Exact) return model.b(i, j);
  shared.discover_edge(i, j);
  return model.b(i, j, shared.in_degree_estimates());
}

/// Moves the agent to j (accepted) or redistributes it from its history, then records the new position.
inline void apply_transition(Agent& agent, SharedKnowledge& shared, const WeightSchedule& schedule, node_t j, bool accepted) {
  if (accepted) {
    agent.current = j;
    shared.visit(j);
  } else {
    agent.current = agent.measure.sample(agent.rng);
    ++agent.absorptions;
  }
  agent.measure.record(agent.current, schedule);
}

/// Static-constant step with an externally supplied proposal and uniform draw.
inline void step_static_with(Agent& agent, const AcceptanceModel& model, SharedKnowledge& shared,
                             const WeightSchedule& schedule, InDegreeMode mode, node_t j, double u) {
  const double b = observed_ratio(model, shared, mode, agent.current, j);
  apply_transition(agent, shared, schedule, j, u <= std::min(1.0, b / model.c_true()));
}

inline void step_static(Agent& agent, const AcceptanceModel& model, SharedKnowledge& shared,
                        const WeightSchedule& schedule, InDegreeMode mode = InDegreeMode::Exact) {
  const node_t j = propose(model.chain(), model.graph(), agent.current, agent.rng);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  step_static_with(agent, model, shared, schedule, mode, j, uniform(agent.rng));
}

/// Dynamic-constant step; `c` is the running constant to read and update.
inline void step_dynamic_with(Agent& agent, double& c, const AcceptanceModel& model, SharedKnowledge& shared,
                              const WeightSchedule& schedule, InDegreeMode mode, double p, node_t j, double u1,
                              double u2) {
  const double b = observed_ratio(model, shared, mode, agent.current, j);
  if (u1 <= p && c < b) c = b;
  apply_transition(agent, shared, schedule, j, u2 <= std::min(1.0, b / c));
}

inline void step_dynamic(Agent& agent, const AcceptanceModel& model, SharedKnowledge& shared,
                         const WeightSchedule& schedule, double p, InDegreeMode mode = InDegreeMode::Exact,
                         double* shared_c = nullptr) {
  const node_t j = propose(model.chain(), model.graph(), agent.current, agent.rng);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u1 = uniform(agent.rng);
  const double u2 = uniform(agent.rng);
  step_dynamic_with(agent, shared_c ? *shared_c : agent.c, model, shared, schedule, mode, p, j, u1, u2);
}

/// Checkpoint steps: multiples of the stride, log-spaced points, and the final step.
inline std::vector<std::uint64_t> checkpoint_steps(std::uint64_t steps, std::uint64_t stride, std::size_t log_points) {
  std::set<std::uint64_t> points{steps};
  if (stride > 0)
    for (std::uint64_t t = stride; t <= steps; t += stride) points.insert(t);
  if (log_points > 1) {
    const double span = std::log(static_cast<double>(steps));
    for (std::size_t k = 0; k < log_points; ++k) {
      const double t = std::exp(span * static_cast<double>(k) / static_cast<double>(log_points - 1));
      points.insert(std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::llround(t)), 1, steps));
    }
  }
  return {points.begin(), points.end()};
}

/**
 * A population of agents advancing in lockstep: one tick moves every agent
 * once, in index order. Deterministic for a given seed.
 */
class Simulation {
public:
  Simulation(const DirectedGraph& g, RunConfig config)
      : g_(&g), config_(std::move(config)), model_(g, config_.chain, config_.target), shared_(g.num_nodes()) {
    config_.validate();
    const std::size_t n = g.num_nodes();
    std::vector<std::uint64_t> agent_seeds(config_.agents);
    {
      Rng seeder(config_.seed);
      for (auto& s : agent_seeds) s = seeder();
    }
    agents_.reserve(config_.agents);
    for (std::size_t a = 0; a < config_.agents; ++a) {
      Agent agent;
      agent.rng.seed(agent_seeds[a]);
      if (!config_.initial_measure.empty()) {
        agent.measure = EmpiricalMeasure(n, config_.initial_measure);
        for (const auto& [node, mass] : config_.initial_measure)
          if (mass > 0.0) shared_.visit(node);
        agent.current = agent.measure.sample(agent.rng);
      } else {
        if (config_.start_nodes.empty()) {
          std::uniform_int_distribution<node_t> start(0, static_cast<node_t>(n - 1));
          agent.current = start(agent.rng);
        } else {
          agent.current = config_.start_nodes[a % config_.start_nodes.size()];
          if (agent.current >= n) throw InvalidArgument("start node out of range");
        }
        agent.measure = EmpiricalMeasure(n);
        agent.measure.record(agent.current, config_.schedule);
        shared_.visit(agent.current);
      }
      agents_.push_back(std::move(agent));
    }
  }

  void tick() {
    for (auto& agent : agents_) {
      if (config_.dynamic)
        step_dynamic(agent, model_, shared_, config_.schedule, config_.p, config_.indegree_mode,
                     config_.shared_c ? &shared_.shared_c : nullptr);
      else
        step_static(agent, model_, shared_, config_.schedule, config_.indegree_mode);
    }
    ++time_;
  }

  std::uint64_t time() const noexcept { return time_; }
  const std::vector<Agent>& agents() const noexcept { return agents_; }
  const SharedKnowledge& shared() const noexcept { return shared_; }
  const AcceptanceModel& model() const noexcept { return model_; }
  const RunConfig& config() const noexcept { return config_; }

  std::vector<double> merged() const {
    std::vector<const EmpiricalMeasure*> measures;
    measures.reserve(agents_.size());
    for (const auto& a : agents_) measures.push_back(&a.measure);
    return merge(std::span<const EmpiricalMeasure* const>(measures), config_.merge);
  }

  double max_c() const {
    if (!config_.dynamic) return model_.c_true();
    if (config_.shared_c) return shared_.shared_c;
    double c = 0.0;
    for (const auto& a : agents_) c = std::max(c, a.c);
    return c;
  }

  std::uint64_t absorptions() const {
    std::uint64_t total = 0;
    for (const auto& a : agents_) total += a.absorptions;
    return total;
  }

  MetricsRow snapshot(std::span<const double> reference) const {
    MetricsRow row;
    row.step = time_;
    row.tvd = tvd(merged(), reference);
    row.unique_queries = static_cast<double>(shared_.unique_queries());
    row.unique_query_pct = 100.0 * row.unique_queries / static_cast<double>(g_->num_nodes());
    row.c_max = max_c();
    row.absorptions = absorptions();
    return row;
  }

private:
  const DirectedGraph* g_;
  RunConfig config_;
  AcceptanceModel model_;
  SharedKnowledge shared_;
  std::vector<Agent> agents_;
  std::uint64_t time_ = 0;
};

struct RunResult {
  MetricsLog log;
  std::vector<double> estimate;   ///< merged distribution at the final step
  std::vector<double> reference;  ///< the distribution the agents target
  double c_true = 0.0;
  std::vector<double> final_c;    ///< per-agent running constants
  std::vector<std::vector<double>> checkpoint_estimates;
};

/// Runs the agents for `config.steps` ticks, logging TVD against `reference`
/// (resolved from the target when not supplied).
inline RunResult run(const DirectedGraph& g, const RunConfig& config, std::optional<std::vector<double>> reference = std::nullopt) {
  config.validate();
  RunResult result;
  result.reference = reference ? std::move(*reference) : resolve_target(g, config.target);
  if (result.reference.size() != g.num_nodes()) throw InvalidArgument("reference distribution has wrong length");

  Simulation sim(g, config);
  result.c_true = sim.model().c_true();
  result.log.config_hash = config.config_hash;
  result.log.seed = config.seed;
  const auto checkpoints = checkpoint_steps(config.steps, config.checkpoint_stride, config.log_checkpoints);
  std::size_t next = 0;
  while (sim.time() < config.steps) {
    sim.tick();
    if (next < checkpoints.size() && sim.time() == checkpoints[next]) {
      result.log.rows.push_back(sim.snapshot(result.reference));
      if (config.keep_estimates) result.checkpoint_estimates.push_back(sim.merged());
      ++next;
    }
  }
  result.estimate = sim.merged();
  for (const auto& a : sim.agents()) result.final_c.push_back(config.shared_c ? sim.shared().shared_c : a.c);
  return result;
}

}  // namespace nmmc
