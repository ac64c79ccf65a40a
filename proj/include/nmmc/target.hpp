#pragma once

// Proposal chains and acceptance ratios that turn a target distribution (or
// the eigenvector centrality) into the quasi-stationary distribution of a
// transient chain: a proposed move i -> j survives with probability
// gamma_ij = min(1, b_ij / c), and is absorbed otherwise.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nmmc/error.hpp"
#include "nmmc/graph.hpp"
#include "nmmc/oracle.hpp"

namespace nmmc {

enum class TargetKind { Uniform, InDegree, Custom, Evc };

/// Which distribution the walkers should reproduce.
struct TargetSpec {
  TargetKind kind = TargetKind::Uniform;
  std::vector<double> pi;  ///< only for Custom

  static TargetSpec uniform() { return {TargetKind::Uniform, {}}; }
  static TargetSpec in_degree() { return {TargetKind::InDegree, {}}; }
  static TargetSpec evc() { return {TargetKind::Evc, {}}; }
  static TargetSpec custom(std::vector<double> pi) {
    validate_distribution(pi);
    return {TargetKind::Custom, std::move(pi)};
  }

  /// Entries strictly positive (above 1e-300) and summing to one within 1e-12.
  static void validate_distribution(std::span<const double> pi) {
    if (pi.empty()) throw InvalidArgument("target distribution is empty");
    double sum = 0.0;
    for (double x : pi) {
      if (!(x > 1e-300) || !std::isfinite(x))
        throw InvalidArgument("target distribution entries must be strictly positive");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("target distribution does not sum to 1");
  }
};

inline std::string to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::Uniform: return "uniform";
    case TargetKind::InDegree: return "indegree";
    case TargetKind::Custom: return "custom";
    case TargetKind::Evc: return "evc";
  }
  return "?";
}

/// The reference distribution a target stands for on `g` (runs the oracle for Evc).
inline std::vector<double> resolve_target(const DirectedGraph& g, const TargetSpec& target,
                                          PowerIterationOptions options = {}) {
  const std::size_t n = g.num_nodes();
  switch (target.kind) {
    case TargetKind::Uniform:
      return std::vector<double>(n, 1.0 / static_cast<double>(n));
    case TargetKind::InDegree: {
      std::vector<double> pi(n);
      for (node_t i = 0; i < n; ++i) {
        if (g.in_degree(i) == 0) throw InvalidArgument("in-degree target needs every in-degree > 0");
        pi[i] = static_cast<double>(g.in_degree(i)) / static_cast<double>(g.num_edges());
      }
      return pi;
    }
    case TargetKind::Custom:
      if (target.pi.size() != n) throw InvalidArgument("custom target has wrong length");
      return target.pi;
    case TargetKind::Evc:
      return evc(g, options).vector;
  }
  return {};
}

/**
 * Proposal chain Q. SimpleRandomWalk follows a uniformly chosen out-edge.
 * Teleporting follows an out-edge with probability p_follow and otherwise
 * (or always, at a node without out-edges) jumps to a uniformly chosen seed.
 */
struct ProposalChain {
  enum class Kind { SimpleRandomWalk, Teleporting };

  Kind kind = Kind::SimpleRandomWalk;
  std::vector<node_t> seeds;  ///< sorted, distinct
  double p_follow = 1.0;

  static ProposalChain simple_random_walk() { return {}; }

  static ProposalChain teleporting(std::vector<node_t> seeds, double p_follow) {
    if (seeds.empty()) throw InvalidArgument("teleporting proposal needs a nonempty seed set");
    if (!(p_follow > 0.0 && p_follow < 1.0)) throw InvalidArgument("p_follow must lie in (0, 1)");
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    return {Kind::Teleporting, std::move(seeds), p_follow};
  }

  bool is_seed(node_t j) const { return std::binary_search(seeds.begin(), seeds.end(), j); }
};

/// Draws j with probability Q_ij.
template <typename Rng>
node_t propose(const ProposalChain& chain, const DirectedGraph& g, node_t i, Rng& rng) {
  const auto out = g.out_neighbors(i);
  auto pick = [&rng](std::span<const node_t> from) {
    std::uniform_int_distribution<std::size_t> index(0, from.size() - 1);
    return from[index(rng)];
  };
  if (chain.kind == ProposalChain::Kind::SimpleRandomWalk) {
    if (out.empty()) throw InvalidArgument("simple random walk stuck at node " + std::to_string(i) + " without out-edges");
    return pick(out);
  }
  if (out.empty()) return pick(chain.seeds);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  return coin(rng) < chain.p_follow ? pick(out) : pick(chain.seeds);
}

/// Exact Q_ij.
inline double proposal_probability(const ProposalChain& chain, const DirectedGraph& g, node_t i, node_t j) {
  const double out = static_cast<double>(g.out_degree(i));
  if (chain.kind == ProposalChain::Kind::SimpleRandomWalk) return g.has_edge(i, j) ? 1.0 / out : 0.0;
  const double jump = chain.is_seed(j) ? 1.0 / static_cast<double>(chain.seeds.size()) : 0.0;
  if (out == 0.0) return jump;
  return (1.0 - chain.p_follow) * jump + (g.has_edge(i, j) ? chain.p_follow / out : 0.0);
}

/// |S_j| = number of k with Q_kj > 0.
inline std::size_t support_size(const ProposalChain& chain, const DirectedGraph& g, node_t j) {
  if (chain.kind == ProposalChain::Kind::Teleporting && chain.is_seed(j)) return g.num_nodes();
  return g.in_degree(j);
}

/// alpha_kj for the general mapping: for each j a probability distribution over S_j.
using AlphaFn = std::function<double(node_t k, node_t j)>;

/**
 * The acceptance ratios b_ij and their maximum c over all proposable pairs.
 *
 * With the simple random walk and alpha_kj = 1/|S_j| the ratios reduce to
 * local degree expressions: d_i^+/d_j^- (uniform), d_i^+/d_i^- (in-degree),
 * d_i^+ (eigenvector centrality) and (pi_j/pi_i) d_i^+/d_j^- (custom).
 */
class AcceptanceModel {
public:
  AcceptanceModel(const DirectedGraph& g, ProposalChain chain, TargetSpec target, AlphaFn alpha = {})
      : g_(&g), chain_(std::move(chain)), kind_(target.kind), alpha_(std::move(alpha)) {
    const std::size_t n = g.num_nodes();
    if (n == 0) throw InvalidArgument("empty graph");
    if (kind_ == TargetKind::Evc && chain_.kind == ProposalChain::Kind::Teleporting)
      throw InvalidArgument("eigenvector centrality target requires the simple random walk on a strongly connected graph");
    if (alpha_ && kind_ == TargetKind::Evc)
      throw InvalidArgument("custom alpha is only meaningful for distribution targets");
    for (node_t s : chain_.seeds)
      if (s >= n) throw InvalidArgument("seed out of range");
    if (chain_.kind == ProposalChain::Kind::SimpleRandomWalk)
      for (node_t i = 0; i < n; ++i)
        if (g.out_degree(i) == 0)
          throw InvalidArgument("simple random walk needs out-degree > 0 everywhere (node " + std::to_string(i) + ")");

    if (kind_ == TargetKind::Custom) {
      if (target.pi.size() != n) throw InvalidArgument("custom target has wrong length");
      TargetSpec::validate_distribution(target.pi);
      pi_ = std::move(target.pi);
    } else if (kind_ == TargetKind::InDegree) {
      pi_ = resolve_target(g, target);
    } else if (kind_ == TargetKind::Uniform && (chain_.kind == ProposalChain::Kind::Teleporting || alpha_)) {
      pi_ = resolve_target(g, target);
    }
    if (alpha_) validate_alpha();

    c_true_ = 0.0;
    for_each_proposable_pair([this](node_t i, node_t j) { c_true_ = std::max(c_true_, b(i, j)); });
  }

  const DirectedGraph& graph() const noexcept { return *g_; }
  const ProposalChain& chain() const noexcept { return chain_; }
  TargetKind target_kind() const noexcept { return kind_; }
  double c_true() const noexcept { return c_true_; }

  std::size_t support_size(node_t j) const { return nmmc::support_size(chain_, *g_, j); }

  /// b_ij with exact in-degrees.
  double b(node_t i, node_t j) const {
    if (chain_.kind == ProposalChain::Kind::SimpleRandomWalk && !alpha_) {
      const double out_i = static_cast<double>(g_->out_degree(i));
      switch (kind_) {
        case TargetKind::Uniform: return out_i / static_cast<double>(g_->in_degree(j));
        case TargetKind::InDegree: return out_i / static_cast<double>(g_->in_degree(i));
        case TargetKind::Evc: return out_i;
        case TargetKind::Custom: return (pi_[j] / pi_[i]) * out_i / static_cast<double>(g_->in_degree(j));
      }
    }
    const double q = proposal_probability(chain_, *g_, i, j);
    const double alpha = alpha_ ? alpha_(i, j) : 1.0 / static_cast<double>(support_size(j));
    return (pi_[j] / pi_[i]) * alpha / q;
  }

  /// b_ij with in-degrees taken from `in_degree` (online estimates); simple random walk only.
  double b(node_t i, node_t j, std::span<const double> in_degree) const {
    if (chain_.kind != ProposalChain::Kind::SimpleRandomWalk || alpha_)
      throw InvalidArgument("estimated in-degrees are supported for the simple random walk only");
    const double out_i = static_cast<double>(g_->out_degree(i));
    switch (kind_) {
      case TargetKind::Uniform: return out_i / in_degree[j];
      case TargetKind::InDegree: return out_i / in_degree[i];
      case TargetKind::Evc: return out_i;
      case TargetKind::Custom: return (pi_[j] / pi_[i]) * out_i / in_degree[j];
    }
    return 0.0;
  }

  double gamma(node_t i, node_t j) const { return std::min(1.0, b(i, j) / c_true_); }

  /// Calls f(i, j) for every pair with Q_ij > 0.
  template <typename F>
  void for_each_proposable_pair(F&& f) const {
    const std::size_t n = g_->num_nodes();
    for (node_t i = 0; i < n; ++i) {
      const auto out = g_->out_neighbors(i);
      if (chain_.kind == ProposalChain::Kind::SimpleRandomWalk) {
        for (node_t j : out) f(i, j);
        continue;
      }
      // Merge of the sorted out-list and the sorted seed list.
      const bool follows = !out.empty();
      std::size_t a = 0, s = 0;
      while ((follows && a < out.size()) || s < chain_.seeds.size()) {
        node_t j;
        if (!follows || a == out.size()) {
          j = chain_.seeds[s++];
        } else if (s == chain_.seeds.size() || out[a] < chain_.seeds[s]) {
          j = out[a++];
        } else if (chain_.seeds[s] < out[a]) {
          j = chain_.seeds[s++];
        } else {
          j = out[a++];
          ++s;
        }
        f(i, j);
      }
    }
  }

private:
  void validate_alpha() const {
    const std::size_t n = g_->num_nodes();
    std::vector<double> column(n, 0.0);
    for_each_proposable_pair([&](node_t k, node_t j) {
      const double a = alpha_(k, j);
      if (!(a > 0.0)) throw InvalidArgument("alpha must be positive on the support");
      column[j] += a;
    });
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(column[j] - 1.0) > 1e-9)
        throw InvalidArgument("alpha does not sum to 1 over S_" + std::to_string(j));
  }

  const DirectedGraph* g_;
  ProposalChain chain_;
  TargetKind kind_;
  AlphaFn alpha_;
  std::vector<double> pi_;
  double c_true_ = 0.0;
};

/// Sub-stochastic kernel P~_ij = Q_ij min(1, b_ij / c) on the transient states.
inline SparseOperator transient_kernel(const AcceptanceModel& model) {
  std::vector<Triplet> entries;
  model.for_each_proposable_pair([&](node_t i, node_t j) {
    const double q = proposal_probability(model.chain(), model.graph(), i, j);
    entries.push_back({i, j, q * model.gamma(i, j)});
  });
  return SparseOperator(model.graph().num_nodes(), std::move(entries));
}

/// Redistribution chain P^nu_ij = P~_ij + P_i0 nu(j): absorption replaced by a jump drawn from nu.
inline SparseOperator redistribution_kernel(const SparseOperator& transient, std::span<const double> nu) {
  const std::size_t n = transient.dim();
  if (nu.size() != n) throw InvalidArgument("redistribution law has wrong length");
  std::vector<Triplet> entries = transient.triplets();
  for (node_t i = 0; i < n; ++i) {
    const double absorb = std::max(0.0, 1.0 - transient.row_sum(i));
    if (absorb == 0.0) continue;
    for (node_t j = 0; j < n; ++j) entries.push_back({i, j, absorb * nu[j]});
  }
  return SparseOperator(n, std::move(entries));
}

}  // namespace nmmc
