#pragma once

// Weighted historical empirical distribution of a walker's trajectory.
//
// The visit at step k carries weight w_k; the distribution after step t is
//   mu_t = sum_k w_k delta_{Z_k} / sum_k w_k.
// Raw masses are accumulated instead of renormalising the whole vector each
// step, and kept in a Fenwick tree so that recording a visit and drawing a
// node proportionally to its mass are both O(log n).

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nmmc/error.hpp"
#include "nmmc/graph.hpp"

namespace nmmc {

/// Unnormalised weights w_k, k >= 0: 1, (k+1)^alpha, or 2^sqrt(k).
class WeightSchedule {
public:
  enum class Kind { Constant, Polynomial, SubExponential };

  static WeightSchedule constant() { return WeightSchedule(Kind::Constant, 0.0); }
  static WeightSchedule polynomial(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("polynomial exponent must be >= 0");
    return WeightSchedule(Kind::Polynomial, alpha);
  }
  static WeightSchedule sub_exponential() { return WeightSchedule(Kind::SubExponential, 0.0); }

  Kind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }

  double log_weight(std::uint64_t k) const {
    switch (kind_) {
      case Kind::Constant: return 0.0;
      case Kind::Polynomial: return alpha_ * std::log1p(static_cast<double>(k));
      case Kind::SubExponential: return std::sqrt(static_cast<double>(k)) * std::log(2.0);
    }
    return 0.0;
  }

  double weight(std::uint64_t k) const { return std::exp(log_weight(k)); }

  std::string name() const {
    switch (kind_) {
      case Kind::Constant: return "constant";
      case Kind::Polynomial: {
        std::string a = std::to_string(alpha_);
        a.erase(a.find_last_not_of('0') + 1);
        if (a.back() == '.') a.pop_back();
        return "poly" + a;
      }
      case Kind::SubExponential: return "subexp";
    }
    return "?";
  }

private:
  WeightSchedule(Kind kind, double alpha) : kind_(kind), alpha_(alpha) {}

  Kind kind_;
  double alpha_;
};

class EmpiricalMeasure {
public:
  /// Raw totals above this trigger a global rescale.
  static constexpr double rescale_threshold = 1e300;

  EmpiricalMeasure() = default;

  /// Empty measure; the first `record` makes it a point mass.
  explicit EmpiricalMeasure(std::size_t n) : values_(n, 0.0), tree_(n + 1, 0.0) {
    if (n == 0) throw InvalidArgument("measure over an empty node set");
    rebuild();
  }

  /**
   * Arbitrary initial measure mu_0, normalised to the weight w_0 = 1 of a
   * single visit. The next recorded visit is step 1.
   */
  EmpiricalMeasure(std::size_t n, std::span<const std::pair<node_t, double>> initial) : EmpiricalMeasure(n) {
    double sum = 0.0;
    for (const auto& [node, mass] : initial) {
      if (node >= n) throw InvalidArgument("initial measure node out of range");
      if (!(mass >= 0.0) || !std::isfinite(mass)) throw InvalidArgument("initial masses must be non-negative");
      sum += mass;
    }
    if (!(sum > 0.0)) throw InvalidArgument("initial measure is all zero");
    for (const auto& [node, mass] : initial) values_[node] += mass / sum;
    rebuild();
    steps_ = 1;
  }

  std::size_t num_nodes() const noexcept { return values_.size(); }
  std::uint64_t steps() const noexcept { return steps_; }
  bool empty() const noexcept { return !(total_ > 0.0); }

  /// Stored masses; the true accumulated weight of node i is mass(i) * exp(log_scale()).
  std::span<const double> masses() const noexcept { return values_; }
  double mass(node_t i) const { return values_.at(i); }
  double total() const noexcept { return total_; }
  double log_scale() const noexcept { return log_scale_; }

  /// Adds w_t for the visit at step t = steps() and advances the step counter.
  void record(node_t node, const WeightSchedule& schedule) {
    if (node >= values_.size()) throw InvalidArgument("record: node out of range");
    const double log_w = schedule.log_weight(steps_);
    double increment = std::exp(log_w - log_scale_);
    if (!(total_ + increment < rescale_threshold)) {
      rescale();
      increment = std::exp(log_w - log_scale_);
    }
    if (!(increment < rescale_threshold))
      throw Error("weight overflow at step " + std::to_string(steps_));
    values_[node] += increment;
    add(node, increment);
    total_ += increment;
    ++steps_;
  }

  /// Draws node i with probability mass(i) / total().
  template <typename Rng>
  node_t sample(Rng& rng) const {
    if (empty()) throw InvalidArgument("cannot sample from an empty measure");
    const std::size_t n = values_.size();
    std::uniform_real_distribution<double> uniform(0.0, total_);
    double remaining = uniform(rng);
    std::size_t pos = 0;
    for (std::size_t step = top_bit_; step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      if (next <= n && tree_[next] <= remaining) {
        pos = next;
        remaining -= tree_[next];
      }
    }
    // Rounding can push the search past the last positive mass.
    while (pos >= n || values_[pos] <= 0.0) {
      if (pos == 0) throw Error("sample: measure has no positive mass");
      --pos;
    }
    return static_cast<node_t>(pos);
  }

  /// mu_t as a probability vector.
  std::vector<double> as_distribution() const {
    if (empty()) throw InvalidArgument("empty measure has no distribution");
    const double sum = std::accumulate(values_.begin(), values_.end(), 0.0);
    std::vector<double> dist(values_.size());
    for (std::size_t i = 0; i < dist.size(); ++i) dist[i] = values_[i] / sum;
    return dist;
  }

  /// Divides every stored mass by the current total and folds it into the log scale.
  /// Leaves the distribution and the sampling law unchanged.
  void rescale() {
    const double sum = std::accumulate(values_.begin(), values_.end(), 0.0);
    if (!(sum > 0.0)) return;
    for (double& v : values_) v /= sum;
    log_scale_ += std::log(sum);
    rebuild();
  }

private:
  void add(std::size_t i, double delta) {
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
  }

  void rebuild() {
    const std::size_t n = values_.size();
    std::fill(tree_.begin(), tree_.end(), 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
      tree_[k] += values_[k - 1];
      const std::size_t parent = k + (k & (~k + 1));
      if (parent <= n) tree_[parent] += tree_[k];
    }
    total_ = std::accumulate(values_.begin(), values_.end(), 0.0);
    top_bit_ = 1;
    while (top_bit_ * 2 <= n) top_bit_ *= 2;
  }

  std::vector<double> values_;
  std::vector<double> tree_;
  double total_ = 0.0;
  double log_scale_ = 0.0;
  std::size_t top_bit_ = 0;
  std::uint64_t steps_ = 0;
};

enum class MergeMode { Pooled, Averaged };

/**
 * Combines several agents' measures into one distribution. Pooled sums the
 * true accumulated weights per node; Averaged takes the mean of the
 * individual normalised distributions. Empty measures are skipped.
 */
inline std::vector<double> merge(std::span<const EmpiricalMeasure* const> measures, MergeMode mode = MergeMode::Pooled) {
  if (measures.empty()) throw InvalidArgument("merge: no measures");
  const std::size_t n = measures.front()->num_nodes();
  double max_scale = -std::numeric_limits<double>::infinity();
  std::size_t nonempty = 0;
  for (const auto* m : measures) {
    if (m->num_nodes() != n) throw InvalidArgument("merge: measures over different node sets");
    if (!m->empty()) {
      ++nonempty;
      max_scale = std::max(max_scale, m->log_scale());
    }
  }
  if (nonempty == 0) throw InvalidArgument("merge: all measures are empty");

  std::vector<double> out(n, 0.0);
  for (const auto* m : measures) {
    if (m->empty()) continue;
    const auto masses = m->masses();
    if (mode == MergeMode::Pooled) {
      const double factor = std::exp(m->log_scale() - max_scale);
      for (std::size_t i = 0; i < n; ++i) out[i] += masses[i] * factor;
    } else {
      const double sum = std::accumulate(masses.begin(), masses.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) out[i] += masses[i] / sum;
    }
  }
  const double sum = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& x : out) x /= sum;
  return out;
}

inline std::vector<double> merge(std::span<const EmpiricalMeasure> measures, MergeMode mode = MergeMode::Pooled) {
  std::vector<const EmpiricalMeasure*> ptrs;
  ptrs.reserve(measures.size());
  for (const auto& m : measures) ptrs.push_back(&m);
  return merge(std::span<const EmpiricalMeasure* const>(ptrs), mode);
}

}  // namespace nmmc
