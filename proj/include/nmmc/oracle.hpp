#pragma once

// Reference spectra by power iteration on sparse non-negative operators:
// leading left eigenvectors (quasi-stationary distributions), stationary
// distributions of stochastic matrices, and eigenvector centrality.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <span>
#include <tuple>
#include <vector>

#include "nmmc/error.hpp"
#include "nmmc/graph.hpp"

namespace nmmc {

struct Triplet {
  node_t row;
  node_t col;
  double value;
};

/// Non-negative square matrix stored by rows; only strictly positive entries are kept.
class SparseOperator {
public:
  SparseOperator() : offsets_(1, 0) {}

  /// Duplicate (row, col) entries are summed. Zero entries are dropped;
  /// negative or non-finite values are rejected.
  SparseOperator(std::size_t n, std::vector<Triplet> entries) : n_(n), offsets_(n + 1, 0) {
    for (const auto& t : entries) {
      if (t.row >= n || t.col >= n) throw InvalidArgument("operator entry out of range");
      if (!std::isfinite(t.value) || t.value < 0.0)
        throw InvalidArgument("operator entries must be finite and non-negative");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    for (std::size_t k = 0; k < entries.size();) {
      Triplet merged = entries[k++];
      while (k < entries.size() && entries[k].row == merged.row && entries[k].col == merged.col)
        merged.value += entries[k++].value;
      if (merged.value > 0.0) {
        cols_.push_back(merged.col);
        values_.push_back(merged.value);
        ++offsets_[merged.row + 1];
      }
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  }

  std::size_t dim() const noexcept { return n_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  std::span<const node_t> row_cols(node_t i) const {
    return {cols_.data() + offsets_[i], cols_.data() + offsets_[i + 1]};
  }
  std::span<const double> row_values(node_t i) const {
    return {values_.data() + offsets_[i], values_.data() + offsets_[i + 1]};
  }

  double row_sum(node_t i) const {
    double s = 0.0;
    for (double v : row_values(i)) s += v;
    return s;
  }

  /// Entry lookup, zero when absent.
  double at(node_t i, node_t j) const {
    const auto cols = row_cols(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return values_[offsets_[i] + static_cast<std::size_t>(it - cols.begin())];
  }

  /// out = x M
  void left_multiply(std::span<const double> x, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) out[cols_[k]] += xi * values_[k];
    }
  }

  SparseOperator scaled(double factor) const {
    SparseOperator copy = *this;
    for (double& v : copy.values_) v *= factor;
    return copy;
  }

  std::vector<Triplet> triplets() const {
    std::vector<Triplet> result;
    result.reserve(nonzeros());
    for (node_t i = 0; i < n_; ++i)
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) result.push_back({i, cols_[k], values_[k]});
    return result;
  }

private:
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<node_t> cols_;
  std::vector<double> values_;
};

inline SparseOperator adjacency_operator(const DirectedGraph& g) {
  std::vector<Triplet> entries;
  entries.reserve(g.num_edges());
  for (node_t i = 0; i < g.num_nodes(); ++i)
    for (node_t j : g.out_neighbors(i)) entries.push_back({i, j, 1.0});
  return SparseOperator(g.num_nodes(), std::move(entries));
}

struct SpectralResult {
  std::vector<double> vector;  ///< l1-normalised, non-negative
  double eigenvalue = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;       ///< l1 change of the last iteration
  double shift = 0.0;          ///< diagonal shift used to break periodicity, 0 if none
};

struct PowerIterationOptions {
  double tol = 1e-12;
  std::size_t max_iter = 1'000'000;
  /// Iterations without a new best residual before the diagonal shift kicks in.
  std::size_t stall_window = 1000;
  /// Shift size relative to the current Perron-root estimate.
  double relative_shift = 1e-3;
};

/**
 * Leading left eigenvector of a non-negative irreducible matrix by power
 * iteration with l1 normalisation, started from the uniform vector.
 *
 * Stops when ||v M - lambda v||_1 <= tol * lambda. If the residual stalls
 * (periodic matrices oscillate forever) the iteration continues on
 * M + eps I, which has the same eigenvectors; the reported eigenvalue is
 * corrected by -eps.
 */
inline SpectralResult left_leading_eigen(const SparseOperator& m, PowerIterationOptions options = {}) {
  const std::size_t n = m.dim();
  if (n == 0) throw InvalidArgument("empty operator");
  if (!(options.tol > 0.0)) throw InvalidArgument("tolerance must be positive");

  std::vector<bool> column_hit(n, false);
  for (node_t i = 0; i < n; ++i)
    for (node_t j : m.row_cols(i)) column_hit[j] = true;
  for (std::size_t j = 0; j < n; ++j)
    if (!column_hit[j]) throw InvalidArgument("operator has an all-zero column " + std::to_string(j) + "; not irreducible");

  std::vector<double> v(n, 1.0 / static_cast<double>(n)), y(n);
  double shift = 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  double residual = std::numeric_limits<double>::infinity();

  for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
    m.left_multiply(v, y);
    if (shift != 0.0)
      for (std::size_t i = 0; i < n; ++i) y[i] += shift * v[i];
    double norm = 0.0;
    for (double x : y) norm += x;
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw ConvergenceError("power iteration collapsed (norm " + std::to_string(norm) + ")", residual);

    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double next = y[i] / norm;
      diff += std::abs(next - v[i]);
      v[i] = next;
    }
    residual = diff;

    if (residual <= options.tol) {
      SpectralResult result;
      result.eigenvalue = norm - shift;
      result.iterations = iter;
      result.residual = residual;
      result.shift = shift;
      double total = 0.0;
      for (double x : v) total += x;
      for (double& x : v) x /= total;
      result.vector = std::move(v);
      return result;
    }

    if (residual < best) {
      best = residual;
      since_best = 0;
    } else if (++since_best >= options.stall_window && shift == 0.0) {
      shift = options.relative_shift * norm;
      best = std::numeric_limits<double>::infinity();
      since_best = 0;
    }
  }
  throw ConvergenceError("power iteration did not converge in " + std::to_string(options.max_iter) +
                             " iterations (residual " + std::to_string(residual) + ")",
                         residual);
}

/// Stationary distribution of a row-stochastic matrix.
inline SpectralResult stationary(const SparseOperator& p, PowerIterationOptions options = {}) {
  for (node_t i = 0; i < p.dim(); ++i) {
    const double s = p.row_sum(i);
    if (std::abs(s - 1.0) > 1e-12)
      throw InvalidArgument("row " + std::to_string(i) + " sums to " + std::to_string(s) + ", not stochastic");
  }
  auto result = left_leading_eigen(p, options);
  if (std::abs(result.eigenvalue - 1.0) < options.tol) result.eigenvalue = 1.0;
  return result;
}

/// Eigenvector centrality: leading left eigenvector of the adjacency matrix and its spectral radius.
inline SpectralResult evc(const DirectedGraph& g, PowerIterationOptions options = {}) {
  if (!is_strongly_connected(g)) throw InvalidArgument("eigenvector centrality needs a strongly connected graph");
  return left_leading_eigen(adjacency_operator(g), options);
}

/// CSV lines "node,value"; node ids come from `map` when given.
inline void write_distribution_csv(std::ostream& out, std::span<const double> values, const NodeMap* map = nullptr) {
  out << "node,probability\n";
  out.precision(17);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (map)
      out << map->to_original(static_cast<node_t>(i));
    else
      out << i;
    out << ',' << values[i] << '\n';
  }
}

/// Reads the format written by write_distribution_csv; ids are translated
/// through `map` when given. Every node must appear exactly once.
inline std::vector<double> read_distribution_csv(std::istream& in, std::size_t n, const NodeMap* map = nullptr) {
  std::vector<double> values(n, 0.0);
  std::vector<bool> seen(n, false);
  std::string line;
  std::size_t line_no = 0, count = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "node,probability") throw IoError("expected header node,probability");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError("line " + std::to_string(line_no) + ": missing comma");
    std::int64_t id;
    double value;
    try {
      std::size_t used = 0;
      id = std::stoll(line.substr(0, comma), &used);
      if (used != comma) throw std::invalid_argument("id");
      value = std::stod(line.substr(comma + 1));
    } catch (const std::logic_error&) {
      throw IoError("line " + std::to_string(line_no) + ": malformed entry");
    }
    std::optional<node_t> index;
    if (map) {
      index = map->to_compact(id);
    } else if (id >= 0 && static_cast<std::size_t>(id) < n) {
      index = static_cast<node_t>(id);
    }
    if (!index) throw IoError("line " + std::to_string(line_no) + ": unknown node " + std::to_string(id));
    if (seen[*index]) throw IoError("line " + std::to_string(line_no) + ": node listed twice");
    seen[*index] = true;
    values[*index] = value;
    ++count;
  }
  if (count != n) throw IoError("distribution lists " + std::to_string(count) + " of " + std::to_string(n) + " nodes");
  return values;
}

}  // namespace nmmc
