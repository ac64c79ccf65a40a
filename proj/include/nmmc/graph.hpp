#pragma once

// Directed graphs in compressed sparse row form, SNAP edge-list I/O and the
// decompositions used to pick a working node set (largest strongly connected
// component, forward-reachable closure).

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nmmc/error.hpp"

namespace nmmc {

using node_t = std::uint32_t;
using Edge = std::pair<node_t, node_t>;

/**
 * Immutable directed graph without self-loops or parallel edges.
 *
 * Out- and in-neighbour lists are stored sorted, so membership tests are a
 * binary search.
 */
class DirectedGraph {
public:
  DirectedGraph() : out_offsets_(1, 0), in_offsets_(1, 0) {}

  /// Builds the graph from an edge list. Self-loops, duplicate edges and
  /// out-of-range endpoints are rejected; load through `read_edge_list` to clean raw data.
  DirectedGraph(std::size_t n, std::vector<Edge> edges) : n_(n) {
    std::sort(edges.begin(), edges.end());
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const auto [u, v] = edges[k];
      if (u >= n || v >= n)
        throw InvalidArgument("edge endpoint out of range");
      if (u == v)
        throw InvalidArgument("self-loop on node " + std::to_string(u));
      if (k > 0 && edges[k - 1] == edges[k])
        throw InvalidArgument("duplicate edge " + std::to_string(u) + " -> " + std::to_string(v));
    }

    out_offsets_.assign(n + 1, 0);
    in_offsets_.assign(n + 1, 0);
    for (const auto& [u, v] : edges) {
      ++out_offsets_[u + 1];
      ++in_offsets_[v + 1];
    }
    std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
    std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());

    out_targets_.resize(edges.size());
    in_sources_.resize(edges.size());
    std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
    // Edges are sorted by (src, dst): out lists come out sorted, and in lists
    // are filled in increasing src order, so they are sorted too.
    for (std::size_t k = 0; k < edges.size(); ++k) {
      out_targets_[k] = edges[k].second;
      in_sources_[in_fill[edges[k].second]++] = edges[k].first;
    }
  }

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return out_targets_.size(); }

  std::span<const node_t> out_neighbors(node_t i) const {
    return {out_targets_.data() + out_offsets_[i], out_targets_.data() + out_offsets_[i + 1]};
  }
  std::span<const node_t> in_neighbors(node_t i) const {
    return {in_sources_.data() + in_offsets_[i], in_sources_.data() + in_offsets_[i + 1]};
  }

  std::size_t out_degree(node_t i) const { return out_offsets_[i + 1] - out_offsets_[i]; }
  std::size_t in_degree(node_t i) const { return in_offsets_[i + 1] - in_offsets_[i]; }

  bool has_edge(node_t i, node_t j) const {
    const auto adj = out_neighbors(i);
    return std::binary_search(adj.begin(), adj.end(), j);
  }

  std::size_t max_out_degree() const {
    std::size_t best = 0;
    for (node_t i = 0; i < n_; ++i) best = std::max(best, out_degree(i));
    return best;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> result;
    result.reserve(num_edges());
    for (node_t i = 0; i < n_; ++i)
      for (node_t j : out_neighbors(i)) result.emplace_back(i, j);
    return result;
  }

private:
  std::size_t n_ = 0;
  std::vector<std::size_t> out_offsets_;
  std::vector<node_t> out_targets_;
  std::vector<std::size_t> in_offsets_;
  std::vector<node_t> in_sources_;
};

/// Bijection between compact indices [0, n) and external node identifiers.
class NodeMap {
public:
  NodeMap() = default;

  explicit NodeMap(std::vector<std::int64_t> original) : original_(std::move(original)) {
    forward_.reserve(original_.size());
    for (std::size_t i = 0; i < original_.size(); ++i) {
      if (!forward_.emplace(original_[i], static_cast<node_t>(i)).second)
        throw InvalidArgument("node map contains duplicate id " + std::to_string(original_[i]));
    }
  }

  static NodeMap identity(std::size_t n) {
    std::vector<std::int64_t> ids(n);
    std::iota(ids.begin(), ids.end(), std::int64_t{0});
    return NodeMap(std::move(ids));
  }

  std::size_t size() const noexcept { return original_.size(); }

  std::int64_t to_original(node_t i) const { return original_.at(i); }

  std::optional<node_t> to_compact(std::int64_t id) const {
    if (auto it = forward_.find(id); it != forward_.end()) return it->second;
    return std::nullopt;
  }

  const std::vector<std::int64_t>& originals() const noexcept { return original_; }

  /// Maps through `parent`: the result sends index i to parent.to_original(this->to_original(i)).
  NodeMap compose(const NodeMap& parent) const {
    std::vector<std::int64_t> ids(original_.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
      ids[i] = parent.to_original(static_cast<node_t>(original_[i]));
    return NodeMap(std::move(ids));
  }

private:
  std::vector<std::int64_t> original_;
  std::unordered_map<std::int64_t, node_t> forward_;
};

/// A graph together with the map from its indices to the indices (or ids) it came from.
struct MappedGraph {
  DirectedGraph graph;
  NodeMap map;
};

struct LoadOptions {
  bool drop_self_loops = true;
  bool dedup = true;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline bool next_token(std::string_view& rest, std::string_view& token) {
  const auto start = rest.find_first_not_of(" \t\r");
  if (start == std::string_view::npos) return false;
  rest.remove_prefix(start);
  const auto end = std::min(rest.find_first_of(" \t\r"), rest.size());
  token = rest.substr(0, end);
  rest.remove_prefix(end);
  return true;
}

inline bool parse_id(std::string_view token, std::int64_t& value) {
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), last, value);
  return ec == std::errc{} && ptr == last;
}

}  // namespace detail

/**
 * Reads a SNAP-style edge list: one "src dst" pair per line, '#' starts a
 * comment line. Node ids are re-indexed densely in increasing id order, so
 * comparing compact indices is the same as comparing original ids.
 */
inline MappedGraph read_edge_list(std::istream& in, LoadOptions options = {}) {
  std::vector<std::pair<std::int64_t, std::int64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::string_view rest = body, a, b, extra;
    std::int64_t src = 0, dst = 0;
    if (!detail::next_token(rest, a) || !detail::next_token(rest, b) ||
        detail::next_token(rest, extra) || !detail::parse_id(a, src) || !detail::parse_id(b, dst))
      throw IoError("malformed edge at line " + std::to_string(line_no) + ": '" + std::string(body) + "'");
    if (src == dst) {
      if (!options.drop_self_loops)
        throw IoError("self-loop at line " + std::to_string(line_no));
      // The endpoint still counts as a node of the dataset.
    }
    raw.emplace_back(src, dst);
  }
  if (in.bad()) throw IoError("read error after line " + std::to_string(line_no));

  std::vector<std::int64_t> ids;
  ids.reserve(raw.size() * 2);
  for (const auto& [s, d] : raw) {
    ids.push_back(s);
    ids.push_back(d);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.empty()) throw IoError("edge list contains no edges");

  auto index_of = [&ids](std::int64_t id) {
    return static_cast<node_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& [s, d] : raw)
    if (s != d) edges.emplace_back(index_of(s), index_of(d));

  std::sort(edges.begin(), edges.end());
  const auto unique_end = std::unique(edges.begin(), edges.end());
  if (unique_end != edges.end() && !options.dedup)
    throw IoError("duplicate edges present and deduplication disabled");
  edges.erase(unique_end, edges.end());

  const std::size_t n = ids.size();
  return {DirectedGraph(n, std::move(edges)), NodeMap(std::move(ids))};
}

inline MappedGraph load_edge_list(const std::string& path, LoadOptions options = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return read_edge_list(in, options);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

/// Writes "src dst" lines using the ids in `map`.
inline void write_edge_list(std::ostream& out, const DirectedGraph& g, const NodeMap& map) {
  for (node_t i = 0; i < g.num_nodes(); ++i)
    for (node_t j : g.out_neighbors(i)) out << map.to_original(i) << ' ' << map.to_original(j) << '\n';
}

/// Induced subgraph on `nodes`. Nodes keep their relative order; the map sends
/// new indices back to indices of `g`.
inline MappedGraph induced_subgraph(const DirectedGraph& g, std::vector<node_t> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  constexpr node_t absent = static_cast<node_t>(-1);
  std::vector<node_t> local(g.num_nodes(), absent);
  for (std::size_t k = 0; k < nodes.size(); ++k) local[nodes[k]] = static_cast<node_t>(k);

  std::vector<Edge> edges;
  for (node_t u : nodes)
    for (node_t v : g.out_neighbors(u))
      if (local[v] != absent) edges.emplace_back(local[u], local[v]);

  return {DirectedGraph(nodes.size(), std::move(edges)),
          NodeMap(std::vector<std::int64_t>(nodes.begin(), nodes.end()))};
}

/**
 * Strongly connected components by an iterative Tarjan search.
 * Returns the component id of every node; ids are in reverse topological order.
 */
inline std::vector<std::size_t> strongly_connected_components(const DirectedGraph& g) {
  const std::size_t n = g.num_nodes();
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
  std::vector<node_t> stack;
  std::vector<bool> on_stack(n, false);
  // Explicit DFS frames: node and position in its out-neighbour list.
  std::vector<std::pair<node_t, std::size_t>> frames;
  std::size_t next_index = 0, next_comp = 0;

  for (node_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    frames.emplace_back(root, 0);
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;

    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      const auto adj = g.out_neighbors(v);
      if (pos < adj.size()) {
        const node_t w = adj[pos++];
        if (index[w] == unvisited) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const node_t done = v;
      frames.pop_back();
      if (!frames.empty()) {
        const node_t parent = frames.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] == index[done]) {
        node_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = next_comp;
        } while (w != done);
        ++next_comp;
      }
    }
  }
  return comp;
}

/// Largest strongly connected component; equal sizes are resolved in favour of
/// the component containing the smallest node index.
inline MappedGraph largest_scc(const DirectedGraph& g) {
  if (g.num_nodes() == 0) return {DirectedGraph(), NodeMap()};
  const auto comp = strongly_connected_components(g);
  const std::size_t num_comp = *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<std::size_t> size(num_comp, 0);
  std::vector<node_t> min_node(num_comp, static_cast<node_t>(-1));
  for (node_t i = 0; i < g.num_nodes(); ++i) {
    ++size[comp[i]];
    min_node[comp[i]] = std::min(min_node[comp[i]], i);
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < num_comp; ++c)
    if (size[c] > size[best] || (size[c] == size[best] && min_node[c] < min_node[best])) best = c;

  std::vector<node_t> nodes;
  nodes.reserve(size[best]);
  for (node_t i = 0; i < g.num_nodes(); ++i)
    if (comp[i] == best) nodes.push_back(i);
  return induced_subgraph(g, std::move(nodes));
}

namespace detail {

template <typename Neighbors>
std::vector<bool> bfs_mark(std::size_t n, std::span<const node_t> seeds, Neighbors neighbors) {
  std::vector<bool> seen(n, false);
  std::vector<node_t> queue;
  for (node_t s : seeds) {
    if (s >= n) throw InvalidArgument("seed index out of range");
    if (!seen[s]) {
      seen[s] = true;
      queue.push_back(s);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (node_t w : neighbors(queue[head]))
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
  return seen;
}

}  // namespace detail

/// Nodes reachable from any seed along directed edges (seeds included).
inline std::vector<node_t> reachable_nodes(const DirectedGraph& g, std::span<const node_t> seeds) {
  if (seeds.empty()) throw InvalidArgument("reachable set needs at least one seed");
  const auto seen = detail::bfs_mark(g.num_nodes(), seeds, [&g](node_t v) { return g.out_neighbors(v); });
  std::vector<node_t> nodes;
  for (node_t i = 0; i < g.num_nodes(); ++i)
    if (seen[i]) nodes.push_back(i);
  return nodes;
}

inline MappedGraph reachable_set(const DirectedGraph& g, std::span<const node_t> seeds) {
  return induced_subgraph(g, reachable_nodes(g, seeds));
}

inline bool is_strongly_connected(const DirectedGraph& g) {
  const std::size_t n = g.num_nodes();
  if (n == 0) return false;
  const node_t root[] = {0};
  const auto fwd = detail::bfs_mark(n, root, [&g](node_t v) { return g.out_neighbors(v); });
  const auto bwd = detail::bfs_mark(n, root, [&g](node_t v) { return g.in_neighbors(v); });
  return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

}  // namespace nmmc
