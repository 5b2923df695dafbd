#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace igel {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Undirected simple graph in offset+target (CSR) layout.
///
/// Neighbor lists are sorted ascending, symmetric, and free of self-loops and
/// duplicates. A Graph is immutable once built and safe for concurrent reads.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph over `num_nodes` nodes. Self-loops are dropped and
  /// duplicate or reversed-duplicate edges collapse to one edge.
  static Graph from_edges(std::size_t num_nodes, std::span<const Edge> edges);

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return targets_.size() / 2; }

  std::size_t degree(NodeId n) const { return offsets_[n + 1] - offsets_[n]; }
  std::span<const NodeId> neighbors(NodeId n) const {
    return {targets_.data() + offsets_[n], targets_.data() + offsets_[n + 1]};
  }
  bool has_edge(NodeId u, NodeId v) const;
  std::size_t max_degree() const;

  /// Every undirected edge once, as (u, v) with u < v, in ascending order.
  std::vector<Edge> edges() const;

  std::span<const std::size_t> offsets() const { return offsets_; }
  std::span<const NodeId> targets() const { return targets_; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
};

/// A graph read from text together with the external label of every node.
struct LoadedGraph {
  Graph graph;
  std::vector<std::string> labels;  // labels[id] is the token seen in the file
  std::size_t self_loops = 0;
  std::size_t duplicate_edges = 0;
};

/// Reads an edge list: two whitespace-separated tokens per line, '#' lines
/// and blank lines ignored. Tokens are arbitrary strings mapped to dense ids
/// in order of first appearance. Throws Error on a malformed line (with its
/// line number) or when no edge survives.
LoadedGraph read_edge_list(std::istream& in);
LoadedGraph load_edge_list(const std::string& path);

/// Reads node pairs against an existing label dictionary; unseen labels are
/// appended. Used for files that share one dictionary, such as a train split
/// and its held-out pairs.
std::vector<Edge> read_pairs(std::istream& in, std::vector<std::string>& labels);

void write_edge_list(std::ostream& out, std::span<const Edge> edges,
                     std::span<const std::string> labels = {});
void save_edge_list(const std::string& path, std::span<const Edge> edges,
                    std::span<const std::string> labels = {});

/// Persists the id -> label dictionary as `id<TAB>label` lines.
void save_labels(const std::string& path, std::span<const std::string> labels);

/// Hop distances from `source`; unreachable nodes get kUnreachable.
inline constexpr std::uint32_t kUnreachable = 0xffffffffu;
std::vector<std::uint32_t> bfs_distances(const Graph& g, NodeId source);

bool is_connected(const Graph& g);

/// Component id per node, numbered in order of the smallest node id.
std::vector<std::uint32_t> connected_components(const Graph& g);

/// The α-ball around a node: every node within `alpha` hops, its hop
/// distance, and its degree counted only over edges with both endpoints
/// inside the ball. `nodes[0]` is the root.
struct Neighborhood {
  std::vector<NodeId> nodes;
  std::vector<std::uint32_t> distance;
  std::vector<std::uint32_t> induced_degree;
};

/// Reusable scratch space for repeated neighborhood extraction on one graph.
/// Not thread-safe; use one instance per worker.
class NeighborhoodExplorer {
 public:
  explicit NeighborhoodExplorer(const Graph& g);
  const Neighborhood& explore(NodeId root, std::uint32_t alpha);

 private:
  const Graph* graph_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  Neighborhood ball_;
};

Neighborhood neighborhood_subgraph(const Graph& g, NodeId n, std::uint32_t alpha);

}  // namespace igel
