#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "igel/graph.hpp"

namespace igel {

/// Held-out data for link prediction.
struct EdgeSplit {
  Graph train_graph;
  std::vector<Edge> positive_edges;  // removed from the original graph
  std::vector<Edge> negative_edges;  // sampled non-edges of the original graph
};

/// Removes round(fraction * |E|) edges while keeping the graph connected and
/// samples the same number of non-adjacent pairs, or every non-adjacent pair
/// when the graph has fewer than that.
///
/// Removal only touches edges outside a BFS spanning tree, so the train graph
/// stays connected. Throws Error when the quota exceeds the number of
/// non-tree edges; the message names the achievable maximum.
EdgeSplit split_edges_for_link_prediction(const Graph& g, double fraction,
                                          std::uint64_t seed);

/// Writes `train.edges`, `positive.pairs` and `negative.pairs` into `dir`.
void save_edge_split(const std::string& dir, const EdgeSplit& split,
                     const std::vector<std::string>& labels = {});

struct GraphGenSpec {
  std::size_t num_nodes = 2;
  double avg_degree = 0.0;
  std::uint64_t seed = 0;
};

/// G(n, p) with p = avg_degree / (n - 1), sampled by geometric skipping over
/// the pair sequence. Deterministic for a fixed seed.
Graph generate_erdos_renyi(const GraphGenSpec& spec);

/// Two copies of `g` joined by one edge between a random node of each copy.
/// Node i of the second copy is i + |V|.
struct ClonedGraph {
  Graph graph;
  NodeId bridge_a = 0;  // endpoint in the first copy
  NodeId bridge_b = 0;  // endpoint in the second copy
};
ClonedGraph clone_graph_with_bridge(const Graph& g, std::uint64_t seed);

}  // namespace igel
