#include "igel/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <unordered_set>

namespace igel {

namespace {

std::uint64_t pair_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

}  // namespace

EdgeSplit split_edges_for_link_prediction(const Graph& g, double fraction,
                                          std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error("split fraction must lie in (0, 1)");
  }
  if (!is_connected(g)) throw Error("link-prediction split requires a connected graph");

  const std::size_t n = g.num_nodes();
  const auto quota = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(g.num_edges())));

  // BFS spanning tree; every edge outside it can go without disconnecting.
  std::vector<NodeId> parent(n, kUnreachable);
  std::vector<NodeId> order{0};
  parent[0] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    NodeId u = order[head];
    for (NodeId v : g.neighbors(u)) {
      if (parent[v] == kUnreachable) {
        parent[v] = u;
        order.push_back(v);
      }
    }
  }
  std::vector<Edge> removable;
  for (auto [u, v] : g.edges()) {
    if (parent[v] != u && parent[u] != v) removable.emplace_back(u, v);
  }
  if (quota == 0 || quota > removable.size()) {
    throw Error("cannot remove " + std::to_string(quota) + " of " +
                std::to_string(g.num_edges()) +
                " edges while staying connected; achievable maximum is " +
                std::to_string(removable.size()));
  }
  const std::uint64_t total_pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t non_edges = total_pairs - g.num_edges();
  const auto negatives = static_cast<std::size_t>(std::min<std::uint64_t>(quota, non_edges));

  std::mt19937_64 rng(seed);
  std::shuffle(removable.begin(), removable.end(), rng);
  EdgeSplit split;
  split.positive_edges.assign(removable.begin(),
                              removable.begin() + static_cast<std::ptrdiff_t>(quota));
  std::sort(split.positive_edges.begin(), split.positive_edges.end());

  std::unordered_set<std::uint64_t> removed;
  removed.reserve(quota * 2);
  for (auto [u, v] : split.positive_edges) removed.insert(pair_key(u, v));
  std::vector<Edge> kept;
  kept.reserve(g.num_edges() - quota);
  for (auto [u, v] : g.edges()) {
    if (!removed.contains(pair_key(u, v))) kept.emplace_back(u, v);
  }
  split.train_graph = Graph::from_edges(n, kept);

  // Dense graphs enumerate their non-edges; sparse ones sample by rejection.
  if (non_edges <= 2 * static_cast<std::uint64_t>(negatives)) {
    std::vector<Edge> pool;
    pool.reserve(static_cast<std::size_t>(non_edges));
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v)
        if (!g.has_edge(u, v)) pool.emplace_back(u, v);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(negatives);
    split.negative_edges = std::move(pool);
    return split;
  }
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(negatives * 2);
  split.negative_edges.reserve(negatives);
  while (split.negative_edges.size() < negatives) {
    NodeId u = pick(rng);
    NodeId v = pick(rng);
    if (u == v || g.has_edge(u, v)) continue;
    if (!seen.insert(pair_key(u, v)).second) continue;
    split.negative_edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  return split;
}

void save_edge_split(const std::string& dir, const EdgeSplit& split,
                     const std::vector<std::string>& labels) {
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir);
  save_edge_list((base / "train.edges").string(), split.train_graph.edges(), labels);
  save_edge_list((base / "positive.pairs").string(), split.positive_edges, labels);
  save_edge_list((base / "negative.pairs").string(), split.negative_edges, labels);
}

Graph generate_erdos_renyi(const GraphGenSpec& spec) {
  if (spec.num_nodes < 2) throw Error("Erdos-Renyi graph needs at least 2 nodes");
  if (spec.avg_degree < 0.0) throw Error("average degree must be non-negative");
  const std::size_t n = spec.num_nodes;
  const double p = std::min(1.0, spec.avg_degree / static_cast<double>(n - 1));
  std::vector<Edge> edges;
  if (p <= 0.0) return Graph::from_edges(n, edges);

  std::mt19937_64 rng(spec.seed);
  edges.reserve(static_cast<std::size_t>(p * static_cast<double>(n) *
                                         static_cast<double>(n - 1) / 2 * 1.1) + 16);
  if (p >= 1.0) {
    for (NodeId v = 1; v < n; ++v)
      for (NodeId w = 0; w < v; ++w) edges.emplace_back(w, v);
    return Graph::from_edges(n, edges);
  }

  // Walk the lower-triangular pair sequence, jumping geometric gaps.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_q = std::log1p(-p);
  std::int64_t v = 1;
  std::int64_t w = -1;
  const auto nn = static_cast<std::int64_t>(n);
  while (v < nn) {
    const double r = unit(rng);
    w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_q));
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) edges.emplace_back(static_cast<NodeId>(w), static_cast<NodeId>(v));
  }
  return Graph::from_edges(n, edges);
}

ClonedGraph clone_graph_with_bridge(const Graph& g, std::uint64_t seed) {
  const auto n = static_cast<NodeId>(g.num_nodes());
  if (n == 0) throw Error("cannot clone an empty graph");
  std::vector<Edge> edges = g.edges();
  const std::size_t m = edges.size();
  edges.reserve(2 * m + 1);
  for (std::size_t i = 0; i < m; ++i) {
    edges.emplace_back(edges[i].first + n, edges[i].second + n);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> pick(0, n - 1);
  ClonedGraph out;
  out.bridge_a = pick(rng);
  out.bridge_b = pick(rng) + n;
  edges.emplace_back(out.bridge_a, out.bridge_b);
  out.graph = Graph::from_edges(2 * static_cast<std::size_t>(n), edges);
  return out;
}

}  // namespace igel
