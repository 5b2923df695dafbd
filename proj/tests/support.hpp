#pragma once

// Helpers shared by the unit tests and the acceptance runner: small fixture
// graphs and brute-force reference implementations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "igel/encoder.hpp"
#include "igel/graph.hpp"

namespace igel::testing {

/// The example neighborhood: root n with neighbors b1, b2; second ring r1,
/// r2, r3; plus x and y beyond distance 2.
/// Ids: n=0, b1=1, b2=2, r1=3, r2=4, r3=5, x=6, y=7.
inline Graph figure_graph() {
  const std::vector<Edge> edges{{0, 1}, {0, 2}, {1, 5}, {2, 3}, {2, 4}, {2, 5},
                                {3, 5}, {4, 5}, {3, 4}, {3, 6}, {6, 7}};
  return Graph::from_edges(8, edges);
}

inline Graph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph::from_edges(n, edges);
}

/// Two disjoint cliques of size k on ids [0, k) and [k, 2k).
inline Graph two_cliques(std::size_t k, bool bridged = false) {
  std::vector<Edge> edges;
  for (NodeId base : {NodeId{0}, static_cast<NodeId>(k)}) {
    for (NodeId i = 0; i < k; ++i)
      for (NodeId j = i + 1; j < k; ++j) edges.emplace_back(base + i, base + j);
  }
  if (bridged) edges.emplace_back(0, static_cast<NodeId>(k));
  return Graph::from_edges(2 * k, edges);
}

/// G(n, p) by independent coin flips per pair.
inline Graph coin_flip_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (coin(rng)) edges.emplace_back(u, v);
  return Graph::from_edges(n, edges);
}

/// Distances by Floyd-Warshall on an adjacency matrix.
inline std::vector<std::vector<std::uint32_t>> all_pairs_distances(const Graph& g) {
  const std::size_t n = g.num_nodes();
  const std::uint32_t inf = kUnreachable;
  std::vector<std::vector<std::uint32_t>> d(n, std::vector<std::uint32_t>(n, inf));
  for (NodeId u = 0; u < n; ++u) {
    d[u][u] = 0;
    for (NodeId v : g.neighbors(u)) d[u][v] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      if (d[i][k] == inf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (d[k][j] == inf) continue;
        d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
      }
    }
  return d;
}

/// Raw (distance, induced degree) -> count over the alpha-ball of `root`,
/// computed from a distance matrix and explicit induced edge counting.
inline std::map<std::pair<std::uint32_t, std::uint32_t>, int> brute_force_counts(
    const Graph& g, const std::vector<std::vector<std::uint32_t>>& dist, NodeId root,
    std::uint32_t alpha) {
  std::vector<NodeId> ball;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (dist[root][v] <= alpha) ball.push_back(v);
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> counts;
  for (NodeId v : ball) {
    std::uint32_t deg = 0;
    for (NodeId w : ball)
      if (g.has_edge(v, w)) ++deg;
    ++counts[{dist[root][v], deg}];
  }
  return counts;
}

/// Reference encoder: brute-force counts, then clipping, log2(1+z) and
/// max-normalization applied exactly as documented.
inline SparseFeatures brute_force_encode(const Graph& g,
                                         const std::vector<std::vector<std::uint32_t>>& dist,
                                         NodeId root, const EncoderConfig& cfg) {
  std::map<std::size_t, double> dense;
  for (const auto& [key, count] : brute_force_counts(g, dist, root, cfg.alpha)) {
    std::uint32_t bin = 0;
    if (cfg.log_bins) {
      bin = 1;
      for (std::uint32_t d = key.second; d > 1; d /= 2) ++bin;
    } else {
      bin = std::max<std::uint32_t>(1, key.second);
    }
    bin = std::min(bin, cfg.bins());
    dense[cfg.flat_index(key.first, bin)] += count;
  }
  SparseFeatures out;
  out.dim = cfg.dim();
  double top = 0.0;
  for (auto& [index, value] : dense) {
    if (cfg.apply_log) value = std::log2(1.0 + value);
    top = std::max(top, value);
  }
  for (const auto& [index, value] : dense) {
    out.entries.push_back(
        {static_cast<std::uint32_t>(index), cfg.apply_unit_norm ? value / top : value});
  }
  return out;
}

/// Largest relative error between an analytic gradient and central
/// differences of f over every coordinate of `params`. Coordinates whose
/// gradients are both tiny are compared absolutely.
inline double max_relative_error(std::vector<double>& params,
                                 const std::function<double()>& f,
                                 const std::vector<double>& analytic, double h = 1e-6) {
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = f();
    params[i] = saved - h;
    const double down = f();
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-3});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / scale);
  }
  return worst;
}

}  // namespace igel::testing
