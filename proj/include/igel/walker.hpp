#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "igel/graph.hpp"

namespace igel {

struct WalkConfig {
  std::uint32_t walks_per_node = 10;  // w
  std::uint32_t walk_length = 80;     // s
  std::uint64_t seed = 0;
};

using Walk = std::vector<NodeId>;

struct ContextPair {
  NodeId target = 0;
  NodeId context = 0;
  friend bool operator==(const ContextPair&, const ContextPair&) = default;
};

/// Uniform random walk of `length` nodes starting at `start`. A walk from an
/// isolated node stops after the start node.
Walk random_walk(const Graph& g, NodeId start, std::uint32_t length, std::mt19937_64& rng);

/// Seed of the walk with index `replica` from `start`; mixes all three values
/// so walks are independent of generation order.
std::uint64_t walk_seed(std::uint64_t seed, NodeId start, std::uint32_t replica);

/// All walks of a corpus, stored back to back. Walk k covers
/// nodes[offsets[k] .. offsets[k+1]); walk k starts at node k / w and is
/// replica k % w.
struct WalkCorpus {
  std::vector<std::size_t> offsets{0};
  std::vector<NodeId> nodes;

  std::size_t size() const { return offsets.size() - 1; }
  std::span<const NodeId> walk(std::size_t k) const {
    return {nodes.data() + offsets[k], nodes.data() + offsets[k + 1]};
  }
};

/// Exactly walks_per_node * |V| walks; identical for any `threads`.
WalkCorpus generate_corpus(const Graph& g, const WalkConfig& cfg, unsigned threads = 1);

/// One walk per line, space-separated node ids.
void write_corpus(std::ostream& out, const WalkCorpus& corpus);

/// Calls fn(target, context) for every ordered pair of positions at most
/// `window` apart, repetitions included.
template <typename Fn>
void for_each_context_pair(std::span<const NodeId> walk, std::uint32_t window, Fn&& fn) {
  const std::size_t n = walk.size();
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t lo = t >= window ? t - window : 0;
    const std::size_t hi = std::min(n - 1, t + static_cast<std::size_t>(window));
    for (std::size_t o = lo; o <= hi; ++o) {
      if (o != t) fn(walk[t], walk[o]);
    }
  }
}

std::vector<ContextPair> context_pairs(std::span<const NodeId> walk, std::uint32_t window);

/// Number of pairs for_each_context_pair emits on a walk of `length` nodes.
std::size_t context_pair_count(std::size_t length, std::uint32_t window);

enum class NoiseKind { kUniform, kFrequency };

/// Negative-sample distribution over node ids: uniform, or proportional to
/// (visit count)^0.75.
class NoiseDistribution {
 public:
  static NoiseDistribution uniform(std::size_t num_nodes);
  static NoiseDistribution from_counts(std::span<const std::uint64_t> counts,
                                       double exponent = 0.75);
  static NoiseDistribution from_corpus(const WalkCorpus& corpus, std::size_t num_nodes,
                                       double exponent = 0.75);

  NoiseKind kind() const { return kind_; }
  std::size_t size() const { return size_; }
  double probability(NodeId n) const;
  NodeId sample(std::mt19937_64& rng) const;

 private:
  NoiseKind kind_ = NoiseKind::kUniform;
  std::size_t size_ = 0;
  std::vector<double> cumulative_;  // frequency kind only; last entry is 1
};

}  // namespace igel
