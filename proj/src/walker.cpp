#include "igel/walker.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "igel/parallel.hpp"

namespace igel {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

Walk random_walk(const Graph& g, NodeId start, std::uint32_t length, std::mt19937_64& rng) {
  if (start >= g.num_nodes()) throw Error("walk start out of range");
  Walk walk;
  if (length == 0) return walk;
  walk.reserve(length);
  walk.push_back(start);
  NodeId current = start;
  while (walk.size() < length) {
    auto nb = g.neighbors(current);
    if (nb.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, nb.size() - 1);
    current = nb[pick(rng)];
    walk.push_back(current);
  }
  return walk;
}

std::uint64_t walk_seed(std::uint64_t seed, NodeId start, std::uint32_t replica) {
  return splitmix64(seed ^ splitmix64((static_cast<std::uint64_t>(start) << 32) | replica));
}

WalkCorpus generate_corpus(const Graph& g, const WalkConfig& cfg, unsigned threads) {
  if (cfg.walks_per_node < 1 || cfg.walk_length < 1) {
    throw Error("walks_per_node and walk_length must be at least 1");
  }
  const std::size_t total = g.num_nodes() * cfg.walks_per_node;
  std::vector<Walk> walks(total);
  parallel_for_slices(total, threads, [&](unsigned, std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto start = static_cast<NodeId>(k / cfg.walks_per_node);
      const auto replica = static_cast<std::uint32_t>(k % cfg.walks_per_node);
      std::mt19937_64 rng(walk_seed(cfg.seed, start, replica));
      walks[k] = random_walk(g, start, cfg.walk_length, rng);
    }
  });
  WalkCorpus corpus;
  corpus.offsets.reserve(total + 1);
  std::size_t length = 0;
  for (const auto& w : walks) length += w.size();
  corpus.nodes.reserve(length);
  for (const auto& w : walks) {
    corpus.nodes.insert(corpus.nodes.end(), w.begin(), w.end());
    corpus.offsets.push_back(corpus.nodes.size());
  }
  return corpus;
}

void write_corpus(std::ostream& out, const WalkCorpus& corpus) {
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    auto w = corpus.walk(k);
    for (std::size_t i = 0; i < w.size(); ++i) out << (i ? " " : "") << w[i];
    out << '\n';
  }
}

std::vector<ContextPair> context_pairs(std::span<const NodeId> walk, std::uint32_t window) {
  if (window < 1) throw Error("context window must be at least 1");
  std::vector<ContextPair> pairs;
  pairs.reserve(context_pair_count(walk.size(), window));
  for_each_context_pair(walk, window,
                        [&](NodeId t, NodeId o) { pairs.push_back({t, o}); });
  return pairs;
}

std::size_t context_pair_count(std::size_t length, std::uint32_t window) {
  // Each unordered pair of positions at distance k <= window appears twice.
  std::size_t count = 0;
  for (std::size_t k = 1; k <= window && k < length; ++k) count += 2 * (length - k);
  return count;
}

NoiseDistribution NoiseDistribution::uniform(std::size_t num_nodes) {
  if (num_nodes == 0) throw Error("noise distribution over an empty node set");
  NoiseDistribution d;
  d.kind_ = NoiseKind::kUniform;
  d.size_ = num_nodes;
  return d;
}

NoiseDistribution NoiseDistribution::from_counts(std::span<const std::uint64_t> counts,
                                                 double exponent) {
  if (counts.empty()) throw Error("noise distribution over an empty node set");
  NoiseDistribution d;
  d.kind_ = NoiseKind::kFrequency;
  d.size_ = counts.size();
  d.cumulative_.resize(counts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    total += std::pow(static_cast<double>(counts[i]), exponent);
    d.cumulative_[i] = total;
  }
  if (total <= 0.0) throw Error("noise distribution has zero total mass");
  for (double& c : d.cumulative_) c /= total;
  d.cumulative_.back() = 1.0;
  return d;
}

NoiseDistribution NoiseDistribution::from_corpus(const WalkCorpus& corpus,
                                                 std::size_t num_nodes, double exponent) {
  std::vector<std::uint64_t> counts(num_nodes, 0);
  for (NodeId n : corpus.nodes) ++counts[n];
  return from_counts(counts, exponent);
}

double NoiseDistribution::probability(NodeId n) const {
  if (n >= size_) return 0.0;
  if (kind_ == NoiseKind::kUniform) return 1.0 / static_cast<double>(size_);
  return cumulative_[n] - (n == 0 ? 0.0 : cumulative_[n - 1]);
}

NodeId NoiseDistribution::sample(std::mt19937_64& rng) const {
  if (kind_ == NoiseKind::kUniform) {
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(size_ - 1));
    return pick(rng);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = unit(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
  return static_cast<NodeId>(std::min<std::size_t>(
      static_cast<std::size_t>(it - cumulative_.begin()), size_ - 1));
}

}  // namespace igel
