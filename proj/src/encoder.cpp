#include "igel/encoder.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <ostream>

#include "igel/parallel.hpp"

namespace igel {

namespace {

std::uint32_t log_bin(std::uint32_t degree) {
  return static_cast<std::uint32_t>(std::bit_width(degree));  // floor(log2 d) + 1
}

}  // namespace

std::uint32_t EncoderConfig::bins() const {
  return log_bins ? log_bin(delta_max) : delta_max;
}

std::uint32_t EncoderConfig::degree_bin(std::uint32_t degree) const {
  if (degree == 0) return 1;
  const std::uint32_t clipped = std::min(degree, delta_max);
  return log_bins ? log_bin(clipped) : clipped;
}

EncoderConfig fit_config(const Graph& g, std::uint32_t alpha) {
  if (g.num_nodes() == 0) throw Error("cannot fit an encoder on an empty graph");
  EncoderConfig cfg;
  cfg.alpha = alpha;
  cfg.delta_max = static_cast<std::uint32_t>(std::max<std::size_t>(1, g.max_degree()));
  return cfg;
}

SparseFeatures encode_node(NeighborhoodExplorer& explorer, NodeId n,
                           const EncoderConfig& cfg) {
  if (cfg.delta_max < 1) throw Error("delta_max must be at least 1");
  const Neighborhood& ball = explorer.explore(n, cfg.alpha);

  std::vector<std::uint32_t> slots(ball.nodes.size());
  for (std::size_t i = 0; i < ball.nodes.size(); ++i) {
    slots[i] = static_cast<std::uint32_t>(
        cfg.flat_index(ball.distance[i], cfg.degree_bin(ball.induced_degree[i])));
  }
  std::sort(slots.begin(), slots.end());

  SparseFeatures x;
  x.dim = cfg.dim();
  double peak = 0.0;
  for (std::size_t i = 0; i < slots.size();) {
    std::size_t j = i;
    while (j < slots.size() && slots[j] == slots[i]) ++j;
    double value = static_cast<double>(j - i);
    if (cfg.apply_log) value = std::log2(1.0 + value);
    peak = std::max(peak, value);
    x.entries.push_back({slots[i], value});
    i = j;
  }
  if (cfg.apply_unit_norm && peak > 0.0) {
    for (auto& e : x.entries) e.value /= peak;
  }
  return x;
}

SparseFeatures encode_node(const Graph& g, NodeId n, const EncoderConfig& cfg) {
  NeighborhoodExplorer explorer(g);
  return encode_node(explorer, n, cfg);
}

std::vector<SparseFeatures> encode_all(const Graph& g, const EncoderConfig& cfg,
                                       unsigned threads) {
  std::vector<SparseFeatures> rows(g.num_nodes());
  parallel_for_slices(g.num_nodes(), threads,
                      [&](unsigned, std::size_t begin, std::size_t end) {
                        NeighborhoodExplorer explorer(g);
                        for (std::size_t i = begin; i < end; ++i) {
                          rows[i] = encode_node(explorer, static_cast<NodeId>(i), cfg);
                        }
                      });
  return rows;
}

void write_features(std::ostream& out, std::span<const SparseFeatures> rows,
                    const EncoderConfig& cfg, std::span<const std::string> labels) {
  const std::uint32_t bins = cfg.bins();
  char buf[64];
  for (std::size_t n = 0; n < rows.size(); ++n) {
    if (labels.empty()) {
      out << n;
    } else {
      out << labels[n];
    }
    for (const auto& e : rows[n].entries) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, e.value);
      out << " (" << e.index / bins << ',' << e.index % bins + 1 << "):"
          << std::string_view(buf, static_cast<std::size_t>(end - buf));
    }
    out << '\n';
  }
}

}  // namespace igel
