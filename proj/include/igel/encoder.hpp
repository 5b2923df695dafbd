#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "igel/graph.hpp"

namespace igel {

/// Parameters of the distance-degree encoding.
struct EncoderConfig {
  std::uint32_t alpha = 1;      // neighborhood radius
  std::uint32_t delta_max = 1;  // degree bins per distance; larger degrees clip here
  bool apply_log = true;        // z -> log2(1 + z)
  bool apply_unit_norm = true;  // divide by the vector's own maximum
  bool log_bins = false;        // bin degrees by floor(log2 d) + 1 instead of d

  /// Degree bins per distance level.
  std::uint32_t bins() const;
  /// Length of the sparse feature vector, (alpha + 1) * bins().
  std::size_t dim() const { return static_cast<std::size_t>(alpha + 1) * bins(); }
  /// Bin (1-based) of an induced degree after clipping. Degree 0 maps to bin 1.
  std::uint32_t degree_bin(std::uint32_t degree) const;
  /// Flat index of a (distance, bin) pair: distance * bins() + (bin - 1).
  std::size_t flat_index(std::uint32_t distance, std::uint32_t bin) const {
    return static_cast<std::size_t>(distance) * bins() + (bin - 1);
  }

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

struct FeatureEntry {
  std::uint32_t index = 0;
  double value = 0.0;
  friend bool operator==(const FeatureEntry&, const FeatureEntry&) = default;
};

/// Sparse structural vector of one node. Indices are strictly increasing.
struct SparseFeatures {
  std::vector<FeatureEntry> entries;
  std::size_t dim = 0;
  friend bool operator==(const SparseFeatures&, const SparseFeatures&) = default;
};

/// Encoder config for a training graph: delta_max is its maximum degree
/// (at least 1).
EncoderConfig fit_config(const Graph& g, std::uint32_t alpha);

SparseFeatures encode_node(const Graph& g, NodeId n, const EncoderConfig& cfg);

/// Same as encode_node but reuses the explorer's scratch buffers.
SparseFeatures encode_node(NeighborhoodExplorer& explorer, NodeId n,
                           const EncoderConfig& cfg);

/// Encodes every node; rows are independent and the result does not depend
/// on `threads`.
std::vector<SparseFeatures> encode_all(const Graph& g, const EncoderConfig& cfg,
                                       unsigned threads = 1);

/// Text form, one node per line: `node_id (c,delta):value ...`. `delta` is
/// the 1-based bin. Values are written with round-trip precision.
void write_features(std::ostream& out, std::span<const SparseFeatures> rows,
                    const EncoderConfig& cfg, std::span<const std::string> labels = {});

}  // namespace igel
