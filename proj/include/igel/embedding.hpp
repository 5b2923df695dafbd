#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "igel/encoder.hpp"

namespace igel {

using DenseEmbedding = std::vector<double>;

/// Learnable structural-feature matrix: one row of length `cols` per sparse
/// feature index. Row-major storage.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  /// Encoder the matrix was trained for. Written into the file header.
  EncoderConfig encoder;
  std::uint64_t init_seed = 0;

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Values i.i.d. uniform in [-scale, +scale].
EmbeddingMatrix init_embedding(std::size_t rows, std::size_t cols, std::uint64_t seed,
                               double scale);

/// e = sum over entries of value * W[index]. Zero vector for empty x.
DenseEmbedding forward(const SparseFeatures& x, const EmbeddingMatrix& w);
void forward_into(const SparseFeatures& x, const EmbeddingMatrix& w, std::span<double> out);

/// Dense gradient buffer with the shape of an EmbeddingMatrix.
class GradientBuffer {
 public:
  GradientBuffer(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  void zero() { std::fill(values_.begin(), values_.end(), 0.0); }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

/// Backpropagates through forward(): grad_w[index] += value * grad_e.
void accumulate_gradient(const SparseFeatures& x, std::span<const double> grad_e,
                         GradientBuffer& grad_w);

/// Binary file: magic, version, rows, cols, alpha, delta_max, encoder flags,
/// init seed, then rows*cols little-endian float64 values.
void save_embedding(const std::string& path, const EmbeddingMatrix& w);
void write_embedding(std::ostream& out, const EmbeddingMatrix& w);
EmbeddingMatrix load_embedding(const std::string& path);
EmbeddingMatrix read_embedding(std::istream& in);

/// Throws Error with a diagnostic when `w` was not built for `cfg`.
void check_compatible(const EmbeddingMatrix& w, const EncoderConfig& cfg);

/// Node table export: `node_id v1 ... vd` per line.
void write_node_embeddings(std::ostream& out, std::span<const double> table,
                           std::size_t dim, std::span<const std::string> labels = {});

}  // namespace igel
