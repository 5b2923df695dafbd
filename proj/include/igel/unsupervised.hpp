#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "igel/embedding.hpp"
#include "igel/encoder.hpp"
#include "igel/graph.hpp"
#include "igel/optim.hpp"
#include "igel/walker.hpp"

namespace igel {

enum class ParallelMode {
  kDeterministic,  // one logical writer, seed-fixed update order
  kRacy,           // lock-free concurrent writers on W
};

struct UnsupConfig {
  std::uint32_t dim = 256;        // d
  std::uint32_t negatives = 5;    // z
  std::uint32_t window = 10;      // p
  double learning_rate = 0.01;
  std::uint32_t epochs = 1;
  std::size_t batch_size = 50000;  // positive pairs per update
  OptimizerKind optimizer = OptimizerKind::kAdam;
  NoiseKind noise = NoiseKind::kUniform;
  ParallelMode mode = ParallelMode::kDeterministic;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  double init_scale = 0.0;  // 0 selects 0.5 / dim
};

struct TrainReport {
  std::vector<double> epoch_objective;  // mean log-likelihood per positive pair
  double final_objective = 0.0;
  double encode_seconds = 0.0;
  double walk_seconds = 0.0;
  double optimize_seconds = 0.0;
  std::size_t pairs_per_epoch = 0;
};

/// Loss and exact partial derivatives of one positive pair with its negatives:
/// log sig(t.o) + sum_i log sig(-t.n_i).
struct PairLoss {
  double loss = 0.0;
  DenseEmbedding grad_target;
  DenseEmbedding grad_context;
  std::vector<DenseEmbedding> grad_negatives;
};

PairLoss pair_loss_and_grad(std::span<const double> target, std::span<const double> context,
                            std::span<const std::span<const double>> negatives);

/// Numerically stable log(sigmoid(x)).
double log_sigmoid(double x);
double sigmoid(double x);

/// A positive pair plus the negatives drawn for it.
struct TrainingSample {
  NodeId target = 0;
  NodeId context = 0;
  std::vector<NodeId> negatives;
};

/// Sum of the pair objective over `samples` with embeddings computed from
/// `features` through W. When `grad` is non-null it receives dL/dW (the
/// ascent direction), overwriting its contents.
double skipgram_objective(std::span<const SparseFeatures> features, const EmbeddingMatrix& w,
                          std::span<const TrainingSample> samples,
                          GradientBuffer* grad = nullptr);

struct UnsupResult {
  EmbeddingMatrix matrix;
  TrainReport report;
};

/// Maximizes the negative-sampling log-likelihood over walks on `g`.
/// Throws Error if the objective becomes non-finite.
UnsupResult train_unsupervised(const Graph& g, const EncoderConfig& enc,
                               const WalkConfig& walk, const UnsupConfig& cfg);

/// Continues training from an existing matrix (used by tests and for
/// pre-initialized runs).
UnsupResult train_unsupervised(const Graph& g, const EncoderConfig& enc,
                               const WalkConfig& walk, const UnsupConfig& cfg,
                               EmbeddingMatrix initial);

/// Dense per-node embedding table, row-major |V| x dim.
struct NodeEmbeddings {
  std::size_t dim = 0;
  std::vector<double> values;

  std::size_t size() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> row(std::size_t n) const { return {values.data() + n * dim, dim}; }
  std::span<double> row(std::size_t n) { return {values.data() + n * dim, dim}; }
};

/// Re-encodes `g` with the training-time encoder (degrees above delta_max
/// clip into the last bin) and applies W. Works on graphs unseen in training.
NodeEmbeddings embed_nodes(const Graph& g, const EncoderConfig& enc, const EmbeddingMatrix& w,
                           unsigned threads = 1);
NodeEmbeddings embed_features(std::span<const SparseFeatures> features,
                              const EmbeddingMatrix& w, unsigned threads = 1);

}  // namespace igel
