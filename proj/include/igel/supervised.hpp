#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "igel/datasets.hpp"
#include "igel/embedding.hpp"
#include "igel/encoder.hpp"
#include "igel/unsupervised.hpp"

namespace igel {

// ---------------------------------------------------------------------------
// Link prediction
// ---------------------------------------------------------------------------

/// Element-wise product of two node embeddings.
std::vector<double> edge_features(std::span<const double> eu, std::span<const double> ev);

/// Logistic regression over Hadamard edge features.
struct EdgeClassifier {
  std::vector<double> weights;
  double bias = 0.0;

  double logit(std::span<const double> eu, std::span<const double> ev) const;
  double probability(std::span<const double> eu, std::span<const double> ev) const;
};

struct LogRegConfig {
  double l2 = 1e-4;
  std::uint32_t iterations = 500;
};

/// Full-batch gradient descent on mean binary cross-entropy plus
/// (l2 / 2) * |w|^2. The step size is 1 / L for the smoothness constant L of
/// the objective, so no learning rate needs tuning. `features` is row-major
/// n x dim; labels are 0/1. Throws Error if only one class is present.
EdgeClassifier train_logistic_regression(std::span<const double> features,
                                         std::span<const double> labels, std::size_t dim,
                                         const LogRegConfig& cfg = {});

/// Trains on the split's positives (label 1) and negatives (label 0) using
/// embeddings of the split's train graph.
EdgeClassifier train_edge_classifier(const EdgeSplit& split, const EmbeddingMatrix& w,
                                     const EncoderConfig& enc, const LogRegConfig& cfg = {});
EdgeClassifier train_edge_classifier(const EdgeSplit& split, const NodeEmbeddings& emb,
                                     const LogRegConfig& cfg = {});

// ---------------------------------------------------------------------------
// Multi-label head
// ---------------------------------------------------------------------------

enum class Activation { kElu, kRelu };

/// Feed-forward network mapping [e_n, F_n] to M label logits. All weights
/// and biases live in one flat parameter vector.
class MultiLabelHead {
 public:
  struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::size_t weight_offset = 0;  // out x in, row-major
    std::size_t bias_offset = 0;
    friend bool operator==(const Layer&, const Layer&) = default;
  };

  MultiLabelHead() = default;
  /// Layer widths: input -> hidden... -> num_labels. Glorot-uniform weights,
  /// zero biases.
  MultiLabelHead(std::size_t input_dim, std::span<const std::size_t> hidden,
                 std::size_t num_labels, Activation activation, std::uint64_t seed);

  std::size_t input_dim() const { return layers_.empty() ? 0 : layers_.front().in; }
  std::size_t num_labels() const { return layers_.empty() ? 0 : layers_.back().out; }
  Activation activation() const { return activation_; }
  std::span<const Layer> layers() const { return layers_; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  /// Row-major logits for `rows` inputs.
  std::vector<double> logits(std::span<const double> inputs, std::size_t rows) const;

  /// Forward plus backward: given inputs, returns logits and, from
  /// dloss/dlogits, accumulates dloss/dparams and writes dloss/dinputs.
  struct Tape {
    std::vector<std::vector<double>> pre;   // pre-activation per layer
    std::vector<std::vector<double>> post;  // input to each layer
  };
  std::vector<double> forward(std::span<const double> inputs, std::size_t rows,
                              Tape& tape) const;
  void backward(const Tape& tape, std::size_t rows, std::span<const double> grad_logits,
                std::span<double> grad_params, std::span<double> grad_inputs) const;

  friend bool operator==(const MultiLabelHead&, const MultiLabelHead&) = default;

 private:
  Activation activation_ = Activation::kElu;
  std::vector<Layer> layers_;
  std::vector<double> params_;
};

/// Summed binary cross-entropy over every (row, label) cell of pre-sigmoid
/// logits. Throws Error on shape mismatch or labels outside {0, 1}.
double multilabel_loss(std::span<const double> logits, std::span<const double> labels,
                       std::size_t num_labels);
/// d(multilabel_loss)/d(logits) = sigmoid(logit) - label.
std::vector<double> multilabel_loss_grad(std::span<const double> logits,
                                         std::span<const double> labels);

enum class SplitTag { kTrain, kValidation, kTest };

struct LabeledGraph {
  Graph graph;
  std::vector<double> labels;      // |V| x M, entries 0 or 1
  std::vector<double> attributes;  // |V| x K, or empty
  SplitTag split = SplitTag::kTrain;
};

struct LabeledNodeDataset {
  std::vector<LabeledGraph> graphs;
  std::size_t num_labels = 0;
  std::size_t attribute_dim = 0;

  /// Throws Error unless every graph's labels and attributes have the
  /// declared widths and labels are binary.
  void validate() const;
};

/// Dense per-node rows read from a `node_id v1 ... vK` text file.
struct NodeMatrix {
  std::vector<double> values;  // |V| x width, row order follows node ids
  std::size_t width = 0;
};

/// Parses a label or attribute file against the graph's label dictionary.
/// Every node must appear exactly once and every row must have the same
/// width. With `binary`, values other than 0 and 1 are rejected.
NodeMatrix read_node_matrix(std::istream& in, std::span<const std::string> node_labels,
                            bool binary);
NodeMatrix load_node_matrix(const std::string& path, std::span<const std::string> node_labels,
                            bool binary);

/// Encoder fitted on the union of training graphs: delta_max is their
/// maximum degree.
EncoderConfig fit_config(const LabeledNodeDataset& data, std::uint32_t alpha);

struct HeadConfig {
  std::uint32_t dim = 256;  // embedding width d
  std::vector<std::size_t> hidden{256, 256, 256};
  Activation activation = Activation::kElu;
  double learning_rate = 0.005;
  std::uint32_t epochs = 1000;
  std::uint32_t patience = 100;
  bool use_attributes = true;
  std::uint64_t seed = 0;
  double init_scale = 0.0;  // W init; 0 selects 0.5 / dim
  unsigned threads = 1;
};

struct JointReport {
  std::vector<double> train_loss;  // mean per-cell BCE per epoch
  std::vector<double> val_f1;      // micro-F1 on validation graphs per epoch
  double initial_val_f1 = 0.0;
  double best_val_f1 = 0.0;
  std::uint32_t best_epoch = 0;  // 0 means the untrained initialization
  std::uint32_t epochs_run = 0;
  double seconds = 0.0;
};

struct JointModel {
  EmbeddingMatrix matrix;
  MultiLabelHead head;
  bool use_attributes = true;
};

struct JointResult {
  JointModel model;
  JointReport report;
};

/// Summed loss over labeled nodes of one graph and, when the gradient
/// pointers are non-null, its gradients w.r.t. W and the head parameters
/// (overwritten).
double joint_loss(std::span<const SparseFeatures> features, std::span<const double> attributes,
                  std::span<const double> labels, const JointModel& model,
                  GradientBuffer* grad_w, std::vector<double>* grad_head);

/// Jointly fits W and the head on training graphs, keeping the checkpoint
/// with the best validation micro-F1 and stopping after `patience` epochs
/// without improvement. Throws Error on an empty validation split or a
/// non-finite loss.
JointResult train_joint(const LabeledNodeDataset& data, const EncoderConfig& enc,
                        const HeadConfig& cfg);
JointResult train_joint(const LabeledNodeDataset& data, const EncoderConfig& enc,
                        const HeadConfig& cfg, EmbeddingMatrix initial);

/// Label probabilities for every node of `g` (|V| x M). Re-encodes `g`, so
/// unseen graphs work.
std::vector<double> predict_all(const JointModel& model, const EncoderConfig& enc,
                                const Graph& g, std::span<const double> attributes = {},
                                unsigned threads = 1);
std::vector<double> predict(const JointModel& model, const EncoderConfig& enc, const Graph& g,
                            NodeId node, std::span<const double> attributes = {});

/// Thresholds probabilities at 0.5.
std::vector<double> threshold_predictions(std::span<const double> probabilities);

}  // namespace igel
