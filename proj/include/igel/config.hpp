#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "igel/evaluation.hpp"
#include "igel/supervised.hpp"
#include "igel/unsupervised.hpp"
#include "igel/walker.hpp"

namespace igel {

/// Build version, `git describe --always --dirty` at configure time.
const char* version();

/// Independent seed for the named randomness stream; every random choice of
/// a run traces back to RunConfig::seed through this.
enum class SeedStream : std::uint64_t {
  kWalk = 1,
  kUnsupervised = 2,
  kSplit = 3,
  kHead = 4,
  kClustering = 5,
  kBenchmark = 6,
};
std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream);

struct GraphFiles {
  std::string edges;
  std::string labels;
  std::string attributes;  // optional
};

/// Flat run configuration shared by every subcommand. Each key has a
/// default, so an empty JSON object is a valid config.
struct RunConfig {
  // inputs
  std::string graph;
  std::string matrix;
  std::vector<GraphFiles> train_graphs;
  std::vector<GraphFiles> validation_graphs;
  std::vector<GraphFiles> test_graphs;

  // encoder
  std::uint32_t alpha = 2;
  std::uint32_t delta_max = 0;  // 0 fits it to the training graph
  bool log_transform = true;
  bool unit_norm = true;
  bool log_bins = false;

  // walker
  std::uint32_t walks_per_node = 10;
  std::uint32_t walk_length = 80;

  // unsupervised trainer
  std::uint32_t dim = 256;
  std::uint32_t negatives = 5;
  std::uint32_t window = 10;
  double learning_rate = 0.01;
  std::uint32_t epochs = 1;
  std::size_t batch_size = 50000;
  std::string optimizer = "adam";  // adam | sgd
  std::string noise = "uniform";   // uniform | frequency
  std::string mode = "deterministic";  // deterministic | racy
  double init_scale = 0.0;

  // supervised head
  std::vector<std::size_t> hidden{256, 256, 256};
  std::string activation = "elu";  // elu | relu
  double head_learning_rate = 0.005;
  std::uint32_t head_epochs = 1000;
  std::uint32_t patience = 100;

  // link prediction
  double split_fraction = 0.5;
  double classifier_train_fraction = 0.5;
  double logreg_l2 = 1e-4;
  std::uint32_t logreg_iterations = 500;
  std::uint32_t repeats = 1;

  // clustering
  std::size_t k_min = 2;
  std::size_t k_max = 15;
  std::uint32_t kmeans_restarts = 10;

  // benchmark
  std::vector<std::size_t> bench_sizes{1024, 2048, 4096, 8192, 16384};
  double bench_size_degree = 8.0;
  std::vector<std::uint32_t> bench_size_alphas{1, 2};
  std::vector<double> bench_degrees{2, 4, 8, 16, 32};
  std::size_t bench_degree_size = 4096;
  std::vector<std::uint32_t> bench_degree_alphas{1};
  std::uint32_t bench_replicates = 1;

  // run
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;

  /// Throws Error naming the first out-of-range or inconsistent value.
  void validate() const;
};

/// Parses a JSON object. Unknown keys and wrongly typed values are errors.
/// `base_dir` resolves relative input paths.
RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir = "");
RunConfig load_run_config(const std::string& path);

/// Canonical JSON of every key except `threads` and `out`, which do not
/// affect results. Keys are sorted, so equal configs give equal bytes.
std::string resolved_config_json(const RunConfig& cfg);

EncoderConfig encoder_config(const RunConfig& cfg, const Graph& training_graph);
WalkConfig walk_config(const RunConfig& cfg);
UnsupConfig unsup_config(const RunConfig& cfg);
HeadConfig head_config(const RunConfig& cfg, bool use_attributes);
LinkPredictionConfig link_prediction_config(const RunConfig& cfg);
KMeansConfig kmeans_config(const RunConfig& cfg);
ScalingGrid scaling_grid(const RunConfig& cfg);

}  // namespace igel
