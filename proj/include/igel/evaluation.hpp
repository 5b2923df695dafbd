#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "igel/datasets.hpp"
#include "igel/graph.hpp"
#include "igel/supervised.hpp"
#include "igel/unsupervised.hpp"

namespace igel {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// P(score_pos > score_neg) + 0.5 P(tie), via average ranks. Labels are 0/1.
/// Throws Error when only one class is present.
double roc_auc(std::span<const double> scores, std::span<const double> labels);

/// 2TP / (2TP + FP + FN) pooled over all cells of two binary matrices
/// (flattened). Returns 1 when both matrices have no positives.
double micro_f1(std::span<const double> predicted, std::span<const double> truth);

/// Ranks starting at 1; tied values share the mean of their ranks.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman's rho: Pearson correlation of average ranks. NaN when either
/// input is constant.
double spearman(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Clustering
// ---------------------------------------------------------------------------

struct KMeansConfig {
  std::uint32_t max_iterations = 300;
  double tolerance = 1e-6;  // relative inertia change that stops Lloyd
  std::uint32_t restarts = 10;  // independent k-means++ seedings; best kept
};

struct ClusterAssignment {
  std::size_t k = 0;
  std::vector<std::uint32_t> labels;
  std::vector<double> centroids;  // k x dim
  double inertia = 0.0;
  std::vector<double> inertia_history;  // after each assignment step, chosen run
  double modularity = 0.0;              // filled by select_k_by_modularity
};

/// Lloyd's algorithm with k-means++ seeding on row-major points (n x dim).
/// Throws Error when k is 0 or exceeds the number of points.
ClusterAssignment kmeans(std::span<const double> points, std::size_t dim, std::size_t k,
                         std::uint64_t seed, const KMeansConfig& cfg = {});

/// Newman-Girvan modularity of a node partition of g.
double modularity(const Graph& g, std::span<const std::uint32_t> labels);

struct ModularityRow {
  std::size_t k = 0;
  double modularity = 0.0;
  double inertia = 0.0;
};

struct ModularitySelection {
  std::size_t best_k = 0;
  std::vector<ModularityRow> table;
  ClusterAssignment best;
};

/// Clusters the embeddings for each k in [k_min, k_max] and picks the k whose
/// partition has the highest modularity on g (ties go to the smaller k).
ModularitySelection select_k_by_modularity(const Graph& g, const NodeEmbeddings& emb,
                                           std::size_t k_min, std::size_t k_max,
                                           std::uint64_t seed, const KMeansConfig& cfg = {});

// ---------------------------------------------------------------------------
// Centrality
// ---------------------------------------------------------------------------

/// Power iteration; dangling mass is spread uniformly.
std::vector<double> pagerank(const Graph& g, double damping = 0.85, double tolerance = 1e-12,
                             std::uint32_t max_iterations = 1000);
/// Brandes' exact betweenness (unnormalized, each unordered pair once).
std::vector<double> betweenness(const Graph& g);
/// Sum over other reachable nodes of 1 / distance.
std::vector<double> harmonic_closeness(const Graph& g);

/// s_n = sum over neighbors m of e_n . e_m.
std::vector<double> self_similarity(const Graph& g, const NodeEmbeddings& emb);

struct CentralityCorrelations {
  double pagerank = 0.0;
  double betweenness = 0.0;
  double closeness = 0.0;
  double degree = 0.0;
};

/// Spearman's rho between self_similarity and each centrality.
CentralityCorrelations centrality_correlations(const Graph& g, const NodeEmbeddings& emb);

// ---------------------------------------------------------------------------
// Link prediction protocol
// ---------------------------------------------------------------------------

struct LinkPredictionConfig {
  std::uint32_t alpha = 2;
  std::uint32_t delta_max = 0;  // 0 fits the train graph's maximum degree
  bool apply_log = true;
  bool apply_unit_norm = true;
  bool log_bins = false;
  WalkConfig walk;
  UnsupConfig unsup;
  double split_fraction = 0.5;
  /// Share of the held-out positive/negative pairs used to fit the edge
  /// classifier; the rest is scored for AUC.
  double classifier_train_fraction = 0.5;
  LogRegConfig logreg;
  std::uint64_t seed = 0;
};

struct LinkPredictionResult {
  double test_auc = 0.0;
  double train_auc = 0.0;
  std::size_t removed_edges = 0;
  std::size_t classifier_train_pairs = 0;
  std::size_t test_pairs = 0;
  EncoderConfig encoder;
  TrainReport train_report;
  double split_seconds = 0.0;
  double classifier_seconds = 0.0;
};

/// Remove edges keeping connectivity, train embeddings on the remaining
/// graph, fit logistic regression on Hadamard features of part of the
/// held-out pairs and report ROC-AUC on the rest.
LinkPredictionResult run_link_prediction(const Graph& g, const LinkPredictionConfig& cfg);

// ---------------------------------------------------------------------------
// Scaling benchmark
// ---------------------------------------------------------------------------

struct ScalingGrid {
  std::vector<std::size_t> sizes{1024, 2048, 4096, 8192, 16384};
  double size_sweep_degree = 8.0;
  std::vector<std::uint32_t> size_sweep_alphas{1, 2};
  std::vector<double> degrees{2, 4, 8, 16, 32};
  std::size_t degree_sweep_size = 4096;
  std::vector<std::uint32_t> degree_sweep_alphas{1};
  std::uint32_t replicates = 1;
  std::size_t min_fit_size = 1024;  // smaller graphs are excluded from the fit
  std::uint64_t seed = 0;
};

struct ScalingRun {
  std::string sweep;  // "size" or "degree"
  GraphGenSpec spec;
  std::uint32_t alpha = 0;
  std::uint32_t replicate = 0;
  std::size_t num_edges = 0;
  double encode_seconds = 0.0;
  double walk_seconds = 0.0;
  double optimize_seconds = 0.0;
  double total_seconds = 0.0;
};

struct ScalingFit {
  std::uint32_t alpha = 0;
  double slope = 0.0;  // log(time) vs log(|V|), least squares
};

struct DegreeTrend {
  std::uint32_t alpha = 0;
  double min_seconds = 0.0;  // over degrees, of the replicate mean
  double max_seconds = 0.0;
  double slope = 0.0;  // time vs degree, least squares, seconds per unit degree
};

struct ScalingResult {
  std::vector<ScalingRun> runs;
  std::vector<ScalingFit> size_fits;
  std::vector<DegreeTrend> degree_trends;
};

/// Runs the unsupervised pipeline on Erdos-Renyi graphs over the grid and
/// fits the runtime trends. `on_run` (if set) is called after every run.
ScalingResult scaling_benchmark(const ScalingGrid& grid, const WalkConfig& walk,
                                const UnsupConfig& unsup,
                                const std::function<void(const ScalingRun&)>& on_run = {});

/// Least-squares slope of y on x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

void write_scaling_tsv_header(std::ostream& out);
void write_scaling_tsv_row(std::ostream& out, const ScalingRun& run);

}  // namespace igel
