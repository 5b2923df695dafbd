#include "igel/unsupervised.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>

#include "igel/parallel.hpp"

namespace igel {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += a * x[k];
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Positive pairs with their negatives, stored flat.
struct SampleBatch {
  std::uint32_t negatives_per_pair = 0;
  std::vector<NodeId> target;
  std::vector<NodeId> context;
  std::vector<NodeId> negatives;

  std::size_t size() const { return target.size(); }
  void clear() {
    target.clear();
    context.clear();
    negatives.clear();
  }
};

// Reads W either plainly or through relaxed atomics (racy mode, where other
// workers may be writing the same scalars).
template <bool Racy>
double load(const double& v) {
  if constexpr (Racy) {
    return std::atomic_ref<double>(const_cast<double&>(v)).load(std::memory_order_relaxed);
  } else {
    return v;
  }
}

// Computes the skip-gram objective of one batch and backpropagates it into a
// gradient buffer. Every node's embedding is computed once per batch.
class BatchEngine {
 public:
  BatchEngine(std::span<const SparseFeatures> features, std::size_t dim)
      : features_(features), dim_(dim), slot_(features.size(), kNone) {}

  // Returns the summed objective. grad += scale * dL/dW.
  template <bool Racy>
  double run(const EmbeddingMatrix& w, const SampleBatch& batch, GradientBuffer& grad,
             double scale, unsigned threads) {
    collect_nodes(batch);
    const std::size_t d = dim_;
    const std::size_t u = nodes_.size();
    emb_.assign(u * d, 0.0);
    node_grad_.assign(u * d, 0.0);

    // Forward, split by column range so the result is independent of threads.
    parallel_for_slices(d, threads, [&](unsigned, std::size_t c0, std::size_t c1) {
      for (std::size_t i = 0; i < u; ++i) {
        double* out = emb_.data() + i * d;
        for (const auto& e : features_[nodes_[i]].entries) {
          const double* r = w.row(e.index).data();
          for (std::size_t k = c0; k < c1; ++k) out[k] += e.value * load<Racy>(r[k]);
        }
      }
    });

    double objective = 0.0;
    const std::uint32_t z = batch.negatives_per_pair;
    for (std::size_t p = 0; p < batch.size(); ++p) {
      const std::size_t t = slot_[batch.target[p]];
      const std::size_t o = slot_[batch.context[p]];
      auto et = row(emb_, t);
      auto gt = row(node_grad_, t);
      const double pos = dot(et, row(emb_, o));
      objective += log_sigmoid(pos);
      const double gp = sigmoid(-pos);
      axpy(gp, row(emb_, o), gt);
      axpy(gp, et, row(node_grad_, o));
      for (std::uint32_t j = 0; j < z; ++j) {
        const std::size_t n = slot_[batch.negatives[p * z + j]];
        const double neg = dot(et, row(emb_, n));
        objective += log_sigmoid(-neg);
        const double gn = -sigmoid(neg);
        axpy(gn, row(emb_, n), gt);
        axpy(gn, et, row(node_grad_, n));
      }
    }

    parallel_for_slices(d, threads, [&](unsigned, std::size_t c0, std::size_t c1) {
      for (std::size_t i = 0; i < u; ++i) {
        const double* g = node_grad_.data() + i * d;
        for (const auto& e : features_[nodes_[i]].entries) {
          double* r = grad.row(e.index).data();
          const double a = scale * e.value;
          for (std::size_t k = c0; k < c1; ++k) r[k] += a * g[k];
        }
      }
    });

    for (NodeId n : nodes_) slot_[n] = kNone;
    return objective;
  }

 private:
  static constexpr std::uint32_t kNone = 0xffffffffu;

  std::span<const double> row(const std::vector<double>& m, std::size_t i) const {
    return {m.data() + i * dim_, dim_};
  }
  std::span<double> row(std::vector<double>& m, std::size_t i) const {
    return {m.data() + i * dim_, dim_};
  }

  void add_node(NodeId n) {
    if (n >= slot_.size()) throw Error("sample references unknown node");
    if (slot_[n] == kNone) {
      slot_[n] = static_cast<std::uint32_t>(nodes_.size());
      nodes_.push_back(n);
    }
  }

  void collect_nodes(const SampleBatch& batch) {
    nodes_.clear();
    for (NodeId n : batch.target) add_node(n);
    for (NodeId n : batch.context) add_node(n);
    for (NodeId n : batch.negatives) add_node(n);
  }

  std::span<const SparseFeatures> features_;
  std::size_t dim_;
  std::vector<std::uint32_t> slot_;
  std::vector<NodeId> nodes_;
  std::vector<double> emb_;
  std::vector<double> node_grad_;
};

void validate(const UnsupConfig& cfg) {
  if (cfg.dim < 1) throw Error("embedding dimension must be at least 1");
  if (cfg.negatives < 1) throw Error("negatives per positive must be at least 1");
  if (cfg.window < 1) throw Error("context window must be at least 1");
  if (cfg.epochs < 1) throw Error("epochs must be at least 1");
  if (cfg.batch_size < 1) throw Error("batch size must be at least 1");
  if (!(cfg.learning_rate >= 0.0)) throw Error("learning rate must be non-negative");
}

}  // namespace

PairLoss pair_loss_and_grad(std::span<const double> target, std::span<const double> context,
                            std::span<const std::span<const double>> negatives) {
  const std::size_t d = target.size();
  if (context.size() != d) throw Error("embedding length mismatch");
  if (!all_finite(target) || !all_finite(context)) throw Error("non-finite embedding");
  PairLoss out;
  out.grad_target.assign(d, 0.0);
  const double pos = dot(target, context);
  out.loss = log_sigmoid(pos);
  const double gp = sigmoid(-pos);
  axpy(gp, context, out.grad_target);
  out.grad_context.assign(d, 0.0);
  axpy(gp, target, out.grad_context);
  for (auto neg : negatives) {
    if (neg.size() != d) throw Error("embedding length mismatch");
    if (!all_finite(neg)) throw Error("non-finite embedding");
    const double s = dot(target, neg);
    out.loss += log_sigmoid(-s);
    const double gn = -sigmoid(s);
    axpy(gn, neg, out.grad_target);
    auto& g = out.grad_negatives.emplace_back(d, 0.0);
    axpy(gn, target, g);
  }
  return out;
}

double skipgram_objective(std::span<const SparseFeatures> features, const EmbeddingMatrix& w,
                          std::span<const TrainingSample> samples, GradientBuffer* grad) {
  if (samples.empty()) return 0.0;
  SampleBatch batch;
  batch.negatives_per_pair = static_cast<std::uint32_t>(samples.front().negatives.size());
  for (const auto& s : samples) {
    if (s.negatives.size() != batch.negatives_per_pair) {
      throw Error("all samples must carry the same number of negatives");
    }
    batch.target.push_back(s.target);
    batch.context.push_back(s.context);
    batch.negatives.insert(batch.negatives.end(), s.negatives.begin(), s.negatives.end());
  }
  BatchEngine engine(features, w.cols());
  GradientBuffer scratch(grad ? 0 : w.rows(), grad ? 0 : w.cols());
  GradientBuffer& target = grad ? *grad : scratch;
  if (grad) {
    if (grad->rows() != w.rows() || grad->cols() != w.cols()) {
      throw Error("gradient shape mismatch");
    }
    grad->zero();
  }
  return engine.run<false>(w, batch, target, 1.0, 1);
}

UnsupResult train_unsupervised(const Graph& g, const EncoderConfig& enc,
                               const WalkConfig& walk, const UnsupConfig& cfg) {
  validate(cfg);
  const double scale = cfg.init_scale > 0.0 ? cfg.init_scale : 0.5 / cfg.dim;
  EmbeddingMatrix w = init_embedding(enc.dim(), cfg.dim, cfg.seed, scale);
  return train_unsupervised(g, enc, walk, cfg, std::move(w));
}

UnsupResult train_unsupervised(const Graph& g, const EncoderConfig& enc,
                               const WalkConfig& walk, const UnsupConfig& cfg,
                               EmbeddingMatrix initial) {
  validate(cfg);
  if (initial.rows() != enc.dim() || initial.cols() != cfg.dim) {
    throw Error("initial matrix shape does not match encoder and config");
  }
  UnsupResult result{std::move(initial), {}};
  EmbeddingMatrix& w = result.matrix;
  w.encoder = enc;
  TrainReport& report = result.report;
  const unsigned threads = std::max(1u, cfg.threads);

  auto t0 = Clock::now();
  const auto features = encode_all(g, enc, threads);
  report.encode_seconds = seconds_since(t0);

  t0 = Clock::now();
  const WalkCorpus corpus = generate_corpus(g, walk, threads);
  report.walk_seconds = seconds_since(t0);
  const NoiseDistribution noise = cfg.noise == NoiseKind::kUniform
                                      ? NoiseDistribution::uniform(g.num_nodes())
                                      : NoiseDistribution::from_corpus(corpus, g.num_nodes());
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    report.pairs_per_epoch += context_pair_count(corpus.walk(k).size(), cfg.window);
  }

  t0 = Clock::now();
  const bool racy = cfg.mode == ParallelMode::kRacy && threads > 1;
  const unsigned workers = racy ? threads : 1;
  // Deterministic mode parallelizes inside a batch; racy mode across batches.
  const unsigned inner_threads = racy ? 1 : threads;
  std::vector<Optimizer> optimizers;
  for (unsigned i = 0; i < workers; ++i) {
    optimizers.emplace_back(cfg.optimizer, cfg.learning_rate, w.values().size());
  }

  std::vector<std::size_t> order(corpus.size());
  for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 shuffle_rng(mix(cfg.seed, 2 * epoch + 1));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    std::mutex totals_mutex;
    double epoch_objective = 0.0;
    std::size_t epoch_pairs = 0;

    parallel_for_slices(order.size(), workers, [&](unsigned worker, std::size_t begin,
                                                   std::size_t end) {
      std::mt19937_64 rng(mix(mix(cfg.seed, 2 * epoch + 2), worker));
      BatchEngine engine(features, cfg.dim);
      GradientBuffer grad(w.rows(), w.cols());
      Optimizer& opt = optimizers[worker];
      SampleBatch batch;
      batch.negatives_per_pair = cfg.negatives;
      double objective = 0.0;
      std::size_t pairs = 0;

      auto flush = [&] {
        if (batch.size() == 0) return;
        const double scale = -1.0 / static_cast<double>(batch.size());
        double value = racy ? engine.run<true>(w, batch, grad, scale, inner_threads)
                            : engine.run<false>(w, batch, grad, scale, inner_threads);
        if (!std::isfinite(value)) {
          throw Error("unsupervised training diverged: objective became non-finite");
        }
        objective += value;
        pairs += batch.size();
        auto params = w.values();
        if (racy) {
          opt.update(grad.values(), [&](std::size_t i, double delta) {
            std::atomic_ref<double> p(params[i]);
            p.store(p.load(std::memory_order_relaxed) - delta, std::memory_order_relaxed);
          });
        } else {
          opt.step(params, grad.values());
        }
        grad.zero();
        batch.clear();
      };

      for (std::size_t i = begin; i < end; ++i) {
        for_each_context_pair(corpus.walk(order[i]), cfg.window, [&](NodeId t, NodeId o) {
          batch.target.push_back(t);
          batch.context.push_back(o);
          for (std::uint32_t j = 0; j < cfg.negatives; ++j) {
            batch.negatives.push_back(noise.sample(rng));
          }
          if (batch.size() == cfg.batch_size) flush();
        });
      }
      flush();

      std::lock_guard lock(totals_mutex);
      epoch_objective += objective;
      epoch_pairs += pairs;
    });

    report.epoch_objective.push_back(
        epoch_pairs ? epoch_objective / static_cast<double>(epoch_pairs) : 0.0);
  }
  report.optimize_seconds = seconds_since(t0);
  report.final_objective = report.epoch_objective.back();
  if (!all_finite(w.values())) {
    throw Error("unsupervised training diverged: non-finite parameters");
  }
  return result;
}

NodeEmbeddings embed_features(std::span<const SparseFeatures> features,
                              const EmbeddingMatrix& w, unsigned threads) {
  NodeEmbeddings out;
  out.dim = w.cols();
  out.values.assign(features.size() * w.cols(), 0.0);
  parallel_for_slices(features.size(), threads,
                      [&](unsigned, std::size_t begin, std::size_t end) {
                        for (std::size_t n = begin; n < end; ++n) {
                          forward_into(features[n], w, out.row(n));
                        }
                      });
  return out;
}

NodeEmbeddings embed_nodes(const Graph& g, const EncoderConfig& enc, const EmbeddingMatrix& w,
                           unsigned threads) {
  if (w.rows() != enc.dim()) {
    throw Error("embedding has " + std::to_string(w.rows()) + " rows but the encoder produces " +
                std::to_string(enc.dim()) + " features");
  }
  return embed_features(encode_all(g, enc, threads), w, threads);
}

}  // namespace igel
