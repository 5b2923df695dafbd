#include "igel/supervised.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <numeric>
#include <random>

#include "igel/evaluation.hpp"
#include "igel/optim.hpp"
#include "igel/parallel.hpp"

namespace igel {

// ---------------------------------------------------------------------------
// Link prediction
// ---------------------------------------------------------------------------

std::vector<double> edge_features(std::span<const double> eu, std::span<const double> ev) {
  if (eu.size() != ev.size()) throw Error("edge feature inputs differ in length");
  std::vector<double> out(eu.size());
  for (std::size_t k = 0; k < eu.size(); ++k) out[k] = eu[k] * ev[k];
  return out;
}

double EdgeClassifier::logit(std::span<const double> eu, std::span<const double> ev) const {
  if (eu.size() != weights.size() || ev.size() != weights.size()) {
    throw Error("edge classifier input length mismatch");
  }
  double s = bias;
  for (std::size_t k = 0; k < weights.size(); ++k) s += weights[k] * (eu[k] * ev[k]);
  return s;
}

double EdgeClassifier::probability(std::span<const double> eu,
                                   std::span<const double> ev) const {
  return sigmoid(logit(eu, ev));
}

EdgeClassifier train_logistic_regression(std::span<const double> features,
                                         std::span<const double> labels, std::size_t dim,
                                         const LogRegConfig& cfg) {
  const std::size_t n = labels.size();
  if (dim == 0 || features.size() != n * dim) throw Error("feature matrix shape mismatch");
  std::size_t positives = 0;
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) throw Error("logistic regression labels must be 0 or 1");
    positives += (y == 1.0);
  }
  if (positives == 0 || positives == n) {
    throw Error("degenerate training set: logistic regression needs both classes");
  }

  // Largest eigenvalue of A^T A / n for A = [X, 1], by power iteration.
  std::vector<double> v(dim + 1, 1.0), av(n), next(dim + 1);
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    for (double& x : v) x /= norm;
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = features.data() + i * dim;
      av[i] = std::inner_product(row, row + dim, v.begin(), v[dim]);
    }
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = features.data() + i * dim;
      for (std::size_t k = 0; k < dim; ++k) next[k] += row[k] * av[i];
      next[dim] += av[i];
    }
    for (double& x : next) x /= static_cast<double>(n);
    const double updated = std::inner_product(next.begin(), next.end(), v.begin(), 0.0);
    v.swap(next);
    if (std::abs(updated - lambda) <= 1e-9 * std::max(1.0, updated)) {
      lambda = updated;
      break;
    }
    lambda = updated;
  }
  // Power iteration approaches lambda from below; pad it.
  const double smoothness = 0.25 * lambda * 1.05 + cfg.l2;
  const double step = 1.0 / std::max(smoothness, 1e-12);

  EdgeClassifier clf;
  clf.weights.assign(dim, 0.0);
  std::vector<double> grad(dim);
  for (std::uint32_t it = 0; it < cfg.iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = features.data() + i * dim;
      const double z = std::inner_product(row, row + dim, clf.weights.begin(), clf.bias);
      const double r = sigmoid(z) - labels[i];
      for (std::size_t k = 0; k < dim; ++k) grad[k] += r * row[k];
      grad_bias += r;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < dim; ++k) {
      clf.weights[k] -= step * (grad[k] * inv_n + cfg.l2 * clf.weights[k]);
    }
    clf.bias -= step * grad_bias * inv_n;
  }
  return clf;
}

EdgeClassifier train_edge_classifier(const EdgeSplit& split, const NodeEmbeddings& emb,
                                     const LogRegConfig& cfg) {
  const std::size_t d = emb.dim;
  std::vector<double> features;
  std::vector<double> labels;
  features.reserve((split.positive_edges.size() + split.negative_edges.size()) * d);
  auto add = [&](const std::vector<Edge>& pairs, double label) {
    for (auto [u, v] : pairs) {
      auto f = edge_features(emb.row(u), emb.row(v));
      features.insert(features.end(), f.begin(), f.end());
      labels.push_back(label);
    }
  };
  add(split.positive_edges, 1.0);
  add(split.negative_edges, 0.0);
  return train_logistic_regression(features, labels, d, cfg);
}

EdgeClassifier train_edge_classifier(const EdgeSplit& split, const EmbeddingMatrix& w,
                                     const EncoderConfig& enc, const LogRegConfig& cfg) {
  return train_edge_classifier(split, embed_nodes(split.train_graph, enc, w), cfg);
}

// ---------------------------------------------------------------------------
// Multi-label head
// ---------------------------------------------------------------------------

namespace {

double activate(Activation a, double x) {
  if (x > 0.0) return x;
  return a == Activation::kElu ? std::expm1(x) : 0.0;
}

double activate_grad(Activation a, double x) {
  if (x > 0.0) return 1.0;
  return a == Activation::kElu ? std::exp(x) : 0.0;
}

}  // namespace

MultiLabelHead::MultiLabelHead(std::size_t input_dim, std::span<const std::size_t> hidden,
                               std::size_t num_labels, Activation activation,
                               std::uint64_t seed)
    : activation_(activation) {
  if (input_dim == 0 || num_labels == 0) throw Error("head needs input and output widths");
  std::vector<std::size_t> widths{input_dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(num_labels);
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    if (widths[l + 1] == 0) throw Error("hidden layer width must be positive");
    Layer layer{widths[l], widths[l + 1], offset, offset + widths[l] * widths[l + 1]};
    offset = layer.bias_offset + layer.out;
    layers_.push_back(layer);
  }
  params_.assign(offset, 0.0);
  std::mt19937_64 rng(seed);
  for (const auto& layer : layers_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    std::uniform_real_distribution<double> unit(-limit, limit);
    for (std::size_t i = 0; i < layer.in * layer.out; ++i) {
      params_[layer.weight_offset + i] = unit(rng);
    }
  }
}

std::vector<double> MultiLabelHead::forward(std::span<const double> inputs, std::size_t rows,
                                            Tape& tape) const {
  if (inputs.size() != rows * input_dim()) throw Error("head input shape mismatch");
  tape.pre.assign(layers_.size(), {});
  tape.post.assign(layers_.size(), {});
  std::vector<double> current(inputs.begin(), inputs.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    const double* wt = params_.data() + layer.weight_offset;
    const double* b = params_.data() + layer.bias_offset;
    std::vector<double> z(rows * layer.out);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* x = current.data() + r * layer.in;
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double* wrow = wt + o * layer.in;
        z[r * layer.out + o] = std::inner_product(x, x + layer.in, wrow, b[o]);
      }
    }
    tape.post[l] = std::move(current);
    if (l + 1 == layers_.size()) {
      tape.pre[l] = z;
      return z;
    }
    current.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) current[i] = activate(activation_, z[i]);
    tape.pre[l] = std::move(z);
  }
  return current;
}

std::vector<double> MultiLabelHead::logits(std::span<const double> inputs,
                                           std::size_t rows) const {
  Tape tape;
  return forward(inputs, rows, tape);
}

void MultiLabelHead::backward(const Tape& tape, std::size_t rows,
                              std::span<const double> grad_logits,
                              std::span<double> grad_params,
                              std::span<double> grad_inputs) const {
  if (grad_params.size() != params_.size()) throw Error("head gradient shape mismatch");
  std::vector<double> delta(grad_logits.begin(), grad_logits.end());
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Layer& layer = layers_[l];
    if (l + 1 < layers_.size()) {
      const auto& z = tape.pre[l];
      for (std::size_t i = 0; i < delta.size(); ++i) delta[i] *= activate_grad(activation_, z[i]);
    }
    const auto& x = tape.post[l];
    const double* wt = params_.data() + layer.weight_offset;
    double* gw = grad_params.data() + layer.weight_offset;
    double* gb = grad_params.data() + layer.bias_offset;
    std::vector<double> below(rows * layer.in, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* xr = x.data() + r * layer.in;
      double* br = below.data() + r * layer.in;
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double g = delta[r * layer.out + o];
        if (g == 0.0) continue;
        gb[o] += g;
        double* gwrow = gw + o * layer.in;
        const double* wrow = wt + o * layer.in;
        for (std::size_t i = 0; i < layer.in; ++i) {
          gwrow[i] += g * xr[i];
          br[i] += g * wrow[i];
        }
      }
    }
    delta = std::move(below);
  }
  if (!grad_inputs.empty()) {
    if (grad_inputs.size() != delta.size()) throw Error("head input gradient shape mismatch");
    std::copy(delta.begin(), delta.end(), grad_inputs.begin());
  }
}

double multilabel_loss(std::span<const double> logits, std::span<const double> labels,
                       std::size_t num_labels) {
  if (num_labels == 0 || logits.size() != labels.size() || logits.size() % num_labels != 0) {
    throw Error("multi-label loss shape mismatch");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double y = labels[i];
    if (y != 0.0 && y != 1.0) throw Error("labels must be 0 or 1");
    loss -= y == 1.0 ? log_sigmoid(logits[i]) : log_sigmoid(-logits[i]);
  }
  return loss;
}

std::vector<double> multilabel_loss_grad(std::span<const double> logits,
                                         std::span<const double> labels) {
  if (logits.size() != labels.size()) throw Error("multi-label loss shape mismatch");
  std::vector<double> g(logits.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = sigmoid(logits[i]) - labels[i];
  return g;
}

void LabeledNodeDataset::validate() const {
  if (num_labels == 0) throw Error("dataset declares zero labels");
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const auto& lg = graphs[i];
    const std::size_t n = lg.graph.num_nodes();
    const std::string where = "graph " + std::to_string(i);
    if (lg.labels.size() != n * num_labels) {
      throw Error(where + ": label matrix is not |V| x " + std::to_string(num_labels));
    }
    for (double y : lg.labels) {
      if (y != 0.0 && y != 1.0) throw Error(where + ": labels must be 0 or 1");
    }
    if (attribute_dim > 0 && lg.attributes.size() != n * attribute_dim) {
      throw Error(where + ": attribute matrix is not |V| x " + std::to_string(attribute_dim));
    }
    if (attribute_dim == 0 && !lg.attributes.empty()) {
      throw Error(where + ": attributes given but attribute width is zero");
    }
  }
}

NodeMatrix read_node_matrix(std::istream& in, std::span<const std::string> node_labels,
                            bool binary) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < node_labels.size(); ++i) index.emplace(node_labels[i], i);
  NodeMatrix out;
  std::vector<char> seen(node_labels.size(), 0);
  std::string line, token;
  std::size_t line_no = 0;
  bool have_width = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    if (!(fields >> token) || token.front() == '#') continue;
    const auto it = index.find(token);
    if (it == index.end()) {
      throw Error("line " + std::to_string(line_no) + ": unknown node '" + token + "'");
    }
    if (seen[it->second]) {
      throw Error("line " + std::to_string(line_no) + ": node '" + token + "' listed twice");
    }
    seen[it->second] = 1;
    std::vector<double> row;
    double v = 0.0;
    while (fields >> v) {
      if (!std::isfinite(v) || (binary && v != 0.0 && v != 1.0)) {
        throw Error("line " + std::to_string(line_no) + ": invalid value");
      }
      row.push_back(v);
    }
    if (!fields.eof()) throw Error("line " + std::to_string(line_no) + ": malformed value");
    if (!have_width) {
      if (row.empty()) throw Error("line " + std::to_string(line_no) + ": row has no values");
      out.width = row.size();
      out.values.assign(node_labels.size() * out.width, 0.0);
      have_width = true;
    } else if (row.size() != out.width) {
      throw Error("line " + std::to_string(line_no) + ": expected " + std::to_string(out.width) +
                  " values, found " + std::to_string(row.size()));
    }
    std::copy(row.begin(), row.end(), out.values.begin() + it->second * out.width);
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw Error("node '" + node_labels[i] + "' has no row");
  }
  return out;
}

NodeMatrix load_node_matrix(const std::string& path, std::span<const std::string> node_labels,
                            bool binary) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open");
  try {
    return read_node_matrix(in, node_labels, binary);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

EncoderConfig fit_config(const LabeledNodeDataset& data, std::uint32_t alpha) {
  std::size_t max_degree = 0;
  for (const auto& lg : data.graphs) {
    if (lg.split == SplitTag::kTrain) max_degree = std::max(max_degree, lg.graph.max_degree());
  }
  EncoderConfig cfg;
  cfg.alpha = alpha;
  cfg.delta_max = static_cast<std::uint32_t>(std::max<std::size_t>(1, max_degree));
  return cfg;
}

namespace {

// Builds [e_n, F_n] rows for every node of one graph.
std::vector<double> head_inputs(std::span<const SparseFeatures> features,
                                std::span<const double> attributes, const JointModel& model,
                                std::vector<double>& emb) {
  const std::size_t n = features.size();
  const std::size_t d = model.matrix.cols();
  const std::size_t k = model.use_attributes && n > 0 ? attributes.size() / n : 0;
  const std::size_t width = d + k;
  if (model.head.input_dim() != width) {
    throw Error("head expects " + std::to_string(model.head.input_dim()) +
                " inputs but embedding plus attributes give " + std::to_string(width));
  }
  emb.assign(n * d, 0.0);
  std::vector<double> inputs(n * width);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<double> e(emb.data() + i * d, d);
    forward_into(features[i], model.matrix, e);
    std::copy(e.begin(), e.end(), inputs.begin() + static_cast<std::ptrdiff_t>(i * width));
    if (k > 0) {
      std::copy(attributes.begin() + static_cast<std::ptrdiff_t>(i * k),
                attributes.begin() + static_cast<std::ptrdiff_t>((i + 1) * k),
                inputs.begin() + static_cast<std::ptrdiff_t>(i * width + d));
    }
  }
  return inputs;
}

}  // namespace

double joint_loss(std::span<const SparseFeatures> features, std::span<const double> attributes,
                  std::span<const double> labels, const JointModel& model,
                  GradientBuffer* grad_w, std::vector<double>* grad_head) {
  const std::size_t n = features.size();
  const std::size_t m = model.head.num_labels();
  if (labels.size() != n * m) throw Error("label matrix shape mismatch");
  std::vector<double> emb;
  const auto inputs = head_inputs(features, attributes, model, emb);
  MultiLabelHead::Tape tape;
  const auto logits = model.head.forward(inputs, n, tape);
  const double loss = multilabel_loss(logits, labels, m);
  if (!grad_w && !grad_head) return loss;

  const auto grad_logits = multilabel_loss_grad(logits, labels);
  std::vector<double> gh(model.head.params().size(), 0.0);
  std::vector<double> grad_inputs(inputs.size(), 0.0);
  model.head.backward(tape, n, grad_logits, gh, grad_inputs);
  if (grad_head) *grad_head = std::move(gh);
  if (grad_w) {
    grad_w->zero();
    const std::size_t d = model.matrix.cols();
    const std::size_t width = model.head.input_dim();
    for (std::size_t i = 0; i < n; ++i) {
      accumulate_gradient(features[i], std::span<const double>(grad_inputs).subspan(i * width, d),
                          *grad_w);
    }
  }
  return loss;
}

namespace {

struct PreparedGraph {
  const LabeledGraph* source;
  std::vector<SparseFeatures> features;
};

double micro_f1_over(const std::vector<PreparedGraph>& graphs, const JointModel& model) {
  std::vector<double> pred, truth;
  for (const auto& pg : graphs) {
    std::vector<double> emb;
    const auto inputs = head_inputs(pg.features, pg.source->attributes, model, emb);
    const auto logits = model.head.logits(inputs, pg.features.size());
    for (double z : logits) pred.push_back(z > 0.0 ? 1.0 : 0.0);  // sigmoid(z) > 0.5
    truth.insert(truth.end(), pg.source->labels.begin(), pg.source->labels.end());
  }
  return micro_f1(pred, truth);
}

}  // namespace

JointResult train_joint(const LabeledNodeDataset& data, const EncoderConfig& enc,
                        const HeadConfig& cfg) {
  const double scale = cfg.init_scale > 0.0 ? cfg.init_scale : 0.5 / cfg.dim;
  return train_joint(data, enc, cfg, init_embedding(enc.dim(), cfg.dim, cfg.seed, scale));
}

JointResult train_joint(const LabeledNodeDataset& data, const EncoderConfig& enc,
                        const HeadConfig& cfg, EmbeddingMatrix initial) {
  const auto start = std::chrono::steady_clock::now();
  data.validate();
  if (initial.rows() != enc.dim() || initial.cols() != cfg.dim) {
    throw Error("initial matrix shape does not match encoder and config");
  }
  std::vector<PreparedGraph> train, val;
  for (const auto& lg : data.graphs) {
    if (lg.split == SplitTag::kTest) continue;
    PreparedGraph pg{&lg, encode_all(lg.graph, enc, cfg.threads)};
    (lg.split == SplitTag::kTrain ? train : val).push_back(std::move(pg));
  }
  if (train.empty()) throw Error("dataset has no training graphs");
  if (val.empty()) throw Error("dataset has an empty validation split");

  const bool attrs = cfg.use_attributes && data.attribute_dim > 0;
  JointResult result;
  JointModel& model = result.model;
  model.matrix = std::move(initial);
  model.matrix.encoder = enc;
  model.use_attributes = attrs;
  model.head = MultiLabelHead(cfg.dim + (attrs ? data.attribute_dim : 0), cfg.hidden,
                              data.num_labels, cfg.activation, cfg.seed ^ 0x5eedull);

  Optimizer opt_w(OptimizerKind::kAdam, cfg.learning_rate, model.matrix.values().size());
  Optimizer opt_head(OptimizerKind::kAdam, cfg.learning_rate, model.head.params().size());
  GradientBuffer grad_w(model.matrix.rows(), model.matrix.cols());
  std::vector<double> grad_head;

  JointReport& report = result.report;
  report.initial_val_f1 = micro_f1_over(val, model);
  report.best_val_f1 = report.initial_val_f1;
  JointModel best = model;

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(train.size());
  for (std::uint32_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t cells = 0;
    for (std::size_t gi : order) {
      const auto& pg = train[gi];
      const double loss = joint_loss(pg.features, pg.source->attributes, pg.source->labels,
                                     model, &grad_w, &grad_head);
      if (!std::isfinite(loss)) throw Error("supervised training diverged: non-finite loss");
      const std::size_t count = pg.source->labels.size();
      loss_sum += loss;
      cells += count;
      // Mean over the graph's cells.
      const double inv = 1.0 / static_cast<double>(count);
      for (double& g : grad_w.values()) g *= inv;
      for (double& g : grad_head) g *= inv;
      opt_w.step(model.matrix.values(), grad_w.values());
      opt_head.step(model.head.params(), grad_head);
    }
    report.train_loss.push_back(loss_sum / static_cast<double>(cells));
    const double f1 = micro_f1_over(val, model);
    report.val_f1.push_back(f1);
    report.epochs_run = epoch;
    if (f1 > report.best_val_f1) {
      report.best_val_f1 = f1;
      report.best_epoch = epoch;
      best = model;
    }
    if (epoch - report.best_epoch >= cfg.patience) break;
  }
  model = std::move(best);
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<double> predict_all(const JointModel& model, const EncoderConfig& enc,
                                const Graph& g, std::span<const double> attributes,
                                unsigned threads) {
  check_compatible(model.matrix, enc);
  const auto features = encode_all(g, enc, threads);
  if (model.use_attributes && attributes.size() != g.num_nodes() *
                                                       (model.head.input_dim() -
                                                        model.matrix.cols())) {
    throw Error("attribute width does not match the trained head");
  }
  std::vector<double> emb;
  const auto inputs =
      head_inputs(features, model.use_attributes ? attributes : std::span<const double>{},
                  model, emb);
  auto out = model.head.logits(inputs, features.size());
  for (double& z : out) z = sigmoid(z);
  return out;
}

std::vector<double> predict(const JointModel& model, const EncoderConfig& enc, const Graph& g,
                            NodeId node, std::span<const double> attributes) {
  check_compatible(model.matrix, enc);
  const std::size_t d = model.matrix.cols();
  const std::size_t k = model.head.input_dim() - d;
  if (model.use_attributes && attributes.size() != k) {
    throw Error("attribute width does not match the trained head");
  }
  std::vector<double> input(d + k, 0.0);
  forward_into(encode_node(g, node, enc), model.matrix, std::span<double>(input).first(d));
  std::copy(attributes.begin(), attributes.end(), input.begin() + static_cast<std::ptrdiff_t>(d));
  auto out = model.head.logits(input, 1);
  for (double& z : out) z = sigmoid(z);
  return out;
}

std::vector<double> threshold_predictions(std::span<const double> probabilities) {
  std::vector<double> out(probabilities.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = probabilities[i] > 0.5 ? 1.0 : 0.0;
  return out;
}

}  // namespace igel
