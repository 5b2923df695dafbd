#include "igel/config.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#ifndef IGEL_VERSION
#define IGEL_VERSION "unknown"
#endif

namespace igel {

namespace {

using Json = nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& why) {
  throw Error("config key '" + key + "': " + why);
}

template <typename T>
T unsigned_value(const std::string& key, const Json& v) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    bad_value(key, "expected a non-negative integer");
  }
  return static_cast<T>(v.get<std::uint64_t>());
}

double real_value(const std::string& key, const Json& v) {
  if (!v.is_number()) bad_value(key, "expected a number");
  return v.get<double>();
}

bool bool_value(const std::string& key, const Json& v) {
  if (!v.is_boolean()) bad_value(key, "expected true or false");
  return v.get<bool>();
}

std::string string_value(const std::string& key, const Json& v) {
  if (!v.is_string()) bad_value(key, "expected a string");
  return v.get<std::string>();
}

template <typename T, typename Fn>
std::vector<T> list_value(const std::string& key, const Json& v, Fn&& element) {
  if (!v.is_array()) bad_value(key, "expected a list");
  std::vector<T> out;
  for (const auto& item : v) out.push_back(element(key, item));
  return out;
}

std::string resolve_path(const std::string& base, const std::string& path) {
  if (path.empty() || base.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base) / path).lexically_normal().string();
}

std::vector<GraphFiles> graph_list(const std::string& key, const Json& v,
                                   const std::string& base) {
  if (!v.is_array()) bad_value(key, "expected a list of {edges, labels, attributes} objects");
  std::vector<GraphFiles> out;
  for (const auto& item : v) {
    if (!item.is_object()) bad_value(key, "expected objects with edges/labels/attributes");
    GraphFiles files;
    for (const auto& [name, value] : item.items()) {
      const std::string full = key + "." + name;
      if (name == "edges") {
        files.edges = resolve_path(base, string_value(full, value));
      } else if (name == "labels") {
        files.labels = resolve_path(base, string_value(full, value));
      } else if (name == "attributes") {
        files.attributes = resolve_path(base, string_value(full, value));
      } else {
        bad_value(full, "unknown key");
      }
    }
    if (files.edges.empty() || files.labels.empty()) {
      bad_value(key, "each graph needs 'edges' and 'labels'");
    }
    out.push_back(files);
  }
  return out;
}

Json graph_list_json(const std::vector<GraphFiles>& list) {
  Json out = Json::array();
  for (const auto& f : list) {
    Json item = {{"edges", f.edges}, {"labels", f.labels}};
    if (!f.attributes.empty()) item["attributes"] = f.attributes;
    out.push_back(item);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const Json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto u32 = [](std::uint32_t RunConfig::*field) -> Setter {
      return [field](RunConfig& c, const std::string& k, const Json& v, const std::string&) {
        c.*field = unsigned_value<std::uint32_t>(k, v);
      };
    };
    auto size = [](std::size_t RunConfig::*field) -> Setter {
      return [field](RunConfig& c, const std::string& k, const Json& v, const std::string&) {
        c.*field = unsigned_value<std::size_t>(k, v);
      };
    };
    auto real = [](double RunConfig::*field) -> Setter {
      return [field](RunConfig& c, const std::string& k, const Json& v, const std::string&) {
        c.*field = real_value(k, v);
      };
    };
    auto flag = [](bool RunConfig::*field) -> Setter {
      return [field](RunConfig& c, const std::string& k, const Json& v, const std::string&) {
        c.*field = bool_value(k, v);
      };
    };
    auto text = [](std::string RunConfig::*field) -> Setter {
      return [field](RunConfig& c, const std::string& k, const Json& v, const std::string&) {
        c.*field = string_value(k, v);
      };
    };
    auto path = [](std::string RunConfig::*field) -> Setter {
      return [field](RunConfig& c, const std::string& k, const Json& v, const std::string& base) {
        c.*field = resolve_path(base, string_value(k, v));
      };
    };
    auto graphs = [](std::vector<GraphFiles> RunConfig::*field) -> Setter {
      return [field](RunConfig& c, const std::string& k, const Json& v, const std::string& base) {
        c.*field = graph_list(k, v, base);
      };
    };
    auto sizes = [](std::vector<std::size_t> RunConfig::*field) -> Setter {
      return [field](RunConfig& c, const std::string& k, const Json& v, const std::string&) {
        c.*field = list_value<std::size_t>(k, v, unsigned_value<std::size_t>);
      };
    };
    auto u32s = [](std::vector<std::uint32_t> RunConfig::*field) -> Setter {
      return [field](RunConfig& c, const std::string& k, const Json& v, const std::string&) {
        c.*field = list_value<std::uint32_t>(k, v, unsigned_value<std::uint32_t>);
      };
    };

    t["graph"] = path(&RunConfig::graph);
    t["matrix"] = path(&RunConfig::matrix);
    t["train_graphs"] = graphs(&RunConfig::train_graphs);
    t["validation_graphs"] = graphs(&RunConfig::validation_graphs);
    t["test_graphs"] = graphs(&RunConfig::test_graphs);
    t["alpha"] = u32(&RunConfig::alpha);
    t["delta_max"] = u32(&RunConfig::delta_max);
    t["log_transform"] = flag(&RunConfig::log_transform);
    t["unit_norm"] = flag(&RunConfig::unit_norm);
    t["log_bins"] = flag(&RunConfig::log_bins);
    t["walks_per_node"] = t["w"] = u32(&RunConfig::walks_per_node);
    t["walk_length"] = t["s"] = u32(&RunConfig::walk_length);
    t["dim"] = t["d"] = u32(&RunConfig::dim);
    t["negatives"] = t["z"] = u32(&RunConfig::negatives);
    t["window"] = t["p"] = u32(&RunConfig::window);
    t["learning_rate"] = t["lr"] = real(&RunConfig::learning_rate);
    t["epochs"] = u32(&RunConfig::epochs);
    t["batch_size"] = size(&RunConfig::batch_size);
    t["optimizer"] = text(&RunConfig::optimizer);
    t["noise"] = text(&RunConfig::noise);
    t["mode"] = text(&RunConfig::mode);
    t["init_scale"] = real(&RunConfig::init_scale);
    t["hidden"] = sizes(&RunConfig::hidden);
    t["activation"] = text(&RunConfig::activation);
    t["head_learning_rate"] = real(&RunConfig::head_learning_rate);
    t["head_epochs"] = u32(&RunConfig::head_epochs);
    t["patience"] = u32(&RunConfig::patience);
    t["split_fraction"] = real(&RunConfig::split_fraction);
    t["classifier_train_fraction"] = real(&RunConfig::classifier_train_fraction);
    t["logreg_l2"] = real(&RunConfig::logreg_l2);
    t["logreg_iterations"] = u32(&RunConfig::logreg_iterations);
    t["repeats"] = u32(&RunConfig::repeats);
    t["k_min"] = size(&RunConfig::k_min);
    t["k_max"] = size(&RunConfig::k_max);
    t["kmeans_restarts"] = u32(&RunConfig::kmeans_restarts);
    t["bench_sizes"] = sizes(&RunConfig::bench_sizes);
    t["bench_size_degree"] = real(&RunConfig::bench_size_degree);
    t["bench_size_alphas"] = u32s(&RunConfig::bench_size_alphas);
    t["bench_degrees"] = [](RunConfig& c, const std::string& k, const Json& v,
                            const std::string&) {
      c.bench_degrees = list_value<double>(k, v, real_value);
    };
    t["bench_degree_size"] = size(&RunConfig::bench_degree_size);
    t["bench_degree_alphas"] = u32s(&RunConfig::bench_degree_alphas);
    t["bench_replicates"] = u32(&RunConfig::bench_replicates);
    t["seed"] = [](RunConfig& c, const std::string& k, const Json& v, const std::string&) {
      c.seed = unsigned_value<std::uint64_t>(k, v);
    };
    t["threads"] = [](RunConfig& c, const std::string& k, const Json& v, const std::string&) {
      c.threads = unsigned_value<unsigned>(k, v);
    };
    t["out"] = path(&RunConfig::out);
    return t;
  }();
  return table;
}

void require(bool ok, const std::string& key, const std::string& why) {
  if (!ok) bad_value(key, why);
}

}  // namespace

const char* version() { return IGEL_VERSION; }

std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)));
}

void RunConfig::validate() const {
  require(delta_max == 0 || delta_max >= 1, "delta_max", "must be >= 1 or 0 to fit");
  require(walks_per_node >= 1, "walks_per_node", "must be >= 1");
  require(walk_length >= 1, "walk_length", "must be >= 1");
  require(dim >= 1, "dim", "must be >= 1");
  require(negatives >= 1, "negatives", "must be >= 1");
  require(window >= 1, "window", "must be >= 1");
  require(learning_rate >= 0.0, "learning_rate", "must be >= 0");
  require(epochs >= 1, "epochs", "must be >= 1");
  require(batch_size >= 1, "batch_size", "must be >= 1");
  require(optimizer == "adam" || optimizer == "sgd", "optimizer", "must be 'adam' or 'sgd'");
  require(noise == "uniform" || noise == "frequency", "noise",
          "must be 'uniform' or 'frequency'");
  require(mode == "deterministic" || mode == "racy", "mode",
          "must be 'deterministic' or 'racy'");
  require(init_scale >= 0.0, "init_scale", "must be >= 0");
  require(activation == "elu" || activation == "relu", "activation", "must be 'elu' or 'relu'");
  for (std::size_t h : hidden) require(h >= 1, "hidden", "layer widths must be >= 1");
  require(head_learning_rate >= 0.0, "head_learning_rate", "must be >= 0");
  require(split_fraction > 0.0 && split_fraction < 1.0, "split_fraction", "must lie in (0, 1)");
  require(classifier_train_fraction > 0.0 && classifier_train_fraction < 1.0,
          "classifier_train_fraction", "must lie in (0, 1)");
  require(logreg_l2 >= 0.0, "logreg_l2", "must be >= 0");
  require(logreg_iterations >= 1, "logreg_iterations", "must be >= 1");
  require(repeats >= 1, "repeats", "must be >= 1");
  require(k_min >= 1 && k_min <= k_max, "k_min", "need 1 <= k_min <= k_max");
  require(kmeans_restarts >= 1, "kmeans_restarts", "must be >= 1");
  for (std::size_t n : bench_sizes) require(n >= 2, "bench_sizes", "sizes must be >= 2");
  require(bench_degree_size >= 2, "bench_degree_size", "must be >= 2");
  require(bench_size_degree >= 0.0, "bench_size_degree", "must be >= 0");
  for (double d : bench_degrees) require(d >= 0.0, "bench_degrees", "degrees must be >= 0");
  require(bench_replicates >= 1, "bench_replicates", "must be >= 1");
  require(threads >= 1, "threads", "must be >= 1");
}

RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw Error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error("config must be a JSON object");
  RunConfig cfg;
  static const std::map<std::string, std::string> aliases{
      {"w", "walks_per_node"}, {"s", "walk_length"}, {"d", "dim"},
      {"z", "negatives"},      {"p", "window"},      {"lr", "learning_rate"}};
  for (const auto& [alias, key] : aliases) {
    if (doc.contains(alias) && doc.contains(key)) {
      throw Error("config key '" + alias + "': duplicates '" + key + "'");
    }
  }
  const auto& table = setters();
  for (const auto& [key, value] : doc.items()) {
    const auto it = table.find(key);
    if (it == table.end()) throw Error("config key '" + key + "': unknown key");
    it->second(cfg, key, value, base_dir);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open config");
  std::ostringstream text;
  text << in.rdbuf();
  const auto base = std::filesystem::path(path).parent_path().string();
  try {
    return parse_run_config(text.str(), base);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

std::string resolved_config_json(const RunConfig& c) {
  Json j;
  j["graph"] = c.graph;
  j["matrix"] = c.matrix;
  j["train_graphs"] = graph_list_json(c.train_graphs);
  j["validation_graphs"] = graph_list_json(c.validation_graphs);
  j["test_graphs"] = graph_list_json(c.test_graphs);
  j["alpha"] = c.alpha;
  j["delta_max"] = c.delta_max;
  j["log_transform"] = c.log_transform;
  j["unit_norm"] = c.unit_norm;
  j["log_bins"] = c.log_bins;
  j["walks_per_node"] = c.walks_per_node;
  j["walk_length"] = c.walk_length;
  j["dim"] = c.dim;
  j["negatives"] = c.negatives;
  j["window"] = c.window;
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["optimizer"] = c.optimizer;
  j["noise"] = c.noise;
  j["mode"] = c.mode;
  j["init_scale"] = c.init_scale;
  j["hidden"] = c.hidden;
  j["activation"] = c.activation;
  j["head_learning_rate"] = c.head_learning_rate;
  j["head_epochs"] = c.head_epochs;
  j["patience"] = c.patience;
  j["split_fraction"] = c.split_fraction;
  j["classifier_train_fraction"] = c.classifier_train_fraction;
  j["logreg_l2"] = c.logreg_l2;
  j["logreg_iterations"] = c.logreg_iterations;
  j["repeats"] = c.repeats;
  j["k_min"] = c.k_min;
  j["k_max"] = c.k_max;
  j["kmeans_restarts"] = c.kmeans_restarts;
  j["bench_sizes"] = c.bench_sizes;
  j["bench_size_degree"] = c.bench_size_degree;
  j["bench_size_alphas"] = c.bench_size_alphas;
  j["bench_degrees"] = c.bench_degrees;
  j["bench_degree_size"] = c.bench_degree_size;
  j["bench_degree_alphas"] = c.bench_degree_alphas;
  j["bench_replicates"] = c.bench_replicates;
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

EncoderConfig encoder_config(const RunConfig& cfg, const Graph& training_graph) {
  EncoderConfig enc = fit_config(training_graph, cfg.alpha);
  if (cfg.delta_max > 0) enc.delta_max = cfg.delta_max;
  enc.apply_log = cfg.log_transform;
  enc.apply_unit_norm = cfg.unit_norm;
  enc.log_bins = cfg.log_bins;
  return enc;
}

WalkConfig walk_config(const RunConfig& cfg) {
  WalkConfig w;
  w.walks_per_node = cfg.walks_per_node;
  w.walk_length = cfg.walk_length;
  w.seed = derive_seed(cfg.seed, SeedStream::kWalk);
  return w;
}

UnsupConfig unsup_config(const RunConfig& cfg) {
  UnsupConfig u;
  u.dim = cfg.dim;
  u.negatives = cfg.negatives;
  u.window = cfg.window;
  u.learning_rate = cfg.learning_rate;
  u.epochs = cfg.epochs;
  u.batch_size = cfg.batch_size;
  u.optimizer = cfg.optimizer == "sgd" ? OptimizerKind::kSgd : OptimizerKind::kAdam;
  u.noise = cfg.noise == "frequency" ? NoiseKind::kFrequency : NoiseKind::kUniform;
  u.mode = cfg.mode == "racy" ? ParallelMode::kRacy : ParallelMode::kDeterministic;
  u.threads = cfg.threads;
  u.seed = derive_seed(cfg.seed, SeedStream::kUnsupervised);
  u.init_scale = cfg.init_scale;
  return u;
}

HeadConfig head_config(const RunConfig& cfg, bool use_attributes) {
  HeadConfig h;
  h.dim = cfg.dim;
  h.hidden = cfg.hidden;
  h.activation = cfg.activation == "relu" ? Activation::kRelu : Activation::kElu;
  h.learning_rate = cfg.head_learning_rate;
  h.epochs = cfg.head_epochs;
  h.patience = cfg.patience;
  h.use_attributes = use_attributes;
  h.seed = derive_seed(cfg.seed, SeedStream::kHead);
  h.init_scale = cfg.init_scale;
  h.threads = cfg.threads;
  return h;
}

LinkPredictionConfig link_prediction_config(const RunConfig& cfg) {
  LinkPredictionConfig lp;
  lp.alpha = cfg.alpha;
  lp.delta_max = cfg.delta_max;
  lp.apply_log = cfg.log_transform;
  lp.apply_unit_norm = cfg.unit_norm;
  lp.log_bins = cfg.log_bins;
  lp.walk = walk_config(cfg);
  lp.unsup = unsup_config(cfg);
  lp.split_fraction = cfg.split_fraction;
  lp.classifier_train_fraction = cfg.classifier_train_fraction;
  lp.logreg.l2 = cfg.logreg_l2;
  lp.logreg.iterations = cfg.logreg_iterations;
  lp.seed = derive_seed(cfg.seed, SeedStream::kSplit);
  return lp;
}

KMeansConfig kmeans_config(const RunConfig& cfg) {
  KMeansConfig k;
  k.restarts = cfg.kmeans_restarts;
  return k;
}

ScalingGrid scaling_grid(const RunConfig& cfg) {
  ScalingGrid g;
  g.sizes = cfg.bench_sizes;
  g.size_sweep_degree = cfg.bench_size_degree;
  g.size_sweep_alphas = cfg.bench_size_alphas;
  g.degrees = cfg.bench_degrees;
  g.degree_sweep_size = cfg.bench_degree_size;
  g.degree_sweep_alphas = cfg.bench_degree_alphas;
  g.replicates = cfg.bench_replicates;
  g.seed = derive_seed(cfg.seed, SeedStream::kBenchmark);
  return g;
}

}  // namespace igel
