// igel: command-line front end for encoding, training and evaluation runs.
//
// Every subcommand writes its artifacts into the output directory together
// with config.resolved.json and run.json. Only run.json carries wall-clock
// timings and the thread count, so all other files are byte-identical when a
// deterministic run is repeated.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "igel/config.hpp"
#include "igel/datasets.hpp"
#include "igel/embedding.hpp"
#include "igel/encoder.hpp"
#include "igel/evaluation.hpp"
#include "igel/graph.hpp"
#include "igel/supervised.hpp"
#include "igel/unsupervised.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Options {
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out;
  std::string graph;
  std::string matrix;
  bool deterministic = false;
  bool graph_only = false;
  bool with_features = false;
  std::string log_level = "info";
};

/// Raised for bad invocations, as opposed to failures while running.
struct UsageError : igel::Error {
  using igel::Error::Error;
};

class Run {
 public:
  Run(const Options& opt, igel::RunConfig cfg) : opt_(opt), cfg_(std::move(cfg)) {
    fs::create_directories(cfg_.out);
    write_text("config.resolved.json", igel::resolved_config_json(cfg_));
  }

  const igel::RunConfig& cfg() const { return cfg_; }
  fs::path path(const std::string& name) const { return fs::path(cfg_.out) / name; }

  void write_text(const std::string& name, const std::string& text) const {
    std::ofstream out(path(name), std::ios::binary);
    out << text;
    if (!out) throw igel::Error(path(name).string() + ": write failed");
  }
  void write_json(const std::string& name, Json j) const {
    j["version"] = igel::version();
    write_text(name, j.dump(2) + "\n");
  }
  std::ofstream open(const std::string& name) const {
    std::ofstream out(path(name), std::ios::binary);
    if (!out) throw igel::Error(path(name).string() + ": cannot open for writing");
    return out;
  }

  void timing(const std::string& phase, double seconds) { timings_[phase] = seconds; }

  void finish() const {
    Json j;
    j["command"] = opt_.command;
    j["version"] = igel::version();
    j["seed"] = cfg_.seed;
    j["threads"] = cfg_.threads;
    j["timings_seconds"] = timings_;
    std::ofstream out(path("run.json"), std::ios::binary);
    out << j.dump(2) << "\n";
    spdlog::info("wrote outputs to {}", cfg_.out);
  }

 private:
  const Options& opt_;
  igel::RunConfig cfg_;
  Json timings_ = Json::object();
};

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

igel::RunConfig resolve_config(const Options& opt) {
  igel::RunConfig cfg;
  if (!opt.config_path.empty()) cfg = igel::load_run_config(opt.config_path);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.threads) cfg.threads = *opt.threads;
  if (!opt.graph.empty()) cfg.graph = opt.graph;
  if (!opt.matrix.empty()) cfg.matrix = opt.matrix;
  if (opt.deterministic) cfg.mode = "deterministic";
  if (!opt.out.empty()) {
    cfg.out = opt.out;
  } else if (cfg.out.empty()) {
    const char* env = std::getenv("IGEL_OUT_DIR");
    cfg.out = env && *env ? env : "igel-out";
  }
  cfg.validate();
  return cfg;
}

igel::LoadedGraph require_graph(const igel::RunConfig& cfg) {
  if (cfg.graph.empty()) throw UsageError("no input graph; pass --graph or set 'graph'");
  auto loaded = igel::load_edge_list(cfg.graph);
  spdlog::info("loaded {}: {} nodes, {} edges", cfg.graph, loaded.graph.num_nodes(),
               loaded.graph.num_edges());
  if (loaded.self_loops > 0) spdlog::warn("dropped {} self-loop(s)", loaded.self_loops);
  if (loaded.duplicate_edges > 0) {
    spdlog::warn("collapsed {} duplicate edge line(s)", loaded.duplicate_edges);
  }
  return loaded;
}

igel::EmbeddingMatrix require_matrix(const igel::RunConfig& cfg) {
  if (cfg.matrix.empty()) throw UsageError("no embedding matrix; pass --matrix or set 'matrix'");
  return igel::load_embedding(cfg.matrix);
}

Json encoder_json(const igel::EncoderConfig& e) {
  return {{"alpha", e.alpha},
          {"delta_max", e.delta_max},
          {"log_transform", e.apply_log},
          {"unit_norm", e.apply_unit_norm},
          {"log_bins", e.log_bins},
          {"dim", e.dim()}};
}

Json report_json(const igel::TrainReport& r) {
  return {{"epoch_objective", r.epoch_objective},
          {"final_objective", r.final_objective},
          {"pairs_per_epoch", r.pairs_per_epoch}};
}

void record_train_timings(Run& run, const igel::TrainReport& r) {
  run.timing("encode", r.encode_seconds);
  run.timing("walk", r.walk_seconds);
  run.timing("optimize", r.optimize_seconds);
}

void write_embeddings(const Run& run, const std::string& name, const igel::NodeEmbeddings& emb,
                      std::span<const std::string> labels) {
  auto out = run.open(name);
  igel::write_node_embeddings(out, emb.values, emb.dim, labels);
}

// ---------------------------------------------------------------------------

void cmd_encode(Run& run) {
  const auto loaded = require_graph(run.cfg());
  const auto enc = igel::encoder_config(run.cfg(), loaded.graph);
  const auto t = Clock::now();
  const auto rows = igel::encode_all(loaded.graph, enc, run.cfg().threads);
  run.timing("encode", since(t));
  auto out = run.open("features.txt");
  igel::write_features(out, rows, enc, loaded.labels);
  igel::save_labels(run.path("nodes.tsv").string(), loaded.labels);
  run.write_json("encoder.json", encoder_json(enc));
}

void cmd_train_unsup(Run& run) {
  const auto loaded = require_graph(run.cfg());
  const auto enc = igel::encoder_config(run.cfg(), loaded.graph);
  spdlog::info("training: alpha={} features={} d={} epochs={}", enc.alpha, enc.dim(),
               run.cfg().dim, run.cfg().epochs);
  const auto result = igel::train_unsupervised(loaded.graph, enc, igel::walk_config(run.cfg()),
                                               igel::unsup_config(run.cfg()));
  record_train_timings(run, result.report);
  igel::save_embedding(run.path("matrix.igel").string(), result.matrix);
  igel::save_labels(run.path("nodes.tsv").string(), loaded.labels);
  run.write_json("report.json",
                 {{"encoder", encoder_json(enc)}, {"training", report_json(result.report)}});
  spdlog::info("final objective {:.6f}", result.report.final_objective);
}

void cmd_embed(Run& run) {
  const auto loaded = require_graph(run.cfg());
  const auto w = require_matrix(run.cfg());
  const auto t = Clock::now();
  const auto emb = igel::embed_nodes(loaded.graph, w.encoder, w, run.cfg().threads);
  run.timing("embed", since(t));
  write_embeddings(run, "embeddings.tsv", emb, loaded.labels);
}

void cmd_link_predict(Run& run) {
  const auto loaded = require_graph(run.cfg());
  Json repeats = Json::array();
  double auc_sum = 0.0;
  for (std::uint32_t r = 0; r < run.cfg().repeats; ++r) {
    igel::RunConfig rc = run.cfg();
    rc.seed = run.cfg().seed + r;
    const auto lp = igel::link_prediction_config(rc);
    if (r == 0) {
      // Persist the split of the first repeat for inspection.
      const auto split =
          igel::split_edges_for_link_prediction(loaded.graph, lp.split_fraction, lp.seed);
      fs::create_directories(run.path("split"));
      igel::save_edge_split(run.path("split").string(), split, loaded.labels);
    }
    const auto res = igel::run_link_prediction(loaded.graph, lp);
    spdlog::info("repeat {}: test AUC {:.4f} (train {:.4f})", r, res.test_auc, res.train_auc);
    auc_sum += res.test_auc;
    repeats.push_back({{"seed", rc.seed},
                       {"test_auc", res.test_auc},
                       {"train_auc", res.train_auc},
                       {"removed_edges", res.removed_edges},
                       {"classifier_train_pairs", res.classifier_train_pairs},
                       {"test_pairs", res.test_pairs},
                       {"encoder", encoder_json(res.encoder)},
                       {"training", report_json(res.train_report)}});
    run.timing("repeat_" + std::to_string(r) + "_split", res.split_seconds);
    run.timing("repeat_" + std::to_string(r) + "_encode", res.train_report.encode_seconds);
    run.timing("repeat_" + std::to_string(r) + "_walk", res.train_report.walk_seconds);
    run.timing("repeat_" + std::to_string(r) + "_optimize", res.train_report.optimize_seconds);
    run.timing("repeat_" + std::to_string(r) + "_classifier", res.classifier_seconds);
  }
  const double mean = auc_sum / run.cfg().repeats;
  run.write_json("metrics.json", {{"mean_test_auc", mean}, {"repeats", repeats}});
  spdlog::info("mean test AUC {:.4f}", mean);
}

igel::LabeledGraph load_labeled(const igel::GraphFiles& files, igel::SplitTag tag,
                                bool with_features, std::size_t& num_labels,
                                std::size_t& attr_dim, std::vector<std::string>& node_names) {
  auto loaded = igel::load_edge_list(files.edges);
  igel::LabeledGraph lg;
  auto labels = igel::load_node_matrix(files.labels, loaded.labels, true);
  if (num_labels != 0 && labels.width != num_labels) {
    throw igel::Error(files.labels + ": expected " + std::to_string(num_labels) + " labels");
  }
  num_labels = labels.width;
  lg.labels = std::move(labels.values);
  if (with_features) {
    if (files.attributes.empty()) {
      throw UsageError(files.edges + ": --with-features needs an 'attributes' file per graph");
    }
    auto attrs = igel::load_node_matrix(files.attributes, loaded.labels, false);
    if (attr_dim != 0 && attrs.width != attr_dim) {
      throw igel::Error(files.attributes + ": expected " + std::to_string(attr_dim) +
                        " attributes");
    }
    attr_dim = attrs.width;
    lg.attributes = std::move(attrs.values);
  }
  lg.graph = std::move(loaded.graph);
  lg.split = tag;
  node_names = std::move(loaded.labels);
  return lg;
}

void cmd_classify(Run& run, const Options& opt) {
  const auto& cfg = run.cfg();
  if (cfg.train_graphs.empty() || cfg.validation_graphs.empty() || cfg.test_graphs.empty()) {
    throw UsageError(
        "classify needs 'train_graphs', 'validation_graphs' and 'test_graphs' in the config");
  }
  bool with_features = opt.with_features;
  if (!opt.graph_only && !opt.with_features) {
    with_features = true;
    for (const auto* list : {&cfg.train_graphs, &cfg.validation_graphs, &cfg.test_graphs}) {
      for (const auto& f : *list) with_features = with_features && !f.attributes.empty();
    }
  }
  igel::LabeledNodeDataset data;
  std::vector<std::vector<std::string>> names;
  const std::pair<const std::vector<igel::GraphFiles>*, igel::SplitTag> groups[] = {
      {&cfg.train_graphs, igel::SplitTag::kTrain},
      {&cfg.validation_graphs, igel::SplitTag::kValidation},
      {&cfg.test_graphs, igel::SplitTag::kTest}};
  auto t = Clock::now();
  for (const auto& [list, tag] : groups) {
    for (const auto& files : *list) {
      names.emplace_back();
      data.graphs.push_back(load_labeled(files, tag, with_features, data.num_labels,
                                         data.attribute_dim, names.back()));
    }
  }
  data.validate();
  run.timing("load", since(t));

  auto enc = igel::fit_config(data, cfg.alpha);
  if (cfg.delta_max > 0) enc.delta_max = cfg.delta_max;
  enc.apply_log = cfg.log_transform;
  enc.apply_unit_norm = cfg.unit_norm;
  enc.log_bins = cfg.log_bins;
  spdlog::info("classify ({}): {} graphs, {} labels, {} attributes, features={}",
               with_features ? "with features" : "graph only", data.graphs.size(),
               data.num_labels, data.attribute_dim, enc.dim());

  const auto result = igel::train_joint(data, enc, igel::head_config(cfg, with_features));
  run.timing("train", result.report.seconds);

  t = Clock::now();
  std::vector<double> all_pred, all_truth;
  Json per_graph = Json::array();
  fs::create_directories(run.path("predictions"));
  std::size_t test_index = 0;
  for (std::size_t i = 0; i < data.graphs.size(); ++i) {
    const auto& lg = data.graphs[i];
    if (lg.split != igel::SplitTag::kTest) continue;
    const auto prob = igel::predict_all(result.model, enc, lg.graph,
                                        with_features ? std::span<const double>(lg.attributes)
                                                      : std::span<const double>{},
                                        cfg.threads);
    const auto pred = igel::threshold_predictions(prob);
    per_graph.push_back(igel::micro_f1(pred, lg.labels));
    all_pred.insert(all_pred.end(), pred.begin(), pred.end());
    all_truth.insert(all_truth.end(), lg.labels.begin(), lg.labels.end());

    auto out = run.open("predictions/test_" + std::to_string(test_index++) + ".tsv");
    char buf[32];
    for (std::size_t n = 0; n < lg.graph.num_nodes(); ++n) {
      out << names[i][n];
      for (std::size_t m = 0; m < data.num_labels; ++m) {
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, prob[n * data.num_labels + m]);
        out << ' ' << std::string_view(buf, static_cast<std::size_t>(end - buf));
      }
      out << '\n';
    }
  }
  run.timing("predict", since(t));
  const double test_f1 = igel::micro_f1(all_pred, all_truth);
  spdlog::info("test micro-F1 {:.4f} (best validation {:.4f} at epoch {})", test_f1,
               result.report.best_val_f1, result.report.best_epoch);

  igel::save_embedding(run.path("matrix.igel").string(), result.model.matrix);
  run.write_json(with_features ? "report_with_features.json" : "report_graph_only.json",
                 {{"variant", with_features ? "with_features" : "graph_only"},
                  {"encoder", encoder_json(enc)},
                  {"test_micro_f1", test_f1},
                  {"test_micro_f1_per_graph", per_graph},
                  {"best_validation_micro_f1", result.report.best_val_f1},
                  {"initial_validation_micro_f1", result.report.initial_val_f1},
                  {"best_epoch", result.report.best_epoch},
                  {"epochs_run", result.report.epochs_run},
                  {"train_loss", result.report.train_loss},
                  {"validation_micro_f1", result.report.val_f1}});
}

void cmd_cluster(Run& run) {
  const auto& cfg = run.cfg();
  const auto loaded = require_graph(cfg);
  igel::EmbeddingMatrix w = [&] {
    if (!cfg.matrix.empty()) return igel::load_embedding(cfg.matrix);
    spdlog::info("no matrix given; training one on the input graph");
    const auto result =
        igel::train_unsupervised(loaded.graph, igel::encoder_config(cfg, loaded.graph),
                                 igel::walk_config(cfg), igel::unsup_config(cfg));
    record_train_timings(run, result.report);
    igel::save_embedding(run.path("matrix.igel").string(), result.matrix);
    return result.matrix;
  }();
  auto t = Clock::now();
  const auto emb = igel::embed_nodes(loaded.graph, w.encoder, w, cfg.threads);
  write_embeddings(run, "embeddings.tsv", emb, loaded.labels);

  const std::size_t k_max = std::min(cfg.k_max, loaded.graph.num_nodes());
  const auto sel =
      igel::select_k_by_modularity(loaded.graph, emb, std::min(cfg.k_min, k_max), k_max,
                                   igel::derive_seed(cfg.seed, igel::SeedStream::kClustering),
                                   igel::kmeans_config(cfg));
  run.timing("cluster", since(t));
  {
    auto out = run.open("modularity.tsv");
    out << "k\tmodularity\tinertia\n";
    for (const auto& row : sel.table) {
      out << row.k << '\t' << Json(row.modularity).dump() << '\t' << Json(row.inertia).dump()
          << '\n';
    }
  }
  {
    auto out = run.open("assignments.tsv");
    out << "node\tcluster\n";
    for (std::size_t n = 0; n < sel.best.labels.size(); ++n) {
      out << loaded.labels[n] << '\t' << sel.best.labels[n] << '\n';
    }
  }
  t = Clock::now();
  const auto corr = igel::centrality_correlations(loaded.graph, emb);
  run.timing("correlations", since(t));
  auto number = [](double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); };
  run.write_json("clustering.json",
                 {{"best_k", sel.best_k},
                  {"best_modularity", sel.best.modularity},
                  {"encoder", encoder_json(w.encoder)},
                  {"spearman",
                   {{"pagerank", number(corr.pagerank)},
                    {"betweenness", number(corr.betweenness)},
                    {"harmonic_closeness", number(corr.closeness)},
                    {"degree", number(corr.degree)}}}});
  spdlog::info("best k {} (modularity {:.4f}); spearman degree {:.3f} pagerank {:.3f}", sel.best_k,
               sel.best.modularity, corr.degree, corr.pagerank);
}

void cmd_bench(Run& run) {
  const auto& cfg = run.cfg();
  auto out = run.open("scaling.tsv");
  igel::write_scaling_tsv_header(out);
  const auto result = igel::scaling_benchmark(
      igel::scaling_grid(cfg), igel::walk_config(cfg), igel::unsup_config(cfg),
      [&](const igel::ScalingRun& r) {
        igel::write_scaling_tsv_row(out, r);
        out.flush();
        spdlog::info("{} sweep: |V|={} degree={} alpha={} -> {:.3f}s", r.sweep, r.spec.num_nodes,
                     r.spec.avg_degree, r.alpha, r.total_seconds);
      });
  Json fits = Json::array();
  for (const auto& f : result.size_fits) {
    fits.push_back({{"alpha", f.alpha}, {"log_log_slope", f.slope}});
    spdlog::info("alpha {}: log-log slope {:.3f}", f.alpha, f.slope);
  }
  Json trends = Json::array();
  for (const auto& d : result.degree_trends) {
    trends.push_back({{"alpha", d.alpha},
                      {"min_seconds", d.min_seconds},
                      {"max_seconds", d.max_seconds},
                      {"max_over_min", d.max_seconds / d.min_seconds},
                      {"seconds_per_degree", d.slope}});
  }
  run.write_json("scaling_fits.json", {{"size_fits", fits}, {"degree_trends", trends}});
}

void print_error(const std::string& command, const std::string& kind, const std::string& msg,
                 const std::string& hint) {
  Json line = {{"error", kind}, {"command", command}, {"message", msg}};
  std::cerr << line.dump() << "\n";
  if (!hint.empty()) std::cerr << "igel: " << hint << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IGEL structural graph embeddings"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "top-level random seed");
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", opt.out, "output directory (default: $IGEL_OUT_DIR or ./igel-out)");
    sub->add_flag("--deterministic", opt.deterministic,
                  "force the deterministic training mode");
    sub->add_option("--log-level", opt.log_level, "trace|debug|info|warn|error|off");
  };
  auto add_graph = [&](CLI::App* sub) {
    sub->add_option("--graph", opt.graph, "edge-list file");
  };
  auto add_matrix = [&](CLI::App* sub) {
    sub->add_option("--matrix", opt.matrix, "embedding matrix file");
  };

  auto* encode = app.add_subcommand("encode", "write sparse structural features");
  auto* train = app.add_subcommand("train-unsup", "train W with the skip-gram objective");
  auto* embed = app.add_subcommand("embed", "embed every node of a graph with a trained W");
  auto* link = app.add_subcommand("link-predict", "edge-removal link prediction protocol");
  auto* classify = app.add_subcommand("classify", "multi-label node classification");
  auto* cluster = app.add_subcommand("cluster", "k-means + modularity and centrality analysis");
  auto* bench = app.add_subcommand("bench", "Erdos-Renyi runtime scaling benchmark");
  for (auto* sub : {encode, train, embed, link, classify, cluster, bench}) add_common(sub);
  for (auto* sub : {encode, train, embed, link, cluster}) add_graph(sub);
  for (auto* sub : {embed, cluster}) add_matrix(sub);
  auto* graph_only = classify->add_flag("--graph-only", opt.graph_only, "ignore node attributes");
  auto* with_features =
      classify->add_flag("--with-features", opt.with_features, "feed node attributes to the head");
  graph_only->excludes(with_features);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name(),
                "usage", e.what(), "run 'igel --help' for usage");
    return 2;
  }
  opt.command = app.get_subcommands().front()->get_name();

  auto logger = spdlog::stderr_logger_st("igel");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S.%e] [%l] %v");
  spdlog::set_level(spdlog::level::from_str(opt.log_level));

  try {
    Run run(opt, resolve_config(opt));
    if (opt.command == "encode") cmd_encode(run);
    else if (opt.command == "train-unsup") cmd_train_unsup(run);
    else if (opt.command == "embed") cmd_embed(run);
    else if (opt.command == "link-predict") cmd_link_predict(run);
    else if (opt.command == "classify") cmd_classify(run, opt);
    else if (opt.command == "cluster") cmd_cluster(run);
    else if (opt.command == "bench") cmd_bench(run);
    run.finish();
  } catch (const UsageError& e) {
    print_error(opt.command, "usage", e.what(), "run 'igel " + opt.command + " --help'");
    return 2;
  } catch (const igel::Error& e) {
    print_error(opt.command, "failed", e.what(), "");
    return 1;
  } catch (const std::exception& e) {
    print_error(opt.command, "internal", e.what(), "");
    return 3;
  }
  return 0;
}
