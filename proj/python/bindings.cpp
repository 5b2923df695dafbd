#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "igel/config.hpp"
#include "igel/datasets.hpp"
#include "igel/evaluation.hpp"
#include "igel/unsupervised.hpp"
#include "igel/walker.hpp"

namespace py = pybind11;
using namespace igel;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IdArray = py::array_t<NodeId, py::array::c_style | py::array::forcecast>;

std::span<const double> as_span(const DoubleArray& a) {
  return {a.data(), static_cast<std::size_t>(a.size())};
}

py::array_t<double> to_array(std::span<const double> values, std::size_t rows, std::size_t cols) {
  py::array_t<double> out({rows, cols});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

py::array_t<double> to_array(std::span<const double> values) {
  py::array_t<double> out(values.size());
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

py::array_t<NodeId> edges_to_array(std::span<const Edge> edges) {
  py::array_t<NodeId> out({edges.size(), std::size_t{2}});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    view(i, 0) = edges[i].first;
    view(i, 1) = edges[i].second;
  }
  return out;
}

std::vector<Edge> array_to_edges(const IdArray& a) {
  if (a.size() == 0) return {};
  if (a.ndim() != 2 || a.shape(1) != 2) throw Error("edges must have shape (m, 2)");
  auto view = a.unchecked<2>();
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) edges.emplace_back(view(i, 0), view(i, 1));
  return edges;
}

NodeEmbeddings to_embeddings(const DoubleArray& a) {
  if (a.ndim() != 2) throw Error("embeddings must be a 2-D array");
  NodeEmbeddings emb;
  emb.dim = static_cast<std::size_t>(a.shape(1));
  emb.values.assign(a.data(), a.data() + a.size());
  return emb;
}

py::dict report_dict(const TrainReport& r) {
  py::dict d;
  d["epoch_objective"] = r.epoch_objective;
  d["final_objective"] = r.final_objective;
  d["encode_seconds"] = r.encode_seconds;
  d["walk_seconds"] = r.walk_seconds;
  d["optimize_seconds"] = r.optimize_seconds;
  d["pairs_per_epoch"] = r.pairs_per_epoch;
  return d;
}

}  // namespace

PYBIND11_MODULE(_igel, m) {
  m.doc() = "Inductive structural graph embeddings";
  py::register_exception<Error>(m, "IgelError", PyExc_ValueError);
  m.def("version", [] { return std::string(version()); });

  py::class_<Graph>(m, "Graph")
      .def(py::init([](std::size_t n, const IdArray& edges) {
             return Graph::from_edges(n, array_to_edges(edges));
           }),
           py::arg("num_nodes"), py::arg("edges"))
      .def_property_readonly("num_nodes", &Graph::num_nodes)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def_property_readonly("max_degree", &Graph::max_degree)
      .def("degree", &Graph::degree, py::arg("node"))
      .def("neighbors",
           [](const Graph& g, NodeId n) {
             const auto nb = g.neighbors(n);
             return std::vector<NodeId>(nb.begin(), nb.end());
           },
           py::arg("node"))
      .def("has_edge", &Graph::has_edge, py::arg("u"), py::arg("v"))
      .def("edges", [](const Graph& g) { return edges_to_array(g.edges()); })
      .def("__repr__", [](const Graph& g) {
        std::ostringstream out;
        out << "Graph(num_nodes=" << g.num_nodes() << ", num_edges=" << g.num_edges() << ")";
        return out.str();
      });

  m.def("load_edge_list",
        [](const std::string& path) {
          auto loaded = load_edge_list(path);
          return py::make_tuple(std::move(loaded.graph), std::move(loaded.labels));
        },
        py::arg("path"), "Reads an edge list; returns (graph, node labels).");
  m.def("generate_erdos_renyi",
        [](std::size_t n, double avg_degree, std::uint64_t seed) {
          return generate_erdos_renyi({n, avg_degree, seed});
        },
        py::arg("num_nodes"), py::arg("avg_degree"), py::arg("seed") = 0);
  m.def("clone_graph_with_bridge",
        [](const Graph& g, std::uint64_t seed) {
          auto c = clone_graph_with_bridge(g, seed);
          return py::make_tuple(std::move(c.graph), c.bridge_a, c.bridge_b);
        },
        py::arg("graph"), py::arg("seed") = 0);
  m.def("split_edges",
        [](const Graph& g, double fraction, std::uint64_t seed) {
          auto s = split_edges_for_link_prediction(g, fraction, seed);
          py::dict d;
          d["train_graph"] = std::move(s.train_graph);
          d["positive"] = edges_to_array(s.positive_edges);
          d["negative"] = edges_to_array(s.negative_edges);
          return d;
        },
        py::arg("graph"), py::arg("fraction"), py::arg("seed") = 0);

  py::class_<EncoderConfig>(m, "EncoderConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &EncoderConfig::alpha)
      .def_readwrite("delta_max", &EncoderConfig::delta_max)
      .def_readwrite("apply_log", &EncoderConfig::apply_log)
      .def_readwrite("apply_unit_norm", &EncoderConfig::apply_unit_norm)
      .def_readwrite("log_bins", &EncoderConfig::log_bins)
      .def_property_readonly("dim", &EncoderConfig::dim)
      .def("flat_index", &EncoderConfig::flat_index, py::arg("distance"), py::arg("bin"))
      .def(py::self == py::self);
  m.def("fit_config", py::overload_cast<const Graph&, std::uint32_t>(&fit_config),
        py::arg("graph"), py::arg("alpha"));
  m.def("encode_node",
        [](const Graph& g, NodeId n, const EncoderConfig& cfg) {
          std::vector<std::pair<std::uint32_t, double>> out;
          for (const auto& e : encode_node(g, n, cfg).entries) out.emplace_back(e.index, e.value);
          return out;
        },
        py::arg("graph"), py::arg("node"), py::arg("config"),
        "Sparse features of one node as (index, value) pairs.");
  m.def("encode",
        [](const Graph& g, const EncoderConfig& cfg, unsigned threads) {
          const auto rows = encode_all(g, cfg, threads);
          py::array_t<double> out({rows.size(), cfg.dim()});
          auto view = out.mutable_unchecked<2>();
          for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t c = 0; c < cfg.dim(); ++c) view(r, c) = 0.0;
            for (const auto& e : rows[r].entries) view(r, e.index) = e.value;
          }
          return out;
        },
        py::arg("graph"), py::arg("config"), py::arg("threads") = 1,
        "Dense |V| x dim matrix of structural features.");

  py::enum_<OptimizerKind>(m, "Optimizer")
      .value("SGD", OptimizerKind::kSgd)
      .value("ADAM", OptimizerKind::kAdam);
  py::enum_<NoiseKind>(m, "Noise")
      .value("UNIFORM", NoiseKind::kUniform)
      .value("FREQUENCY", NoiseKind::kFrequency);
  py::enum_<ParallelMode>(m, "Mode")
      .value("DETERMINISTIC", ParallelMode::kDeterministic)
      .value("RACY", ParallelMode::kRacy);

  py::class_<WalkConfig>(m, "WalkConfig")
      .def(py::init([](std::uint32_t w, std::uint32_t s, std::uint64_t seed) {
             return WalkConfig{w, s, seed};
           }),
           py::arg("walks_per_node") = 10, py::arg("walk_length") = 80, py::arg("seed") = 0)
      .def_readwrite("walks_per_node", &WalkConfig::walks_per_node)
      .def_readwrite("walk_length", &WalkConfig::walk_length)
      .def_readwrite("seed", &WalkConfig::seed);
  m.def("random_walks",
        [](const Graph& g, const WalkConfig& cfg, unsigned threads) {
          const auto corpus = generate_corpus(g, cfg, threads);
          std::vector<std::vector<NodeId>> walks;
          for (std::size_t k = 0; k < corpus.size(); ++k) {
            const auto w = corpus.walk(k);
            walks.emplace_back(w.begin(), w.end());
          }
          return walks;
        },
        py::arg("graph"), py::arg("config"), py::arg("threads") = 1);

  py::class_<UnsupConfig>(m, "UnsupConfig")
      .def(py::init<>())
      .def_readwrite("dim", &UnsupConfig::dim)
      .def_readwrite("negatives", &UnsupConfig::negatives)
      .def_readwrite("window", &UnsupConfig::window)
      .def_readwrite("learning_rate", &UnsupConfig::learning_rate)
      .def_readwrite("epochs", &UnsupConfig::epochs)
      .def_readwrite("batch_size", &UnsupConfig::batch_size)
      .def_readwrite("optimizer", &UnsupConfig::optimizer)
      .def_readwrite("noise", &UnsupConfig::noise)
      .def_readwrite("mode", &UnsupConfig::mode)
      .def_readwrite("threads", &UnsupConfig::threads)
      .def_readwrite("seed", &UnsupConfig::seed)
      .def_readwrite("init_scale", &UnsupConfig::init_scale);

  py::class_<EmbeddingMatrix>(m, "EmbeddingMatrix")
      .def_property_readonly("rows", &EmbeddingMatrix::rows)
      .def_property_readonly("cols", &EmbeddingMatrix::cols)
      .def_readonly("encoder", &EmbeddingMatrix::encoder)
      .def("to_numpy",
           [](const EmbeddingMatrix& w) { return to_array(w.values(), w.rows(), w.cols()); })
      .def("save", [](const EmbeddingMatrix& w, const std::string& path) { save_embedding(path, w); },
           py::arg("path"))
      .def_static("load", &load_embedding, py::arg("path"))
      .def(py::self == py::self);

  m.def("train_unsupervised",
        [](const Graph& g, const EncoderConfig& enc, const WalkConfig& walk,
           const UnsupConfig& cfg) {
          UnsupResult r;
          {
            py::gil_scoped_release release;
            r = train_unsupervised(g, enc, walk, cfg);
          }
          return py::make_tuple(std::move(r.matrix), report_dict(r.report));
        },
        py::arg("graph"), py::arg("encoder"), py::arg("walk"), py::arg("config"),
        "Trains W on random walks over the graph; returns (matrix, report).");
  m.def("embed_nodes",
        [](const Graph& g, const EncoderConfig& enc, const EmbeddingMatrix& w, unsigned threads) {
          const auto emb = embed_nodes(g, enc, w, threads);
          return to_array(emb.values, emb.size(), emb.dim);
        },
        py::arg("graph"), py::arg("encoder"), py::arg("matrix"), py::arg("threads") = 1);

  m.def("roc_auc",
        [](const DoubleArray& s, const DoubleArray& y) { return roc_auc(as_span(s), as_span(y)); },
        py::arg("scores"), py::arg("labels"));
  m.def("micro_f1",
        [](const DoubleArray& p, const DoubleArray& t) { return micro_f1(as_span(p), as_span(t)); },
        py::arg("predicted"), py::arg("truth"));
  m.def("spearman",
        [](const DoubleArray& a, const DoubleArray& b) { return spearman(as_span(a), as_span(b)); },
        py::arg("a"), py::arg("b"));
  m.def("modularity",
        [](const Graph& g, const std::vector<std::uint32_t>& labels) { return modularity(g, labels); },
        py::arg("graph"), py::arg("labels"));
  m.def("kmeans",
        [](const DoubleArray& points, std::size_t k, std::uint64_t seed, std::uint32_t restarts) {
          if (points.ndim() != 2) throw Error("points must be a 2-D array");
          KMeansConfig cfg;
          cfg.restarts = restarts;
          const auto dim = static_cast<std::size_t>(points.shape(1));
          const auto r = kmeans(as_span(points), dim, k, seed, cfg);
          py::dict d;
          d["labels"] = r.labels;
          d["centroids"] = to_array(r.centroids, r.k, dim);
          d["inertia"] = r.inertia;
          return d;
        },
        py::arg("points"), py::arg("k"), py::arg("seed") = 0, py::arg("restarts") = 10);
  m.def("select_k_by_modularity",
        [](const Graph& g, const DoubleArray& emb, std::size_t k_min, std::size_t k_max,
           std::uint64_t seed) {
          const auto sel = select_k_by_modularity(g, to_embeddings(emb), k_min, k_max, seed);
          std::vector<std::pair<std::size_t, double>> table;
          for (const auto& row : sel.table) table.emplace_back(row.k, row.modularity);
          return py::make_tuple(sel.best_k, table, sel.best.labels);
        },
        py::arg("graph"), py::arg("embeddings"), py::arg("k_min") = 2, py::arg("k_max") = 15,
        py::arg("seed") = 0, "Returns (best k, [(k, modularity)], labels of the best k).");
  m.def("pagerank", [](const Graph& g, double damping) { return to_array(pagerank(g, damping)); },
        py::arg("graph"), py::arg("damping") = 0.85);
  m.def("betweenness", [](const Graph& g) { return to_array(betweenness(g)); }, py::arg("graph"));
  m.def("harmonic_closeness", [](const Graph& g) { return to_array(harmonic_closeness(g)); },
        py::arg("graph"));
  m.def("centrality_correlations",
        [](const Graph& g, const DoubleArray& emb) {
          const auto r = centrality_correlations(g, to_embeddings(emb));
          py::dict d;
          d["pagerank"] = r.pagerank;
          d["betweenness"] = r.betweenness;
          d["closeness"] = r.closeness;
          d["degree"] = r.degree;
          return d;
        },
        py::arg("graph"), py::arg("embeddings"));

  m.def("link_prediction",
        [](const Graph& g, std::uint32_t alpha, const WalkConfig& walk, const UnsupConfig& unsup,
           double split_fraction, std::uint64_t seed) {
          LinkPredictionConfig cfg;
          cfg.alpha = alpha;
          cfg.walk = walk;
          cfg.unsup = unsup;
          cfg.split_fraction = split_fraction;
          cfg.seed = seed;
          LinkPredictionResult r;
          {
            py::gil_scoped_release release;
            r = run_link_prediction(g, cfg);
          }
          py::dict d;
          d["test_auc"] = r.test_auc;
          d["train_auc"] = r.train_auc;
          d["removed_edges"] = r.removed_edges;
          d["test_pairs"] = r.test_pairs;
          d["report"] = report_dict(r.train_report);
          return d;
        },
        py::arg("graph"), py::arg("alpha"), py::arg("walk"), py::arg("config"),
        py::arg("split_fraction") = 0.5, py::arg("seed") = 0);
}
