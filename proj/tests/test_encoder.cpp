#include <doctest.h>

#include <numeric>
#include <sstream>

#include "igel/datasets.hpp"
#include "igel/encoder.hpp"
#include "support.hpp"

using namespace igel;

namespace {

EncoderConfig raw_config(std::uint32_t alpha, std::uint32_t delta_max) {
  EncoderConfig cfg;
  cfg.alpha = alpha;
  cfg.delta_max = delta_max;
  cfg.apply_log = false;
  cfg.apply_unit_norm = false;
  return cfg;
}

double value_at(const SparseFeatures& x, std::size_t index) {
  for (const auto& e : x.entries)
    if (e.index == index) return e.value;
  return 0.0;
}

}  // namespace

TEST_CASE("flat index layout") {
  EncoderConfig cfg;
  cfg.alpha = 2;
  cfg.delta_max = 4;
  CHECK(cfg.dim() == 12);
  CHECK(cfg.flat_index(0, 1) == 0);
  CHECK(cfg.flat_index(1, 4) == 7);
  CHECK(cfg.flat_index(2, 1) == 8);
  CHECK(cfg.degree_bin(0) == 1);
  CHECK(cfg.degree_bin(3) == 3);
  CHECK(cfg.degree_bin(9) == 4);
}

TEST_CASE("figure graph raw counts at radius two") {
  const Graph g = testing::figure_graph();
  const auto cfg = raw_config(2, 4);
  const auto x = encode_node(g, 0, cfg);
  CHECK(x.dim == 12);
  REQUIRE(x.entries.size() == 5);
  CHECK(value_at(x, cfg.flat_index(0, 2)) == 1.0);
  CHECK(value_at(x, cfg.flat_index(1, 2)) == 1.0);
  CHECK(value_at(x, cfg.flat_index(1, 4)) == 1.0);
  CHECK(value_at(x, cfg.flat_index(2, 3)) == 2.0);
  CHECK(value_at(x, cfg.flat_index(2, 4)) == 1.0);
}

TEST_CASE("log transform and unit normalization") {
  const Graph g = testing::figure_graph();
  EncoderConfig cfg = raw_config(2, 4);
  cfg.apply_log = true;
  const auto logged = encode_node(g, 0, cfg);
  CHECK(value_at(logged, cfg.flat_index(2, 3)) == std::log2(3.0));
  CHECK(value_at(logged, cfg.flat_index(0, 2)) == 1.0);                 // log2(2)

  cfg.apply_unit_norm = true;
  const auto normed = encode_node(g, 0, cfg);
  double top = 0.0;
  for (const auto& e : normed.entries) {
    CHECK(e.value > 0.0);
    CHECK(e.value <= 1.0);
    top = std::max(top, e.value);
  }
  CHECK(top == 1.0);
  CHECK(value_at(normed, cfg.flat_index(0, 2)) == doctest::Approx(1.0 / std::log2(3.0)));
}

TEST_CASE("a raw count of three logs to exactly two") {
  // Star with three leaves: the root sees three degree-1 nodes at distance 1.
  const Graph star = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}});
  EncoderConfig cfg = raw_config(1, 3);
  cfg.apply_log = true;
  const auto x = encode_node(star, 0, cfg);
  CHECK(value_at(x, cfg.flat_index(1, 1)) == 2.0);
}

TEST_CASE("triangle rows are identical") {
  const Graph tri = Graph::from_edges(3, std::vector<Edge>{{0, 1}, {1, 2}, {2, 0}});
  const auto cfg = raw_config(1, 2);
  const auto rows = encode_all(tri, cfg);
  for (const auto& row : rows) {
    CHECK(row == rows[0]);
    CHECK(value_at(row, cfg.flat_index(0, 2)) == 1.0);
    CHECK(value_at(row, cfg.flat_index(1, 2)) == 2.0);
  }
}

TEST_CASE("degree-zero roots land in bin one") {
  const Graph g = Graph::from_edges(3, std::vector<Edge>{{0, 1}});
  const auto cfg = fit_config(g, 2);
  const auto isolated = encode_node(g, 2, cfg);
  REQUIRE(isolated.entries.size() == 1);
  CHECK(isolated.entries[0].index == 0);
  CHECK(isolated.entries[0].value == 1.0);
  const auto zero_radius = encode_node(g, 0, EncoderConfig{0, 1, true, true, false});
  REQUIRE(zero_radius.entries.size() == 1);
  CHECK(zero_radius.entries[0].index == 0);
}

TEST_CASE("fit_config takes the maximum degree") {
  const Graph star = Graph::from_edges(6, std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  CHECK(fit_config(star, 2).delta_max == 5);
  CHECK(fit_config(star, 2).alpha == 2);
  const Graph empty = generate_erdos_renyi({5, 0.0, 1});
  CHECK(fit_config(empty, 1).delta_max == 1);
}

TEST_CASE("degrees beyond delta_max clip into the last bin") {
  const Graph star = Graph::from_edges(6, std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  const auto cfg = raw_config(1, 2);
  const auto x = encode_node(star, 0, cfg);
  CHECK(value_at(x, cfg.flat_index(0, 2)) == 1.0);
  CHECK(value_at(x, cfg.flat_index(1, 1)) == 5.0);
  for (const auto& e : x.entries) CHECK(e.index < cfg.dim());
}

TEST_CASE("encodings match the brute-force oracle on random graphs") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    const Graph g = testing::coin_flip_graph(60, trial % 2 ? 0.05 : 0.15, rng);
    const auto dist = testing::all_pairs_distances(g);
    for (std::uint32_t alpha = 0; alpha <= 3; ++alpha) {
      for (bool log_bins : {false, true}) {
        EncoderConfig cfg = fit_config(g, alpha);
        cfg.log_bins = log_bins;
        if (trial == 5) cfg.delta_max = 3;  // exercise clipping
        const auto rows = encode_all(g, cfg);
        for (NodeId n = 0; n < g.num_nodes(); ++n) {
          CHECK(rows[n] == testing::brute_force_encode(g, dist, n, cfg));
        }
      }
    }
  }
}

TEST_CASE("parallel encoding is identical to sequential") {
  const Graph g = generate_erdos_renyi({300, 6.0, 2});
  const auto cfg = fit_config(g, 2);
  CHECK(encode_all(g, cfg, 1) == encode_all(g, cfg, 4));
}

TEST_CASE("label permutation invariance") {
  std::mt19937_64 rng(23);
  const Graph g = testing::coin_flip_graph(40, 0.1, rng);
  std::vector<NodeId> perm(g.num_nodes());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Edge> moved;
  for (auto [u, v] : g.edges()) moved.emplace_back(perm[u], perm[v]);
  const Graph h = Graph::from_edges(g.num_nodes(), moved);
  const auto cfg = fit_config(g, 2);
  for (NodeId n = 0; n < g.num_nodes(); ++n) CHECK(encode_node(g, n, cfg) == encode_node(h, perm[n], cfg));
}

TEST_CASE("clone pairs away from the bridge encode identically") {
  const Graph g = testing::figure_graph();
  const auto c = clone_graph_with_bridge(g, 5);
  const NodeId n = static_cast<NodeId>(g.num_nodes());
  for (std::uint32_t alpha = 1; alpha <= 2; ++alpha) {
    const auto cfg = fit_config(c.graph, alpha);
    const auto da = bfs_distances(c.graph, c.bridge_a);
    const auto db = bfs_distances(c.graph, c.bridge_b);
    for (NodeId i = 0; i < n; ++i) {
      const bool away = da[i] > alpha && db[i] > alpha && da[i + n] > alpha && db[i + n] > alpha;
      if (away) CHECK(encode_node(c.graph, i, cfg) == encode_node(c.graph, i + n, cfg));
    }
  }
}

TEST_CASE("feature text format") {
  const Graph tri = Graph::from_edges(3, std::vector<Edge>{{0, 1}, {1, 2}, {2, 0}});
  const auto cfg = raw_config(1, 2);
  const auto rows = encode_all(tri, cfg);
  std::ostringstream out;
  write_features(out, rows, cfg, std::vector<std::string>{"a", "b", "c"});
  CHECK(out.str() == "a (0,2):1 (1,2):2\nb (0,2):1 (1,2):2\nc (0,2):1 (1,2):2\n");
}
