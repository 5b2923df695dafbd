#include "igel/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

namespace igel {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double roc_auc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw Error("scores and labels differ in length");
  const auto ranks = average_ranks(scores);
  double positives = 0.0;
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0.0 && labels[i] != 1.0) throw Error("AUC labels must be 0 or 1");
    if (labels[i] == 1.0) {
      positives += 1.0;
      rank_sum += ranks[i];
    }
  }
  const double negatives = static_cast<double>(labels.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) {
    throw Error("ROC-AUC needs both positive and negative examples");
  }
  // Mann-Whitney U of the positives divided by the number of pairs.
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

double micro_f1(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size()) throw Error("micro-F1 inputs differ in shape");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] != 0.0;
    const bool t = truth[i] != 0.0;
    tp += p && t;
    fp += p && !t;
    fn += !p && t;
  }
  const std::size_t denom = 2 * tp + fp + fn;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("spearman inputs differ in length");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

// ---------------------------------------------------------------------------
// Clustering
// ---------------------------------------------------------------------------

namespace {

double squared_distance(const double* a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

ClusterAssignment lloyd(std::span<const double> points, std::size_t dim, std::size_t k,
                        std::mt19937_64& rng, const KMeansConfig& cfg) {
  const std::size_t n = points.size() / dim;
  ClusterAssignment out;
  out.k = k;
  out.centroids.assign(k * dim, 0.0);

  // k-means++ seeding.
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<char> chosen(n, 0);
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::size_t pick = first(rng);
  for (std::size_t c = 0; c < k; ++c) {
    if (c > 0) {
      const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
      if (total > 0.0) {
        std::uniform_real_distribution<double> unit(0.0, total);
        double r = unit(rng);
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          r -= nearest[i];
          if (r < 0.0 && nearest[i] > 0.0) {
            pick = i;
            break;
          }
        }
        while (nearest[pick] == 0.0 && pick > 0) --pick;
      } else {
        // Every point coincides with a center already; take any unchosen one.
        std::vector<std::size_t> free;
        for (std::size_t i = 0; i < n; ++i)
          if (!chosen[i]) free.push_back(i);
        std::uniform_int_distribution<std::size_t> any(0, free.size() - 1);
        pick = free[any(rng)];
      }
    }
    chosen[pick] = 1;
    std::copy_n(points.data() + pick * dim, dim, out.centroids.data() + c * dim);
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i],
                            squared_distance(points.data() + i * dim,
                                             out.centroids.data() + c * dim, dim));
    }
  }

  out.labels.assign(n, 0);
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);
  double previous = std::numeric_limits<double>::infinity();
  for (std::uint32_t it = 0; it < cfg.max_iterations; ++it) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t arg = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double dist =
            squared_distance(points.data() + i * dim, out.centroids.data() + c * dim, dim);
        if (dist < best) {
          best = dist;
          arg = static_cast<std::uint32_t>(c);
        }
      }
      out.labels[i] = arg;
      inertia += best;
    }
    out.inertia = inertia;
    out.inertia_history.push_back(inertia);
    const bool converged =
        previous - inertia <= cfg.tolerance * std::max(previous == std::numeric_limits<double>::infinity()
                                                           ? 0.0
                                                           : previous,
                                                       std::numeric_limits<double>::min());
    if (converged || inertia == 0.0) break;
    previous = inertia;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = out.labels[i];
      ++counts[c];
      for (std::size_t d = 0; d < dim; ++d) sums[c * dim + d] += points[i * dim + d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      for (std::size_t d = 0; d < dim; ++d) {
        out.centroids[c * dim + d] = sums[c * dim + d] / static_cast<double>(counts[c]);
      }
    }
  }
  return out;
}

}  // namespace

ClusterAssignment kmeans(std::span<const double> points, std::size_t dim, std::size_t k,
                         std::uint64_t seed, const KMeansConfig& cfg) {
  if (dim == 0 || points.size() % dim != 0) throw Error("k-means point matrix shape mismatch");
  const std::size_t n = points.size() / dim;
  if (k == 0) throw Error("k-means needs k >= 1");
  if (k > n) {
    throw Error("k-means with k=" + std::to_string(k) + " exceeds " + std::to_string(n) +
                " points");
  }
  std::mt19937_64 rng(seed);
  ClusterAssignment best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (std::uint32_t r = 0; r < std::max(1u, cfg.restarts); ++r) {
    auto run = lloyd(points, dim, k, rng, cfg);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

double modularity(const Graph& g, std::span<const std::uint32_t> labels) {
  if (labels.size() != g.num_nodes()) throw Error("partition does not cover every node");
  const double m = static_cast<double>(g.num_edges());
  if (m == 0.0) return 0.0;
  std::map<std::uint32_t, std::pair<double, double>> per;  // internal edges, degree sum
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    auto& [inside, degree] = per[labels[u]];
    degree += static_cast<double>(g.degree(u));
    for (NodeId v : g.neighbors(u)) {
      if (u < v && labels[u] == labels[v]) inside += 1.0;
    }
  }
  double q = 0.0;
  for (const auto& [label, value] : per) {
    const double share = value.second / (2.0 * m);
    q += value.first / m - share * share;
  }
  return q;
}

ModularitySelection select_k_by_modularity(const Graph& g, const NodeEmbeddings& emb,
                                           std::size_t k_min, std::size_t k_max,
                                           std::uint64_t seed, const KMeansConfig& cfg) {
  if (k_min == 0 || k_min > k_max) throw Error("invalid k range");
  if (emb.size() != g.num_nodes()) throw Error("embedding table does not match graph");
  ModularitySelection out;
  double best_q = -std::numeric_limits<double>::infinity();
  for (std::size_t k = k_min; k <= k_max; ++k) {
    auto assignment = kmeans(emb.values, emb.dim, k, seed + k, cfg);
    assignment.modularity = modularity(g, assignment.labels);
    out.table.push_back({k, assignment.modularity, assignment.inertia});
    if (assignment.modularity > best_q) {
      best_q = assignment.modularity;
      out.best_k = k;
      out.best = std::move(assignment);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Centrality
// ---------------------------------------------------------------------------

std::vector<double> pagerank(const Graph& g, double damping, double tolerance,
                             std::uint32_t max_iterations) {
  const std::size_t n = g.num_nodes();
  if (n == 0) return {};
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> rank(n, inv_n), next(n);
  for (std::uint32_t it = 0; it < max_iterations; ++it) {
    double dangling = 0.0;
    for (NodeId u = 0; u < n; ++u)
      if (g.degree(u) == 0) dangling += rank[u];
    std::fill(next.begin(), next.end(), (1.0 - damping + damping * dangling) * inv_n);
    for (NodeId u = 0; u < n; ++u) {
      if (g.degree(u) == 0) continue;
      const double share = damping * rank[u] / static_cast<double>(g.degree(u));
      for (NodeId v : g.neighbors(u)) next[v] += share;
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change += std::abs(next[i] - rank[i]);
    rank.swap(next);
    if (change < tolerance) break;
  }
  return rank;
}

std::vector<double> betweenness(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<double> score(n, 0.0);
  std::vector<double> sigma(n), delta(n);
  std::vector<std::int64_t> dist(n);
  std::vector<NodeId> stack;
  stack.reserve(n);
  for (NodeId s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    stack.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    stack.push_back(s);
    for (std::size_t head = 0; head < stack.size(); ++head) {
      const NodeId v = stack[head];
      for (NodeId w : g.neighbors(v)) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          stack.push_back(w);
        }
        if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
      }
    }
    // Accumulate dependencies in reverse BFS order; predecessors of w are
    // neighbors one level closer to s.
    for (std::size_t i = stack.size(); i-- > 0;) {
      const NodeId w = stack[i];
      for (NodeId v : g.neighbors(w)) {
        if (dist[v] == dist[w] - 1) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      }
      if (w != s) score[w] += delta[w];
    }
  }
  for (double& x : score) x *= 0.5;  // each pair was counted from both ends
  return score;
}

std::vector<double> harmonic_closeness(const Graph& g) {
  std::vector<double> out(g.num_nodes(), 0.0);
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    const auto dist = bfs_distances(g, s);
    double sum = 0.0;
    for (auto d : dist)
      if (d != kUnreachable && d > 0) sum += 1.0 / static_cast<double>(d);
    out[s] = sum;
  }
  return out;
}

std::vector<double> self_similarity(const Graph& g, const NodeEmbeddings& emb) {
  if (emb.size() != g.num_nodes()) throw Error("embedding table does not match graph");
  std::vector<double> out(g.num_nodes(), 0.0);
  for (NodeId n = 0; n < g.num_nodes(); ++n) {
    auto en = emb.row(n);
    double s = 0.0;
    for (NodeId m : g.neighbors(n)) {
      auto em = emb.row(m);
      s += std::inner_product(en.begin(), en.end(), em.begin(), 0.0);
    }
    out[n] = s;
  }
  return out;
}

CentralityCorrelations centrality_correlations(const Graph& g, const NodeEmbeddings& emb) {
  const auto scores = self_similarity(g, emb);
  std::vector<double> degree(g.num_nodes());
  for (NodeId n = 0; n < g.num_nodes(); ++n) degree[n] = static_cast<double>(g.degree(n));
  CentralityCorrelations out;
  out.pagerank = spearman(scores, pagerank(g));
  out.betweenness = spearman(scores, betweenness(g));
  out.closeness = spearman(scores, harmonic_closeness(g));
  out.degree = spearman(scores, degree);
  return out;
}

// ---------------------------------------------------------------------------
// Link prediction protocol
// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> pair_scores(const EdgeClassifier& clf, const NodeEmbeddings& emb,
                                std::span<const Edge> pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (auto [u, v] : pairs) out.push_back(clf.logit(emb.row(u), emb.row(v)));
  return out;
}

double split_auc(const EdgeClassifier& clf, const NodeEmbeddings& emb,
                 std::span<const Edge> positives, std::span<const Edge> negatives) {
  auto scores = pair_scores(clf, emb, positives);
  auto neg = pair_scores(clf, emb, negatives);
  std::vector<double> labels(scores.size(), 1.0);
  scores.insert(scores.end(), neg.begin(), neg.end());
  labels.resize(scores.size(), 0.0);
  return roc_auc(scores, labels);
}

}  // namespace

LinkPredictionResult run_link_prediction(const Graph& g, const LinkPredictionConfig& cfg) {
  if (!(cfg.classifier_train_fraction > 0.0 && cfg.classifier_train_fraction < 1.0)) {
    throw Error("classifier_train_fraction must lie in (0, 1)");
  }
  LinkPredictionResult out;
  auto t0 = Clock::now();
  EdgeSplit split = split_edges_for_link_prediction(g, cfg.split_fraction, cfg.seed);
  out.split_seconds = seconds_since(t0);
  out.removed_edges = split.positive_edges.size();

  out.encoder = fit_config(split.train_graph, cfg.alpha);
  if (cfg.delta_max > 0) out.encoder.delta_max = cfg.delta_max;
  out.encoder.apply_log = cfg.apply_log;
  out.encoder.apply_unit_norm = cfg.apply_unit_norm;
  out.encoder.log_bins = cfg.log_bins;
  UnsupConfig unsup = cfg.unsup;
  WalkConfig walk = cfg.walk;
  auto trained = train_unsupervised(split.train_graph, out.encoder, walk, unsup);
  out.train_report = trained.report;

  t0 = Clock::now();
  const NodeEmbeddings emb =
      embed_nodes(split.train_graph, out.encoder, trained.matrix, unsup.threads);

  std::mt19937_64 rng(cfg.seed ^ 0x11f0u);
  std::shuffle(split.positive_edges.begin(), split.positive_edges.end(), rng);
  std::shuffle(split.negative_edges.begin(), split.negative_edges.end(), rng);
  auto cut = [&](const std::vector<Edge>& v) {
    return static_cast<std::size_t>(
        std::llround(cfg.classifier_train_fraction * static_cast<double>(v.size())));
  };
  const std::size_t pos_cut = cut(split.positive_edges);
  const std::size_t neg_cut = cut(split.negative_edges);
  if (pos_cut == 0 || neg_cut == 0 || pos_cut == split.positive_edges.size() ||
      neg_cut == split.negative_edges.size()) {
    throw Error("too few held-out pairs to fit and evaluate the edge classifier");
  }
  EdgeSplit fit_part{Graph{}, {split.positive_edges.begin(), split.positive_edges.begin() +
                                                                 static_cast<std::ptrdiff_t>(pos_cut)},
                     {split.negative_edges.begin(),
                      split.negative_edges.begin() + static_cast<std::ptrdiff_t>(neg_cut)}};
  std::span<const Edge> test_pos(split.positive_edges.begin() + static_cast<std::ptrdiff_t>(pos_cut),
                                 split.positive_edges.end());
  std::span<const Edge> test_neg(split.negative_edges.begin() + static_cast<std::ptrdiff_t>(neg_cut),
                                 split.negative_edges.end());

  const EdgeClassifier clf = train_edge_classifier(fit_part, emb, cfg.logreg);
  out.classifier_train_pairs = pos_cut + neg_cut;
  out.test_pairs = test_pos.size() + test_neg.size();
  out.train_auc = split_auc(clf, emb, fit_part.positive_edges, fit_part.negative_edges);
  out.test_auc = split_auc(clf, emb, test_pos, test_neg);
  out.classifier_seconds = seconds_since(t0);
  return out;
}

// ---------------------------------------------------------------------------
// Scaling benchmark
// ---------------------------------------------------------------------------

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("slope fit needs >= 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw Error("slope fit needs distinct x values");
  return sxy / sxx;
}

ScalingResult scaling_benchmark(const ScalingGrid& grid, const WalkConfig& walk,
                                const UnsupConfig& unsup,
                                const std::function<void(const ScalingRun&)>& on_run) {
  ScalingResult out;
  auto execute = [&](const std::string& sweep, std::size_t size, double degree,
                     std::uint32_t alpha, std::uint32_t replicate) {
    ScalingRun run;
    run.sweep = sweep;
    run.alpha = alpha;
    run.replicate = replicate;
    run.spec = {size, degree,
                grid.seed ^ (static_cast<std::uint64_t>(size) * 1000003u) ^
                    (static_cast<std::uint64_t>(degree * 16) << 40) ^ replicate};
    const Graph g = generate_erdos_renyi(run.spec);
    run.num_edges = g.num_edges();
    WalkConfig w = walk;
    w.seed = walk.seed + replicate;
    UnsupConfig u = unsup;
    u.seed = unsup.seed + replicate;
    const auto result = train_unsupervised(g, fit_config(g, alpha), w, u);
    run.encode_seconds = result.report.encode_seconds;
    run.walk_seconds = result.report.walk_seconds;
    run.optimize_seconds = result.report.optimize_seconds;
    run.total_seconds = run.encode_seconds + run.walk_seconds + run.optimize_seconds;
    out.runs.push_back(run);
    if (on_run) on_run(run);
    return run.total_seconds;
  };

  const std::uint32_t reps = std::max(1u, grid.replicates);
  for (std::uint32_t alpha : grid.size_sweep_alphas) {
    std::vector<double> xs, ys;
    for (std::size_t size : grid.sizes) {
      double total = 0.0;
      for (std::uint32_t r = 0; r < reps; ++r) {
        total += execute("size", size, grid.size_sweep_degree, alpha, r);
      }
      if (size >= grid.min_fit_size) {
        xs.push_back(std::log(static_cast<double>(size)));
        ys.push_back(std::log(total / reps));
      }
    }
    if (xs.size() >= 2) out.size_fits.push_back({alpha, least_squares_slope(xs, ys)});
  }
  for (std::uint32_t alpha : grid.degree_sweep_alphas) {
    std::vector<double> xs, ys;
    for (double degree : grid.degrees) {
      double total = 0.0;
      for (std::uint32_t r = 0; r < reps; ++r) {
        total += execute("degree", grid.degree_sweep_size, degree, alpha, r);
      }
      xs.push_back(degree);
      ys.push_back(total / reps);
    }
    if (xs.size() >= 2) {
      DegreeTrend trend;
      trend.alpha = alpha;
      trend.min_seconds = *std::min_element(ys.begin(), ys.end());
      trend.max_seconds = *std::max_element(ys.begin(), ys.end());
      trend.slope = least_squares_slope(xs, ys);
      out.degree_trends.push_back(trend);
    }
  }
  return out;
}

void write_scaling_tsv_header(std::ostream& out) {
  out << "sweep\tnum_nodes\tavg_degree\tnum_edges\talpha\treplicate\tencode_s\twalk_s\t"
         "optimize_s\ttotal_s\n";
}

void write_scaling_tsv_row(std::ostream& out, const ScalingRun& run) {
  out << run.sweep << '\t' << run.spec.num_nodes << '\t' << run.spec.avg_degree << '\t'
      << run.num_edges << '\t' << run.alpha << '\t' << run.replicate << '\t'
      << run.encode_seconds << '\t' << run.walk_seconds << '\t' << run.optimize_seconds << '\t'
      << run.total_seconds << '\n';
}

}  // namespace igel
