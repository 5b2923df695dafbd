#include "igel/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace igel {

Graph Graph::from_edges(std::size_t num_nodes, std::span<const Edge> edges) {
  std::vector<std::size_t> degree(num_nodes + 1, 0);
  for (auto [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) {
      throw Error("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                  ") out of range for " + std::to_string(num_nodes) + " nodes");
    }
    if (u == v) continue;
    ++degree[u];
    ++degree[v];
  }
  std::vector<std::size_t> offsets(num_nodes + 1, 0);
  for (std::size_t i = 0; i < num_nodes; ++i) offsets[i + 1] = offsets[i] + degree[i];
  std::vector<NodeId> targets(offsets[num_nodes]);
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (auto [u, v] : edges) {
    if (u == v) continue;
    targets[cursor[u]++] = v;
    targets[cursor[v]++] = u;
  }

  // Sort and deduplicate each list, then compact.
  Graph g;
  g.offsets_.assign(num_nodes + 1, 0);
  g.targets_.reserve(targets.size());
  for (std::size_t i = 0; i < num_nodes; ++i) {
    auto first = targets.begin() + static_cast<std::ptrdiff_t>(offsets[i]);
    auto last = targets.begin() + static_cast<std::ptrdiff_t>(offsets[i + 1]);
    std::sort(first, last);
    last = std::unique(first, last);
    g.targets_.insert(g.targets_.end(), first, last);
    g.offsets_[i + 1] = g.targets_.size();
  }
  g.targets_.shrink_to_fit();
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (degree(u) > degree(v)) std::swap(u, v);
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (NodeId n = 0; n < num_nodes(); ++n) best = std::max(best, degree(n));
  return best;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

namespace {

NodeId intern(std::unordered_map<std::string, NodeId>& index,
              std::vector<std::string>& labels, const std::string& token) {
  auto [it, inserted] = index.emplace(token, static_cast<NodeId>(labels.size()));
  if (inserted) labels.push_back(token);
  return it->second;
}

// Returns false for blank and comment lines.
bool split_line(const std::string& line, std::size_t line_no, std::string& a,
                std::string& b) {
  auto first = line.find_first_not_of(" \t\r");
  if (first == std::string::npos || line[first] == '#') return false;
  std::istringstream fields(line);
  std::string extra;
  if (!(fields >> a >> b) || (fields >> extra)) {
    throw Error("malformed edge on line " + std::to_string(line_no) +
                ": expected two tokens, got '" + line + "'");
  }
  return true;
}

std::vector<Edge> read_pairs_indexed(std::istream& in, std::vector<std::string>& labels,
                                     std::unordered_map<std::string, NodeId>& index) {
  std::vector<Edge> edges;
  std::string line, a, b;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!split_line(line, line_no, a, b)) continue;
    NodeId u = intern(index, labels, a);
    NodeId v = intern(index, labels, b);
    edges.emplace_back(u, v);
  }
  return edges;
}

}  // namespace

std::vector<Edge> read_pairs(std::istream& in, std::vector<std::string>& labels) {
  std::unordered_map<std::string, NodeId> index;
  for (NodeId i = 0; i < labels.size(); ++i) index.emplace(labels[i], i);
  return read_pairs_indexed(in, labels, index);
}

LoadedGraph read_edge_list(std::istream& in) {
  LoadedGraph out;
  std::unordered_map<std::string, NodeId> index;
  auto edges = read_pairs_indexed(in, out.labels, index);
  std::size_t loops = 0;
  for (auto [u, v] : edges) loops += (u == v);
  out.self_loops = loops;
  out.graph = Graph::from_edges(out.labels.size(), edges);
  out.duplicate_edges = edges.size() - loops - out.graph.num_edges();
  if (out.graph.num_edges() == 0) throw Error("edge list contains no edges");
  return out;
}

LoadedGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list '" + path + "'");
  try {
    return read_edge_list(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

void write_edge_list(std::ostream& out, std::span<const Edge> edges,
                     std::span<const std::string> labels) {
  for (auto [u, v] : edges) {
    if (labels.empty()) {
      out << u << ' ' << v << '\n';
    } else {
      out << labels[u] << ' ' << labels[v] << '\n';
    }
  }
}

void save_edge_list(const std::string& path, std::span<const Edge> edges,
                    std::span<const std::string> labels) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_edge_list(out, edges, labels);
}

void save_labels(const std::string& path, std::span<const std::string> labels) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << '\t' << labels[i] << '\n';
}

std::vector<std::uint32_t> bfs_distances(const Graph& g, NodeId source) {
  std::vector<std::uint32_t> dist(g.num_nodes(), kUnreachable);
  std::vector<NodeId> frontier{source};
  dist[source] = 0;
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    NodeId u = frontier[head];
    for (NodeId v : g.neighbors(u)) {
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

std::vector<std::uint32_t> connected_components(const Graph& g) {
  std::vector<std::uint32_t> comp(g.num_nodes(), kUnreachable);
  std::vector<NodeId> stack;
  std::uint32_t next = 0;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (comp[s] != kUnreachable) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : g.neighbors(u)) {
        if (comp[v] == kUnreachable) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return comp;
}

bool is_connected(const Graph& g) {
  if (g.num_nodes() == 0) return true;
  auto dist = bfs_distances(g, 0);
  return std::none_of(dist.begin(), dist.end(),
                      [](std::uint32_t d) { return d == kUnreachable; });
}

NeighborhoodExplorer::NeighborhoodExplorer(const Graph& g)
    : graph_(&g), stamp_(g.num_nodes(), 0) {}

const Neighborhood& NeighborhoodExplorer::explore(NodeId root, std::uint32_t alpha) {
  if (root >= graph_->num_nodes()) throw Error("node id out of range");
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  auto& b = ball_;
  b.nodes.clear();
  b.distance.clear();
  b.induced_degree.clear();

  b.nodes.push_back(root);
  b.distance.push_back(0);
  stamp_[root] = epoch_;
  for (std::size_t head = 0; head < b.nodes.size(); ++head) {
    if (b.distance[head] == alpha) break;  // BFS order: the rest are at alpha too
    for (NodeId v : graph_->neighbors(b.nodes[head])) {
      if (stamp_[v] == epoch_) continue;
      stamp_[v] = epoch_;
      b.nodes.push_back(v);
      b.distance.push_back(b.distance[head] + 1);
    }
  }

  b.induced_degree.assign(b.nodes.size(), 0);
  for (std::size_t i = 0; i < b.nodes.size(); ++i) {
    std::uint32_t count = 0;
    for (NodeId v : graph_->neighbors(b.nodes[i])) count += (stamp_[v] == epoch_);
    b.induced_degree[i] = count;
  }
  return b;
}

Neighborhood neighborhood_subgraph(const Graph& g, NodeId n, std::uint32_t alpha) {
  NeighborhoodExplorer explorer(g);
  return explorer.explore(n, alpha);
}

}  // namespace igel
