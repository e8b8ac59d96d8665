#include "hotspan/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hotspan/errors.hpp"
#include "hotspan/rng.hpp"

namespace hotspan {

namespace {

void build_csr(int n, const std::vector<Graph::Edge>& edges, bool reverse,
               std::vector<std::size_t>& offsets, std::vector<int>& targets) {
  offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [u, v] : edges) offsets[static_cast<std::size_t>(reverse ? v : u) + 1]++;
  for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
  targets.resize(edges.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [u, v] : edges) {
    const int src = reverse ? v : u;
    targets[cursor[static_cast<std::size_t>(src)]++] = reverse ? u : v;
  }
  for (int v = 0; v < n; ++v)
    std::sort(targets.begin() + static_cast<std::ptrdiff_t>(offsets[v]),
              targets.begin() + static_cast<std::ptrdiff_t>(offsets[v + 1]));
}

}  // namespace

Graph::Graph(int node_count, const std::vector<Edge>& edges) {
  if (node_count < 0) throw std::invalid_argument("Graph: negative node count");
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= node_count || v >= node_count)
      throw std::invalid_argument("Graph: edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                  ") out of range for " + std::to_string(node_count) + " nodes");
    if (u == v) throw std::invalid_argument("Graph: self-loop at node " + std::to_string(u));
  }
  std::vector<Edge> sorted(edges);
  std::sort(sorted.begin(), sorted.end());
  const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end())
    throw std::invalid_argument("Graph: duplicate edge (" + std::to_string(dup->first) + ", " +
                                std::to_string(dup->second) + ")");
  node_count_ = node_count;
  edge_count_ = sorted.size();
  build_csr(node_count, sorted, false, fwd_offsets_, fwd_);
  build_csr(node_count, sorted, true, bwd_offsets_, bwd_);
}

bool Graph::has_edge(int u, int v) const {
  if (u < 0 || u >= node_count_ || v < 0 || v >= node_count_) return false;
  const auto nbrs = out_neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

double Graph::mean_out_degree() const {
  if (node_count_ == 0) throw std::invalid_argument("mean_out_degree: empty graph");
  return static_cast<double>(edge_count_) / static_cast<double>(node_count_);
}

std::vector<Graph::Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (int u = 0; u < node_count_; ++u)
    for (int v : out_neighbors(u)) out.emplace_back(u, v);
  return out;
}

Graph load_edge_list(std::istream& in) {
  std::vector<Graph::Edge> edges;
  int max_id = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long u, v;
    if (!(fields >> u)) {
      std::string leftover;
      if (std::istringstream(line) >> leftover)
        throw parse_error("edge list line " + std::to_string(line_no) + ": expected integer, got '" + leftover + "'");
      continue;  // blank or comment-only line
    }
    std::string extra;
    if (!(fields >> v) || (fields >> extra))
      throw parse_error("edge list line " + std::to_string(line_no) + ": expected exactly two node ids");
    if (u < 0 || v < 0)
      throw parse_error("edge list line " + std::to_string(line_no) + ": negative node id");
    if (u == v)
      throw parse_error("edge list line " + std::to_string(line_no) + ": self-loop at node " + std::to_string(u));
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    max_id = std::max({max_id, static_cast<int>(u), static_cast<int>(v)});
  }
  std::vector<Graph::Edge> sorted(edges);
  std::sort(sorted.begin(), sorted.end());
  const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end())
    throw parse_error("edge list: duplicate edge (" + std::to_string(dup->first) + ", " +
                      std::to_string(dup->second) + ")");
  return Graph(max_id + 1, edges);
}

Graph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open edge list file: " + path);
  return load_edge_list(in);
}

void save_edge_list(const Graph& g, std::ostream& out) {
  for (int u = 0; u < g.node_count(); ++u)
    for (int v : g.out_neighbors(u)) out << u << ' ' << v << '\n';
}

void save_edge_list_file(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write edge list file: " + path);
  save_edge_list(g, out);
}

Graph generate_random_graph(int n, double mean_out_degree, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("generate_random_graph: need at least 2 nodes");
  if (!(mean_out_degree > 0.0) || mean_out_degree > static_cast<double>(n - 1))
    throw std::invalid_argument("generate_random_graph: mean out-degree must be in (0, n-1]");
  const double p = mean_out_degree / static_cast<double>(n - 1);
  Rng rng(seed);
  std::vector<Graph::Edge> edges;
  edges.reserve(static_cast<std::size_t>(mean_out_degree * n * 1.1) + 16);
  const std::uint64_t total = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1);
  if (p >= 1.0) {
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        if (u != v) edges.emplace_back(u, v);
    return Graph(n, edges);
  }
  // Geometric skipping over the linearized off-diagonal pair index.
  const double log_q = std::log1p(-p);
  std::uint64_t idx = 0;  // invariant: idx < total at loop entry
  while (true) {
    const double u01 = rng.uniform01();
    const auto skip = static_cast<std::uint64_t>(std::floor(std::log1p(-u01) / log_q));
    if (skip >= total - idx) break;
    idx += skip;
    const int u = static_cast<int>(idx / static_cast<std::uint64_t>(n - 1));
    const int rem = static_cast<int>(idx % static_cast<std::uint64_t>(n - 1));
    const int v = rem + (rem >= u ? 1 : 0);
    edges.emplace_back(u, v);
    ++idx;
    if (idx >= total) break;
  }
  return Graph(n, edges);
}

}  // namespace hotspan
