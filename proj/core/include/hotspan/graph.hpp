#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hotspan {

/**
  Directed graph over dense node ids 0..node_count-1 with both adjacency
  directions. Immutable after construction; safe for concurrent reads.
*/
class Graph {
 public:
  using Edge = std::pair<int, int>;

  Graph() = default;

  /**
    Builds from an explicit edge list. node_count may exceed the largest id
    (isolated nodes are allowed). Self-loops and duplicate directed edges are
    rejected rather than silently dropped.
  */
  Graph(int node_count, const std::vector<Edge>& edges);

  int node_count() const { return node_count_; }
  std::size_t edge_count() const { return edge_count_; }

  /// Out-neighborhood F(v), ascending node ids.
  std::span<const int> out_neighbors(int v) const {
    return {fwd_.data() + fwd_offsets_[v], fwd_.data() + fwd_offsets_[v + 1]};
  }

  /// In-neighborhood B(v), ascending node ids.
  std::span<const int> in_neighbors(int v) const {
    return {bwd_.data() + bwd_offsets_[v], bwd_.data() + bwd_offsets_[v + 1]};
  }

  bool has_edge(int u, int v) const;

  /// |E| / |V|. Throws std::invalid_argument on an empty graph.
  double mean_out_degree() const;

  /// All edges in (source, target) lexicographic order.
  std::vector<Edge> edges() const;

 private:
  int node_count_ = 0;
  std::size_t edge_count_ = 0;
  // CSR in both directions.
  std::vector<std::size_t> fwd_offsets_{0};
  std::vector<int> fwd_;
  std::vector<std::size_t> bwd_offsets_{0};
  std::vector<int> bwd_;
};

/**
  Reads a two-column whitespace-separated edge list ("u v" per line, '#'
  comments, blank lines ignored). node_count becomes 1 + the largest id seen.
  Throws parse_error naming the offending line on malformed input, self-loops
  or duplicate edges.
*/
Graph load_edge_list(std::istream& in);
Graph load_edge_list_file(const std::string& path);

void save_edge_list(const Graph& g, std::ostream& out);
void save_edge_list_file(const Graph& g, const std::string& path);

/**
  Directed Erdos-Renyi graph: each ordered pair (u, v), u != v, is included
  independently with probability mean_out_degree / (n - 1). Deterministic for
  a given seed.
*/
Graph generate_random_graph(int n, double mean_out_degree, std::uint64_t seed);

}  // namespace hotspan
