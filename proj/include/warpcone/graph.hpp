#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "warpcone/net.hpp"
#include "warpcone/warped.hpp"

namespace warpcone {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

// Simple undirected graph: edges stored once with u < v, sorted, no loops.
class Graph {
 public:
  Graph() = default;
  // Drops loops and duplicate edges; throws InputError for out-of-range endpoints.
  Graph(std::size_t vertex_count, std::vector<Edge> edges);

  std::size_t vertex_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::vector<std::vector<std::uint32_t>> adjacency() const;
  std::vector<std::size_t> degrees() const;

  friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

  static Graph cycle(std::size_t n);
  static Graph complete(std::size_t n);
  static Graph path(std::size_t n);

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

// Approximating graph of a partition: regions R, R' adjacent when some generator carries at least
// `threshold` samples of R into R'.
struct ApproxGraph {
  Graph graph;
  std::vector<std::size_t> witness_counts;  // per edge of graph.edges(), samples in either direction
  std::size_t threshold = 1;
  // Most regions met by one generator image s.R of one region R (R itself included), so that
  // max degree <= |S| * packing_constant.
  std::size_t packing_constant = 0;
  nlohmann::json provenance;
};

ApproxGraph approx_graph(const ActionSpec& action, const Partition& partition, std::size_t threshold = 1,
                         unsigned workers = 1);

struct GraphReport {
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  std::size_t max_degree = 0;
  std::size_t min_degree = 0;
  double mean_degree = 0.0;
  std::size_t component_count = 0;
  std::vector<std::size_t> component_sizes;  // in order of each component's smallest vertex
};

GraphReport graph_report(const Graph& g);
nlohmann::json to_json(const GraphReport& report);

enum class GraphFormat { EdgeList, AdjacencyCsv, Json };
GraphFormat parse_graph_format(const std::string& name);  // "edge-list", "adjacency-csv", "json"

void export_graph(std::ostream& os, const Graph& g, GraphFormat format, const nlohmann::json& provenance = {});
Graph import_graph(std::istream& is, GraphFormat format);

}  // namespace warpcone
