#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"

#include "warpcone/errors.hpp"
#include "warpcone/graph.hpp"

using namespace warpcone;

namespace {

// n equally spaced points on the circle, offset so that no point sits on an axis.
Net circle_net(std::size_t n) {
  Net net;
  net.model = ManifoldModel::sphere(2);
  net.points = PointCloud(2);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = (static_cast<double>(k) + 0.5) * 2 * std::numbers::pi / static_cast<double>(n);
    net.points.push_back(std::vector<double>{std::cos(a), std::sin(a)});
  }
  net.separation = 2 * std::numbers::pi / static_cast<double>(n);
  net.density_radius = net.separation / 2;
  return net;
}

Graph random_graph(std::mt19937_64& rng) {
  const std::size_t n = 1 + rng() % 30;
  std::vector<Edge> edges;
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v)
      if (rng() % 4 == 0) edges.emplace_back(u, v);
  return Graph(n, edges);
}

}  // namespace

TEST_CASE("trivial action gives an edgeless graph") {
  const ActionSpec triv(ManifoldModel::sphere(3), presets::trivial(3));
  const auto net = build_net(triv.model(), 0.6, 1);
  const auto part = voronoi_partition(net, 100 * net.size(), 2);
  const auto g = approx_graph(triv, part);
  CHECK(g.graph.vertex_count() == part.size());
  CHECK(g.graph.edge_count() == 0);
}

TEST_CASE("quarter turn on four equal cells is the 4-cycle") {
  const ActionSpec rot(ManifoldModel::sphere(2), presets::quarter_turn_s1());
  const auto part = voronoi_partition(circle_net(4), 4000, 3);
  const auto g = approx_graph(rot, part);
  CHECK(g.graph.vertex_count() == 4);
  CHECK(g.graph.edge_count() == 4);
  for (auto d : g.graph.degrees()) CHECK(d == 2);
  const auto report = graph_report(g.graph);
  CHECK(report.component_count == 1);
  CHECK(g.packing_constant == 1);
  for (auto c : g.witness_counts) CHECK(c > 0);
}

TEST_CASE("approximating graph structure under the free action") {
  const ActionSpec lps(ManifoldModel::sphere(3), presets::lps_sphere2());
  std::vector<std::size_t> packing;
  for (double t : {4.0, 8.0, 16.0}) {
    const auto net = build_net(lps.model(), 1.0 / t, 10);
    const auto part = voronoi_partition(net, 100 * net.size(), 11);
    const auto g = approx_graph(lps, part);
    CHECK(g.graph.vertex_count() == part.size());
    const auto report = graph_report(g.graph);
    CHECK(report.max_degree <= lps.gens().size() * g.packing_constant);
    CHECK(report.component_count == 1);
    for (const auto& [u, v] : g.graph.edges()) CHECK(u < v);
    CHECK(g.witness_counts.size() == g.graph.edge_count());
    packing.push_back(g.packing_constant);
    // Every edge is backed by a sample that some generator carries across.
    const auto strict = approx_graph(lps, part, 1000000);
    CHECK(strict.graph.edge_count() == 0);
  }
  const auto [lo, hi] = std::minmax_element(packing.begin(), packing.end());
  CHECK(*hi - *lo <= 1);
}

TEST_CASE("approximating graph edges match a direct recount") {
  const ActionSpec lps(ManifoldModel::sphere(3), presets::lps_sphere2());
  const auto net = build_net(lps.model(), 0.3, 12);
  const auto part = voronoi_partition(net, 100 * net.size(), 13);
  const auto g = approx_graph(lps, part, 1, 2);
  std::set<Edge> expected;
  Point image(3);
  for (std::size_t i = 0; i < part.samples.size(); ++i) {
    for (std::size_t s = 0; s < lps.gens().size(); ++s) {
      apply_numeric(lps.model(), lps.gens().numeric(s), part.samples[i], image);
      std::uint32_t best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::uint32_t j = 0; j < net.size(); ++j) {
        const double d = geo_dist(lps.model(), image, net.points[j]);
        if (d < bd) {
          bd = d;
          best = j;
        }
      }
      const auto u = part.assignment[i];
      if (u != best) expected.emplace(std::min(u, best), std::max(u, best));
    }
  }
  CHECK(std::vector<Edge>(expected.begin(), expected.end()) == g.graph.edges());
  CHECK(approx_graph(lps, part, 1, 1).graph == g.graph);
}

TEST_CASE("graph report examples") {
  const auto c4 = graph_report(Graph::cycle(4));
  CHECK(c4.max_degree == 2);
  CHECK(c4.component_count == 1);
  const auto empty = graph_report(Graph(5, {}));
  CHECK(empty.component_count == 5);
  CHECK(empty.max_degree == 0);
  const auto k4 = graph_report(Graph::complete(4));
  CHECK(k4.max_degree == 3);
  CHECK(k4.mean_degree == 3.0);
  CHECK(k4.component_count == 1);
  const auto two = graph_report(Graph(5, {{0, 1}, {2, 3}, {3, 4}}));
  CHECK(two.component_sizes == std::vector<std::size_t>{2, 3});
  CHECK(to_json(c4)["max_degree"] == 2);
}

TEST_CASE("graph construction normalizes edges") {
  const Graph g(3, {{2, 1}, {1, 2}, {0, 0}, {0, 1}});
  CHECK(g.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
  CHECK_THROWS_AS(Graph(2, {{0, 2}}), InputError);
}

TEST_CASE("edge list export") {
  std::ostringstream os;
  export_graph(os, Graph::complete(3), GraphFormat::EdgeList);
  const std::string text = os.str();
  CHECK(text.find("0 1\n0 2\n1 2\n") != std::string::npos);
  CHECK(text.find("vertex_count 3") != std::string::npos);

  std::ostringstream empty;
  export_graph(empty, Graph(7, {}), GraphFormat::EdgeList);
  const std::string etext = empty.str();
  CHECK(etext.find("vertex_count 7") != std::string::npos);
  std::istringstream is(etext);
  CHECK(import_graph(is, GraphFormat::EdgeList) == Graph(7, {}));
}

TEST_CASE("export is stable and round trips") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) {
    const auto g = random_graph(rng);
    for (auto format : {GraphFormat::EdgeList, GraphFormat::AdjacencyCsv, GraphFormat::Json}) {
      std::ostringstream a, b;
      export_graph(a, g, format);
      export_graph(b, g, format);
      CHECK(a.str() == b.str());
      std::istringstream is(a.str());
      CHECK(import_graph(is, format) == g);
    }
  }
}

TEST_CASE("graph format errors") {
  CHECK(parse_graph_format("edge-list") == GraphFormat::EdgeList);
  CHECK(parse_graph_format("adjacency-csv") == GraphFormat::AdjacencyCsv);
  CHECK(parse_graph_format("json") == GraphFormat::Json);
  CHECK_THROWS_AS(parse_graph_format("graphml"), InputError);
  std::istringstream bad("# vertex_count 2\n0 5\n");
  CHECK_THROWS_AS(import_graph(bad, GraphFormat::EdgeList), InputError);
}
