#include "warpcone/graph.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "warpcone/errors.hpp"
#include "warpcone/parallel.hpp"
#include "warpcone/point_index.hpp"

namespace warpcone {

Graph::Graph(std::size_t vertex_count, std::vector<Edge> edges) : n_(vertex_count) {
  for (auto& [u, v] : edges) {
    if (u >= n_ || v >= n_) {
      throw InputError("graph: edge (" + std::to_string(u) + ", " + std::to_string(v) + ") out of range for " +
                       std::to_string(n_) + " vertices");
    }
    if (u > v) std::swap(u, v);
  }
  std::erase_if(edges, [](const Edge& e) { return e.first == e.second; });
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);
}

std::vector<std::vector<std::uint32_t>> Graph::adjacency() const {
  std::vector<std::vector<std::uint32_t>> adj(n_);
  for (const auto& [u, v] : edges_) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> deg(n_, 0);
  for (const auto& [u, v] : edges_) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

Graph Graph::cycle(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph(n, std::move(e));
}

Graph Graph::complete(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, std::move(e));
}

Graph Graph::path(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, std::move(e));
}

ApproxGraph approx_graph(const ActionSpec& action, const Partition& partition, std::size_t threshold,
                         unsigned workers) {
  const auto& model = action.model();
  if (!(partition.net.model == model)) throw InputError("approx_graph: partition lives on " + partition.net.model.name());
  if (threshold == 0) throw InputError("approx_graph: threshold must be at least 1");
  for (std::size_t k = 0; k < partition.size(); ++k) {
    if (partition.counts[k] == 0) throw PreconditionError("approx_graph: region " + std::to_string(k) + " is empty");
  }
  const auto& net = partition.net;
  const PointIndex index(model, net.points,
                         net.degenerate ? model.diameter() : std::max(net.separation, 1e-4));
  const auto& gens = action.gens();
  const std::size_t n_samples = partition.samples.size();
  workers = std::max(1u, workers);

  // Each worker records (u, v) keys for its slice of samples; the sorted union is independent of slicing.
  std::vector<std::vector<std::uint64_t>> keys(workers);
  std::vector<std::vector<std::uint64_t>> images(workers);  // (region * |S| + s, target region)
  parallel_slices(n_samples, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    Point image(model.coord_dim());
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint32_t from = partition.assignment[i];
      for (std::size_t s = 0; s < gens.size(); ++s) {
        apply_numeric(model, gens.numeric(s), partition.samples[i], image);
        const std::uint32_t to = index.nearest(image);
        images[w].push_back(((static_cast<std::uint64_t>(from) * gens.size() + s) << 32) | to);
        if (to == from) continue;
        const std::uint64_t a = std::min(from, to), b = std::max(from, to);
        keys[w].push_back((a << 32) | b);
      }
    }
  });
  std::vector<std::uint64_t> all;
  for (auto& k : keys) all.insert(all.end(), k.begin(), k.end());
  std::sort(all.begin(), all.end());

  std::vector<Edge> edges;
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    if (j - i >= threshold) {
      edges.emplace_back(static_cast<std::uint32_t>(all[i] >> 32), static_cast<std::uint32_t>(all[i] & 0xffffffffu));
      counts.push_back(j - i);
    }
    i = j;
  }
  // Packing constant: most regions met by a single generator image of a single region.
  std::vector<std::uint64_t> met;
  for (auto& k : images) met.insert(met.end(), k.begin(), k.end());
  std::sort(met.begin(), met.end());
  met.erase(std::unique(met.begin(), met.end()), met.end());
  std::size_t packing = 0;
  for (std::size_t i = 0; i < met.size();) {
    std::size_t j = i;
    while (j < met.size() && (met[j] >> 32) == (met[i] >> 32)) ++j;
    packing = std::max(packing, j - i);
    i = j;
  }

  ApproxGraph out;
  out.packing_constant = packing;
  out.graph = Graph(partition.size(), std::move(edges));
  out.witness_counts = std::move(counts);
  out.threshold = threshold;
  out.provenance = {{"partition", partition_summary(partition)}, {"generators", gens.labels()}, {"threshold", threshold}};
  return out;
}

GraphReport graph_report(const Graph& g) {
  GraphReport r;
  r.vertex_count = g.vertex_count();
  r.edge_count = g.edge_count();
  const auto deg = g.degrees();
  if (!deg.empty()) {
    r.max_degree = *std::max_element(deg.begin(), deg.end());
    r.min_degree = *std::min_element(deg.begin(), deg.end());
    r.mean_degree = 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(deg.size());
  }
  // Union-find over the edge list.
  std::vector<std::uint32_t> parent(g.vertex_count());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [u, v] : g.edges()) {
    const auto a = find(u), b = find(v);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> size(g.vertex_count(), 0);
  for (std::uint32_t v = 0; v < g.vertex_count(); ++v) ++size[find(v)];
  for (std::uint32_t v = 0; v < g.vertex_count(); ++v) {
    if (size[v] > 0) r.component_sizes.push_back(size[v]);
  }
  r.component_count = r.component_sizes.size();
  return r;
}

nlohmann::json to_json(const GraphReport& report) {
  return {{"vertex_count", report.vertex_count}, {"edge_count", report.edge_count},
          {"max_degree", report.max_degree},     {"min_degree", report.min_degree},
          {"mean_degree", report.mean_degree},   {"component_count", report.component_count},
          {"component_sizes", report.component_sizes}};
}

GraphFormat parse_graph_format(const std::string& name) {
  if (name == "edge-list") return GraphFormat::EdgeList;
  if (name == "adjacency-csv") return GraphFormat::AdjacencyCsv;
  if (name == "json") return GraphFormat::Json;
  throw InputError("unknown graph format '" + name + "' (expected edge-list, adjacency-csv or json)");
}

void export_graph(std::ostream& os, const Graph& g, GraphFormat format, const nlohmann::json& provenance) {
  switch (format) {
    case GraphFormat::EdgeList:
      os << "# vertex_count " << g.vertex_count() << '\n';
      for (const auto& [u, v] : g.edges()) os << u << ' ' << v << '\n';
      return;
    case GraphFormat::AdjacencyCsv: {
      os << "vertex,degree,neighbors\n";
      const auto adj = g.adjacency();
      for (std::size_t v = 0; v < adj.size(); ++v) {
        os << v << ',' << adj[v].size() << ',';
        for (std::size_t k = 0; k < adj[v].size(); ++k) os << (k ? " " : "") << adj[v][k];
        os << '\n';
      }
      return;
    }
    case GraphFormat::Json: {
      nlohmann::json j;
      j["vertex_count"] = g.vertex_count();
      j["edges"] = nlohmann::json::array();
      for (const auto& [u, v] : g.edges()) j["edges"].push_back({u, v});
      if (!provenance.is_null()) j["provenance"] = provenance;
      os << j.dump(2) << '\n';
      return;
    }
  }
}

Graph import_graph(std::istream& is, GraphFormat format) {
  std::vector<Edge> edges;
  std::size_t n = 0;
  std::string line;
  switch (format) {
    case GraphFormat::EdgeList: {
      bool have_header = false;
      while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line[0] == '#') {
          std::string hash, key;
          ls >> hash >> key;
          if (key == "vertex_count" && (ls >> n)) have_header = true;
          continue;
        }
        std::uint32_t u = 0, v = 0;
        if (!(ls >> u >> v)) throw InputError("edge list: malformed line '" + line + "'");
        edges.emplace_back(u, v);
      }
      if (!have_header) throw InputError("edge list: missing '# vertex_count' header");
      break;
    }
    case GraphFormat::AdjacencyCsv: {
      if (!std::getline(is, line)) throw InputError("adjacency csv: empty input");
      while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) throw InputError("adjacency csv: malformed line");
        const auto v = static_cast<std::uint32_t>(std::stoul(line.substr(0, c1)));
        n = std::max<std::size_t>(n, v + 1);
        std::istringstream ls(line.substr(c2 + 1));
        std::uint32_t w = 0;
        while (ls >> w) edges.emplace_back(v, w);
      }
      break;
    }
    case GraphFormat::Json: {
      const auto j = nlohmann::json::parse(is);
      n = j.at("vertex_count").get<std::size_t>();
      for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>());
      break;
    }
  }
  return Graph(n, std::move(edges));
}

}  // namespace warpcone
