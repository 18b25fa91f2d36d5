#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "warpcone/coarse.hpp"
#include "warpcone/errors.hpp"
#include "warpcone/experiment.hpp"
#include "warpcone/graph.hpp"
#include "warpcone/net.hpp"
#include "warpcone/spectral.hpp"
#include "warpcone/warped.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace warpcone;

namespace {

struct Globals {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::optional<std::size_t> cap;
  std::string model;  // overrides the config's model
};

ExperimentConfig load(const Globals& g, bool need_generators = true) {
  ExperimentConfig c;
  if (!g.config.empty()) {
    c = load_config(g.config);
  } else if (need_generators) {
    throw InputError("--config is required for this subcommand");
  }
  if (!g.model.empty()) c.model = g.model;
  if (g.seed) {
    c.net_seed = *g.seed;
    c.partition_seed = *g.seed + 1;
  }
  if (g.cap) c.ball_cap = *g.cap;
  return c;
}

ActionSpec action_of(const ExperimentConfig& c) {
  return ActionSpec(ManifoldModel::parse(c.model), resolve_generators(c), c.ball_cap);
}

fs::path out_file(const Globals& g, const std::string& name) {
  fs::create_directories(g.out);
  return fs::path(g.out) / name;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  return os;
}

Graph read_graph(const std::string& path, GraphFormat format) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open graph " + path);
  return import_graph(is, format);
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Warped cone expanders: nets, approximating graphs, spectra and coarse probes"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Experiment config (JSON)");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--seed", g.seed, "Replaces the config seeds (net = N, partition = N + 1)");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--cap-ball-size", g.cap, "Cap on enumerated group ball size")->check(CLI::PositiveNumber);
  app.add_option("--model", g.model, "Model manifold (sphere:d, torus:d, so3), overrides the config");

  int code = 0;

  auto* run = app.add_subcommand("run", "Run a full experiment");
  run->fallthrough();
  run->callback([&] {
    if (g.config.empty()) throw InputError("run needs --config");
    const auto config = load_config(g.config);
    RunOptions opts;
    if (g.out != ".") opts.output_dir = g.out;
    opts.seed = g.seed;
    opts.workers = g.workers;
    opts.ball_cap = g.cap;
    const auto result = run_experiment(config, opts);
    if (result.status == RunStatus::ConfigError) {
      for (const auto& d : result.report["diagnostics"]) std::cerr << "config: " << d.get<std::string>() << '\n';
    } else {
      std::cout << "report: " << (result.output_dir / "report.json").string() << '\n';
      for (const auto& l : result.report["levels"]) {
        std::cout << "t = " << l["t"] << ": " << l["status"].get<std::string>();
        if (l["status"] == "ok") {
          std::cout << ", |V| = " << l["vertex_count"] << ", max degree = " << l["max_degree"]
                    << ", lambda2 = " << l["lambda2"] << ", chi fraction = " << l["chi_fraction"];
        } else {
          std::cout << ": " << l["error"]["message"].get<std::string>();
        }
        std::cout << '\n';
      }
      std::cout << "certificate: " << result.report["certificate"].value("verdict", std::string("failed")) << '\n';
      std::cout << "status: " << result.report["status"].get<std::string>() << '\n';
    }
    code = static_cast<int>(result.status);
  });

  auto* validate_cmd = app.add_subcommand("validate", "Static checks of a config");
  validate_cmd->fallthrough();
  validate_cmd->callback([&] {
    if (g.config.empty()) throw InputError("validate needs --config");
    std::ifstream is(g.config);
    if (!is) throw InputError("cannot open config " + g.config);
    std::vector<std::string> diagnostics;
    try {
      diagnostics = validate(json::parse(is, nullptr, true, true));
    } catch (const json::parse_error& e) {
      diagnostics = {e.what()};
    }
    for (const auto& d : diagnostics) std::cout << d << '\n';
    code = diagnostics.empty() ? 0 : 2;
  });

  double net_r = 0.0;
  auto* net_cmd = app.add_subcommand("net", "Build an r-separated net");
  net_cmd->fallthrough();
  net_cmd->add_option("--r", net_r, "Separation")->required();
  net_cmd->callback([&] {
    const auto c = load(g, false);
    const auto net = build_net(ManifoldModel::parse(c.model), net_r, c.net_seed);
    auto os = open_out(out_file(g, "net.csv"));
    write_net_csv(os, net);
    print({{"model", net.model.name()}, {"size", net.size()}, {"r", net.separation}, {"R", net.density_radius},
           {"seed", net.seed}, {"resolution", net.resolution}});
  });

  double t = 8.0;
  std::string format = "edge-list";
  std::size_t threshold = 0;
  auto* graph_cmd = app.add_subcommand("graph", "Approximating graph at level t (net r = 1/t)");
  graph_cmd->fallthrough();
  graph_cmd->add_option("--t", t, "Level")->required();
  graph_cmd->add_option("--format", format, "edge-list, adjacency-csv or json");
  graph_cmd->add_option("--threshold", threshold, "Minimum samples per edge (default from config)");
  graph_cmd->callback([&] {
    const auto c = load(g);
    const auto fmt = parse_graph_format(format);
    const auto action = action_of(c);
    const auto net = build_net(action.model(), 1.0 / t, c.net_seed);
    const auto part = voronoi_partition(net, c.samples_per_region * net.size(), c.partition_seed);
    const auto ag = approx_graph(action, part, threshold ? threshold : c.graph_threshold, g.workers);
    const char* ext = fmt == GraphFormat::EdgeList ? "graph.edges" : fmt == GraphFormat::AdjacencyCsv ? "graph.csv" : "graph.json";
    auto os = open_out(out_file(g, ext));
    export_graph(os, ag.graph, fmt, ag.provenance);
    auto j = to_json(graph_report(ag.graph));
    j["packing_constant"] = ag.packing_constant;
    j["mesh"] = part.mesh;
    j["Q"] = part.Q;
    print(j);
  });

  std::string graph_path;
  std::size_t k = 4;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Normalized Laplacian eigenvalues of a graph file");
  spectrum_cmd->fallthrough();
  spectrum_cmd->add_option("--graph", graph_path, "Graph file")->required();
  spectrum_cmd->add_option("--format", format, "edge-list, adjacency-csv or json");
  spectrum_cmd->add_option("--k", k, "Number of eigenvalues");
  spectrum_cmd->callback([&] {
    const auto graph = read_graph(graph_path, parse_graph_format(format));
    const auto spec = laplacian_spectrum(graph, k);
    auto os = open_out(out_file(g, "spectrum.csv"));
    write_spectrum_csv(os, spec);
    print({{"vertex_count", graph.vertex_count()},
           {"eigenvalues", spec.eigenvalues},
           {"residuals", spec.residuals},
           {"solver", spec.solver == SolverKind::Dense ? "dense" : "lanczos"},
           {"connected", spec.connected}});
  });

  auto* cheeger_cmd = app.add_subcommand("cheeger", "Cheeger constant bounds of a graph file");
  cheeger_cmd->fallthrough();
  cheeger_cmd->add_option("--graph", graph_path, "Graph file")->required();
  cheeger_cmd->add_option("--format", format, "edge-list, adjacency-csv or json");
  cheeger_cmd->callback([&] { print(to_json(cheeger_bounds(read_graph(graph_path, parse_graph_format(format))))); });

  auto* gap_cmd = app.add_subcommand("gap", "Averaged spectral gap of the action on the level-t partition");
  gap_cmd->fallthrough();
  gap_cmd->add_option("--t", t, "Level")->required();
  gap_cmd->callback([&] {
    const auto c = load(g);
    const auto action = action_of(c);
    const auto net = build_net(action.model(), 1.0 / t, c.net_seed);
    const auto part = voronoi_partition(net, c.samples_per_region * net.size(), c.partition_seed);
    print(to_json(action_gap(action, part, g.workers)));
  });

  double r = 1.0;
  auto* chi_cmd = app.add_subcommand("chi", "Nearly fixed points chi(t, r) on the level-t net");
  chi_cmd->fallthrough();
  chi_cmd->add_option("--t", t, "Level")->required();
  chi_cmd->add_option("--r", r, "Radius")->required();
  chi_cmd->add_option("--net-r", net_r, "Net separation (default 1/t)");
  chi_cmd->callback([&] {
    const auto c = load(g);
    const auto action = action_of(c);
    const auto net = build_net(action.model(), net_r > 0 ? net_r : 1.0 / t, c.net_seed);
    const auto chi = chi_set(action, net, t, r, g.workers);
    auto os = open_out(out_file(g, "chi.csv"));
    os << "point,displacement,gamma\n";
    for (const auto& w : chi.witnesses) {
      os << w.point << ',' << w.displacement << ',';
      for (const auto& s : action.gens().spell(w.gamma)) os << s;
      os << '\n';
    }
    print({{"net_size", net.size()},     {"t", t},
           {"r", r},                     {"ball_radius", chi.ball_radius},
           {"threshold", chi.threshold}, {"members", chi.members.size()},
           {"fraction", chi.fraction},   {"relator_hit", chi.relator_hit}});
  });

  BallCheckConfig bc;
  auto* ballcheck_cmd = app.add_subcommand("ballcheck", "Compare a warped ball with the product Gamma x M");
  ballcheck_cmd->fallthrough();
  ballcheck_cmd->add_option("--t", bc.t, "Level")->required();
  ballcheck_cmd->add_option("--r", bc.r, "Ball radius")->required();
  ballcheck_cmd->add_option("--net-r", net_r, "Net separation (default 1/(4t))");
  ballcheck_cmd->add_option("--epsilon", bc.epsilon, "Distortion tolerance");
  ballcheck_cmd->add_option("--max-pairs", bc.max_pairs, "Pairs sampled from the ball");
  ballcheck_cmd->callback([&] {
    const auto c = load(g);
    const auto action = action_of(c);
    const auto net = build_net(action.model(), net_r > 0 ? net_r : 1.0 / (4.0 * bc.t), c.net_seed);
    const auto x0 = choose_base_point(action, net, bc.t, bc.r, g.workers);
    bc.seed = c.partition_seed;
    auto j = to_json(ball_product_check(action, net, x0.index, bc));
    j["base_point_margin"] = x0.margin;
    j["net_size"] = net.size();
    print(j);
  });

  unsigned r_max = 3;
  auto* fingerprint_cmd = app.add_subcommand("fingerprint", "Warped ball growth profile around a base point");
  fingerprint_cmd->fallthrough();
  fingerprint_cmd->add_option("--t", t, "Level")->required();
  fingerprint_cmd->add_option("--r-max", r_max, "Largest radius");
  fingerprint_cmd->add_option("--net-r", net_r, "Net separation (default 1/(4t))");
  fingerprint_cmd->callback([&] {
    const auto c = load(g);
    const auto action = action_of(c);
    const auto net = build_net(action.model(), net_r > 0 ? net_r : 1.0 / (4.0 * t), c.net_seed);
    const auto x0 = choose_base_point(action, net, t, r_max, g.workers);
    const auto gp = growth_fingerprint(WarpedLevel(action, t), net, x0.index, r_max);
    auto os = open_out(out_file(g, "fingerprint.csv"));
    write_profile_csv(os, gp);
    print({{"net_size", net.size()}, {"base_point", gp.base_point}, {"counts", gp.counts}, {"deviation", gp.deviation}});
  });

  std::vector<std::size_t> targets;
  auto* schedule_cmd = app.add_subcommand("schedule", "Nets with exactly the requested sizes");
  schedule_cmd->fallthrough();
  schedule_cmd->add_option("--targets", targets, "Target sizes")->required();
  schedule_cmd->callback([&] {
    const auto c = load(g, false);
    const auto entries = cardinality_schedule(ManifoldModel::parse(c.model), targets, c.net_seed, c.max_net_size);
    auto os = open_out(out_file(g, "schedule.csv"));
    os << "target,t,level_size,C,net_size,coarse_size,fine_size,interpolated\n";
    json list = json::array();
    for (const auto& e : entries) {
      os << e.target << ',' << e.t << ',' << e.level_size << ',' << e.C << ',' << e.net.size() << ',' << e.coarse_size
         << ',' << e.fine_size << ',' << (e.interpolated ? 1 : 0) << '\n';
      list.push_back({{"target", e.target}, {"t", e.t}, {"net_size", e.net.size()}, {"C", e.C}});
    }
    print(list);
  });

  std::vector<std::string> sizes;
  unsigned D = 2, sep_r = 1;
  auto* separate_cmd = app.add_subcommand("separate", "Thin a size sequence and check the separation inequalities");
  separate_cmd->fallthrough();
  separate_cmd->add_option("--sizes", sizes, "Graph sizes, increasing")->required();
  separate_cmd->add_option("--D", D, "Degree bound")->required();
  separate_cmd->add_option("--r", sep_r, "Radius")->required();
  separate_cmd->callback([&] {
    std::vector<mpz_class> values;
    for (const auto& s : sizes) {
      mpz_class v;
      if (v.set_str(s, 10) != 0) throw InputError("not an integer: " + s);
      values.push_back(v);
    }
    print(to_json(subsequence_separation(values, D, sep_r)));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? 0 : 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "resource cap: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return code;
}
