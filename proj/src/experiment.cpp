#include "warpcone/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <set>
#include <thread>

#include <Eigen/Core>
#include <gmp.h>

#include "warpcone/coarse.hpp"
#include "warpcone/errors.hpp"
#include "warpcone/graph.hpp"
#include "warpcone/net.hpp"
#include "warpcone/warped.hpp"

#ifndef WARPCONE_VERSION
#define WARPCONE_VERSION "0.0.0"
#endif

namespace warpcone {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw InputError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(where + "." + key + ": wrong type");
  }
}

template <class T>
void read(const json& j, const char* key, std::optional<T>& out, const std::string& where) {
  if (!j.contains(key)) return;
  T value{};
  read(j, key, value, where);
  out = value;
}

std::vector<GeneratorSpec> parse_generator_list(const json& list) {
  std::vector<GeneratorSpec> specs;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& g = list[i];
    const std::string where = "generators[" + std::to_string(i) + "]";
    check_keys(g, where, {"label", "inverse", "matrix"});
    GeneratorSpec spec;
    read(g, "label", spec.label, where);
    read(g, "inverse", spec.inverse_label, where);
    if (!g.contains("matrix") || !g["matrix"].is_array()) throw InputError(where + ": missing matrix");
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : g["matrix"]) {
      if (!row.is_array()) throw InputError(where + ".matrix: rows must be arrays");
      auto& out = rows.emplace_back();
      for (const auto& entry : row) {
        if (entry.is_string()) {
          out.push_back(entry.get<std::string>());
        } else if (entry.is_number_integer()) {
          out.push_back(std::to_string(entry.get<long long>()));
        } else {
          throw InputError(where + ".matrix: entries must be integers or strings like \"3/5\"");
        }
      }
    }
    spec.matrix = RationalMatrix::parse(rows);
    specs.push_back(std::move(spec));
  }
  return specs;
}

json generator_list_json(const std::vector<GeneratorSpec>& specs) {
  json list = json::array();
  for (const auto& s : specs) {
    json rows = json::array();
    for (std::size_t i = 0; i < s.matrix.dim(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < s.matrix.dim(); ++j) row.push_back(s.matrix(i, j).str());
      rows.push_back(row);
    }
    list.push_back({{"label", s.label}, {"inverse", s.inverse_label}, {"matrix", rows}});
  }
  return list;
}

std::string format_t(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

// Upper bound on |B(k)| for a symmetric set of n generators.
double free_ball_bound(std::size_t n, unsigned k) {
  if (n == 0) return 1.0;
  double total = 1.0, layer = static_cast<double>(n);
  for (unsigned j = 1; j <= k; ++j) {
    total += layer;
    layer *= static_cast<double>(n - 1);
  }
  return total;
}

double net_size_bound(const ManifoldModel& model, double r) {
  if (r >= model.diameter()) return 1.0;
  return std::floor(1.0 / ball_volume_fraction(model, r / 2.0));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  os << text;
}

template <class F>
void write_file(const fs::path& path, F&& writer) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  writer(os);
}

struct StepOutcome {
  json record;
  bool failed = false;
  bool resource = false;
};

template <class F>
StepOutcome guarded(json base, F&& body) {
  StepOutcome out;
  out.record = std::move(base);
  try {
    body(out.record);
    out.record["status"] = "ok";
  } catch (const ResourceError& e) {
    out.failed = out.resource = true;
    out.record["status"] = "failed";
    out.record["error"] = {{"kind", "resource"}, {"message", e.what()}, {"partial_count", e.partial_count()}};
  } catch (const InputError& e) {
    out.failed = true;
    out.record["status"] = "failed";
    out.record["error"] = {{"kind", "input"}, {"message", e.what()}};
  } catch (const PreconditionError& e) {
    out.failed = true;
    out.record["status"] = "failed";
    out.record["error"] = {{"kind", "precondition"}, {"message", e.what()}};
  } catch (const ConvergenceError& e) {
    out.failed = true;
    out.record["status"] = "failed";
    out.record["error"] = {{"kind", "convergence"}, {"message", e.what()}};
  } catch (const std::exception& e) {
    out.failed = true;
    out.record["status"] = "failed";
    out.record["error"] = {{"kind", "internal"}, {"message", e.what()}};
  }
  return out;
}

std::string versions_eigen() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  check_keys(j, "config", {"name", "model", "generators", "t_sequence", "samples_per_region", "graph_threshold",
                           "spectrum_k", "seeds", "output_dir", "caps", "probes"});
  ExperimentConfig c;
  c.source = j;
  read(j, "name", c.name, "config");
  read(j, "model", c.model, "config");
  ManifoldModel::parse(c.model);
  if (!j.contains("generators")) throw InputError("config: missing generators");
  if (j["generators"].is_string()) {
    c.generator_preset = j["generators"].get<std::string>();
  } else if (j["generators"].is_array()) {
    c.generator_specs = parse_generator_list(j["generators"]);
  } else {
    throw InputError("config.generators: expected a preset name or a list");
  }
  read(j, "t_sequence", c.t_sequence, "config");
  read(j, "samples_per_region", c.samples_per_region, "config");
  read(j, "graph_threshold", c.graph_threshold, "config");
  read(j, "spectrum_k", c.spectrum_k, "config");
  read(j, "output_dir", c.output_dir, "config");
  if (!j.contains("seeds")) throw InputError("config: seeds must be given explicitly");
  check_keys(j["seeds"], "config.seeds", {"net", "partition"});
  if (!j["seeds"].contains("net") || !j["seeds"].contains("partition")) {
    throw InputError("config.seeds: both net and partition seeds are required");
  }
  read(j["seeds"], "net", c.net_seed, "config.seeds");
  read(j["seeds"], "partition", c.partition_seed, "config.seeds");
  if (j.contains("caps")) {
    check_keys(j["caps"], "config.caps", {"ball_size", "net_size"});
    read(j["caps"], "ball_size", c.ball_cap, "config.caps");
    read(j["caps"], "net_size", c.max_net_size, "config.caps");
  }
  if (j.contains("probes")) {
    const auto& p = j["probes"];
    check_keys(p, "config.probes", {"chi", "certificate", "ballcheck", "fingerprint", "schedule", "separation"});
    if (p.contains("chi")) {
      check_keys(p["chi"], "probes.chi", {"r"});
      ChiProbe chi;
      read(p["chi"], "r", chi.r, "probes.chi");
      c.chi = chi;
    }
    if (p.contains("certificate")) {
      const auto& q = p["certificate"];
      check_keys(q, "probes.certificate", {"P_size", "Q", "D", "epsilon", "rho_minus", "rho_plus"});
      CertificateProbe cert;
      read(q, "P_size", cert.P_size, "probes.certificate");
      read(q, "Q", cert.Q, "probes.certificate");
      read(q, "D", cert.D, "probes.certificate");
      read(q, "epsilon", cert.epsilon, "probes.certificate");
      if (q.contains("rho_minus")) cert.controls.rho_minus = ControlFunction::from_json(q["rho_minus"]);
      if (q.contains("rho_plus")) cert.controls.rho_plus = ControlFunction::from_json(q["rho_plus"]);
      c.certificate = cert;
    }
    if (p.contains("ballcheck")) {
      const auto& q = p["ballcheck"];
      check_keys(q, "probes.ballcheck", {"r", "t", "net_r", "L", "A", "epsilon", "max_pairs"});
      BallCheckProbe b;
      read(q, "r", b.r, "probes.ballcheck");
      read(q, "t", b.t, "probes.ballcheck");
      read(q, "net_r", b.net_r, "probes.ballcheck");
      read(q, "L", b.L, "probes.ballcheck");
      read(q, "A", b.A, "probes.ballcheck");
      read(q, "epsilon", b.epsilon, "probes.ballcheck");
      read(q, "max_pairs", b.max_pairs, "probes.ballcheck");
      c.ballcheck = b;
    }
    if (p.contains("fingerprint")) {
      const auto& q = p["fingerprint"];
      check_keys(q, "probes.fingerprint", {"t", "r_max", "net_r"});
      FingerprintProbe f;
      read(q, "t", f.t, "probes.fingerprint");
      read(q, "r_max", f.r_max, "probes.fingerprint");
      read(q, "net_r", f.net_r, "probes.fingerprint");
      c.fingerprint = f;
    }
    if (p.contains("schedule")) {
      check_keys(p["schedule"], "probes.schedule", {"targets"});
      ScheduleProbe s;
      read(p["schedule"], "targets", s.targets, "probes.schedule");
      c.schedule = s;
    }
    if (p.contains("separation")) {
      const auto& q = p["separation"];
      check_keys(q, "probes.separation", {"sizes", "D", "r"});
      SeparationProbe s;
      if (q.contains("sizes")) {
        for (const auto& v : q["sizes"]) {
          if (v.is_string()) {
            s.sizes.push_back(v.get<std::string>());
          } else if (v.is_number_unsigned() || v.is_number_integer()) {
            s.sizes.push_back(std::to_string(v.get<long long>()));
          } else {
            throw InputError("probes.separation.sizes: entries must be integers");
          }
        }
      }
      read(q, "D", s.D, "probes.separation");
      read(q, "r", s.r, "probes.separation");
      c.separation = s;
    }
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(is, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["model"] = c.model;
  if (c.generator_specs.empty()) {
    j["generators"] = c.generator_preset;
  } else {
    j["generators"] = generator_list_json(c.generator_specs);
  }
  j["t_sequence"] = c.t_sequence;
  j["samples_per_region"] = c.samples_per_region;
  j["graph_threshold"] = c.graph_threshold;
  j["spectrum_k"] = c.spectrum_k;
  j["seeds"] = {{"net", c.net_seed}, {"partition", c.partition_seed}};
  j["output_dir"] = c.output_dir;
  j["caps"] = {{"ball_size", c.ball_cap}, {"net_size", c.max_net_size}};
  json probes = json::object();
  if (c.chi) probes["chi"] = {{"r", c.chi->r}};
  if (c.certificate) {
    json q = {{"rho_minus", c.certificate->controls.rho_minus.to_json()},
              {"rho_plus", c.certificate->controls.rho_plus.to_json()}};
    if (c.certificate->P_size) q["P_size"] = *c.certificate->P_size;
    if (c.certificate->Q) q["Q"] = *c.certificate->Q;
    if (c.certificate->D) q["D"] = *c.certificate->D;
    if (c.certificate->epsilon) q["epsilon"] = *c.certificate->epsilon;
    probes["certificate"] = q;
  }
  if (c.ballcheck) {
    const auto& b = *c.ballcheck;
    probes["ballcheck"] = {{"r", b.r},   {"t", b.t},       {"net_r", b.net_r},         {"L", b.L},
                           {"A", b.A},   {"epsilon", b.epsilon}, {"max_pairs", b.max_pairs}};
  }
  if (c.fingerprint) {
    probes["fingerprint"] = {{"t", c.fingerprint->t}, {"r_max", c.fingerprint->r_max}, {"net_r", c.fingerprint->net_r}};
  }
  if (c.schedule) probes["schedule"] = {{"targets", c.schedule->targets}};
  if (c.separation) {
    probes["separation"] = {{"sizes", c.separation->sizes}, {"D", c.separation->D}, {"r", c.separation->r}};
  }
  j["probes"] = probes;
  return j;
}

std::string config_hash(const json& j) {
  // nlohmann::json keeps object keys sorted, so dump() is already canonical.
  const std::string text = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

GeneratorSet resolve_generators(const ExperimentConfig& config) {
  if (!config.generator_specs.empty()) {
    return GeneratorSet(ManifoldModel::parse(config.model).action_dim(), config.generator_specs);
  }
  return presets::by_name(config.generator_preset);
}

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> out;
  ManifoldModel model;
  try {
    model = ManifoldModel::parse(c.model);
  } catch (const InputError& e) {
    out.emplace_back(e.what());
    return out;
  }
  std::vector<GeneratorSpec> specs = c.generator_specs;
  if (specs.empty()) {
    try {
      specs = presets::by_name(c.generator_preset).specs();
    } catch (const InputError& e) {
      out.emplace_back(e.what());
    }
  }
  for (auto& issue : GeneratorSet::diagnose(model.action_dim(), specs)) out.push_back(std::move(issue));
  for (const auto& s : specs) {
    if (s.matrix.dim() == model.action_dim() && !acts_isometrically(model, s.matrix)) {
      out.push_back("generator '" + s.label + "' does not act isometrically on " + model.name() +
                    (model.kind() == ManifoldKind::Torus ? " (not a signed permutation)" : " (not orthogonal)"));
    }
  }
  for (std::size_t i = 0; i < c.t_sequence.size(); ++i) {
    if (!(c.t_sequence[i] >= 1.0)) out.push_back("t_sequence entry " + format_t(c.t_sequence[i]) + " is below 1");
    if (i > 0 && !(c.t_sequence[i] > c.t_sequence[i - 1])) {
      out.push_back("t_sequence not increasing: " + format_t(c.t_sequence[i - 1]) + " then " +
                    format_t(c.t_sequence[i]));
    }
  }
  if (c.samples_per_region < 100) out.emplace_back("samples_per_region must be at least 100");
  if (c.graph_threshold < 1) out.emplace_back("graph_threshold must be at least 1");
  if (c.spectrum_k < 2) out.emplace_back("spectrum_k must be at least 2");
  auto check_net = [&](double r, const std::string& what) {
    const double bound = net_size_bound(model, r);
    if (bound > static_cast<double>(c.max_net_size)) {
      out.push_back(what + ": net at r = " + format_t(r) + " may need up to " + format_t(bound) +
                    " points, above the net size cap " + std::to_string(c.max_net_size));
    }
  };
  auto check_ball = [&](double radius, const std::string& what) {
    const auto k = static_cast<unsigned>(std::floor(radius));
    const double bound = free_ball_bound(specs.size(), k);
    if (bound > static_cast<double>(c.ball_cap)) {
      out.push_back(what + ": B(" + std::to_string(k) + ") may need up to " + format_t(bound) +
                    " elements, above the ball size cap " + std::to_string(c.ball_cap));
    }
  };
  for (double t : c.t_sequence) {
    if (t >= 1.0) check_net(1.0 / t, "level t = " + format_t(t));
  }
  const double chi_r = c.chi ? c.chi->r : 1.0;
  if (chi_r < 0) out.emplace_back("probes.chi.r must be nonnegative");
  if (!c.t_sequence.empty()) check_ball(6.0 * chi_r, "chi probe");
  if (c.ballcheck) {
    if (!(c.ballcheck->t >= 1.0)) out.emplace_back("probes.ballcheck.t must be at least 1");
    if (!(c.ballcheck->net_r > 0.0)) out.emplace_back("probes.ballcheck.net_r must be positive");
    else check_net(c.ballcheck->net_r, "ballcheck probe");
    check_ball(6.0 * c.ballcheck->r, "ballcheck probe");
  }
  if (c.fingerprint) {
    if (!(c.fingerprint->t >= 1.0)) out.emplace_back("probes.fingerprint.t must be at least 1");
    if (!(c.fingerprint->net_r > 0.0)) out.emplace_back("probes.fingerprint.net_r must be positive");
    else check_net(c.fingerprint->net_r, "fingerprint probe");
    check_ball(6.0 * c.fingerprint->r_max, "fingerprint probe");
  }
  if (c.schedule) {
    for (auto n : c.schedule->targets) {
      if (n == 0) out.emplace_back("probes.schedule.targets must be positive");
      if (n > c.max_net_size) out.push_back("probes.schedule target " + std::to_string(n) + " is above the net size cap");
    }
  }
  if (c.separation) {
    if (c.separation->D < 2) out.emplace_back("probes.separation.D must be at least 2");
    for (const auto& s : c.separation->sizes) {
      mpz_class v;
      if (v.set_str(s, 10) != 0 || v <= 0) out.push_back("probes.separation size '" + s + "' is not a positive integer");
    }
  }
  return out;
}

std::vector<std::string> validate(const json& document) {
  try {
    return validate(parse_config(document));
  } catch (const InputError& e) {
    return {e.what()};
  }
}

RunResult run_experiment(const ExperimentConfig& input, const RunOptions& options) {
  ExperimentConfig c = input;
  if (options.seed) {
    c.net_seed = *options.seed;
    c.partition_seed = *options.seed + 1;
  }
  if (options.ball_cap) c.ball_cap = *options.ball_cap;
  RunResult result;
  result.output_dir = options.output_dir.empty() ? fs::path(c.output_dir) : options.output_dir;
  c.output_dir = result.output_dir.string();

  auto diagnostics = validate(c);
  if (!diagnostics.empty()) {
    result.status = RunStatus::ConfigError;
    result.report = {{"status", "config error"}, {"diagnostics", diagnostics}};
    return result;
  }
  const auto model = ManifoldModel::parse(c.model);
  const auto gens = resolve_generators(c);
  fs::create_directories(result.output_dir);
  const auto started = std::chrono::system_clock::now();

  json effective = to_json(c);
  effective.erase("output_dir");
  const unsigned workers = std::max(1u, options.workers);
  const double chi_r = c.chi ? c.chi->r : 1.0;

  // t-steps, dynamically scheduled; records land at their own index.
  const std::size_t steps = c.t_sequence.size();
  std::vector<StepOutcome> levels(steps);
  const unsigned step_workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(steps, 1)));
  const unsigned inner = std::max(1u, workers / std::max(1u, step_workers));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < steps; i = next++) {
      const double t = c.t_sequence[i];
      const std::string tag = "level_t" + format_t(t);
      const fs::path dir = result.output_dir / tag;
      levels[i] = guarded({{"t", t}, {"directory", tag}}, [&](json& rec) {
        fs::create_directories(dir);
        const ActionSpec action(model, gens, c.ball_cap);
        const Net net = build_net(model, 1.0 / t, c.net_seed);
        rec["net"] = {{"size", net.size()},           {"r", net.separation},
                      {"R", net.density_radius},      {"seed", net.seed},
                      {"resolution", net.resolution}, {"candidates", net.candidate_count}};
        write_file(dir / "net.csv", [&](std::ostream& os) { write_net_csv(os, net); });
        const Partition part = voronoi_partition(net, c.samples_per_region * net.size(), c.partition_seed);
        rec["partition"] = partition_summary(part);
        rec["mesh"] = part.mesh;
        rec["Q"] = part.Q;
        write_file(dir / "partition.csv", [&](std::ostream& os) { write_partition_csv(os, part); });
        const ApproxGraph ag = approx_graph(action, part, c.graph_threshold, inner);
        const GraphReport gr = graph_report(ag.graph);
        rec["graph"] = to_json(gr);
        rec["graph"]["packing_constant"] = ag.packing_constant;
        rec["graph"]["threshold"] = ag.threshold;
        rec["vertex_count"] = gr.vertex_count;
        rec["max_degree"] = gr.max_degree;
        write_file(dir / "graph.edges", [&](std::ostream& os) { export_graph(os, ag.graph, GraphFormat::EdgeList); });
        const std::size_t k = std::min(c.spectrum_k, ag.graph.vertex_count());
        if (k >= 2) {
          const SpectrumReport spec = laplacian_spectrum(ag.graph, k);
          rec["eigenvalues"] = spec.eigenvalues;
          rec["lambda2"] = spec.eigenvalues[1];
          rec["solver"] = spec.solver == SolverKind::Dense ? "dense" : "lanczos";
          write_file(dir / "spectrum.csv", [&](std::ostream& os) { write_spectrum_csv(os, spec); });
          const CheegerReport ch = cheeger_bounds(ag.graph, spec);
          rec["cheeger"] = to_json(ch);
        } else {
          rec["lambda2"] = nullptr;
        }
        const GapReport gap = action_gap(action, part, inner);
        rec["action_gap"] = to_json(gap);
        rec["epsilon_avg"] = gap.epsilon_avg;
        const ChiSet chi = chi_set(action, net, t, chi_r, inner);
        rec["chi"] = {{"r", chi_r}, {"fraction", chi.fraction}, {"members", chi.members.size()},
                      {"relator_hit", chi.relator_hit}};
        rec["chi_fraction"] = chi.fraction;
      });
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < step_workers; ++w) pool.emplace_back(worker);
    worker();
  }

  bool failed = false, resource = false;
  json level_records = json::array();
  for (auto& l : levels) {
    failed |= l.failed;
    resource |= l.resource;
    level_records.push_back(std::move(l.record));
  }

  // Certificate: explicit inputs, otherwise the least favorable values over successful levels.
  const CertificateProbe cert_cfg = c.certificate.value_or(CertificateProbe{});
  auto cert = guarded(json::object(), [&](json& rec) {
    std::optional<double> P = cert_cfg.P_size, Q = cert_cfg.Q, D = cert_cfg.D, eps = cert_cfg.epsilon;
    for (const auto& l : level_records) {
      if (l["status"] != "ok") continue;
      const auto take_max = [](std::optional<double>& slot, double v) { slot = slot ? std::max(*slot, v) : v; };
      if (!cert_cfg.P_size) take_max(P, l["vertex_count"].get<double>());
      if (!cert_cfg.Q) take_max(Q, l["Q"].get<double>());
      if (!cert_cfg.D) take_max(D, l["max_degree"].get<double>());
      if (!cert_cfg.epsilon) {
        const double e = l["epsilon_avg"].get<double>();
        eps = eps ? std::min(*eps, e) : e;
      }
    }
    json missing = json::array();
    if (!P) missing.push_back("P_size");
    if (!Q) missing.push_back("Q");
    if (!D) missing.push_back("D");
    if (!eps) missing.push_back("epsilon");
    if (!missing.empty()) {
      rec["verdict"] = "not computed";
      rec["missing"] = missing;
      return;
    }
    rec.update(to_json(embedding_obstruction(*P, *Q, *D, *eps, cert_cfg.controls)));
  });
  failed |= cert.failed;

  json probes = json::object();
  auto probe = [&](const char* name, json base, auto&& body) {
    auto outcome = guarded(std::move(base), body);
    failed |= outcome.failed;
    resource |= outcome.resource;
    probes[name] = std::move(outcome.record);
  };
  if (c.ballcheck) {
    const auto& b = *c.ballcheck;
    probe("ballcheck", json::object(), [&](json& rec) {
      const ActionSpec action(model, gens, c.ball_cap);
      const Net net = build_net(model, b.net_r, c.net_seed);
      const BasePoint x0 = choose_base_point(action, net, b.t, b.r, workers);
      rec["net_size"] = net.size();
      rec["base_point"] = {{"index", x0.index},
                           {"min_displacement", x0.min_displacement},
                           {"margin", x0.margin},
                           {"closest", gens.spell(x0.closest)}};
      BallCheckConfig cfg;
      cfg.r = b.r;
      cfg.t = b.t;
      cfg.L = b.L;
      cfg.A = b.A;
      cfg.epsilon = b.epsilon;
      cfg.max_pairs = b.max_pairs;
      cfg.seed = c.partition_seed;
      rec["report"] = to_json(ball_product_check(action, net, x0.index, cfg));
    });
  }
  if (c.fingerprint) {
    const auto& f = *c.fingerprint;
    probe("fingerprint", json::object(), [&](json& rec) {
      const ActionSpec action(model, gens, c.ball_cap);
      const Net net = build_net(model, f.net_r, c.net_seed);
      const BasePoint x0 = choose_base_point(action, net, f.t, f.r_max, workers);
      const GrowthProfile gp = growth_fingerprint(WarpedLevel(action, f.t), net, x0.index, f.r_max);
      json lattice = json::array();
      for (const auto& v : gp.lattice) lattice.push_back(v.get_str());
      rec["net_size"] = net.size();
      rec["base_point"] = gp.base_point;
      rec["counts"] = gp.counts;
      rec["expected"] = gp.expected;
      rec["lattice"] = lattice;
      rec["deviation"] = gp.deviation;
      write_file(result.output_dir / "fingerprint.csv", [&](std::ostream& os) { write_profile_csv(os, gp); });
    });
  }
  if (c.schedule) {
    probe("schedule", json::object(), [&](json& rec) {
      const auto entries = cardinality_schedule(model, c.schedule->targets, c.net_seed, c.max_net_size);
      const ActionSpec action(model, gens, c.ball_cap);
      json list = json::array();
      for (const auto& e : entries) {
        const Partition part = voronoi_partition(e.net, c.samples_per_region * e.net.size(), c.partition_seed);
        const ApproxGraph ag = approx_graph(action, part, c.graph_threshold, workers);
        list.push_back({{"target", e.target},
                        {"t", e.t},
                        {"level_size", e.level_size},
                        {"C", e.C},
                        {"net_size", e.net.size()},
                        {"coarse_size", e.coarse_size},
                        {"fine_size", e.fine_size},
                        {"interpolated", e.interpolated},
                        {"graph_vertices", ag.graph.vertex_count()},
                        {"graph_edges", ag.graph.edge_count()}});
      }
      rec["entries"] = list;
    });
  }
  if (c.separation) {
    probe("separation", json::object(), [&](json& rec) {
      std::vector<mpz_class> sizes;
      for (const auto& s : c.separation->sizes) sizes.emplace_back(s, 10);
      rec.update(to_json(subsequence_separation(sizes, c.separation->D, c.separation->r)));
    });
  }

  json report;
  report["name"] = c.name;
  report["provenance"] = {{"config_hash", config_hash(effective)},
                          {"config", effective},
                          {"versions", {{"warpcone", WARPCONE_VERSION}, {"eigen", versions_eigen()}, {"gmp", gmp_version}}}};
  report["levels"] = level_records;
  report["certificate"] = cert.record;
  if (!probes.empty()) report["probes"] = probes;
  result.status = resource ? RunStatus::ResourceCap : failed ? RunStatus::PartialFailure : RunStatus::Success;
  report["status"] = result.status == RunStatus::Success ? "ok" : result.status == RunStatus::ResourceCap ? "resource cap" : "partial failure";
  result.report = report;
  write_text(result.output_dir / "report.json", report.dump(2) + "\n");

  // Wall-clock data stays out of the report.
  const auto finished = std::chrono::system_clock::now();
  const std::time_t stamp = std::chrono::system_clock::to_time_t(started);
  char when[32];
  std::strftime(when, sizeof when, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&stamp));
  const json info = {{"started", when},
                     {"elapsed_seconds", std::chrono::duration<double>(finished - started).count()},
                     {"workers", workers}};
  write_text(result.output_dir / "run_info.json", info.dump(2) + "\n");
  return result;
}

}  // namespace warpcone
