// Acceptance checks. Usage: acceptance [criterion...]; no arguments runs all eleven.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "warpcone/coarse.hpp"
#include "warpcone/errors.hpp"
#include "warpcone/experiment.hpp"
#include "warpcone/graph.hpp"
#include "warpcone/spectral.hpp"
#include "warpcone/warped.hpp"

using namespace warpcone;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const ActionSpec& lps() {
  static const ActionSpec a(ManifoldModel::sphere(3), presets::lps_sphere2());
  return a;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("warpcone_acceptance_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Every freely reduced word of length <= max_len, as floating point matrices.
struct FreeWords {
  std::vector<Eigen::Matrix3d> mats;
  std::vector<int> lengths;
};

FreeWords free_words(const GeneratorSet& gens, int max_len) {
  std::vector<Eigen::Matrix3d> g;
  for (std::size_t s = 0; s < gens.size(); ++s) {
    const auto m = gens.matrix(s).to_double();
    g.push_back(Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(m.data()));
  }
  FreeWords out;
  std::function<void(const Eigen::Matrix3d&, int, int)> walk = [&](const Eigen::Matrix3d& m, int len, int last) {
    out.mats.push_back(m);
    out.lengths.push_back(len);
    if (len == max_len) return;
    for (std::size_t s = 0; s < g.size(); ++s) {
      if (last >= 0 && gens.inverse(static_cast<std::size_t>(last)) == s) continue;
      walk(m * g[s], len + 1, static_cast<int>(s));
    }
  };
  walk(Eigen::Matrix3d::Identity(), 0, -1);
  return out;
}

double sphere_dist(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

Outcome criterion1() {
  const auto words = free_words(lps().gens(), 10);
  const auto pts = haar_sample(lps().model(), 200, 101);
  double worst = 0.0;
  int uncertified = 0;
  for (double t : {2.0, 8.0}) {
    const WarpedLevel level(lps(), t);
    for (std::size_t i = 0; i < 200; i += 2) {
      const Eigen::Vector3d x(pts[i][0], pts[i][1], pts[i][2]);
      const Eigen::Vector3d y(pts[i + 1][0], pts[i + 1][1], pts[i + 1][2]);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t w = 0; w < words.mats.size(); ++w)
        best = std::min(best, t * sphere_dist(x, words.mats[w] * y) + words.lengths[w]);
      // Words longer than 10 cost at least 11, so the enumeration is exhaustive below that.
      if (best > 11.0) ++uncertified;
      worst = std::max(worst, std::abs(best - warped_dist_exact(level, pts[i], pts[i + 1]).value));
    }
  }
  const auto triples = haar_sample(lps().model(), 600, 102);
  int violations = 0;
  double slack = std::numeric_limits<double>::infinity();
  for (double t : {2.0, 8.0}) {
    const WarpedLevel level(lps(), t);
    for (std::size_t i = 0; i < 600; i += 3) {
      const double ab = warped_dist_exact(level, triples[i], triples[i + 1]).value;
      const double bc = warped_dist_exact(level, triples[i + 1], triples[i + 2]).value;
      const double ac = warped_dist_exact(level, triples[i], triples[i + 2]).value;
      slack = std::min(slack, ab + bc - ac);
      violations += ac > ab + bc + 1e-9;
    }
  }
  return {worst <= 1e-9 && uncertified == 0 && violations == 0,
          "max |exact - oracle| = " + fmt("%.3g", worst) + " over 200 pairs, " + std::to_string(uncertified) +
              " uncertified, triangle violations " + std::to_string(violations) + " (min slack " +
              fmt("%.3g", slack) + ")"};
}

Outcome criterion2() {
  const auto pts = haar_sample(lps().model(), 200, 201);
  const auto& gens = lps().gens();
  int violations = 0, checks = 0;
  Point image(3);
  for (double t : {1.0, 2.0, 8.0, 32.0}) {
    const WarpedLevel level(lps(), t);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i + 1 < pts.size()) {
        ++checks;
        violations += warped_dist_exact(level, pts[i], pts[i + 1]).value > t * geo_dist(lps().model(), pts[i], pts[i + 1]) + 1e-12;
      }
      for (std::size_t s = 0; s < gens.size(); ++s) {
        apply_numeric(lps().model(), gens.numeric(s), pts[i], image);
        ++checks;
        violations += warped_dist_exact(level, pts[i], image).value > 1.0 + 1e-12;
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in " + std::to_string(checks) + " checks"};
}

Outcome criterion3() {
  const double t = 8.0;
  const WarpedLevel level(lps(), t);
  const auto net = build_net(lps().model(), 1.0 / t, 301);
  const WarpedGraph graph(level, net);
  const auto pts = haar_sample(lps().model(), 100, 302);
  const double bound = 5 * t * net.density_radius;
  double worst = 0.0;
  for (std::size_t i = 0; i < 100; i += 2) {
    const double g = graph.distance(graph.snap(pts[i]), graph.snap(pts[i + 1]));
    worst = std::max(worst, std::abs(g - warped_dist_exact(level, pts[i], pts[i + 1]).value));
  }
  return {worst <= bound, "max gap " + fmt("%.4f", worst) + " vs 5tR = " + fmt("%.4f", bound) + " on 50 pairs"};
}

Outcome criterion4() {
  struct Cuts {
    double h = std::numeric_limits<double>::infinity();
    double phi = std::numeric_limits<double>::infinity();
  };
  auto brute = [](const Graph& g) {
    const auto deg = g.degrees();
    const double total = std::accumulate(deg.begin(), deg.end(), 0.0);
    const std::size_t n = g.vertex_count();
    Cuts c;
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
      double boundary = 0, vol = 0;
      for (const auto& [u, v] : g.edges()) boundary += ((mask >> u) & 1) != ((mask >> v) & 1);
      for (std::size_t v = 0; v < n; ++v)
        if ((mask >> v) & 1) vol += static_cast<double>(deg[v]);
      const auto size = static_cast<std::size_t>(std::popcount(mask));
      if (2 * size <= n) c.h = std::min(c.h, boundary / static_cast<double>(size));
      if (2 * vol <= total) c.phi = std::min(c.phi, boundary / vol);
    }
    return c;
  };
  std::vector<Graph> corpus{Graph::cycle(4), Graph::complete(4), Graph::complete(2), Graph::path(5)};
  std::mt19937_64 rng(401);
  while (corpus.size() < 54) {
    const std::size_t n = 2 + rng() % 9;
    std::vector<Edge> edges;
    for (std::uint32_t v = 1; v < n; ++v) edges.emplace_back(static_cast<std::uint32_t>(rng() % v), v);
    for (std::uint32_t u = 0; u < n; ++u)
      for (std::uint32_t v = u + 1; v < n; ++v)
        if (rng() % 3 == 0) edges.emplace_back(u, v);
    corpus.emplace_back(n, edges);
  }
  int violations = 0;
  for (const auto& g : corpus) {
    const auto cuts = brute(g);
    const double l2 = laplacian_spectrum(g, 2).eigenvalues[1];
    const auto deg = g.degrees();
    const double dmax = static_cast<double>(*std::max_element(deg.begin(), deg.end()));
    const double tol = 1e-8;
    violations += !(l2 / 2 <= cuts.phi + tol) + !(cuts.phi <= std::sqrt(2 * l2) + tol);
    violations += !(cuts.phi <= cuts.h + tol) + !(cuts.h <= dmax * cuts.phi + tol);
    violations += std::abs(cheeger_exact(g).h - cuts.h) > tol;
  }
  const double hc4 = cheeger_exact(Graph::cycle(4)).h, hk4 = cheeger_exact(Graph::complete(4)).h,
               hk2 = cheeger_exact(Graph::complete(2)).h;
  const double lc4 = laplacian_spectrum(Graph::cycle(4), 2).eigenvalues[1];
  const double lk4 = laplacian_spectrum(Graph::complete(4), 2).eigenvalues[1];
  const bool hand = std::abs(hc4 - 1) < 1e-12 && std::abs(hk4 - 2) < 1e-12 && std::abs(hk2 - 1) < 1e-12 &&
                    std::abs(lc4 - 1) <= 1e-8 && std::abs(lk4 - 4.0 / 3.0) <= 1e-8;
  return {hand && violations == 0, "h(C4) = " + fmt("%g", hc4) + ", h(K4) = " + fmt("%g", hk4) + ", h(K2) = " +
                                       fmt("%g", hk2) + ", l2(C4) = " + fmt("%.10f", lc4) + ", l2(K4) = " +
                                       fmt("%.10f", lk4) + ", sandwich violations " + std::to_string(violations) +
                                       " over " + std::to_string(corpus.size()) + " graphs"};
}

json run_levels(const std::string& name, const std::string& model, const std::string& gens, const json& ts) {
  json cfg = {{"name", name},
              {"model", model},
              {"generators", gens},
              {"t_sequence", ts},
              {"samples_per_region", 100},
              {"spectrum_k", 2},
              {"seeds", {{"net", 42}, {"partition", 43}}}};
  return run_experiment(parse_config(cfg), RunOptions{scratch(name)}).report;
}

Outcome criterion5() {
  const auto report = run_levels("expander", "sphere:3", "lps", {4, 8, 16, 32});
  std::string detail;
  bool connected = true, ok = true;
  std::size_t dmin = SIZE_MAX, dmax = 0;
  double lmin = std::numeric_limits<double>::infinity(), lmax = 0;
  for (const auto& level : report["levels"]) {
    if (level["status"] != "ok") {
      ok = false;
      continue;
    }
    const auto deg = level["max_degree"].get<std::size_t>();
    const double l2 = level["lambda2"].get<double>();
    connected = connected && level["graph"]["component_count"] == 1;
    dmin = std::min(dmin, deg);
    dmax = std::max(dmax, deg);
    lmin = std::min(lmin, l2);
    lmax = std::max(lmax, l2);
    detail += "t=" + fmt("%g", level["t"].get<double>()) + ": |V|=" + std::to_string(level["vertex_count"].get<std::size_t>()) +
              " deg=" + std::to_string(deg) + " l2=" + fmt("%.4f", l2) + "; ";
  }
  const bool degree_ok = ok && dmax - dmin <= 2;
  const bool gap_ok = ok && lmin >= 0.01 && lmax / lmin <= 3.0;

  const auto control = run_levels("rotation_control", "sphere:2", "s1-rational", {8, 256});
  const auto& cl = control["levels"];
  const bool control_ok = cl[0]["status"] == "ok" && cl[1]["status"] == "ok" &&
                          cl[1]["lambda2"].get<double>() <= 0.25 * cl[0]["lambda2"].get<double>();
  detail += "connected " + std::string(connected ? "yes" : "no") + ", max degree spread " +
            std::to_string(dmax - dmin) + (degree_ok ? " (ok)" : " (exceeds +-1)") + ", l2 ratio " +
            fmt("%.3f", lmax / lmin) + "; control l2 " + fmt("%.5f", cl[0]["lambda2"].get<double>()) + " -> " +
            fmt("%.5f", cl[1]["lambda2"].get<double>());
  return {connected && degree_ok && gap_ok && control_ok, detail};
}

Outcome criterion6() {
  const auto a = embedding_obstruction(2048, 2, 4, 1.0);
  const auto b = embedding_obstruction(2048, 2, 4, 2.0);
  const auto c = embedding_obstruction(4, 2, 4, 1.0);
  const bool pass = a.lower_bound == 0.875 && b.verdict == Verdict::Contradiction && c.verdict == Verdict::Undefined;
  return {pass, "L = " + fmt("%.17g", a.lower_bound) + ", eps=2 verdict " + to_string(b.verdict) +
                    ", |P| = 2Q verdict " + to_string(c.verdict)};
}

Outcome criterion7() {
  const auto coarse = build_net(lps().model(), 1.0 / 8, 42);
  const auto fine = build_net(lps().model(), 1.0 / 64, 42);
  const double f8 = chi_set(lps(), coarse, 8.0, 1.0).fraction;
  const double f64 = chi_set(lps(), fine, 64.0, 1.0).fraction;

  const ActionSpec c5(ManifoldModel::sphere(5), presets::cyclic5());
  const auto net5 = build_net(c5.model(), 0.8, 3);
  bool finite_ok = true;
  for (double r : {5.0 / 6.0, 1.0, 2.0}) finite_ok = finite_ok && chi_set(c5, net5, 64.0, r).fraction == 1.0;

  const auto mid = build_net(lps().model(), 1.0 / 16, 5);
  std::map<std::pair<double, double>, std::set<std::size_t>> sets;
  const std::vector<double> ts{8, 16, 32, 64}, rs{0.25, 0.5, 1.0};
  for (double t : ts)
    for (double r : rs) {
      const auto chi = chi_set(lps(), mid, t, r);
      sets[{t, r}] = {chi.members.begin(), chi.members.end()};
    }
  int failures = 0;
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = 0; j < rs.size(); ++j) {
      const auto& s = sets[{ts[i], rs[j]}];
      if (j + 1 < rs.size()) {
        const auto& bigger = sets[{ts[i], rs[j + 1]}];
        failures += !std::includes(bigger.begin(), bigger.end(), s.begin(), s.end());
      }
      if (i + 1 < ts.size()) {
        const auto& later = sets[{ts[i + 1], rs[j]}];
        failures += !std::includes(s.begin(), s.end(), later.begin(), later.end());
      }
    }
  return {f64 < f8 && finite_ok && failures == 0,
          "fraction " + fmt("%.4f", f8) + " at t=8 vs " + fmt("%.4f", f64) + " at t=64 (r=1); order-5 control " +
              (finite_ok ? "full" : "not full") + "; inclusion failures " + std::to_string(failures)};
}

Outcome criterion8() {
  std::string detail;
  bool main_ok = false;
  const double t = 64.0, r = 2.0;
  const auto net = build_net(lps().model(), 1.0 / 16, 42);
  const auto base = choose_base_point(lps(), net, t, r);
  detail = "best base point margin " + fmt("%.4f", base.margin) + " (closest element length " +
           std::to_string(base.closest.size()) + ")";
  try {
    BallCheckConfig cfg;
    cfg.r = r;
    cfg.t = t;
    const auto report = ball_product_check(lps(), net, base.index, cfg);
    main_ok = report.max_distortion <= report.allowance;
    detail += ", distortion " + fmt("%.4f", report.max_distortion) + " vs allowance " + fmt("%.4f", report.allowance);
  } catch (const PreconditionError& e) {
    detail += ", no base point outside chi: " + std::string(e.what());
  }
  const ActionSpec triv(ManifoldModel::sphere(3), presets::trivial(3));
  const auto tnet = build_net(triv.model(), 1.0 / 32, 43);
  BallCheckConfig tc;
  tc.r = r;
  tc.t = 8.0;
  const auto control = ball_product_check(triv, tnet, 0, tc);
  const bool control_ok = control.max_distortion <= 1e-12 && control.ball_size > 1;
  detail += "; trivial control distortion " + fmt("%.3g", control.max_distortion) + " on " +
            std::to_string(control.ball_size) + " points";
  return {main_ok && control_ok, detail};
}

Outcome criterion9() {
  int mismatches = 0, checks = 0;
  for (const auto& gens : {presets::trivial(2), presets::rational_rotation_s1(), presets::lps_sphere2()}) {
    const auto ball = group_ball(gens, 5);
    std::vector<mpz_class> sizes;
    for (unsigned j = 0; j <= 5; ++j) {
      std::size_t count = 0;
      for (std::size_t i = 0; i < ball.size(); ++i) count += ball[i].length <= j;
      sizes.emplace_back(static_cast<unsigned long>(count));
    }
    for (unsigned m = 0; m <= 2; ++m) {
      for (unsigned r = 0; r <= 5; ++r) {
        // Direct count of pairs (gamma, v) with v in the cube [-r, r]^m.
        mpz_class total = 0;
        const int side = 2 * static_cast<int>(r) + 1;
        const int cube = m == 0 ? 1 : (m == 1 ? side : side * side);
        for (int code = 0; code < cube; ++code) {
          const int v0 = m >= 1 ? code % side - static_cast<int>(r) : 0;
          const int v1 = m == 2 ? code / side - static_cast<int>(r) : 0;
          const unsigned norm = static_cast<unsigned>(std::abs(v0) + std::abs(v1));
          for (std::size_t i = 0; i < ball.size(); ++i) total += ball[i].length + norm <= r;
        }
        ++checks;
        mismatches += product_ball_size(sizes, m, r) != total;
      }
    }
  }
  const bool examples = product_ball_size({1, 1, 1}, 2, 2) == 13 && product_ball_size({1, 5, 17}, 1, 2) == 29;
  return {examples && mismatches == 0,
          std::to_string(mismatches) + " mismatches in " + std::to_string(checks) + " cases; Z^2 ball(2) = 13, free-2 x Z ball(2) = 29 " +
              (examples ? "confirmed" : "wrong")};
}

Outcome criterion10() {
  const ActionSpec action(ManifoldModel::sphere(3), presets::lps_sphere2());
  const auto entries = cardinality_schedule(action.model(), {100, 500, 1000}, 42);
  std::string counts;
  bool exact = entries.size() == 3;
  const std::size_t targets[] = {100, 500, 1000};
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto part = voronoi_partition(entries[i].net, 100 * entries[i].net.size(), 43);
    const auto g = approx_graph(action, part);
    exact = exact && g.graph.vertex_count() == targets[i];
    counts += std::to_string(g.graph.vertex_count()) + (i + 1 < entries.size() ? "," : "");
  }
  std::vector<mpz_class> sizes;
  for (unsigned long s : {10ul, 30ul, 100ul, 400ul, 1000ul, 5000ul, 30000ul}) sizes.emplace_back(s);
  const auto cert = subsequence_separation(sizes, 3, 2);
  bool verdicts = cert.n0 == 27 && cert.pairs.size() == cert.selected.size() * (cert.selected.size() - 1) / 2;
  for (std::size_t i = 1; i < cert.selected.size(); ++i)
    verdicts = verdicts && sizes[cert.selected[i]] > mpz_class(static_cast<unsigned long>(i)) * sizes[cert.selected[i - 1]];
  for (const auto& p : cert.pairs) {
    const auto& gm = sizes[cert.selected[p.m - 1]];
    const auto& gn = sizes[cert.selected[p.n - 1]];
    verdicts = verdicts && p.lower_holds == (mpz_class(static_cast<unsigned long>(p.m)) * gm < gn) &&
               p.upper_holds == (gn <= 27 * gm);
  }
  return {exact && verdicts, "graph sizes " + counts + "; n0 = " + cert.n0.get_str() + ", " +
                                 std::to_string(cert.selected.size()) + " of " + std::to_string(sizes.size()) +
                                 " sizes kept, " + std::to_string(cert.pairs.size()) + " pair verdicts " +
                                 (verdicts ? "consistent" : "inconsistent")};
}

Outcome criterion11() {
  const auto cfg = load_config(fs::path(WARPCONE_SOURCE_DIR) / "configs" / "s1_rotation_demo.json");
  const auto a = scratch("determinism_a");
  const auto b = scratch("determinism_b");
  run_experiment(cfg, RunOptions{a});
  run_experiment(cfg, RunOptions{b});
  std::size_t files = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file() || entry.path().filename() == "run_info.json") continue;
    ++files;
    differing += slurp(entry.path()) != slurp(b / fs::relative(entry.path(), a));
  }
  const bool same = slurp(a / "report.json") == slurp(b / "report.json");
  return {same && differing == 0 && files > 1,
          std::to_string(files) + " artifacts compared, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                       criterion5, criterion6, criterion7, criterion8,
                                                       criterion9, criterion10, criterion11};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    selected.resize(criteria.size());
    std::iota(selected.begin(), selected.end(), 1);
  }
  int failed = 0;
  for (int n : selected) {
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion %d\n", n);
      return 2;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[n - 1]();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d: %s (%.1f s) %s\n", n, out.pass ? "PASS" : "FAIL", seconds, out.detail.c_str());
    std::fflush(stdout);
    failed += !out.pass;
  }
  return failed == 0 ? 0 : 1;
}
