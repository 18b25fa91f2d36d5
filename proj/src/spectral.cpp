#include "warpcone/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

#include <Eigen/Dense>

#include "warpcone/errors.hpp"
#include "warpcone/parallel.hpp"
#include "warpcone/point_index.hpp"

namespace warpcone {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr std::size_t kLanczosMaxIter = 1500;
constexpr std::size_t kLanczosCheckEvery = 10;

struct Csr {
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> targets;
};

Csr to_csr(const Graph& g) {
  Csr c;
  const auto adj = g.adjacency();
  c.offsets.assign(g.vertex_count() + 1, 0);
  for (std::size_t v = 0; v < adj.size(); ++v) c.offsets[v + 1] = c.offsets[v] + adj[v].size();
  c.targets.reserve(c.offsets.back());
  for (const auto& a : adj) c.targets.insert(c.targets.end(), a.begin(), a.end());
  return c;
}

std::string residual_list(const std::vector<double>& r) {
  std::string s;
  char buf[32];
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.3e", i ? ", " : "", r[i]);
    s += buf;
  }
  return s;
}

}  // namespace

LanczosResult lanczos_largest(std::size_t n, const std::function<void(const double*, double*)>& matvec,
                              std::size_t k, const std::vector<std::vector<double>>& deflate, double tol,
                              std::size_t max_iter, std::uint64_t seed) {
  LanczosResult out;
  const std::size_t space = n - std::min(n, deflate.size());
  k = std::min(k, space);
  if (k == 0) return out;
  max_iter = std::min(max_iter, space);

  auto project = [&](VectorXd& w, const std::vector<VectorXd>& basis) {
    for (const auto& d : deflate) {
      const Eigen::Map<const VectorXd> dv(d.data(), static_cast<Eigen::Index>(n));
      w -= dv.dot(w) * dv;
    }
    for (const auto& q : basis) w -= q.dot(w) * q;
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<VectorXd> basis;
  VectorXd q(n);
  for (std::size_t i = 0; i < n; ++i) q[static_cast<Eigen::Index>(i)] = gauss(rng);
  project(q, basis);
  q.normalize();

  std::vector<double> alpha, beta;
  VectorXd w(n);
  Eigen::SelfAdjointEigenSolver<MatrixXd> tri;
  bool done = false;
  while (!done) {
    basis.push_back(q);
    const std::size_t j = basis.size() - 1;
    matvec(basis[j].data(), w.data());
    alpha.push_back(basis[j].dot(w));
    w -= alpha.back() * basis[j];
    if (j > 0) w -= beta.back() * basis[j - 1];
    project(w, basis);
    project(w, basis);
    const double b = w.norm();

    const std::size_t m = basis.size();
    const bool exhausted = b < 1e-12 || m >= max_iter;
    if (exhausted || (m >= k && m % kLanczosCheckEvery == 0)) {
      k = std::min(k, m);
      VectorXd diag = Eigen::Map<VectorXd>(alpha.data(), static_cast<Eigen::Index>(m));
      VectorXd sub = m > 1 ? VectorXd(Eigen::Map<VectorXd>(beta.data(), static_cast<Eigen::Index>(m - 1)))
                           : VectorXd(0);
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      bool converged = true;
      for (std::size_t i = 0; i < k; ++i) {
        const auto col = static_cast<Eigen::Index>(m - 1 - i);
        const double estimate = std::abs(b * tri.eigenvectors()(static_cast<Eigen::Index>(m - 1), col));
        if (estimate > tol) converged = false;
      }
      if (converged || exhausted) done = true;
    }
    if (!done) {
      beta.push_back(b);
      q = w / b;
    }
  }

  const std::size_t m = basis.size();
  out.iterations = m;
  VectorXd av(n);
  for (std::size_t i = 0; i < k; ++i) {
    const auto col = static_cast<Eigen::Index>(m - 1 - i);
    VectorXd y = VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < m; ++r) y += tri.eigenvectors()(static_cast<Eigen::Index>(r), col) * basis[r];
    y.normalize();
    matvec(y.data(), av.data());
    const double theta = y.dot(av);
    out.values.push_back(theta);
    out.residuals.push_back((av - theta * y).norm());
    out.vectors.emplace_back(y.data(), y.data() + n);
  }
  return out;
}

SpectrumReport laplacian_spectrum(const Graph& g, std::size_t k, double tol) {
  const std::size_t n = g.vertex_count();
  if (n == 0) throw InputError("laplacian_spectrum: empty graph");
  if (k == 0 || k > n) {
    throw InputError("laplacian_spectrum: k = " + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");
  }
  SpectrumReport report;
  report.connected = graph_report(g).component_count == 1;
  const auto deg = g.degrees();
  std::vector<double> inv_sqrt(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    if (deg[v] > 0) inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(deg[v]));
  }
  const Csr csr = to_csr(g);
  // N = D^-1/2 A D^-1/2, so L = I - N off isolated vertices.
  auto apply_n = [&](const double* x, double* y) {
    for (std::size_t v = 0; v < n; ++v) {
      double s = 0.0;
      for (std::size_t e = csr.offsets[v]; e < csr.offsets[v + 1]; ++e) s += inv_sqrt[csr.targets[e]] * x[csr.targets[e]];
      y[v] = inv_sqrt[v] * s;
    }
  };
  auto apply_l = [&](const double* x, double* y) {
    apply_n(x, y);
    for (std::size_t v = 0; v < n; ++v) y[v] = (deg[v] > 0 ? x[v] : 0.0) - y[v];
  };

  if (n <= kDenseSpectrumLimit) {
    report.solver = SolverKind::Dense;
    MatrixXd L = MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t v = 0; v < n; ++v) {
      const auto vi = static_cast<Eigen::Index>(v);
      if (deg[v] > 0) L(vi, vi) = 1.0;
    }
    for (const auto& [u, v] : g.edges()) {
      const double w = -inv_sqrt[u] * inv_sqrt[v];
      L(u, v) = w;
      L(v, u) = w;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(L);
    for (std::size_t i = 0; i < k; ++i) {
      const auto col = static_cast<Eigen::Index>(i);
      const VectorXd v = es.eigenvectors().col(col);
      const double lambda = es.eigenvalues()[col];
      report.eigenvalues.push_back(lambda);
      report.residuals.push_back((L * v - lambda * v).norm());
      report.eigenvectors.emplace_back(v.data(), v.data() + n);
    }
    return report;
  }

  report.solver = SolverKind::Iterative;
  // sqrt(d) spans the kernel of L on the non-isolated part; deflate it and take the top of N.
  std::vector<double> root(n);
  double norm2 = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    root[v] = std::sqrt(static_cast<double>(deg[v]));
    norm2 += root[v] * root[v];
  }
  std::vector<std::vector<double>> deflate;
  if (norm2 > 0.0) {
    for (auto& x : root) x /= std::sqrt(norm2);
    deflate.push_back(root);
    std::vector<double> lr(n);
    apply_l(root.data(), lr.data());
    report.eigenvalues.push_back(0.0);
    report.residuals.push_back(std::sqrt(std::inner_product(lr.begin(), lr.end(), lr.begin(), 0.0)));
    report.eigenvectors.push_back(root);
  }
  const std::size_t rest = k - report.eigenvalues.size();
  if (rest > 0) {
    const auto lz = lanczos_largest(n, apply_n, rest, deflate, tol, kLanczosMaxIter);
    report.iterations = lz.iterations;
    for (std::size_t i = 0; i < lz.values.size(); ++i) {
      report.eigenvalues.push_back(1.0 - lz.values[i]);
      report.eigenvectors.push_back(lz.vectors[i]);
      // The residual of N and of L coincide away from isolated vertices.
      std::vector<double> lv(n);
      apply_l(lz.vectors[i].data(), lv.data());
      double r2 = 0.0;
      for (std::size_t v = 0; v < n; ++v) {
        const double d = lv[v] - report.eigenvalues.back() * lz.vectors[i][v];
        r2 += d * d;
      }
      report.residuals.push_back(std::sqrt(r2));
    }
    const double worst = *std::max_element(report.residuals.begin(), report.residuals.end());
    if (worst > std::max(tol, 1e-8) * 10.0) {
      throw ConvergenceError("laplacian_spectrum: Lanczos did not converge after " + std::to_string(lz.iterations) +
                             " iterations; residuals " + residual_list(report.residuals));
    }
  }
  // Ascending order (Lanczos returns the top of N first, which is already ascending in L).
  std::vector<std::size_t> order(report.eigenvalues.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return report.eigenvalues[a] < report.eigenvalues[b]; });
  SpectrumReport sorted = report;
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted.eigenvalues[i] = report.eigenvalues[order[i]];
    sorted.residuals[i] = report.residuals[order[i]];
    sorted.eigenvectors[i] = report.eigenvectors[order[i]];
  }
  return sorted;
}

void write_spectrum_csv(std::ostream& os, const SpectrumReport& report) {
  os << "index,eigenvalue,residual\n";
  char buf[96];
  for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.6e\n", i, report.eigenvalues[i], report.residuals[i]);
    os << buf;
  }
}

CheegerExact cheeger_exact(const Graph& g) {
  const std::size_t n = g.vertex_count();
  if (n > kCheegerExactLimit) {
    throw InputError("cheeger_exact: " + std::to_string(n) + " vertices exceed the brute-force limit of 24; use cheeger_bounds");
  }
  if (n < 2) throw InputError("cheeger_exact: needs at least 2 vertices");
  std::vector<std::uint32_t> adj(n, 0);
  for (const auto& [u, v] : g.edges()) {
    adj[u] |= 1u << v;
    adj[v] |= 1u << u;
  }
  // Gray-code walk over all subsets, updating |A| and |boundary A| one vertex at a time.
  std::uint32_t set = 0;
  std::int64_t boundary = 0;
  std::size_t size = 0;
  std::int64_t best_boundary = -1;
  std::size_t best_size = 1;
  std::uint32_t best_set = 0;
  const std::uint64_t total = 1ull << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const int v = std::countr_zero(i);
    const std::uint32_t bit = 1u << v;
    const auto deg = std::popcount(adj[v]);
    if (set & bit) {
      set &= ~bit;
      boundary -= deg - 2 * std::popcount(adj[v] & set);
      --size;
    } else {
      boundary += deg - 2 * std::popcount(adj[v] & set);
      set |= bit;
      ++size;
    }
    if (2 * size > n) continue;
    if (best_boundary < 0 || boundary * static_cast<std::int64_t>(best_size) <
                                 best_boundary * static_cast<std::int64_t>(size) ||
        (boundary * static_cast<std::int64_t>(best_size) == best_boundary * static_cast<std::int64_t>(size) &&
         set < best_set)) {
      best_boundary = boundary;
      best_size = size;
      best_set = set;
    }
  }
  CheegerExact out;
  out.h = static_cast<double>(best_boundary) / static_cast<double>(best_size);
  for (std::uint32_t v = 0; v < n; ++v) {
    if (best_set & (1u << v)) out.set.push_back(v);
  }
  return out;
}

CheegerReport cheeger_bounds(const Graph& g) {
  if (g.vertex_count() < 2) throw InputError("cheeger_bounds: needs at least 2 vertices");
  return cheeger_bounds(g, laplacian_spectrum(g, 2));
}

CheegerReport cheeger_bounds(const Graph& g, const SpectrumReport& spectrum) {
  const std::size_t n = g.vertex_count();
  if (n < 2) throw InputError("cheeger_bounds: needs at least 2 vertices");
  if (spectrum.eigenvalues.size() < 2) throw InputError("cheeger_bounds: spectrum lacks lambda_2");
  CheegerReport report;
  report.lambda2 = std::max(0.0, spectrum.eigenvalues[1]);
  report.h_lower = report.lambda2 / 2.0;

  const auto deg = g.degrees();
  const auto adj = g.adjacency();
  const auto& fiedler = spectrum.eigenvectors[1];
  std::vector<double> x(n);
  for (std::size_t v = 0; v < n; ++v) x[v] = fiedler[v] / std::sqrt(std::max<double>(1.0, static_cast<double>(deg[v])));
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return x[a] < x[b]; });

  std::vector<char> inside(n, 0);
  std::int64_t boundary = 0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 1;
  for (std::size_t k = 1; k < n; ++k) {
    const auto v = order[k - 1];
    std::int64_t into = 0;
    for (auto w : adj[v]) into += inside[w];
    boundary += static_cast<std::int64_t>(deg[v]) - 2 * into;
    inside[v] = 1;
    const double value = static_cast<double>(boundary) / static_cast<double>(std::min(k, n - k));
    if (value < best) {
      best = value;
      best_k = k;
    }
  }
  report.h_upper = best;
  if (best_k <= n - best_k) {
    report.witness_set.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_k));
  } else {
    report.witness_set.assign(order.begin() + static_cast<std::ptrdiff_t>(best_k), order.end());
  }
  std::sort(report.witness_set.begin(), report.witness_set.end());
  if (n <= kCheegerExactLimit) report.h_exact = cheeger_exact(g).h;
  return report;
}

nlohmann::json to_json(const CheegerReport& report) {
  nlohmann::json j = {{"h_upper", report.h_upper},
                      {"h_lower", report.h_lower},
                      {"lambda2", report.lambda2},
                      {"witness_size", report.witness_set.size()}};
  j["h_exact"] = report.h_exact ? nlohmann::json(*report.h_exact) : nlohmann::json(nullptr);
  return j;
}

GapReport action_gap(const ActionSpec& action, const Partition& partition, unsigned workers) {
  const auto& model = action.model();
  if (!(partition.net.model == model)) throw InputError("action_gap: partition lives on " + partition.net.model.name());
  const std::size_t n = partition.size();
  for (std::size_t r = 0; r < n; ++r) {
    if (partition.counts[r] == 0) throw PreconditionError("action_gap: region " + std::to_string(r) + " has zero measure");
  }
  const auto& gens = action.gens();
  GapReport report;
  report.provenance = {{"partition", partition_summary(partition)}, {"generators", gens.labels()},
                       {"label", GapReport::kLabel}};
  if (gens.empty() || n < 2) return report;

  // Transport counts: A_s[R][R'] = #{x in R : region(s^-1 x) = R'} / #R, so (A_s f)(R) averages
  // f(s^-1 x) over R.
  const auto& net = partition.net;
  const PointIndex index(model, net.points, net.degenerate ? model.diameter() : std::max(net.separation, 1e-4));
  const std::size_t n_samples = partition.samples.size();
  const std::size_t S = gens.size();
  std::vector<std::uint32_t> target(n_samples * S);
  parallel_slices(n_samples, workers, [&](std::size_t begin, std::size_t end, unsigned) {
    Point image(model.coord_dim());
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t s = 0; s < S; ++s) {
        apply_numeric(model, gens.numeric(gens.inverse(s)), partition.samples[i], image);
        target[i * S + s] = index.nearest(image);
      }
    }
  });
  struct Entry {
    std::uint32_t row, col;
    double value;
  };
  std::vector<std::vector<Entry>> A(S);
  for (std::size_t s = 0; s < S; ++s) {
    std::vector<std::uint64_t> keys(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
      keys[i] = (static_cast<std::uint64_t>(partition.assignment[i]) << 32) | target[i * S + s];
    }
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < keys.size();) {
      std::size_t j = i;
      while (j < keys.size() && keys[j] == keys[i]) ++j;
      const auto row = static_cast<std::uint32_t>(keys[i] >> 32);
      A[s].push_back({row, static_cast<std::uint32_t>(keys[i] & 0xffffffffu),
                      static_cast<double>(j - i) / static_cast<double>(partition.counts[row])});
      i = j;
    }
  }
  const auto& w = partition.measures;
  std::vector<double> sqrt_w(n), u(n);
  for (std::size_t r = 0; r < n; ++r) {
    sqrt_w[r] = std::sqrt(w[r]);
    u[r] = sqrt_w[r];  // unit vector since the measures sum to 1
  }
  double unorm = std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
  for (auto& x : u) x /= unorm;

  // K' g = W^-1/2 (1/|S|) sum_s (I - A_s)^T W (I - A_s) W^-1/2 g
  auto apply_k = [&](const double* g, double* out) {
    std::vector<double> f(n), h(n);
    std::fill(out, out + n, 0.0);
    for (std::size_t r = 0; r < n; ++r) f[r] = g[r] / sqrt_w[r];
    for (std::size_t s = 0; s < S; ++s) {
      h = f;
      for (const auto& e : A[s]) h[e.row] -= e.value * f[e.col];
      for (std::size_t r = 0; r < n; ++r) h[r] *= w[r];
      for (std::size_t r = 0; r < n; ++r) out[r] += h[r];
      for (const auto& e : A[s]) out[e.col] -= e.value * h[e.row];
    }
    for (std::size_t r = 0; r < n; ++r) out[r] /= static_cast<double>(S) * sqrt_w[r];
  };

  if (n <= kDenseSpectrumLimit) {
    report.solver = SolverKind::Dense;
    const auto N = static_cast<Eigen::Index>(n);
    MatrixXd K = MatrixXd::Zero(N, N);
    for (std::size_t s = 0; s < S; ++s) {
      MatrixXd M = MatrixXd::Identity(N, N);
      for (const auto& e : A[s]) M(e.row, e.col) -= e.value;
      VectorXd wv = Eigen::Map<const VectorXd>(w.data(), N);
      K += M.transpose() * wv.asDiagonal() * M;
    }
    K /= static_cast<double>(S);
    const VectorXd is = Eigen::Map<const VectorXd>(sqrt_w.data(), N).cwiseInverse();
    MatrixXd Kp = is.asDiagonal() * K * is.asDiagonal();
    Kp = 0.5 * (Kp + Kp.transpose());
    // sqrt(w) spans the constants; lift it out of the way to restrict to zero-mean functions.
    const VectorXd uv = Eigen::Map<const VectorXd>(u.data(), N);
    const double lift = Kp.trace() + 1.0;
    MatrixXd B = Kp + lift * uv * uv.transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(B);
    const double lambda = es.eigenvalues()[0];
    const VectorXd v = es.eigenvectors().col(0);
    report.smallest_eigenvalue = lambda;
    report.residual = (B * v - lambda * v).norm();
  } else {
    report.solver = SolverKind::Iterative;
    auto negated = [&](const double* g, double* out) {
      apply_k(g, out);
      for (std::size_t r = 0; r < n; ++r) out[r] = -out[r];
    };
    const auto lz = lanczos_largest(n, negated, 1, {u}, 1e-8, kLanczosMaxIter);
    if (lz.values.empty()) return report;
    report.smallest_eigenvalue = -lz.values[0];
    report.residual = lz.residuals[0];
    if (report.residual > 1e-6) {
      throw ConvergenceError("action_gap: Lanczos did not converge after " + std::to_string(lz.iterations) +
                             " iterations; residual " + residual_list(lz.residuals));
    }
  }
  report.epsilon_avg = std::sqrt(std::max(0.0, report.smallest_eigenvalue));
  return report;
}

nlohmann::json to_json(const GapReport& report) {
  return {{"epsilon_avg", report.epsilon_avg},
          {"smallest_eigenvalue", report.smallest_eigenvalue},
          {"residual", report.residual},
          {"solver", report.solver == SolverKind::Dense ? "dense" : "iterative"},
          {"label", GapReport::kLabel},
          {"provenance", report.provenance}};
}

ControlFunction ControlFunction::identity() { return ControlFunction{}; }

ControlFunction ControlFunction::affine(double a, double b) {
  if (!(a > 0.0)) throw InputError("affine control: slope must be positive");
  ControlFunction f;
  f.family_ = Family::Affine;
  f.a_ = a;
  f.b_ = b;
  return f;
}

ControlFunction ControlFunction::log(double a, double b) {
  if (!(a > 0.0)) throw InputError("log control: scale must be positive");
  ControlFunction f;
  f.family_ = Family::Log;
  f.a_ = a;
  f.b_ = b;
  return f;
}

ControlFunction ControlFunction::table(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw InputError("table control: needs at least two breakpoints");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].first > points[i - 1].first)) throw InputError("table control: x values must increase strictly");
    if (points[i].second < points[i - 1].second) throw InputError("table control: not monotone increasing");
  }
  const auto& a = points[points.size() - 2];
  const auto& b = points.back();
  if (!(b.second > a.second)) throw InputError("table control: last segment must have positive slope (unbounded)");
  ControlFunction f;
  f.family_ = Family::Table;
  f.table_ = std::move(points);
  return f;
}

ControlFunction ControlFunction::from_json(const nlohmann::json& j) {
  if (j.contains("table")) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : j.at("table")) pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return table(std::move(pts));
  }
  const auto family = j.value("family", std::string("identity"));
  if (family == "identity") return identity();
  if (family == "affine") return affine(j.value("a", 1.0), j.value("b", 0.0));
  if (family == "log") return log(j.value("a", 1.0), j.value("b", 0.0));
  throw InputError("unknown control family '" + family + "'");
}

double ControlFunction::operator()(double x) const {
  switch (family_) {
    case Family::Identity: return x;
    case Family::Affine: return a_ * x + b_;
    case Family::Log: return a_ * std::log1p(std::max(x, 0.0)) + b_;
    case Family::Table: {
      const std::size_t n = table_.size();
      std::size_t i = 1;
      while (i + 1 < n && x > table_[i].first) ++i;
      const auto& [x0, y0] = table_[i - 1];
      const auto& [x1, y1] = table_[i];
      return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
  }
  return x;
}

nlohmann::json ControlFunction::to_json() const {
  switch (family_) {
    case Family::Identity: return {{"family", "identity"}};
    case Family::Affine: return {{"family", "affine"}, {"a", a_}, {"b", b_}};
    case Family::Log: return {{"family", "log"}, {"a", a_}, {"b", b_}};
    case Family::Table: {
      nlohmann::json pts = nlohmann::json::array();
      for (const auto& [x, y] : table_) pts.push_back({x, y});
      return {{"table", pts}};
    }
  }
  return {};
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Contradiction: return "contradiction";
    case Verdict::NoContradiction: return "no contradiction";
    case Verdict::Undefined: return "undefined";
  }
  return "undefined";
}

ObstructionCertificate embedding_obstruction(double P_size, double Q, double D, double epsilon,
                                             const ControlFunctions& controls) {
  if (!(D >= 2.0)) throw InputError("embedding_obstruction: degree bound D must be at least 2");
  if (!(epsilon > 0.0)) throw InputError("embedding_obstruction: epsilon must be positive");
  if (!(Q >= 1.0)) throw InputError("embedding_obstruction: Q must be at least 1");
  if (!(P_size >= 1.0)) throw InputError("embedding_obstruction: partition size must be positive");
  ObstructionCertificate c;
  c.P_size = P_size;
  c.Q = Q;
  c.D = D;
  c.epsilon = epsilon;
  c.controls = controls;
  // Base-2 logarithms keep powers of two exact; the ratio is base independent.
  c.inner = std::log2(P_size / (2.0 * Q)) / std::log2(D) - 1.0;
  c.upper_bound = controls.rho_plus(1.0) / epsilon;
  if (c.inner < 0.0) {
    c.verdict = Verdict::Undefined;
    return c;
  }
  c.lower_bound = controls.rho_minus(c.inner) / 4.0;
  c.verdict = c.lower_bound > c.upper_bound ? Verdict::Contradiction : Verdict::NoContradiction;
  return c;
}

nlohmann::json to_json(const ObstructionCertificate& c) {
  nlohmann::json j = {{"inputs",
                       {{"P_size", c.P_size},
                        {"Q", c.Q},
                        {"D", c.D},
                        {"epsilon", c.epsilon},
                        {"rho_minus", c.controls.rho_minus.to_json()},
                        {"rho_plus", c.controls.rho_plus.to_json()}}},
                      {"inner", c.inner},
                      {"upper_bound", c.upper_bound},
                      {"verdict", to_string(c.verdict)}};
  j["lower_bound"] = c.verdict == Verdict::Undefined ? nlohmann::json(nullptr) : nlohmann::json(c.lower_bound);
  return j;
}

}  // namespace warpcone
