#include "warpcone/net.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>
#include <random>

#include "warpcone/errors.hpp"
#include "warpcone/point_index.hpp"

namespace warpcone {

namespace {

constexpr double kSeparationSlack = 1e-9;
constexpr std::size_t kMeshSamplesPerRegion = 128;

std::size_t pool_size(const ManifoldModel& model, double r, const NetOptions& options) {
  const double v = ball_volume_fraction(model, 0.5 * r);
  const double upper = v > 0.0 ? 1.0 / v : static_cast<double>(options.max_pool);
  const double wanted = options.pool_factor * upper;
  const auto n = static_cast<std::size_t>(std::min(wanted, static_cast<double>(options.max_pool)));
  return std::max(n, options.min_pool);
}

// One-dimensional models get an equally spaced pool (random phase), so symmetric nets such as the
// four quarter points of S^1 are representable exactly.
PointCloud candidate_pool(const ManifoldModel& model, std::size_t n, std::uint64_t seed) {
  const bool circle = (model.kind() == ManifoldKind::Sphere && model.coord_dim() == 2) ||
                      (model.kind() == ManifoldKind::Torus && model.coord_dim() == 1);
  if (!circle) return haar_sample(model, n, seed);
  n = (n + 63) / 64 * 64;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi / static_cast<double>(n));
  const double phase = phase_dist(rng);
  PointCloud pool(model.coord_dim());
  pool.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = phase + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    if (model.kind() == ManifoldKind::Torus) {
      const double w = a >= 2.0 * std::numbers::pi ? a - 2.0 * std::numbers::pi : a;
      pool.push_back(std::vector<double>{w});
    } else {
      pool.push_back(std::vector<double>{std::cos(a), std::sin(a)});
    }
  }
  return pool;
}

double pool_resolution(const ManifoldModel& model, std::size_t n) {
  const double nn = static_cast<double>(std::max<std::size_t>(n, 2));
  return radius_for_volume(model, std::min(1.0, 3.0 * std::log(nn) / nn));
}

// Greedy farthest-point selection; `seed_points` are taken as already selected.
Net farthest_point_net(const ManifoldModel& model, double r, std::uint64_t seed, const NetOptions& options,
                       const PointCloud* seed_points) {
  Net net;
  net.model = model;
  net.separation = r;
  net.density_radius = r;
  net.seed = seed;
  net.points = PointCloud(model.coord_dim());

  const std::size_t n = pool_size(model, r, options);
  PointCloud pool = candidate_pool(model, n, seed);
  net.candidate_count = pool.size();
  net.resolution = pool_resolution(model, pool.size());

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(pool.size(), inf);
  PointIndex index(model, pool, std::max(r, 1e-4));

  using Entry = std::pair<double, std::int64_t>;  // (distance, -candidate) so ties favour low indices
  std::priority_queue<Entry> heap;

  if (seed_points != nullptr && seed_points->size() > 0) {
    for (std::size_t i = 0; i < seed_points->size(); ++i) net.points.push_back((*seed_points)[i]);
    PointIndex seeds(model, *seed_points, std::max(r, 1e-4));
    for (std::size_t c = 0; c < pool.size(); ++c) {
      seeds.nearest(pool[c], &dist[c]);
      heap.emplace(dist[c], -static_cast<std::int64_t>(c));
    }
  } else {
    heap.emplace(inf, 0);
  }

  std::vector<std::uint32_t> near;
  while (!heap.empty()) {
    auto [d, neg] = heap.top();
    heap.pop();
    const auto c = static_cast<std::size_t>(-neg);
    if (d != dist[c]) continue;  // stale
    if (d < r - kSeparationSlack) break;
    net.points.push_back(pool[c]);
    dist[c] = 0.0;
    const double reach = std::isinf(d) ? model.diameter() : d;
    index.within(pool[c], reach, near);
    if (std::isinf(d)) {
      // First point: every candidate needs a finite distance.
      near.resize(pool.size());
      for (std::size_t k = 0; k < pool.size(); ++k) near[k] = static_cast<std::uint32_t>(k);
    }
    for (auto k : near) {
      if (k == c) continue;
      const double g = geo_dist(model, pool[c], pool[k]);
      if (g < dist[k]) {
        dist[k] = g;
        heap.emplace(g, -static_cast<std::int64_t>(k));
      }
    }
  }
  return net;
}

}  // namespace

Net build_net(const ManifoldModel& model, double r, std::uint64_t seed, const NetOptions& options) {
  if (!(r > 0.0)) throw InputError("build_net: separation must be positive");
  if (r >= model.diameter()) {
    Net net;
    net.model = model;
    net.points = haar_sample(model, 1, seed);
    net.separation = r;
    net.density_radius = r;
    net.seed = seed;
    net.degenerate = true;
    net.candidate_count = 1;
    net.resolution = 0.0;
    return net;
  }
  return farthest_point_net(model, r, seed, options, nullptr);
}

Net extend_net(const Net& coarse, double r, std::uint64_t seed, const NetOptions& options) {
  if (!(r > 0.0)) throw InputError("extend_net: separation must be positive");
  if (r > coarse.separation) throw InputError("extend_net: finer separation must not exceed the coarse one");
  if (r >= coarse.model.diameter()) return coarse;
  Net fine = farthest_point_net(coarse.model, r, seed, options, &coarse.points);
  return fine;
}

Net interpolate_net(const Net& coarse, const Net& fine, std::size_t target) {
  if (!(coarse.model == fine.model)) throw InputError("interpolate_net: nets live on different models");
  if (target < coarse.size() || target > fine.size()) {
    throw InputError("interpolate_net: target " + std::to_string(target) + " outside [" +
                     std::to_string(coarse.size()) + ", " + std::to_string(fine.size()) + "]");
  }
  if (target == coarse.size()) return coarse;
  if (target == fine.size()) return fine;

  PointIndex fine_index(fine.model, fine.points, std::max(fine.separation, 1e-4));
  std::vector<bool> in_coarse(fine.size(), false);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    double d = 0.0;
    const auto j = fine_index.nearest(coarse.points[i], &d);
    if (d > 1e-12) throw InputError("interpolate_net: coarse point " + std::to_string(i) + " is not in the fine net");
    in_coarse[j] = true;
  }
  Net out = coarse;
  out.separation = fine.separation;
  out.density_radius = coarse.density_radius;
  out.candidate_count = fine.candidate_count;
  out.resolution = std::max(coarse.resolution, fine.resolution);
  for (std::size_t j = 0; j < fine.size() && out.size() < target; ++j) {
    if (!in_coarse[j]) out.points.push_back(fine.points[j]);
  }
  return out;
}

Partition voronoi_partition(const Net& net, std::size_t n_samples, std::uint64_t seed) {
  if (net.size() == 0) throw InputError("voronoi_partition: empty net");
  if (n_samples < 100 * net.size()) {
    throw InputError("voronoi_partition: need at least 100 samples per region (" +
                     std::to_string(100 * net.size()) + "), got " + std::to_string(n_samples));
  }
  Partition part;
  part.net = net;
  part.n_samples = n_samples;
  part.seed = seed;
  part.samples = haar_sample(net.model, n_samples, seed);
  part.assignment.resize(n_samples);
  part.counts.assign(net.size(), 0);

  const double cell = net.degenerate ? net.model.diameter() : std::max(net.separation, 1e-4);
  PointIndex index(net.model, net.points, cell);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const auto region = index.nearest(part.samples[i]);
    part.assignment[i] = region;
    ++part.counts[region];
  }
  for (std::size_t k = 0; k < part.counts.size(); ++k) {
    if (part.counts[k] == 0) {
      throw PreconditionError("voronoi_partition: region " + std::to_string(k) + " received no samples");
    }
  }
  part.measures.resize(net.size());
  for (std::size_t k = 0; k < net.size(); ++k) {
    part.measures[k] = static_cast<double>(part.counts[k]) / static_cast<double>(n_samples);
  }
  const auto [lo, hi] = std::minmax_element(part.measures.begin(), part.measures.end());
  part.Q = *hi / *lo;

  // Mesh from pairs among the first few samples of each region.
  std::vector<std::vector<std::uint32_t>> members(net.size());
  for (std::size_t i = 0; i < n_samples; ++i) {
    auto& m = members[part.assignment[i]];
    if (m.size() < kMeshSamplesPerRegion) m.push_back(static_cast<std::uint32_t>(i));
  }
  double mesh = 0.0;
  for (const auto& m : members) {
    for (std::size_t a = 0; a < m.size(); ++a)
      for (std::size_t b = a + 1; b < m.size(); ++b)
        mesh = std::max(mesh, geo_dist(net.model, part.samples[m[a]], part.samples[m[b]]));
  }
  part.mesh = mesh;
  return part;
}

void write_net_csv(std::ostream& os, const Net& net) { write_points_csv(os, net.points); }

void write_partition_csv(std::ostream& os, const Partition& partition) {
  os << "region,measure,samples\n";
  const auto old = os.precision(17);
  for (std::size_t k = 0; k < partition.size(); ++k) {
    os << k << ',' << partition.measures[k] << ',' << partition.counts[k] << '\n';
  }
  os.precision(old);
}

nlohmann::json partition_summary(const Partition& partition) {
  return {
      {"size", partition.size()},
      {"r", partition.net.separation},
      {"R", partition.net.density_radius},
      {"mesh", partition.mesh},
      {"Q", partition.Q},
      {"n_samples", partition.n_samples},
      {"seed", partition.seed},
      {"net_seed", partition.net.seed},
      {"model", partition.net.model.name()},
  };
}

}  // namespace warpcone
