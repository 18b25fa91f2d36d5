#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "json.hpp"

#include "warpcone/manifold.hpp"

namespace warpcone {

struct NetOptions {
  // Candidate pool size is pool_factor * (upper bound on the net size), clamped to [min_pool, max_pool].
  double pool_factor = 50.0;
  std::size_t min_pool = 2048;
  std::size_t max_pool = 4'000'000;
};

// r-separated, R-dense point set. Points are in greedy insertion order.
struct Net {
  ManifoldModel model;
  PointCloud points;
  double separation = 0.0;      // r
  double density_radius = 0.0;  // R
  std::uint64_t seed = 0;
  bool degenerate = false;      // r >= diameter, single point
  std::size_t candidate_count = 0;
  double resolution = 0.0;      // covering radius of the candidate pool (density slack)

  std::size_t size() const noexcept { return points.size(); }
};

// Greedy farthest-point insertion over a uniform candidate pool until every candidate lies within r.
Net build_net(const ManifoldModel& model, double r, std::uint64_t seed, const NetOptions& options = {});

// Continues the greedy construction from an existing net at a smaller separation; the result
// starts with the coarse points in their original order.
Net extend_net(const Net& coarse, double r, std::uint64_t seed, const NetOptions& options = {});

// Net with exactly `target` points between coarse and fine (coarse must be a subset of fine).
Net interpolate_net(const Net& coarse, const Net& fine, std::size_t target);

// Voronoi regions of a net, measured by Haar samples.
struct Partition {
  Net net;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  PointCloud samples;
  std::vector<std::uint32_t> assignment;  // region of each sample
  std::vector<std::size_t> counts;        // samples per region
  std::vector<double> measures;           // counts / n_samples
  double mesh = 0.0;                      // max sampled intra-region distance
  double Q = 1.0;                         // max measure / min measure

  std::size_t size() const noexcept { return counts.size(); }
};

Partition voronoi_partition(const Net& net, std::size_t n_samples, std::uint64_t seed);

void write_net_csv(std::ostream& os, const Net& net);
void write_partition_csv(std::ostream& os, const Partition& partition);
nlohmann::json partition_summary(const Partition& partition);

}  // namespace warpcone
