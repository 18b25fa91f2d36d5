#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <mutex>
#include <vector>

#include "warpcone/group.hpp"
#include "warpcone/manifold.hpp"
#include "warpcone/net.hpp"

namespace warpcone {

// Isometric action of a finitely generated group on a model manifold. Copies share one lazily
// grown word ball.
class ActionSpec {
 public:
  ActionSpec() = default;
  // Throws InputError unless every generator acts isometrically on the model.
  ActionSpec(ManifoldModel model, GeneratorSet gens, std::size_t ball_cap = kDefaultBallCap);

  const ManifoldModel& model() const noexcept { return model_; }
  const GeneratorSet& gens() const noexcept { return gens_; }
  std::size_t ball_cap() const noexcept { return cache_->cap; }

  // B_Gamma(r), grown on demand and kept; throws ResourceError past the cap.
  const GroupBall& ball(std::uint32_t r) const;
  // Largest radius already enumerated.
  std::uint32_t cached_radius() const;

 private:
  struct Cache {
    std::mutex mutex;
    GroupBall ball;
    std::size_t cap = kDefaultBallCap;
  };
  ManifoldModel model_;
  GeneratorSet gens_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

// The t-level (M, rho_t) of the warped cone.
struct WarpedLevel {
  ActionSpec action;
  double t = 1.0;

  WarpedLevel() = default;
  WarpedLevel(ActionSpec a, double scale);  // throws InputError for t < 1
};

struct WarpedDistance {
  double value = 0.0;
  double metric_part = 0.0;  // t * d(x, gamma y)
  std::uint32_t word_length = 0;
  Word witness;              // gamma
  std::size_t ball_index = 0;
  std::uint32_t radius_searched = 0;
};

// rho_t(x, y) = min over gamma of t d(x, gamma y) + |gamma|, by iterative deepening over word balls.
// Ties go to the element found first in BFS order. Throws ResourceError (upper bound = best value
// found so far) when the ball cap is hit before the search is complete.
WarpedDistance warped_dist_exact(const WarpedLevel& level, std::span<const double> x, std::span<const double> y);

// Auxiliary weighted graph on a net approximating rho_t: metric edges t d(p, q) for d <= 3R and
// warp edges of weight 1 from p to the net point nearest s p.
class WarpedGraph {
 public:
  WarpedGraph(const WarpedLevel& level, const Net& net);

  std::size_t vertex_count() const noexcept { return offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const Net& net() const noexcept { return net_; }
  double t() const noexcept { return t_; }

  // Shortest-path distances from source to every vertex; unreachable vertices are +inf.
  std::vector<double> distances_from(std::size_t source) const;
  double distance(std::size_t u, std::size_t v) const;
  // Net point nearest to an arbitrary point.
  std::size_t snap(std::span<const double> p) const;

  // "u v weight" per undirected edge, u < v, sorted, 9 decimals.
  void write_edge_list(std::ostream& os) const;

  struct Edge {
    std::uint32_t u = 0, v = 0;
    double weight = 0.0;
  };
  const std::vector<Edge>& edges() const noexcept { return edges_; }

 private:
  Net net_;
  double t_ = 1.0;
  std::vector<Edge> edges_;  // undirected, u < v, minimum weight per pair
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> targets_;
  std::vector<double> weights_;
  std::shared_ptr<const class PointIndex> index_;
};

// Realizes N_rho(Y, r) inside B_Gamma(r) . N_d(Y, r/t) and checks it on sampled points of the
// warped neighborhood.
struct NeighborhoodCover {
  std::uint32_t ball_radius = 0;    // floor(r)
  std::size_t ball_size = 0;        // |B_Gamma(r)|
  double metric_radius = 0.0;       // r / t
  std::size_t samples = 0;
  std::size_t verified = 0;
  std::vector<std::size_t> failures;  // indices of sampled points not covered
  PointCloud sampled_points;

  bool all_verified() const noexcept { return verified == samples; }
};

NeighborhoodCover neighborhood_cover(const WarpedLevel& level, const PointCloud& Y, double r, std::size_t samples,
                                     std::uint64_t seed);

}  // namespace warpcone
