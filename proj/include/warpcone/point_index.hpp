#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "warpcone/manifold.hpp"

namespace warpcone {

// Uniform grid over an ambient embedding of a model manifold, used for radius and nearest-point
// queries. Spheres use their unit vectors, SO(3) stores both quaternion signs, tori use a periodic
// grid on the angles. Points are copied at construction.
class PointIndex {
 public:
  PointIndex(const ManifoldModel& model, const PointCloud& points, double cell_size);

  std::size_t size() const noexcept { return count_; }

  // Indices of all points within geodesic distance `radius` of center, plus possibly a few
  // just outside (ambient chord slack); callers needing exactness filter with geo_dist.
  void within(std::span<const double> center, double radius, std::vector<std::uint32_t>& out) const;

  // Nearest point by geodesic distance, ties to the lowest index. Requires a nonempty index.
  std::uint32_t nearest(std::span<const double> q, double* distance = nullptr) const;

 private:
  static constexpr std::size_t kMaxGridDim = 8;
  using Key = std::array<std::int32_t, kMaxGridDim>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::size_t h = 1469598103934665603ULL;
      for (auto v : k) h = (h ^ static_cast<std::uint32_t>(v)) * 1099511628211ULL;
      return h;
    }
  };

  Key key_of(std::span<const double> ambient) const;
  double chord_of(double geodesic) const;
  void embed(std::span<const double> p, std::span<double> out) const;
  // Visits all (copy index) entries in cells within Chebyshev distance m of the query cell.
  template <class Visit>
  void visit_box(const Key& center, std::int64_t m, Visit&& visit) const;
  bool accept_copy(std::uint32_t copy, std::span<const double> ambient_query) const;
  double ambient_distance2(std::span<const double> a, std::size_t copy) const;

  ManifoldModel model_;
  std::size_t count_ = 0;
  std::size_t adim_ = 0;          // ambient coordinates per copy
  std::size_t copies_ = 1;        // 2 for SO(3)
  double cell_ = 1.0;
  std::int32_t periodic_cells_ = 0;  // torus cells per axis, 0 when not periodic
  std::vector<double> ambient_;   // (count * copies) x adim
  std::vector<double> coords_;    // original coordinates, count x coord_dim
  std::unordered_map<Key, std::vector<std::uint32_t>, KeyHash> cells_;
};

}  // namespace warpcone
