#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "warpcone/rational_matrix.hpp"

namespace warpcone {

enum class ManifoldKind { Sphere, Torus, RotationGroup3 };

// Compact model manifold with its normalized (probability) invariant measure.
//   sphere:d  unit sphere S^{d-1} in R^d, points are unit vectors, acted on by SO(d)
//   torus:d   flat torus (R / 2 pi Z)^d, points are angles in [0, 2 pi), acted on by signed permutations
//   so3       SO(3) as unit quaternions with the bi-invariant metric 2 arccos|<p,q>|, acted on by left
//             multiplication of 3x3 rotations
class ManifoldModel {
 public:
  ManifoldModel() = default;

  static ManifoldModel sphere(std::size_t ambient_dim);
  static ManifoldModel torus(std::size_t dim);
  static ManifoldModel rotation_group3();
  static ManifoldModel parse(std::string_view spec);

  ManifoldKind kind() const noexcept { return kind_; }
  std::size_t coord_dim() const noexcept;   // length of a point's coordinate vector
  std::size_t dimension() const noexcept;   // manifold dimension m
  std::size_t action_dim() const noexcept;  // size of the matrices acting on it
  double diameter() const noexcept;
  double riemannian_volume() const;         // total volume before normalization
  std::string name() const;

  friend bool operator==(const ManifoldModel& a, const ManifoldModel& b) {
    return a.kind_ == b.kind_ && a.d_ == b.d_;
  }

 private:
  ManifoldModel(ManifoldKind kind, std::size_t d) : kind_(kind), d_(d) {}

  ManifoldKind kind_ = ManifoldKind::Sphere;
  std::size_t d_ = 3;
};

using Point = std::vector<double>;

// Flat storage for many points of one model.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const noexcept { return data_.empty(); }
  std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> mutable_point(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  Point point(std::size_t i) const {
    auto p = (*this)[i];
    return {p.begin(), p.end()};
  }
  void push_back(std::span<const double> p);
  void reserve(std::size_t n) { data_.reserve(n * dim_); }
  const std::vector<double>& raw() const noexcept { return data_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

// Throws InputError when p is not a valid point of the model (wrong length, not normalized to 1e-12).
void validate_point(const ManifoldModel& model, std::span<const double> p);

double geo_dist(const ManifoldModel& model, std::span<const double> p, std::span<const double> q);

// Checks whether an exact matrix acts isometrically on the model (special orthogonal for sphere/so3,
// signed permutation for the torus) and has the right size.
bool acts_isometrically(const ManifoldModel& model, const RationalMatrix& g);

// Image of p under the row-major matrix g (action_dim x action_dim); writes into out.
void apply_numeric(const ManifoldModel& model, std::span<const double> g, std::span<const double> p,
                   std::span<double> out);
Point apply(const RationalMatrix& g, std::span<const double> p, const ManifoldModel& model);

// n independent draws from the invariant probability measure; deterministic in seed.
PointCloud haar_sample(const ManifoldModel& model, std::size_t n, std::uint64_t seed);

// Point at geodesic distance `distance` (clamped to the diameter) from p in a uniformly random direction.
Point move_random(const ManifoldModel& model, std::span<const double> p, double distance, std::mt19937_64& rng);

// Normalized volume of a metric ball of radius r (the models are homogeneous).
double ball_volume_fraction(const ManifoldModel& model, double r);
// Smallest radius whose ball has at least the given normalized volume.
double radius_for_volume(const ManifoldModel& model, double fraction);

struct VolumeBounds {
  double radius = 0.0;
  double kappa = 1.0;
  double v_lower = 0.0;   // minimum ball volume at radius
  double V_upper = 0.0;   // maximum ball volume at radius
  double comparison_constant = 1.0;  // C(kappa) with V(kappa r) <= C v(r)
  bool degenerate = false;           // radius >= diameter
};

VolumeBounds ball_volume_bounds(const ManifoldModel& model, double r, double kappa = 2.0);

// "index,x0,x1,..." with a header row.
void write_points_csv(std::ostream& os, const PointCloud& points);

}  // namespace warpcone
