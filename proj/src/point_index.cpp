#include "warpcone/point_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "warpcone/errors.hpp"

namespace warpcone {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

PointIndex::PointIndex(const ManifoldModel& model, const PointCloud& points, double cell_size)
    : model_(model), count_(points.size()), adim_(model.coord_dim()) {
  if (points.dim() != model.coord_dim()) throw InputError("point index: dimension mismatch");
  if (adim_ > kMaxGridDim) throw InputError("point index supports at most 8 coordinates");
  if (count_ > std::numeric_limits<std::uint32_t>::max() / 2) throw InputError("point index: too many points");
  copies_ = model.kind() == ManifoldKind::RotationGroup3 ? 2 : 1;
  cell_ = std::max(cell_size, 1e-6);
  if (model.kind() == ManifoldKind::Torus) {
    periodic_cells_ = std::max<std::int32_t>(1, static_cast<std::int32_t>(std::floor(kTwoPi / cell_)));
    cell_ = kTwoPi / periodic_cells_;
  } else {
    // Ambient coordinates lie in [-1, 1]; a coarser grid than that is pointless.
    cell_ = std::min(cell_, 2.0);
  }
  coords_ = points.raw();
  ambient_.resize(count_ * copies_ * adim_);
  for (std::size_t i = 0; i < count_; ++i) {
    auto p = points[i];
    for (std::size_t c = 0; c < copies_; ++c) {
      const double sign = c == 0 ? 1.0 : -1.0;
      double* dst = ambient_.data() + (i * copies_ + c) * adim_;
      for (std::size_t k = 0; k < adim_; ++k) dst[k] = sign * p[k];
      Key key = key_of({dst, adim_});
      cells_[key].push_back(static_cast<std::uint32_t>(i * copies_ + c));
    }
  }
}

PointIndex::Key PointIndex::key_of(std::span<const double> ambient) const {
  Key key{};
  for (std::size_t k = 0; k < adim_; ++k) {
    auto c = static_cast<std::int32_t>(std::floor(ambient[k] / cell_));
    if (periodic_cells_ > 0) c = ((c % periodic_cells_) + periodic_cells_) % periodic_cells_;
    key[k] = c;
  }
  return key;
}

double PointIndex::chord_of(double geodesic) const {
  switch (model_.kind()) {
    case ManifoldKind::Sphere: return 2.0 * std::sin(0.5 * std::min(geodesic, std::numbers::pi));
    case ManifoldKind::RotationGroup3: return 2.0 * std::sin(0.25 * std::min(geodesic, std::numbers::pi));
    case ManifoldKind::Torus: return geodesic;
  }
  return geodesic;
}

double PointIndex::ambient_distance2(std::span<const double> a, std::size_t copy) const {
  const double* p = ambient_.data() + copy * adim_;
  double s = 0.0;
  for (std::size_t k = 0; k < adim_; ++k) {
    double d = std::abs(a[k] - p[k]);
    if (periodic_cells_ > 0) {
      d = std::fmod(d, kTwoPi);
      d = std::min(d, kTwoPi - d);
    }
    s += d * d;
  }
  return s;
}

bool PointIndex::accept_copy(std::uint32_t copy, std::span<const double> ambient_query) const {
  if (copies_ == 1) return true;
  // Report each quaternion once, through the sign closest to the query.
  const double* p = ambient_.data() + static_cast<std::size_t>(copy) * adim_;
  double d = 0.0;
  for (std::size_t k = 0; k < adim_; ++k) d += p[k] * ambient_query[k];
  const bool positive_copy = copy % copies_ == 0;
  return d > 0.0 || (d == 0.0 && positive_copy);
}

template <class Visit>
void PointIndex::visit_box(const Key& center, std::int64_t m, Visit&& visit) const {
  std::array<std::vector<std::int32_t>, kMaxGridDim> axis;
  double box = 1.0;
  for (std::size_t k = 0; k < adim_; ++k) {
    if (periodic_cells_ > 0 && 2 * m + 1 >= periodic_cells_) {
      for (std::int32_t c = 0; c < periodic_cells_; ++c) axis[k].push_back(c);
    } else {
      for (std::int64_t o = -m; o <= m; ++o) {
        std::int64_t c = center[k] + o;
        if (periodic_cells_ > 0) c = ((c % periodic_cells_) + periodic_cells_) % periodic_cells_;
        axis[k].push_back(static_cast<std::int32_t>(c));
      }
    }
    box *= static_cast<double>(axis[k].size());
  }
  if (box >= static_cast<double>(cells_.size())) {
    // Scanning the occupied cells is cheaper than walking the box.
    for (const auto& [key, members] : cells_) {
      bool inside = true;
      for (std::size_t k = 0; k < adim_ && inside; ++k) {
        std::int64_t diff = std::abs(static_cast<std::int64_t>(key[k]) - center[k]);
        if (periodic_cells_ > 0) diff = std::min<std::int64_t>(diff, periodic_cells_ - diff);
        inside = diff <= m;
      }
      if (inside) {
        for (auto id : members) visit(id);
      }
    }
    return;
  }
  std::array<std::size_t, kMaxGridDim> pos{};
  Key key{};
  while (true) {
    for (std::size_t k = 0; k < adim_; ++k) key[k] = axis[k][pos[k]];
    auto it = cells_.find(key);
    if (it != cells_.end()) {
      for (auto id : it->second) visit(id);
    }
    std::size_t k = 0;
    for (; k < adim_; ++k) {
      if (++pos[k] < axis[k].size()) break;
      pos[k] = 0;
    }
    if (k == adim_) break;
  }
}

void PointIndex::within(std::span<const double> center, double radius, std::vector<std::uint32_t>& out) const {
  out.clear();
  if (count_ == 0) return;
  const double chord = chord_of(radius) * (1.0 + 1e-12) + 1e-15;
  const double chord2 = chord * chord;
  const auto m = static_cast<std::int64_t>(std::ceil(chord / cell_));
  const Key key = key_of(center);
  visit_box(key, m, [&](std::uint32_t copy) {
    if (!accept_copy(copy, center)) return;
    if (ambient_distance2(center, copy) <= chord2) out.push_back(copy / static_cast<std::uint32_t>(copies_));
  });
  std::sort(out.begin(), out.end());
}

std::uint32_t PointIndex::nearest(std::span<const double> q, double* distance) const {
  if (count_ == 0) throw InputError("nearest: empty index");
  const Key key = key_of(q);
  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_id = 0;
  auto consider = [&](std::uint32_t copy) {
    if (!accept_copy(copy, q)) return;
    const std::uint32_t id = copy / static_cast<std::uint32_t>(copies_);
    const double d = geo_dist(model_, q, {coords_.data() + static_cast<std::size_t>(id) * adim_, adim_});
    if (d < best || (d == best && id < best_id)) {
      best = d;
      best_id = id;
    }
  };
  for (std::int64_t m = 1;; m *= 2) {
    visit_box(key, m, consider);
    // Points outside the box are at ambient distance >= m * cell.
    const double reach = static_cast<double>(m) * cell_;
    const bool covers_all = periodic_cells_ > 0 ? 2 * m + 1 >= periodic_cells_ : reach > 2.0 + cell_;
    if (covers_all || (best < std::numeric_limits<double>::infinity() && chord_of(best) < reach)) break;
  }
  if (distance) *distance = best;
  return best_id;
}

}  // namespace warpcone
