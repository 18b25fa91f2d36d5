#include "warpcone/manifold.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include <boost/math/special_functions/beta.hpp>

#include "warpcone/errors.hpp"

namespace warpcone {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Angle between unit vectors, accurate at both ends (unlike acos of the dot product).
double unit_angle(std::span<const double> p, std::span<const double> q) {
  double minus = 0.0;
  double plus = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = p[i] - q[i];
    const double b = p[i] + q[i];
    minus += a * a;
    plus += b * b;
  }
  return 2.0 * std::atan2(std::sqrt(minus), std::sqrt(plus));
}

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

std::array<double, 4> rotation_to_quaternion(std::span<const double> m) {
  const double m00 = m[0], m01 = m[1], m02 = m[2];
  const double m10 = m[3], m11 = m[4], m12 = m[5];
  const double m20 = m[6], m21 = m[7], m22 = m[8];
  const double tr = m00 + m11 + m22;
  std::array<double, 4> q{};
  if (tr > 0.0) {
    const double s = std::sqrt(tr + 1.0) * 2.0;
    q = {0.25 * s, (m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s};
  } else if (m00 > m11 && m00 > m22) {
    const double s = std::sqrt(1.0 + m00 - m11 - m22) * 2.0;
    q = {(m21 - m12) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s};
  } else if (m11 > m22) {
    const double s = std::sqrt(1.0 + m11 - m00 - m22) * 2.0;
    q = {(m02 - m20) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s};
  } else {
    const double s = std::sqrt(1.0 + m22 - m00 - m11) * 2.0;
    q = {(m10 - m01) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s};
  }
  return q;
}

void normalize(std::span<double> v) {
  double n = std::sqrt(dot(v, v));
  for (auto& x : v) x /= n;
}

double sphere_cap_fraction(std::size_t m, double r) {
  // Normalized area of a geodesic cap of radius r on S^m.
  if (r <= 0.0) return 0.0;
  if (r >= kPi) return 1.0;
  if (m == 1) return r / kPi;
  if (m == 2) return 0.5 * (1.0 - std::cos(r));
  if (r > 0.5 * kPi) return 1.0 - sphere_cap_fraction(m, kPi - r);
  const double s = std::sin(r);
  return 0.5 * boost::math::ibeta(0.5 * static_cast<double>(m), 0.5, s * s);
}

double torus_ball_fraction(std::size_t d, double r) {
  if (r <= 0.0) return 0.0;
  const double diam = kPi * std::sqrt(static_cast<double>(d));
  if (r >= diam) return 1.0;
  if (r <= kPi) {
    const double dd = static_cast<double>(d);
    const double unit_ball = std::pow(kPi, 0.5 * dd) / std::tgamma(0.5 * dd + 1.0);
    return unit_ball * std::pow(r / kTwoPi, dd);
  }
  if (d == 2) {
    // Disk of radius r clipped to the fundamental square [-pi, pi]^2.
    const double area = r * r * (kPi - 4.0 * std::acos(kPi / r)) + 4.0 * kPi * std::sqrt(r * r - kPi * kPi);
    return area / (kTwoPi * kTwoPi);
  }
  // No elementary form once the ball wraps in d >= 3; fixed-seed quadrature by sampling.
  std::mt19937_64 rng(0x5eed5eedULL + d);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  constexpr std::size_t kDraws = 400000;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < kDraws; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double x = u(rng);
      s += x * x;
    }
    if (s <= r * r) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(kDraws);
}

}  // namespace

ManifoldModel ManifoldModel::sphere(std::size_t ambient_dim) {
  if (ambient_dim < 2) throw InputError("sphere requires ambient dimension d >= 2");
  return {ManifoldKind::Sphere, ambient_dim};
}

ManifoldModel ManifoldModel::torus(std::size_t dim) {
  if (dim < 1) throw InputError("torus requires dimension >= 1");
  return {ManifoldKind::Torus, dim};
}

ManifoldModel ManifoldModel::rotation_group3() { return {ManifoldKind::RotationGroup3, 3}; }

ManifoldModel ManifoldModel::parse(std::string_view spec) {
  auto number = [&](std::string_view rest) -> std::size_t {
    std::size_t value = 0;
    if (rest.empty()) throw InputError("missing dimension in model '" + std::string(spec) + "'");
    for (char c : rest) {
      if (c < '0' || c > '9') throw InputError("bad dimension in model '" + std::string(spec) + "'");
      value = value * 10 + static_cast<std::size_t>(c - '0');
      if (value > 64) throw InputError("dimension too large in model '" + std::string(spec) + "'");
    }
    return value;
  };
  if (spec == "so3") return rotation_group3();
  if (spec.rfind("sphere:", 0) == 0) return sphere(number(spec.substr(7)));
  if (spec.rfind("torus:", 0) == 0) return torus(number(spec.substr(6)));
  throw InputError("unknown model '" + std::string(spec) + "' (expected sphere:d, torus:d or so3)");
}

std::size_t ManifoldModel::coord_dim() const noexcept {
  return kind_ == ManifoldKind::RotationGroup3 ? 4 : d_;
}

std::size_t ManifoldModel::dimension() const noexcept {
  switch (kind_) {
    case ManifoldKind::Sphere: return d_ - 1;
    case ManifoldKind::Torus: return d_;
    case ManifoldKind::RotationGroup3: return 3;
  }
  return 0;
}

std::size_t ManifoldModel::action_dim() const noexcept {
  return kind_ == ManifoldKind::RotationGroup3 ? 3 : d_;
}

double ManifoldModel::diameter() const noexcept {
  if (kind_ == ManifoldKind::Torus) return kPi * std::sqrt(static_cast<double>(d_));
  return kPi;
}

double ManifoldModel::riemannian_volume() const {
  switch (kind_) {
    case ManifoldKind::Sphere: {
      const double d = static_cast<double>(d_);
      return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
    }
    case ManifoldKind::Torus: return std::pow(kTwoPi, static_cast<double>(d_));
    case ManifoldKind::RotationGroup3: return 8.0 * kPi * kPi;
  }
  return 0.0;
}

std::string ManifoldModel::name() const {
  switch (kind_) {
    case ManifoldKind::Sphere: return "sphere:" + std::to_string(d_);
    case ManifoldKind::Torus: return "torus:" + std::to_string(d_);
    case ManifoldKind::RotationGroup3: return "so3";
  }
  return "?";
}

void PointCloud::push_back(std::span<const double> p) {
  if (p.size() != dim_) throw InputError("point dimension mismatch");
  data_.insert(data_.end(), p.begin(), p.end());
}

void validate_point(const ManifoldModel& model, std::span<const double> p) {
  if (p.size() != model.coord_dim()) {
    throw InputError("point has " + std::to_string(p.size()) + " coordinates, model " + model.name() +
                     " needs " + std::to_string(model.coord_dim()));
  }
  if (model.kind() == ManifoldKind::Torus) {
    for (double a : p) {
      if (!(a >= 0.0 && a < kTwoPi)) throw InputError("torus angle outside [0, 2 pi)");
    }
    return;
  }
  if (std::abs(std::sqrt(dot(p, p)) - 1.0) > 1e-12) throw InputError("point is not a unit vector");
}

double geo_dist(const ManifoldModel& model, std::span<const double> p, std::span<const double> q) {
  if (p.size() != model.coord_dim() || q.size() != model.coord_dim()) {
    throw InputError("geo_dist: point dimension does not match " + model.name());
  }
  switch (model.kind()) {
    case ManifoldKind::Sphere: return unit_angle(p, q);
    case ManifoldKind::Torus: {
      double s = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        double diff = std::abs(p[i] - q[i]);
        diff = std::fmod(diff, kTwoPi);
        diff = std::min(diff, kTwoPi - diff);
        s += diff * diff;
      }
      return std::sqrt(s);
    }
    case ManifoldKind::RotationGroup3: {
      const double half = unit_angle(p, q);
      return 2.0 * std::min(half, kPi - half);
    }
  }
  return 0.0;
}

bool acts_isometrically(const ManifoldModel& model, const RationalMatrix& g) {
  if (g.dim() != model.action_dim()) return false;
  if (model.kind() != ManifoldKind::Torus) return verify_special_orthogonal(g);
  const std::size_t n = g.dim();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t row_nonzero = 0;
    std::size_t col_nonzero = 0;
    for (std::size_t j = 0; j < n; ++j) {
      for (const Rational5* e : {&g(i, j), &g(j, i)}) {
        if (e->is_zero()) continue;
        if (!(*e == Rational5(1)) && !(*e == Rational5(-1))) return false;
      }
      row_nonzero += g(i, j).is_zero() ? 0 : 1;
      col_nonzero += g(j, i).is_zero() ? 0 : 1;
    }
    if (row_nonzero != 1 || col_nonzero != 1) return false;
  }
  return true;
}

void apply_numeric(const ManifoldModel& model, std::span<const double> g, std::span<const double> p,
                   std::span<double> out) {
  const std::size_t n = model.action_dim();
  if (g.size() != n * n || p.size() != model.coord_dim() || out.size() != model.coord_dim()) {
    throw InputError("apply: dimension mismatch for " + model.name());
  }
  switch (model.kind()) {
    case ManifoldKind::Sphere: {
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * p[j];
        out[i] = s;
      }
      normalize(out);
      return;
    }
    case ManifoldKind::Torus: {
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * p[j];
        out[i] = wrap_angle(s);
      }
      return;
    }
    case ManifoldKind::RotationGroup3: {
      const auto a = rotation_to_quaternion(g);
      const double w = a[0] * p[0] - a[1] * p[1] - a[2] * p[2] - a[3] * p[3];
      const double x = a[0] * p[1] + a[1] * p[0] + a[2] * p[3] - a[3] * p[2];
      const double y = a[0] * p[2] - a[1] * p[3] + a[2] * p[0] + a[3] * p[1];
      const double z = a[0] * p[3] + a[1] * p[2] - a[2] * p[1] + a[3] * p[0];
      out[0] = w;
      out[1] = x;
      out[2] = y;
      out[3] = z;
      normalize(out);
      return;
    }
  }
}

Point apply(const RationalMatrix& g, std::span<const double> p, const ManifoldModel& model) {
  if (g.dim() != model.action_dim()) {
    throw InputError("apply: matrix of dimension " + std::to_string(g.dim()) + " cannot act on " + model.name());
  }
  Point out(model.coord_dim());
  const auto values = g.to_double();
  apply_numeric(model, values, p, out);
  return out;
}

PointCloud haar_sample(const ManifoldModel& model, std::size_t n, std::uint64_t seed) {
  PointCloud cloud(model.coord_dim());
  cloud.reserve(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  Point p(model.coord_dim());
  for (std::size_t i = 0; i < n; ++i) {
    if (model.kind() == ManifoldKind::Torus) {
      for (auto& a : p) a = wrap_angle(angle(rng));
    } else {
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (auto& x : p) {
          x = gauss(rng);
          norm2 += x * x;
        }
      } while (norm2 < 1e-24);
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& x : p) x *= inv;
    }
    cloud.push_back(p);
  }
  return cloud;
}

Point move_random(const ManifoldModel& model, std::span<const double> p, double distance, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double a = std::clamp(distance, 0.0, model.diameter());
  Point q(p.begin(), p.end());
  switch (model.kind()) {
    case ManifoldKind::Torus: {
      Point v(q.size());
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (auto& x : v) {
          x = gauss(rng);
          norm2 += x * x;
        }
      } while (norm2 < 1e-24);
      const double scale = a / std::sqrt(norm2);
      for (std::size_t k = 0; k < q.size(); ++k) q[k] = wrap_angle(q[k] + scale * v[k]);
      return q;
    }
    case ManifoldKind::Sphere: {
      // Unit tangent direction at p, then along the great circle.
      Point v(q.size());
      double norm2 = 0.0;
      do {
        double dot = 0.0;
        for (auto& x : v) x = gauss(rng);
        for (std::size_t k = 0; k < q.size(); ++k) dot += v[k] * p[k];
        norm2 = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) {
          v[k] -= dot * p[k];
          norm2 += v[k] * v[k];
        }
      } while (norm2 < 1e-24);
      const double inv = 1.0 / std::sqrt(norm2);
      for (std::size_t k = 0; k < q.size(); ++k) q[k] = std::cos(a) * p[k] + std::sin(a) * inv * v[k];
      return q;
    }
    case ManifoldKind::RotationGroup3: {
      // Left multiplication by a rotation of angle a about a random axis.
      std::array<double, 3> axis{};
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (auto& x : axis) {
          x = gauss(rng);
          norm2 += x * x;
        }
      } while (norm2 < 1e-24);
      const double inv = 1.0 / std::sqrt(norm2);
      const double w = std::cos(0.5 * a);
      const double s = std::sin(0.5 * a) * inv;
      const double x = s * axis[0], y = s * axis[1], z = s * axis[2];
      q[0] = w * p[0] - x * p[1] - y * p[2] - z * p[3];
      q[1] = w * p[1] + x * p[0] + y * p[3] - z * p[2];
      q[2] = w * p[2] - x * p[3] + y * p[0] + z * p[1];
      q[3] = w * p[3] + x * p[2] - y * p[1] + z * p[0];
      return q;
    }
  }
  return q;
}

double ball_volume_fraction(const ManifoldModel& model, double r) {
  switch (model.kind()) {
    case ManifoldKind::Sphere: return sphere_cap_fraction(model.dimension(), r);
    case ManifoldKind::Torus: return torus_ball_fraction(model.dimension(), r);
    case ManifoldKind::RotationGroup3:
      // Haar law of the rotation angle has density (1 - cos a) / pi on [0, pi].
      if (r <= 0.0) return 0.0;
      if (r >= kPi) return 1.0;
      return (r - std::sin(r)) / kPi;
  }
  return 0.0;
}

double radius_for_volume(const ManifoldModel& model, double fraction) {
  if (fraction <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = model.diameter();
  if (fraction >= 1.0) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ball_volume_fraction(model, mid) >= fraction) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

VolumeBounds ball_volume_bounds(const ManifoldModel& model, double r, double kappa) {
  if (!(r > 0.0)) throw InputError("ball_volume_bounds: radius must be positive");
  if (!(kappa >= 1.0)) throw InputError("ball_volume_bounds: kappa must be >= 1");
  VolumeBounds b;
  b.radius = r;
  b.kappa = kappa;
  if (r >= model.diameter()) {
    b.v_lower = b.V_upper = 1.0;
    b.comparison_constant = 1.0;
    b.degenerate = true;
    return b;
  }
  // Homogeneous models: every ball of a given radius has the same volume.
  b.v_lower = b.V_upper = ball_volume_fraction(model, r);
  const double big = ball_volume_fraction(model, kappa * r);
  double c = big / b.v_lower;
  while (c * b.v_lower < big) c = std::nextafter(c, std::numeric_limits<double>::infinity());
  b.comparison_constant = std::max(1.0, c);
  return b;
}

void write_points_csv(std::ostream& os, const PointCloud& points) {
  os << "index";
  for (std::size_t k = 0; k < points.dim(); ++k) os << ",x" << k;
  os << '\n';
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < points.size(); ++i) {
    os << i;
    for (double x : points[i]) os << ',' << x;
    os << '\n';
  }
  os.precision(old);
}

}  // namespace warpcone
