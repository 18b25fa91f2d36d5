#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "doctest.h"

#include "warpcone/errors.hpp"
#include "warpcone/net.hpp"

using namespace warpcone;

namespace {

double min_pairwise(const Net& net) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = i + 1; j < net.size(); ++j) best = std::min(best, geo_dist(net.model, net.points[i], net.points[j]));
  return best;
}

double covering_radius(const Net& net, const PointCloud& samples) {
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < net.size(); ++j) best = std::min(best, geo_dist(net.model, samples[i], net.points[j]));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_CASE("net examples") {
  const auto s1 = ManifoldModel::sphere(2);
  const auto four = build_net(s1, std::numbers::pi / 2, 3);
  CHECK(four.size() == 4);
  CHECK(min_pairwise(four) >= std::numbers::pi / 2 - 1e-9);
  for (const auto& model : {s1, ManifoldModel::sphere(3), ManifoldModel::torus(2), ManifoldModel::rotation_group3()}) {
    const auto one = build_net(model, model.diameter() + 0.5, 1);
    CHECK(one.size() == 1);
    CHECK(one.degenerate);
  }
  const auto s2 = ManifoldModel::sphere(3);
  const auto net = build_net(s2, 0.2, 5);
  CHECK(static_cast<double>(net.size()) >= 1.0 / ball_volume_fraction(s2, 0.2));
  CHECK(static_cast<double>(net.size()) <= 1.0 / ball_volume_fraction(s2, 0.1));
  CHECK_THROWS_AS(build_net(s2, 0.0, 1), InputError);
}

TEST_CASE("nets are separated, dense and satisfy the counting sandwich") {
  struct Case {
    ManifoldModel model;
    double r;
  };
  for (const auto& c : {Case{ManifoldModel::sphere(2), 0.05}, Case{ManifoldModel::sphere(3), 0.15},
                        Case{ManifoldModel::torus(2), 0.3}, Case{ManifoldModel::rotation_group3(), 0.5},
                        Case{ManifoldModel::sphere(5), 0.8}}) {
    const auto net = build_net(c.model, c.r, 11);
    CHECK(net.separation == c.r);
    CHECK(net.density_radius == c.r);
    CHECK(min_pairwise(net) >= c.r - 1e-9);
    const auto fresh = haar_sample(c.model, 10000, 99);
    CHECK(covering_radius(net, fresh) <= net.density_radius + net.resolution);
    CHECK(ball_volume_fraction(c.model, c.r / 2) * static_cast<double>(net.size()) <= 1.0 + 1e-12);
    CHECK(ball_volume_fraction(c.model, net.density_radius) * static_cast<double>(net.size()) >= 1.0 - 1e-12);
  }
}

TEST_CASE("nets are deterministic in the seed") {
  const auto s2 = ManifoldModel::sphere(3);
  CHECK(build_net(s2, 0.3, 4).points.raw() == build_net(s2, 0.3, 4).points.raw());
}

TEST_CASE("voronoi partition examples") {
  const auto s1 = ManifoldModel::sphere(2);
  const auto one = build_net(s1, 10.0, 1);
  const auto p1 = voronoi_partition(one, 100, 2);
  CHECK(p1.size() == 1);
  CHECK(p1.measures[0] == 1.0);
  CHECK(p1.Q == 1.0);

  const auto four = build_net(s1, std::numbers::pi / 2, 3);
  const auto p4 = voronoi_partition(four, 100000, 4);
  double total = 0;
  for (double m : p4.measures) {
    CHECK(m == doctest::Approx(0.25).epsilon(0.03));
    total += m;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p4.Q >= 1.0);
  CHECK(p4.Q < 1.1);
  CHECK(p4.mesh == doctest::Approx(std::numbers::pi / 2).epsilon(0.05));
  CHECK(p4.mesh <= 2 * four.density_radius);
  CHECK(std::accumulate(p4.counts.begin(), p4.counts.end(), std::size_t{0}) == 100000);
  CHECK_THROWS_AS(voronoi_partition(four, 399, 4), InputError);
}

TEST_CASE("partition properties on S2") {
  const auto s2 = ManifoldModel::sphere(3);
  const auto net = build_net(s2, 0.25, 8);
  const auto part = voronoi_partition(net, 100 * net.size(), 9);
  double total = 0;
  for (double m : part.measures) total += m;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::isfinite(part.Q));
  CHECK(part.mesh <= 2 * (net.density_radius + net.resolution));
  for (std::size_t i = 0; i < 500; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < net.size(); ++j) {
      const double d = geo_dist(s2, part.samples[i], net.points[j]);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    CHECK(part.assignment[i] == arg);
  }
}

TEST_CASE("empty region is reported by index") {
  Net net = build_net(ManifoldModel::sphere(2), std::numbers::pi / 2, 3);
  net.points.push_back(net.points[0]);  // duplicate: ties go to the lower index
  try {
    voronoi_partition(net, 1000, 1);
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("region 4") != std::string::npos);
  }
}

TEST_CASE("interpolation between nested nets") {
  const auto s2 = ManifoldModel::sphere(3);
  const auto coarse = build_net(s2, 0.4, 21);
  const auto fine = extend_net(coarse, 0.2, 22);
  REQUIRE(fine.size() > coarse.size());
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    CHECK(std::equal(coarse.points[i].begin(), coarse.points[i].end(), fine.points[i].begin()));
  }
  CHECK(interpolate_net(coarse, fine, coarse.size()).points.raw() == coarse.points.raw());
  CHECK(interpolate_net(coarse, fine, fine.size()).points.raw() == fine.points.raw());
  const std::size_t mid = (coarse.size() + fine.size() + 1) / 2;
  const auto between = interpolate_net(coarse, fine, mid);
  CHECK(between.size() == mid);
  CHECK(min_pairwise(between) >= 0.2 - 1e-9);
  CHECK_THROWS_AS(interpolate_net(coarse, fine, fine.size() + 1), InputError);
  CHECK_THROWS_AS(interpolate_net(coarse, fine, coarse.size() - 1), InputError);
  const auto other = build_net(s2, 0.4, 77);
  CHECK_THROWS_AS(interpolate_net(other, fine, mid), InputError);
  CHECK_THROWS_AS(extend_net(fine, 0.4, 1), InputError);
}

TEST_CASE("net and partition serialization") {
  const auto net = build_net(ManifoldModel::sphere(2), std::numbers::pi / 2, 3);
  const auto part = voronoi_partition(net, 1000, 4);
  std::ostringstream a, b;
  write_net_csv(a, net);
  write_partition_csv(b, part);
  const std::string text = a.str();
  CHECK(text.rfind("index,x0,x1\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  CHECK(b.str().rfind("region,measure,samples\n", 0) == 0);
  const auto j = partition_summary(part);
  for (const char* key : {"size", "r", "R", "mesh", "Q", "n_samples", "seed"}) CHECK(j.contains(key));
  CHECK(j["size"] == 4);
}
