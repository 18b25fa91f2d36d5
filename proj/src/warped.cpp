#include "warpcone/warped.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <queue>
#include <random>

#include "warpcone/errors.hpp"
#include "warpcone/point_index.hpp"

namespace warpcone {

ActionSpec::ActionSpec(ManifoldModel model, GeneratorSet gens, std::size_t ball_cap)
    : model_(std::move(model)), gens_(std::move(gens)) {
  if (!gens_.empty() && gens_.dim() != model_.action_dim()) {
    throw InputError("action: generators of dimension " + std::to_string(gens_.dim()) + " cannot act on " +
                     model_.name());
  }
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    if (!acts_isometrically(model_, gens_.matrix(i))) {
      throw InputError("action: generator " + gens_.label(i) + " is not an isometry of " + model_.name());
    }
  }
  cache_->cap = ball_cap;
  cache_->ball = GroupBall(gens_);
}

const GroupBall& ActionSpec::ball(std::uint32_t r) const {
  std::lock_guard lock(cache_->mutex);
  while (cache_->ball.radius() < r) cache_->ball.extend(gens_, cache_->cap);
  return cache_->ball;
}

std::uint32_t ActionSpec::cached_radius() const {
  std::lock_guard lock(cache_->mutex);
  return cache_->ball.radius();
}

WarpedLevel::WarpedLevel(ActionSpec a, double scale) : action(std::move(a)), t(scale) {
  if (!(t >= 1.0)) throw InputError("warped level: t must be at least 1");
}

WarpedDistance warped_dist_exact(const WarpedLevel& level, std::span<const double> x, std::span<const double> y) {
  const auto& model = level.action.model();
  validate_point(model, x);
  validate_point(model, y);
  WarpedDistance best;
  best.metric_part = level.t * geo_dist(model, x, y);
  best.value = best.metric_part;
  if (level.action.gens().empty()) return best;

  Point gy(model.coord_dim());
  for (std::uint32_t k = 1;; ++k) {
    // Every word of length >= k costs at least k.
    if (static_cast<double>(k) >= best.value) break;
    const GroupBall* ball = nullptr;
    try {
      ball = &level.action.ball(k);
    } catch (const ResourceError& e) {
      throw ResourceError(std::string("warped_dist_exact: ") + e.what() + "; best upper bound " +
                              std::to_string(best.value),
                          e.partial_count(), best.value);
    }
    best.radius_searched = k;
    if (ball->layer_begin(k) == ball->layer_end(k)) break;  // finite group exhausted
    for (std::size_t i = ball->layer_begin(k); i < ball->layer_end(k); ++i) {
      apply_numeric(model, ball->numeric(i), y, gy);
      const double metric = level.t * geo_dist(model, x, gy);
      const double value = metric + static_cast<double>(k);
      if (value < best.value) {
        best.value = value;
        best.metric_part = metric;
        best.word_length = k;
        best.ball_index = i;
      }
    }
  }
  if (best.word_length > 0) best.witness = level.action.ball(best.radius_searched)[best.ball_index].witness;
  return best;
}

WarpedGraph::WarpedGraph(const WarpedLevel& level, const Net& net) : net_(net), t_(level.t) {
  const auto& model = level.action.model();
  if (!(net.model == model)) throw InputError("warped graph: net lives on " + net.model.name());
  const std::size_t n = net.size();
  if (n == 0) throw InputError("warped graph: empty net");
  const double R = net.density_radius;
  index_ = std::make_shared<PointIndex>(model, net.points, net.degenerate ? model.diameter() : std::max(R, 1e-4));

  std::vector<Edge> raw;
  std::vector<std::uint32_t> near;
  for (std::size_t p = 0; p < n; ++p) {
    index_->within(net.points[p], 3.0 * R, near);
    for (auto q : near) {
      if (q <= p) continue;
      const double d = geo_dist(model, net.points[p], net.points[q]);
      if (d <= 3.0 * R) raw.push_back({static_cast<std::uint32_t>(p), q, t_ * d});
    }
  }
  const auto& gens = level.action.gens();
  Point sp(model.coord_dim());
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t s = 0; s < gens.size(); ++s) {
      apply_numeric(model, gens.numeric(s), net.points[p], sp);
      const auto q = index_->nearest(sp);
      if (q == p) continue;
      const auto a = static_cast<std::uint32_t>(std::min<std::size_t>(p, q));
      const auto b = static_cast<std::uint32_t>(std::max<std::size_t>(p, q));
      raw.push_back({a, b, 1.0});
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Edge& e, const Edge& f) {
    if (e.u != f.u) return e.u < f.u;
    if (e.v != f.v) return e.v < f.v;
    return e.weight < f.weight;
  });
  for (const auto& e : raw) {
    if (!edges_.empty() && edges_.back().u == e.u && edges_.back().v == e.v) continue;
    edges_.push_back(e);
  }

  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : edges_) {
    ++degree[e.u];
    ++degree[e.v];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  targets_.resize(offsets_[n]);
  weights_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    targets_[fill[e.u]] = e.v;
    weights_[fill[e.u]++] = e.weight;
    targets_[fill[e.v]] = e.u;
    weights_[fill[e.v]++] = e.weight;
  }
}

std::vector<double> WarpedGraph::distances_from(std::size_t source) const {
  const std::size_t n = vertex_count();
  if (source >= n) throw InputError("warped graph: source out of range");
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, static_cast<std::uint32_t>(source));
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (std::size_t k = offsets_[u]; k < offsets_[u + 1]; ++k) {
      const double nd = d + weights_[k];
      if (nd < dist[targets_[k]]) {
        dist[targets_[k]] = nd;
        heap.emplace(nd, targets_[k]);
      }
    }
  }
  return dist;
}

double WarpedGraph::distance(std::size_t u, std::size_t v) const { return distances_from(u).at(v); }

std::size_t WarpedGraph::snap(std::span<const double> p) const { return index_->nearest(p); }

void WarpedGraph::write_edge_list(std::ostream& os) const {
  char buf[64];
  for (const auto& e : edges_) {
    std::snprintf(buf, sizeof buf, "%u %u %.9f\n", e.u, e.v, e.weight);
    os << buf;
  }
}

NeighborhoodCover neighborhood_cover(const WarpedLevel& level, const PointCloud& Y, double r, std::size_t samples,
                                     std::uint64_t seed) {
  if (!(r >= 0.0)) throw InputError("neighborhood_cover: radius must be nonnegative");
  if (Y.empty()) throw InputError("neighborhood_cover: empty set");
  const auto& model = level.action.model();
  const auto& gens = level.action.gens();
  NeighborhoodCover cover;
  cover.ball_radius = gens.empty() ? 0 : static_cast<std::uint32_t>(std::floor(r));
  const GroupBall& ball = level.action.ball(cover.ball_radius);
  cover.ball_size = ball.layer_end(cover.ball_radius);
  cover.metric_radius = r / level.t;
  cover.samples = samples;
  cover.sampled_points = PointCloud(model.coord_dim());

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_y(0, Y.size() - 1);
  std::uniform_int_distribution<std::uint32_t> pick_len(0, cover.ball_radius);
  std::uniform_int_distribution<std::size_t> pick_gen(0, gens.empty() ? 0 : gens.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  PointIndex y_index(model, Y, std::max(cover.metric_radius, 1e-3));
  Point image(model.coord_dim());
  std::vector<std::uint32_t> near;
  for (std::size_t i = 0; i < samples; ++i) {
    // z = gamma w with d(y, w) <= (r - |gamma|) / t, so rho_t(y, z) <= r.
    const auto y = Y[pick_y(rng)];
    const std::uint32_t len = pick_len(rng);
    const double slack = (r - static_cast<double>(len)) / level.t;
    Point z = move_random(model, y, unit(rng) * slack, rng);
    for (std::uint32_t k = 0; k < len; ++k) {
      apply_numeric(model, gens.numeric(pick_gen(rng)), z, image);
      z = image;
    }
    cover.sampled_points.push_back(z);

    bool covered = false;
    for (std::size_t g = 0; g < cover.ball_size && !covered; ++g) {
      apply_numeric(model, ball.numeric(g), z, image);
      y_index.within(image, cover.metric_radius + 1e-9, near);
      for (auto j : near) {
        if (geo_dist(model, image, Y[j]) <= cover.metric_radius + 1e-9) {
          covered = true;
          break;
        }
      }
    }
    if (covered) {
      ++cover.verified;
    } else {
      cover.failures.push_back(i);
    }
  }
  return cover;
}

}  // namespace warpcone
