#include "warpcone/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>

#include "warpcone/errors.hpp"
#include "warpcone/parallel.hpp"
#include "warpcone/point_index.hpp"

namespace warpcone {

namespace {

std::uint32_t chi_radius(double r) { return static_cast<std::uint32_t>(std::floor(6.0 * r + 1e-12)); }

double cell_for(const Net& net) {
  return net.degenerate ? net.model.diameter() : std::max(net.separation, 1e-4);
}

bool relator_within(const GroupBall& ball, double length) {
  const auto& rel = ball.shortest_relator();
  return rel && static_cast<double>(rel->size()) <= length + 1e-12;
}

// Scores a point's displacement d(x, g x) by a quantity decreasing in d: the cosine x . g x on
// spheres, -d elsewhere.
class DisplacementScore {
 public:
  explicit DisplacementScore(const ManifoldModel& model) : model_(model), image_(model.coord_dim()) {}

  double operator()(std::span<const double> g, std::span<const double> x) {
    if (model_.kind() == ManifoldKind::Sphere) {
      const std::size_t n = x.size();
      double c = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += g[i * n + j] * x[j];
        c += x[i] * row;
      }
      return c;
    }
    apply_numeric(model_, g, x, image_);
    return -geo_dist(model_, x, image_);
  }
  double of_distance(double d) const { return model_.kind() == ManifoldKind::Sphere ? std::cos(std::min(d, std::numbers::pi)) : -d; }

 private:
  const ManifoldModel& model_;
  Point image_;
};

double displacement(const ManifoldModel& model, std::span<const double> g, std::span<const double> x) {
  Point image(model.coord_dim());
  apply_numeric(model, g, x, image);
  return geo_dist(model, x, image);
}

// Nontrivial elements of B(k) ordered by decreasing trace (roughly: closest to the identity first),
// ties by BFS index, so small displacements are found early.
std::vector<std::size_t> near_identity_order(const GroupBall& ball, std::uint32_t k) {
  const std::size_t end = ball.layer_end(k);
  const std::size_t n = ball.dim();
  std::vector<std::size_t> order;
  std::vector<double> trace(end, 0.0);
  for (std::size_t g = 1; g < end; ++g) {
    const auto m = ball.numeric(g);
    for (std::size_t i = 0; i < n; ++i) trace[g] += m[i * n + i];
    order.push_back(g);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return trace[a] > trace[b]; });
  return order;
}

// Net points within warped distance `radius` of x0, with their exact distances.
struct WarpedBallMember {
  std::size_t index;
  WarpedDistance dist;
};

std::vector<WarpedBallMember> warped_ball(const WarpedLevel& level, const Net& net, const PointIndex& index,
                                          std::span<const double> x0, double radius) {
  const auto& model = net.model;
  const auto k = level.action.gens().empty() ? 0u : static_cast<std::uint32_t>(std::floor(radius + 1e-12));
  const GroupBall& ball = level.action.ball(k);
  // rho_t(x0, x) <= radius iff x lies within (radius - |g|)/t of g x0 for some g in B(radius).
  std::vector<std::uint32_t> candidates, near;
  Point image(model.coord_dim());
  if (level.action.gens().empty()) {
    index.within(x0, radius / level.t, candidates);
  }
  for (std::size_t g = 0; g < ball.layer_end(k) && !level.action.gens().empty(); ++g) {
    apply_numeric(model, ball.numeric(g), x0, image);
    index.within(image, (radius - ball[g].length) / level.t, near);
    candidates.insert(candidates.end(), near.begin(), near.end());
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::vector<WarpedBallMember> out;
  for (auto c : candidates) {
    auto d = warped_dist_exact(level, x0, net.points[c]);
    if (d.value <= radius + 1e-12) out.push_back({c, std::move(d)});
  }
  return out;
}

}  // namespace

ChiSet chi_set(const ActionSpec& action, const Net& net, double t, double r, unsigned workers) {
  if (!(t >= 1.0)) throw InputError("chi_set: t must be at least 1");
  if (!(r >= 0.0)) throw InputError("chi_set: r must be nonnegative");
  if (!(net.model == action.model())) throw InputError("chi_set: net lives on " + net.model.name());
  ChiSet chi;
  chi.t = t;
  chi.r = r;
  chi.threshold = 6.0 * r / t;
  chi.ball_radius = action.gens().empty() ? 0 : chi_radius(r);
  if (net.size() == 0) return chi;
  const GroupBall& ball = action.ball(chi.ball_radius);
  const std::size_t end = ball.layer_end(chi.ball_radius);
  chi.relator_hit = relator_within(ball, 6.0 * r);

  const auto& model = net.model;
  (void)end;
  const auto order = near_identity_order(ball, chi.ball_radius);
  // For each point, the first element in near-identity order that moves it at most 6r/t.
  std::vector<std::size_t> first(net.size(), 0);
  parallel_slices(net.size(), workers, [&](std::size_t begin, std::size_t stop, unsigned) {
    DisplacementScore score(model);
    const double cutoff = score.of_distance(chi.threshold);
    for (std::size_t x = begin; x < stop; ++x) {
      for (auto g : order) {
        if (score(ball.numeric(g), net.points[x]) >= cutoff) {
          first[x] = g;
          break;
        }
      }
    }
  });
  for (std::size_t x = 0; x < net.size(); ++x) {
    if (first[x] > 0) {
      chi.members.push_back(x);
      chi.witnesses.push_back({x, ball[first[x]].witness, displacement(model, ball.numeric(first[x]), net.points[x])});
    } else if (chi.relator_hit) {
      chi.members.push_back(x);
      chi.witnesses.push_back({x, *ball.shortest_relator(), 0.0});
    }
  }
  chi.fraction = static_cast<double>(chi.members.size()) / static_cast<double>(net.size());
  return chi;
}

BasePoint choose_base_point(const ActionSpec& action, const Net& net, double t, double r, unsigned workers) {
  if (net.size() == 0) throw InputError("choose_base_point: empty net");
  BasePoint best;
  const double threshold = 6.0 * r / t;
  if (action.gens().empty()) {
    best.min_displacement = std::numeric_limits<double>::infinity();
    best.margin = best.min_displacement;
    return best;
  }
  const auto k = chi_radius(r);
  const GroupBall& ball = action.ball(k);
  const std::size_t end = ball.layer_end(k);
  if (relator_within(ball, 6.0 * r)) {
    best.margin = -threshold;
    best.closest = *ball.shortest_relator();
    return best;
  }
  const auto& model = net.model;
  (void)end;
  const auto order = near_identity_order(ball, k);
  // Max over points of the min over elements of the displacement score's negation. Each slice keeps
  // its own leader and skips points that already fall below it, which leaves the result unchanged.
  struct Leader {
    std::size_t index = 0;
    double worst_score = std::numeric_limits<double>::infinity();  // max score = min displacement
    std::size_t element = 0;
    bool set = false;
  };
  const unsigned slices = std::max(1u, workers);
  std::vector<Leader> leaders(slices);
  parallel_slices(net.size(), slices, [&](std::size_t begin, std::size_t stop, unsigned w) {
    DisplacementScore score(model);
    Leader& lead = leaders[w];
    for (std::size_t x = begin; x < stop; ++x) {
      double top = -std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      bool beaten = false;
      for (auto g : order) {
        const double s = score(ball.numeric(g), net.points[x]);
        if (s > top) {
          top = s;
          arg = g;
          if (lead.set && top >= lead.worst_score) {
            beaten = true;
            break;
          }
        }
      }
      if (!beaten && (!lead.set || top < lead.worst_score)) lead = {x, top, arg, true};
    }
  });
  const Leader* win = nullptr;
  for (const auto& l : leaders) {
    if (l.set && (!win || l.worst_score < win->worst_score)) win = &l;
  }
  best.index = win->index;
  best.min_displacement = win->element > 0 ? displacement(model, ball.numeric(win->element), net.points[win->index])
                                           : std::numeric_limits<double>::infinity();
  best.margin = best.min_displacement - threshold;
  if (win->element > 0) best.closest = ball[win->element].witness;
  return best;
}

BallCheckReport ball_product_check(const ActionSpec& action, const Net& net, std::size_t x0,
                                   const BallCheckConfig& cfg) {
  if (!(cfg.L >= 1.0) || !(cfg.A >= 0.0) || !(cfg.epsilon > 0.0)) {
    throw InputError("ball_product_check: need L >= 1, A >= 0, epsilon > 0");
  }
  if (x0 >= net.size()) throw InputError("ball_product_check: base point out of range");
  const WarpedLevel level(action, cfg.t);
  const auto& model = net.model;
  const auto& gens = action.gens();

  // Precondition: x0 outside chi_Gamma^t(r).
  if (!gens.empty()) {
    const auto k = chi_radius(cfg.r);
    const GroupBall& ball = action.ball(k);
    if (relator_within(ball, 6.0 * cfg.r)) {
      std::string word;
      for (const auto& l : gens.spell(*ball.shortest_relator())) word += l;
      throw PreconditionError("ball_product_check: x0 lies in chi, relation " + word + " acts trivially");
    }
    Point image(model.coord_dim());
    for (std::size_t g = 1; g < ball.layer_end(k); ++g) {
      apply_numeric(model, ball.numeric(g), net.points[x0], image);
      const double d = geo_dist(model, net.points[x0], image);
      if (d <= 6.0 * cfg.r / cfg.t) {
        std::string word;
        for (const auto& l : gens.spell(ball[g].witness)) word += l;
        throw PreconditionError("ball_product_check: x0 lies in chi, witness gamma = " + word +
                                " moves it by " + std::to_string(d));
      }
    }
  }

  BallCheckReport report;
  report.base_point = x0;
  report.allowance = cfg.epsilon + 5.0 * cfg.t * net.density_radius;
  const PointIndex index(model, net.points, cell_for(net));
  const auto members = warped_ball(level, net, index, net.points[x0], cfg.r);
  report.ball_size = members.size();

  // x = gamma_x^-1 p_x with p_x = gamma_x x near x0; the product distance of x, y is
  // t d(p_x, p_y) + |gamma_x^-1 gamma_y|.
  std::vector<Point> frame(members.size());
  std::vector<RationalMatrix> gamma(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (gens.empty()) {
      frame[i] = net.points.point(members[i].index);
      continue;
    }
    gamma[i] = word_eval(members[i].dist.witness, gens);
    frame[i] = apply(gamma[i], net.points[members[i].index], model);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const std::size_t all = members.size() * (members.size() - (members.empty() ? 0 : 1)) / 2;
  if (all <= cfg.max_pairs) {
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j) pairs.emplace_back(i, j);
  } else {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    while (pairs.size() < cfg.max_pairs) {
      const auto i = pick(rng), j = pick(rng);
      if (i != j) pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  const auto word_radius = gens.empty() ? 0u : static_cast<std::uint32_t>(std::floor(2.0 * cfg.r + 1e-12));
  const GroupBall& wide = action.ball(word_radius);
  for (const auto& [i, j] : pairs) {
    const double rho = warped_dist_exact(level, net.points[members[i].index], net.points[members[j].index]).value;
    double word_len = 0.0;
    if (!gens.empty()) {
      Word relative = gens.inverse_word(members[i].dist.witness);
      relative.insert(relative.end(), members[j].dist.witness.begin(), members[j].dist.witness.end());
      const auto rel = wide.find(word_eval(relative, gens));
      if (!rel) throw ResourceError("ball_product_check: relative word outside B(2r)", wide.size());
      word_len = static_cast<double>(wide[*rel].length);
    }
    const double product = cfg.t * geo_dist(model, frame[i], frame[j]) + word_len;
    report.max_distortion = std::max(report.max_distortion, std::abs(rho - product));
    if (rho > cfg.L * product + cfg.A + 1e-9 || product > cfg.L * rho + cfg.A + 1e-9) report.quasi_isometric = false;
  }
  report.pairs = pairs.size();
  report.within_allowance = report.max_distortion <= report.allowance;
  return report;
}

nlohmann::json to_json(const BallCheckReport& r) {
  return {{"base_point", r.base_point},         {"ball_size", r.ball_size},
          {"pairs", r.pairs},                   {"max_distortion", r.max_distortion},
          {"allowance", r.allowance},           {"within_allowance", r.within_allowance},
          {"quasi_isometric", r.quasi_isometric}};
}

mpz_class lattice_ball_size(unsigned m, unsigned rho) {
  // sum_k 2^k C(m, k) C(rho, k)
  mpz_class total = 0;
  for (unsigned k = 0; k <= std::min(m, rho); ++k) {
    mpz_class cm, cr, p;
    mpz_bin_uiui(cm.get_mpz_t(), m, k);
    mpz_bin_uiui(cr.get_mpz_t(), rho, k);
    mpz_ui_pow_ui(p.get_mpz_t(), 2, k);
    total += p * cm * cr;
  }
  return total;
}

mpz_class product_ball_size(const std::vector<mpz_class>& gamma_ball_sizes, unsigned m, unsigned r) {
  if (gamma_ball_sizes.size() <= r) {
    throw InputError("product_ball_size: ball sizes known up to radius " +
                     std::to_string(gamma_ball_sizes.size()) + " only, need " + std::to_string(r));
  }
  mpz_class total = 0;
  for (unsigned j = 0; j <= r; ++j) {
    const mpz_class sphere = j == 0 ? gamma_ball_sizes[0] : gamma_ball_sizes[j] - gamma_ball_sizes[j - 1];
    total += sphere * lattice_ball_size(m, r - j);
  }
  return total;
}

GrowthProfile growth_fingerprint(const WarpedLevel& level, const Net& net, std::size_t x0, unsigned r_max) {
  const auto& action = level.action;
  if (x0 >= net.size()) throw InputError("growth_fingerprint: base point out of range");
  if (!action.gens().empty()) {
    const auto chi_radius_max = chi_radius(static_cast<double>(r_max));
    const GroupBall& ball = action.ball(chi_radius_max);
    if (relator_within(ball, 6.0 * r_max)) throw PreconditionError("growth_fingerprint: x0 lies in chi (relation)");
    Point image(net.model.coord_dim());
    for (std::size_t g = 1; g < ball.layer_end(chi_radius_max); ++g) {
      apply_numeric(net.model, ball.numeric(g), net.points[x0], image);
      if (geo_dist(net.model, net.points[x0], image) <= 6.0 * r_max / level.t) {
        throw PreconditionError("growth_fingerprint: x0 lies in chi_Gamma^t(r_max)");
      }
    }
  }
  GrowthProfile prof;
  prof.base_point = x0;
  const PointIndex index(net.model, net.points, cell_for(net));
  const auto members = warped_ball(level, net, index, net.points[x0], static_cast<double>(r_max));
  const GroupBall& ball = action.ball(action.gens().empty() ? 0 : r_max);
  std::vector<mpz_class> sizes;
  for (unsigned k = 0; k <= r_max; ++k) {
    std::size_t c = 0;
    for (const auto& m : members) c += m.dist.value <= static_cast<double>(k) + 1e-12 ? 1 : 0;
    prof.counts.push_back(c);
    const unsigned kk = action.gens().empty() ? 0 : k;
    sizes.push_back(mpz_class(static_cast<unsigned long>(ball.layer_end(kk))));
    double e = 0.0;
    for (unsigned j = 0; j <= kk; ++j) {
      const double sphere = static_cast<double>(ball.layer_end(j) - ball.layer_begin(j));
      e += sphere * ball_volume_fraction(net.model, (static_cast<double>(k) - j) / level.t);
    }
    prof.expected.push_back(static_cast<double>(net.size()) * e);
    prof.lattice.push_back(product_ball_size(sizes, static_cast<unsigned>(net.model.dimension()), k));
  }
  for (unsigned k = 1; k <= r_max; ++k) {
    prof.deviation = std::max(prof.deviation, std::abs(static_cast<double>(prof.counts[k]) - prof.expected[k]) / prof.expected[k]);
  }
  return prof;
}

double profile_deviation(const GrowthProfile& a, const GrowthProfile& b) {
  const std::size_t n = std::min(a.counts.size(), b.counts.size());
  double dev = 0.0;
  if (n < 2 || a.counts[1] == 0 || b.counts[1] == 0) return dev;
  for (std::size_t k = 1; k < n; ++k) {
    const double sa = static_cast<double>(a.counts[k]) / static_cast<double>(a.counts[1]);
    const double sb = static_cast<double>(b.counts[k]) / static_cast<double>(b.counts[1]);
    dev = std::max(dev, std::abs(sa - sb) / sb);
  }
  return dev;
}

void write_profile_csv(std::ostream& os, const GrowthProfile& p) {
  os << "radius,warped_count,expected_count,product_lattice\n";
  const auto old = os.precision(17);
  for (std::size_t k = 0; k < p.counts.size(); ++k) {
    os << k << ',' << p.counts[k] << ',' << p.expected[k] << ',' << p.lattice[k].get_str() << '\n';
  }
  os.precision(old);
}

std::vector<ScheduleEntry> cardinality_schedule(const ManifoldModel& model, const std::vector<std::size_t>& targets,
                                                std::uint64_t seed, std::size_t max_net_size) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 1) throw InputError("cardinality_schedule: targets must be at least 1");
    if (i > 0 && targets[i] <= targets[i - 1]) throw InputError("cardinality_schedule: targets not increasing");
    if (targets[i] > max_net_size) {
      throw InputError("cardinality_schedule: target " + std::to_string(targets[i]) + " exceeds the net cap " +
                       std::to_string(max_net_size));
    }
  }
  const double m = static_cast<double>(model.dimension());
  std::vector<ScheduleEntry> out;
  for (const auto N : targets) {
    ScheduleEntry e;
    e.target = N;
    e.t = std::max(1.0, std::pow(static_cast<double>(N), 1.0 / m));
    const double r = 1.0 / e.t;
    const auto vb_upper = ball_volume_fraction(model, r);
    const auto vb_lower = ball_volume_fraction(model, r / 2.0);
    e.C = std::max(static_cast<double>(N) * vb_upper, 1.0 / (static_cast<double>(N) * vb_lower));

    Net level = build_net(model, r, seed);
    e.level_size = level.size();
    if (level.size() == N) {
      e.net = std::move(level);
      e.coarse_size = e.fine_size = N;
      out.push_back(std::move(e));
      continue;
    }
    // Coarse: largest net at r * 2^j with at most N points.
    Net coarse = std::move(level);
    double rc = r;
    while (coarse.size() > N) {
      rc *= 2.0;
      coarse = build_net(model, rc, seed);
    }
    // Fine: extend the coarse net at rc / 2^j until it reaches N points.
    Net fine = coarse;
    double rf = rc;
    while (fine.size() < N) {
      rf /= 2.0;
      if (rf < 1e-6) throw ResourceError("cardinality_schedule: target unreachable", fine.size());
      fine = extend_net(coarse, rf, seed + 1);
      if (fine.size() > max_net_size) {
        throw ResourceError("cardinality_schedule: fine net exceeds " + std::to_string(max_net_size) + " points",
                            fine.size());
      }
    }
    e.coarse_size = coarse.size();
    e.fine_size = fine.size();
    e.net = interpolate_net(coarse, fine, N);
    e.interpolated = N != coarse.size() && N != fine.size();
    out.push_back(std::move(e));
  }
  return out;
}

SeparationCertificate subsequence_separation(const std::vector<mpz_class>& sizes, unsigned D, unsigned r) {
  if (sizes.size() < 2) throw InputError("subsequence_separation: need at least 2 sizes");
  if (D < 1) throw InputError("subsequence_separation: degree bound must be positive");
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) throw InputError("subsequence_separation: sizes not strictly increasing");
  }
  SeparationCertificate cert;
  cert.sizes = sizes;
  cert.D = D;
  cert.r = r;
  mpz_ui_pow_ui(cert.n0.get_mpz_t(), D, r + 1);

  // Greedy thinning: the n-th selected size (1-based) is followed by one exceeding n times it.
  cert.selected.push_back(0);
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    const mpz_class n = static_cast<unsigned long>(cert.selected.size());
    if (sizes[i] > n * sizes[cert.selected.back()]) cert.selected.push_back(i);
  }
  const std::size_t k = cert.selected.size();
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      SeparationPair p;
      p.m = a + 1;
      p.n = b + 1;
      const mpz_class& gm = sizes[cert.selected[a]];
      const mpz_class& gn = sizes[cert.selected[b]];
      p.lower_holds = mpz_class(static_cast<unsigned long>(p.m)) * gm < gn;
      p.upper_holds = gn <= cert.n0 * gm;
      p.beyond_threshold = mpz_class(static_cast<unsigned long>(p.m)) >= cert.n0;
      if (p.beyond_threshold && !p.violated()) cert.certified = false;
      cert.pairs.push_back(p);
    }
  }
  return cert;
}

nlohmann::json to_json(const SeparationCertificate& c) {
  nlohmann::json sizes = nlohmann::json::array();
  for (const auto& s : c.sizes) sizes.push_back(s.get_str());
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : c.pairs) {
    pairs.push_back({{"m", p.m},
                     {"n", p.n},
                     {"lower_holds", p.lower_holds},
                     {"upper_holds", p.upper_holds},
                     {"beyond_threshold", p.beyond_threshold},
                     {"verdict", p.violated() ? "violated" : (p.beyond_threshold ? "holds" : "inconclusive")}});
  }
  return {{"inputs", {{"sizes", sizes}, {"D", c.D}, {"r", c.r}}},
          {"n0", c.n0.get_str()},
          {"selected", c.selected},
          {"pairs", pairs},
          {"certified", c.certified}};
}

}  // namespace warpcone
