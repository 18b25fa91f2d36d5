#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <gmpxx.h>

#include "json.hpp"

#include "warpcone/net.hpp"
#include "warpcone/warped.hpp"

namespace warpcone {

// Net points x with d(x, gamma x) <= 6r/t for some nontrivial gamma with |gamma| <= 6r.
struct ChiWitness {
  std::size_t point = 0;
  Word gamma;
  double displacement = 0.0;
};

struct ChiSet {
  double t = 1.0;
  double r = 0.0;
  std::uint32_t ball_radius = 0;  // floor(6r)
  double threshold = 0.0;         // 6r / t
  std::vector<std::size_t> members;
  std::vector<ChiWitness> witnesses;  // one per member, same order
  double fraction = 0.0;
  // A nontrivial relation of length <= 6r acts as the identity and puts every point in the set.
  bool relator_hit = false;
};

ChiSet chi_set(const ActionSpec& action, const Net& net, double t, double r, unsigned workers = 1);

// Net point maximizing min over nontrivial gamma in B(6r) of d(x, gamma x) (a heuristic choice).
struct BasePoint {
  std::size_t index = 0;
  double min_displacement = 0.0;
  double margin = 0.0;  // min_displacement - 6r/t; positive means outside chi
  Word closest;         // element realizing min_displacement
};

BasePoint choose_base_point(const ActionSpec& action, const Net& net, double t, double r, unsigned workers = 1);

struct BallCheckConfig {
  double r = 1.0;
  double t = 1.0;
  double L = 1.0;
  double A = 0.0;
  double epsilon = 0.05;
  std::size_t max_pairs = 400;
  std::uint64_t seed = 1;
};

struct BallCheckReport {
  std::size_t base_point = 0;
  std::size_t ball_size = 0;  // net points with rho_t(x0, x) <= r
  std::size_t pairs = 0;
  double max_distortion = 0.0;
  double allowance = 0.0;  // epsilon + 5 t R
  bool within_allowance = true;
  bool quasi_isometric = true;  // both (L, A) inequalities held on every pair
};

// Compares rho_t on the warped ball B(x0, r) with the l1 product (M, t d) x Gamma through the
// witnesses of rho_t(x0, .). Throws PreconditionError when x0 lies in chi_Gamma^t(r).
BallCheckReport ball_product_check(const ActionSpec& action, const Net& net, std::size_t x0,
                                   const BallCheckConfig& cfg);
nlohmann::json to_json(const BallCheckReport& report);

// |B_{Gamma x Z^m}(r)| in the l1 product metric from the ball sizes |B_Gamma(j)|, j = 0..r.
mpz_class product_ball_size(const std::vector<mpz_class>& gamma_ball_sizes, unsigned m, unsigned r);
mpz_class lattice_ball_size(unsigned m, unsigned rho);  // |B_{Z^m}(rho)|

struct GrowthProfile {
  std::vector<std::size_t> counts;   // net points with rho_t(x0, x) <= k, k = 0..r_max
  std::vector<double> expected;      // |net| * sum over gamma in B(k) of the ball fraction at (k - |gamma|)/t
  std::vector<mpz_class> lattice;    // product_ball_size with m = dim M
  double deviation = 0.0;            // max over k >= 1 of |counts - expected| / expected
  std::size_t base_point = 0;
};

GrowthProfile growth_fingerprint(const WarpedLevel& level, const Net& net, std::size_t x0, unsigned r_max);
// Max over k >= 1 of the relative gap between the shapes counts[k] / counts[1] of two profiles.
double profile_deviation(const GrowthProfile& a, const GrowthProfile& b);
void write_profile_csv(std::ostream& os, const GrowthProfile& profile);

struct ScheduleEntry {
  std::size_t target = 0;
  double t = 1.0;
  std::size_t level_size = 0;  // |net at r = 1/t| before interpolation
  double C = 1.0;              // comparison constant from the volume bounds
  Net net;                     // exactly `target` points
  std::size_t coarse_size = 0;
  std::size_t fine_size = 0;
  bool interpolated = false;
};

std::vector<ScheduleEntry> cardinality_schedule(const ManifoldModel& model, const std::vector<std::size_t>& targets,
                                                std::uint64_t seed, std::size_t max_net_size = 2'000'000);

struct SeparationPair {
  std::size_t m = 0, n = 0;  // 1-based positions in the thinned sequence, m < n
  bool lower_holds = false;  // m |G_m| < |G_n|
  bool upper_holds = false;  // |G_n| <= D^(r+1) |G_m|
  bool beyond_threshold = false;  // m >= n0
  bool violated() const noexcept { return !(lower_holds && upper_holds); }
};

struct SeparationCertificate {
  std::vector<mpz_class> sizes;
  unsigned D = 2;
  unsigned r = 1;
  mpz_class n0;                            // D^(r+1)
  std::vector<std::size_t> selected;       // 0-based indices into sizes
  std::vector<SeparationPair> pairs;
  bool certified = true;                   // every pair beyond n0 violates the inequality
};

SeparationCertificate subsequence_separation(const std::vector<mpz_class>& sizes, unsigned D, unsigned r);
nlohmann::json to_json(const SeparationCertificate& cert);

}  // namespace warpcone
