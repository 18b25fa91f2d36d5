#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "warpcone/graph.hpp"
#include "warpcone/net.hpp"
#include "warpcone/warped.hpp"

namespace warpcone {

inline constexpr std::size_t kDenseSpectrumLimit = 2000;

enum class SolverKind { Dense, Iterative };

struct SpectrumReport {
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> residuals;    // ||L v - lambda v|| per eigenvalue
  std::vector<std::vector<double>> eigenvectors;  // unit vectors, same order
  SolverKind solver = SolverKind::Dense;
  bool connected = true;  // false means lambda_2 = 0 is structural
  std::size_t iterations = 0;
};

// k smallest eigenvalues of the normalized Laplacian I - D^-1/2 A D^-1/2 (isolated vertices get a
// zero row). Dense up to kDenseSpectrumLimit vertices, Lanczos with full reorthogonalization above.
SpectrumReport laplacian_spectrum(const Graph& g, std::size_t k, double tol = 1e-8);
void write_spectrum_csv(std::ostream& os, const SpectrumReport& report);

struct CheegerReport {
  std::optional<double> h_exact;  // present when |V| <= 24
  double h_upper = 0.0;           // best sweep cut of the Fiedler vector
  double h_lower = 0.0;           // lambda_2 / 2
  double lambda2 = 0.0;
  std::vector<std::uint32_t> witness_set;  // achieves h_upper, at most |V|/2 vertices
};

struct CheegerExact {
  double h = 0.0;
  std::vector<std::uint32_t> set;
};

inline constexpr std::size_t kCheegerExactLimit = 24;

// Minimum of |boundary A| / |A| over nonempty A with |A| <= |V|/2; refuses graphs above 24 vertices.
CheegerExact cheeger_exact(const Graph& g);
CheegerReport cheeger_bounds(const Graph& g);
// Reuses a spectrum that already holds lambda_2 and its eigenvector.
CheegerReport cheeger_bounds(const Graph& g, const SpectrumReport& spectrum);
nlohmann::json to_json(const CheegerReport& report);

// Averaged-form spectral gap of an action on the regions of a partition (scalar case).
struct GapReport {
  double epsilon_avg = 0.0;  // avg-form lower bound for the max-form gap constant
  double smallest_eigenvalue = 0.0;
  double residual = 0.0;
  SolverKind solver = SolverKind::Dense;
  nlohmann::json provenance;
  static constexpr const char* kLabel = "avg-form lower bound";
};

GapReport action_gap(const ActionSpec& action, const Partition& partition, unsigned workers = 1);
nlohmann::json to_json(const GapReport& report);

// Increasing unbounded control function.
class ControlFunction {
 public:
  enum class Family { Identity, Affine, Log, Table };

  static ControlFunction identity();
  static ControlFunction affine(double a, double b);  // a x + b, a > 0
  static ControlFunction log(double a, double b);     // a log(1 + x) + b, a > 0, x >= 0
  // Piecewise linear through strictly increasing (x, y) breakpoints, extended linearly past both ends.
  static ControlFunction table(std::vector<std::pair<double, double>> points);
  // {"family": "identity"} | {"family": "affine", "a":, "b":} | {"family": "log", "a":, "b":} |
  // {"table": [[x, y], ...]}
  static ControlFunction from_json(const nlohmann::json& j);

  double operator()(double x) const;
  nlohmann::json to_json() const;
  Family family() const noexcept { return family_; }

 private:
  Family family_ = Family::Identity;
  double a_ = 1.0, b_ = 0.0;
  std::vector<std::pair<double, double>> table_;
};

struct ControlFunctions {
  ControlFunction rho_minus = ControlFunction::identity();
  ControlFunction rho_plus = ControlFunction::identity();
};

enum class Verdict { Contradiction, NoContradiction, Undefined };
std::string to_string(Verdict v);

struct ObstructionCertificate {
  double P_size = 0.0;
  double Q = 1.0;
  double D = 2.0;
  double epsilon = 0.0;
  ControlFunctions controls;
  double inner = 0.0;        // log(P / 2Q) / log D - 1
  double lower_bound = 0.0;  // L = rho_minus(inner) / 4, meaningful unless undefined
  double upper_bound = 0.0;  // U = rho_plus(1) / epsilon
  Verdict verdict = Verdict::Undefined;
};

ObstructionCertificate embedding_obstruction(double P_size, double Q, double D, double epsilon,
                                             const ControlFunctions& controls = {});
nlohmann::json to_json(const ObstructionCertificate& cert);

// Eigenpairs of a symmetric operator with the largest algebraic eigenvalues, by Lanczos with full
// reorthogonalization, restricted to the orthogonal complement of `deflate` (orthonormal vectors).
struct LanczosResult {
  std::vector<double> values;  // descending
  std::vector<std::vector<double>> vectors;
  std::vector<double> residuals;
  std::size_t iterations = 0;
};
LanczosResult lanczos_largest(std::size_t n, const std::function<void(const double*, double*)>& matvec,
                              std::size_t k, const std::vector<std::vector<double>>& deflate, double tol,
                              std::size_t max_iter, std::uint64_t seed = 1);

}  // namespace warpcone
