#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "warpcone/group.hpp"
#include "warpcone/manifold.hpp"
#include "warpcone/spectral.hpp"

namespace warpcone {

struct ChiProbe {
  double r = 1.0;
};

struct CertificateProbe {
  // Unset values are taken from the levels: largest |V|, largest Q, largest max degree and the
  // smallest action gap.
  std::optional<double> P_size, Q, D, epsilon;
  ControlFunctions controls;
};

struct BallCheckProbe {
  double r = 1.0;
  double t = 16.0;
  double net_r = 1.0 / 64;
  double L = 1.0;
  double A = 0.0;
  double epsilon = 0.05;
  std::size_t max_pairs = 400;
};

struct FingerprintProbe {
  double t = 8.0;
  unsigned r_max = 3;
  double net_r = 1.0 / 32;
};

struct ScheduleProbe {
  std::vector<std::size_t> targets;
};

struct SeparationProbe {
  std::vector<std::string> sizes;  // decimal integers
  unsigned D = 2;
  unsigned r = 1;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string model = "sphere:3";
  std::string generator_preset;         // used when generator_specs is empty
  std::vector<GeneratorSpec> generator_specs;
  std::vector<double> t_sequence;
  std::size_t samples_per_region = 100;
  std::size_t graph_threshold = 1;
  std::size_t spectrum_k = 4;
  std::uint64_t net_seed = 1;
  std::uint64_t partition_seed = 2;
  std::string output_dir = "out";
  std::size_t ball_cap = kDefaultBallCap;
  std::size_t max_net_size = 2'000'000;
  std::optional<ChiProbe> chi;
  std::optional<CertificateProbe> certificate;
  std::optional<BallCheckProbe> ballcheck;
  std::optional<FingerprintProbe> fingerprint;
  std::optional<ScheduleProbe> schedule;
  std::optional<SeparationProbe> separation;
  nlohmann::json source;  // the parsed document
};

// Throws InputError on malformed documents (missing keys, wrong types, unknown probe names).
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

// 64-bit FNV-1a of the canonical (key-sorted, compact) form, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

GeneratorSet resolve_generators(const ExperimentConfig& config);

// Static checks only: generator symmetry and isometry, t-sequence, caps. Empty means valid.
std::vector<std::string> validate(const ExperimentConfig& config);
std::vector<std::string> validate(const nlohmann::json& document);

struct RunOptions {
  std::filesystem::path output_dir;  // overrides the config's output_dir when nonempty
  std::optional<std::uint64_t> seed;  // replaces both seeds (net = seed, partition = seed + 1)
  unsigned workers = 1;
  std::optional<std::size_t> ball_cap;
};

enum class RunStatus { Success = 0, ConfigError = 2, PartialFailure = 3, ResourceCap = 4 };

struct RunResult {
  nlohmann::json report;  // no timestamps; written to report.json
  RunStatus status = RunStatus::Success;
  std::filesystem::path output_dir;
};

// Per t: net (r = 1/t), partition, approximating graph, spectrum, Cheeger bounds, action gap and
// chi fraction; then the certificate block and the enabled coarse probes. A failing step is
// recorded in the report and the remaining steps continue.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace warpcone
