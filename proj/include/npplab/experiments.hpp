#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "npplab/enumerate.hpp"
#include "npplab/instance.hpp"

namespace npplab {

// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
  ground_state_scaling,
  zeta_scaling,
  isolation,
  level_set_ogp,
  interpolation_trajectory,
  chaos,
  stability,
  distinguish,
  predict,
};

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::ground_state_scaling;
  std::vector<int> n_list{16, 18, 20, 22, 24, 26};
  int trials = 200;
  std::optional<std::uint64_t> seed;
  double base_c = 3.0;
  double eps = 0.5;
  double rho = 0.5;
  int Q = 10;
  std::string algorithm = "ldm";
  std::string output_dir = "out";

  bool planted = true;
  int m = 3;                   // replicas for ogp, interpolation, chaos
  double delta = 0.0;          // ogp_parameters(eps, delta)
  double beta = 0.0;           // isolation radius fraction; 0 derives it
  double beta_entropy = 0.4;   // ... from h_b(beta) = beta_entropy
  double f = 0.0;              // stability slack
  double L = 1.0;              // stability Lipschitz factor
  double bound_scale_sq = 1.0;
  std::string statistic = "exact_min";
  int threads = 1;
  int max_n = kDefaultMaxScanN;
  int frac_bits = kDefaultFracBits;
  std::size_t level_set_cap = kDefaultLevelSetCap;
};

// Sets one key from its text value; throws ConfigError for unknown keys or
// unparsable values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
// Flat "key = value" lines; '#' starts a comment.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
// Throws ConfigError for inconsistent settings and BudgetError when an
// exhaustive scan is requested beyond max_n.
void validate(const ExperimentConfig& cfg);

// Canonical "key=value" lines of every setting that can change an output
// row (output_dir and threads are excluded).
std::string canonical_config(const ExperimentConfig& cfg);
// FNV-1a 64 of canonical_config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

// Seed of trial t at size n: substream_seed(substream_seed(seed, n), t).
std::uint64_t experiment_trial_seed(std::uint64_t seed, int n, std::uint64_t trial);

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct RunRecord {
  ExperimentConfig config;
  std::string hash;
  std::vector<Table> tables;  // tables[0] holds the per-trial rows
  nlohmann::json summary;
  double wall_clock_seconds = 0.0;

  // Row ranges per trial task, used by spot_check.
  struct TaskRows {
    int n = 0;
    std::uint64_t trial = 0;
    std::uint64_t trial_seed = 0;
    std::vector<std::pair<std::size_t, std::size_t>> spans;  // per table
  };
  std::vector<TaskRows> tasks;
};

RunRecord run_experiment(const ExperimentConfig& cfg);

// Writes <experiment>.csv (tables[0]), <experiment>_<name>.csv for the other
// tables, and <experiment>_summary.json into dir. Returns the paths written.
std::vector<std::filesystem::path> write_run(const RunRecord& rec, const std::filesystem::path& dir);
void write_csv(std::ostream& out, const Table& t);

// Recomputes a deterministic selection of about fraction of the trial tasks
// (at least one) from their trial seeds and counts rows that differ.
struct SpotCheck {
  std::size_t tasks_checked = 0;
  std::size_t mismatches = 0;
};
SpotCheck spot_check(const RunRecord& rec, double fraction = 0.01);

// Formatting used in every CSV: 17 significant digits, "inf"/"-inf".
std::string format_real(double v);

}  // namespace npplab
