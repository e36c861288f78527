#pragma once

#include "noisyts/bounds.hpp"
#include "noisyts/environment.hpp"
#include "noisyts/policies.hpp"

#include <json.hpp>

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace noisyts {

enum class Algorithm { kAlg1, kAlg2Delayed, kTsNaive, kTsOracle, kOraclePolicy };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

/// How alg1 treats the psi values of past rounds. kFrozen keeps the
/// value computed in the round it was played; kRecompute re-evaluates every
/// past psi under the current predictive posterior (experimental).
enum class PsiMode { kFrozen, kRecompute };

/// Raised for malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  EnvConfig env;
  std::vector<Algorithm> algorithms;
  int trials = 100;
  std::optional<LmcConfig> lmc;
  std::string output_path = "results.csv";
  bool emit_bounds = false;
  PsiMode psi_mode = PsiMode::kFrozen;
  /// Bound confidence parameter; <= 0 selects 1/T.
  double delta = 0.0;

  /// Throws ConfigError.
  void validate() const;
};

/// Parse a JSON document. Covariances accept a scalar (times I), a length-d
/// array (diagonal) or a d x d nested array; mu_c accepts a scalar or an array.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
ExperimentConfig load_experiment_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct RegretRecord {
  int trial = 0;
  Index t = 0;
  Algorithm algorithm = Algorithm::kOraclePolicy;
  double instant_regret = 0.0;
  double cumulative_regret = 0.0;
};

struct TrialMeta {
  int trial = 0;
  double feature_scale = 1.0;
  /// NaN unless the feature map is linear_ga.
  double max_trace_gtg = 0.0;
  double norm_violation_rate = 0.0;
};

struct TrialResult {
  TrialMeta meta;
  /// Algorithm-major, t-minor.
  std::vector<RegretRecord> records;
  /// actions[i][t-1] is the action played by cfg.algorithms[i] in round t.
  std::vector<std::vector<Index>> actions;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialResult> trials;
};

TrialResult run_trial(const ExperimentConfig& cfg, int trial);

using TrialSink = std::function<void(TrialResult&&)>;

/// Runs every trial on up to `workers` threads and hands each result to
/// `sink` in trial order, one call at a time. Nothing delivered depends on
/// the worker count.
void run_trials(const ExperimentConfig& cfg, int workers, const TrialSink& sink);

/// Collects every trial in memory.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers = 1);

inline constexpr const char* kCsvHeader = "trial,t,algorithm,instant_regret,cumulative_regret";

void write_csv(std::ostream& out, const ExperimentResult& result);
/// Rows of one trial, without the header.
void write_csv_rows(std::ostream& out, const TrialResult& trial);
nlohmann::json metadata_json(const ExperimentConfig& cfg, const std::vector<TrialMeta>& trials);
nlohmann::json metadata_json(const ExperimentResult& result);

/// Writes the CSV to `csv_path` and the sidecar to `csv_path + ".meta.json"`.
void write_results(const ExperimentResult& result, const std::string& csv_path);

/// run_trials streamed straight to `csv_path` and its sidecar, without
/// holding more than the reorder window in memory.
void run_to_files(const ExperimentConfig& cfg, int workers, const std::string& csv_path);

const char* git_describe();

// --- bounds table ---------------------------------------------------------

struct BoundsRow {
  Index t = 0;
  double theorem1 = 0.0;  // NaN where the hypotheses fail
  double theorem2 = 0.0;
  double u_bound = 0.0;
  double mi_delayed = 0.0;
  double mi_unobserved_exact = 0.0;
  double mi_unobserved_bound = 0.0;
};

inline constexpr const char* kBoundsHeader =
    "t,theorem1,theorem2,u_bound,mi_delayed,mi_unobserved_exact,mi_unobserved_bound";

/// Scalar bound inputs of an isotropic configuration at horizon T = cfg.env.T.
/// Throws ConfigError when a covariance is not a multiple of the identity.
bounds::BoundInputs bound_inputs(const ExperimentConfig& cfg, double max_trace_gtg);

/// min over trials of max_a Tr(G(a)^T G(a)) for the trial environments the
/// harness would draw; NaN for the quadratic map.
double resolve_max_trace(const ExperimentConfig& cfg);

/// One row per horizon t = 1..T, each bound evaluated as if T = t.
std::vector<BoundsRow> bounds_table(const ExperimentConfig& cfg, double max_trace_gtg);
void write_bounds_csv(std::ostream& out, const std::vector<BoundsRow>& rows);

}  // namespace noisyts
