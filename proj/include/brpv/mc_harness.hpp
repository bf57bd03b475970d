#pragma once

// Replicate-parallel Monte Carlo experiments with fixed-threshold verdicts and
// JSON reports.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "brpv/gauss_kernels.hpp"
#include "brpv/volatility.hpp"

namespace brpv::harness {

enum class Experiment {
  frechet,
  stationarity,
  maxstability,
  distributional,
  marginal_increment,
  moment_bias,
  lln,
  clt,
  estimate_h,
  local_time,
  truncation_audit,
};

enum class Model { max2bm, br };

std::string to_string(Experiment e);
std::string to_string(Model m);
/// Throws std::invalid_argument on unknown names.
Experiment parse_experiment(const std::string& name);
Model parse_model(const std::string& name);

struct ExperimentConfig {
  Experiment experiment = Experiment::lln;
  Model model = Model::br;
  int p = 2;
  std::int64_t n = 1024;
  std::int64_t reps = 200;
  /// Constant volatility; ignored when `h_spec` is set.
  double sigma = 1.0;
  /// Resolved volatility description: {"form": ...}. Empty means constant sigma.
  nlohmann::json h_spec;
  double epsilon = 1e-3;
  std::int64_t atom_budget = 1'000'000;
  double halfwidth = 1.0;
  std::uint64_t master_seed = 20261016;
  double t_eval = 1.0;
  /// estimate_h window, in increments.
  std::int64_t window = 1024;
  /// Fold size for the max-stability check.
  int k_fold = 5;

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
  VolatilitySpec volatility() const;
  /// Canonical JSON: every field, h_spec resolved, keys sorted.
  nlohmann::json to_json() const;
  /// Strict: unknown keys are rejected. A string h_spec names an (s, H) CSV
  /// table and is read immediately.
  static ExperimentConfig from_json(const nlohmann::json& j);
};

/// Parses an h_spec given on the command line or in a config: a path to an
/// (s, H) CSV table, or an inline JSON object.
nlohmann::json resolve_h_spec(const nlohmann::json& spec);
VolatilitySpec volatility_from_json(const nlohmann::json& spec);
nlohmann::json volatility_to_json(const VolatilitySpec& h);

/// Raised when truncation failures leave too few replicates to aggregate.
class InsufficientReplicates : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 64-bit FNV-1a of the canonical config JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

struct Verdict {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
  /// How `measured` is compared with `threshold`.
  std::string comparison = "<";
};

struct ExperimentReport {
  ExperimentConfig config;
  std::string config_hash;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Replicates dropped because the atom budget ran out.
  std::vector<std::int64_t> truncation_failures;
  std::vector<std::pair<std::string, double>> aggregates;
  std::vector<Verdict> verdicts;
  double wall_time = 0.0;

  bool all_pass() const;
  double aggregate(const std::string& name) const;
  const Verdict& verdict(const std::string& name) const;
  nlohmann::json to_json(bool include_wall_time = true) const;
};

/// Kolmogorov-Smirnov distance between the sample's empirical CDF and `cdf`.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Order-independent sum: values are sorted before compensated summation, so
/// any permutation of the input gives the same bits.
double stable_sum(std::vector<double> values);

struct MeanStat {
  double mean = 0.0;
  double stderr_ = 0.0;
  double variance = 0.0;
};
MeanStat mean_stat(const std::vector<double>& x);

struct Regression {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_stderr = 0.0;
  double residual_variance = 0.0;
};
/// Ordinary least squares of y on x with intercept.
Regression ols(const std::vector<double>& x, const std::vector<double>& y);

/// Worker count: MAXSTABLE_PV_THREADS if set and positive, else the
/// hardware concurrency.
unsigned worker_count();

ExperimentReport run_experiment(const ExperimentConfig& config);

ExperimentReport run_distributional_facts(const ExperimentConfig& config);
ExperimentReport run_marginal_increment(const ExperimentConfig& config);
ExperimentReport run_moment_bias(const ExperimentConfig& config);
ExperimentReport run_lln(const ExperimentConfig& config);
ExperimentReport run_clt(const ExperimentConfig& config);
ExperimentReport run_estimate_h(const ExperimentConfig& config);
ExperimentReport run_local_time(const ExperimentConfig& config);
ExperimentReport run_truncation_audit(const ExperimentConfig& config);

}  // namespace brpv::harness
