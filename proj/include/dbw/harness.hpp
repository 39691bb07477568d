#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbw/estimation.hpp"
#include "dbw/models.hpp"

namespace dbw {

struct EstimatorSpec {
  std::string id;
  FitConfig config;
};

struct ExperimentSpec {
  std::string model = "matern";
  std::vector<double> theta;
  double slope = 1.5;            // matern_fixed_slope only
  double amplitude_ratio = 1.0;  // matern_fixed_slope only
  std::size_t n = 1000;
  double delta = 1.0;
  std::size_t replicates = 200;
  std::uint64_t seed = 0;
  bool complex = false;  // proper complex draws instead of real ones
  std::vector<EstimatorSpec> estimators;
  // Optional slope sweep: each value replaces alpha (theta[2] for matern,
  // the fixed slope for matern_fixed_slope) and the whole run is repeated.
  std::vector<double> alpha_sweep;
  std::filesystem::path output;
  std::size_t workers = 0;  // 0 = hardware concurrency

  void validate() const;
};

// JSON schema:
// {
//   "model": "matern" | "matern_fixed_slope" | "white_noise",
//   "theta": [..], "slope": 1.5, "amplitude_ratio": 1.7725,
//   "n": 1024, "delta": 1, "replicates": 500, "seed": 1, "complex": false,
//   "alpha_sweep": [0.6, 1.5, 2.5],
//   "estimators": [{"id": "debiased_diff", "likelihood": "debiased",
//                   "taper": "none", "nw": 4, "difference": 1,
//                   "side": "none", "max_iterations": 2000, "tol": 1e-8}],
//   "output": "table.csv", "workers": 0
// }
ExperimentSpec parse_experiment_spec(const nlohmann::json& j);
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

struct AggregateRow {
  std::string estimator;
  double sweep_value = 0.0;  // NaN without a sweep
  std::vector<std::string> parameters;
  std::vector<double> truth;
  std::vector<double> mean;
  std::vector<double> bias;
  std::vector<double> percent_bias;
  std::vector<double> sd;  // population SD over successful fits
  std::vector<double> rmse;
  std::vector<double> percent_sd;
  std::vector<double> percent_rmse;
  double mean_wall_time = 0.0;
  std::size_t successes = 0;
  std::size_t failures = 0;
};

struct ReplicateEstimate {
  std::string estimator;
  double sweep_value = 0.0;
  std::size_t replicate = 0;
  std::optional<std::vector<double>> theta_hat;  // empty on failure
  double wall_time = 0.0;
  std::string error;
};

struct ExperimentResult {
  std::vector<AggregateRow> rows;
  std::vector<ReplicateEstimate> estimates;
};

// Simulates each replicate once and fits every estimator to the same draw.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// Aggregation shared with the tests: estimates for one (estimator, sweep).
AggregateRow aggregate(const std::string& estimator, double sweep_value, const std::vector<std::string>& parameters,
                       const std::vector<double>& truth, std::span<const ReplicateEstimate> estimates);

// Long format, one line per (estimator, sweep value, parameter).
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

// De-biased Whittle restricted to strictly positive or strictly negative
// Fourier frequencies of a complex series.
FitResult semiparametric_sideband_fit(const TimeSeries& z, std::shared_ptr<const ParametricModel> model,
                                      FitConfig config, Side side);

}  // namespace dbw
