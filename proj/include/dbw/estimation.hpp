#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbw/likelihood.hpp"
#include "dbw/models.hpp"

namespace dbw {

struct FitConfig {
  LikelihoodSpec spec;
  std::optional<std::vector<double>> initial_theta;
  std::size_t max_iterations = 2000;
  double convergence_tol = 1e-8;
  std::uint64_t seed = 0;
  // One extra Nelder-Mead run from a perturbed best point when the first
  // one hits max_iterations.
  bool restart = true;

  void validate() const;
};

struct FitResult {
  std::vector<double> theta_hat;
  double objective_at_max = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> init_theta;
  double objective_at_init = 0.0;
  std::map<std::string, double> derived;
  double wall_time = 0.0;  // seconds
  std::vector<std::string> warnings;
};

// Serialises with keys theta_hat, objective, iterations, converged, derived,
// wall_time_s (plus init_theta and warnings).
nlohmann::json to_json(const FitResult& r, const ParametricModel& model);

// Least-squares line log I = 2 log A0 - 2 alpha0 log|omega| over
// pi/(4 delta) <= |omega| <= 3 pi/(4 delta) on the chosen side (+1 positive,
// -1 negative, 0 positive for real data), c0 = 100 pi / (n delta); clipped
// into the Matern bounds. Returns (A0, c0, alpha0).
std::vector<double> initialize_matern(const TimeSeries& x, int side = 0);

// Maximises the configured likelihood with Nelder-Mead in the logistic
// transform of the model bounds. Deterministic given (x, config).
FitResult fit(const TimeSeries& x, std::shared_ptr<const ParametricModel> model, const FitConfig& config);
FitResult fit(const Likelihood& likelihood, const TimeSeries& x, const FitConfig& config);

struct ConvergenceRow {
  std::size_t n = 0;
  std::vector<double> mean;
  std::vector<double> bias;
  std::vector<double> sd;
  std::size_t failures = 0;
};

// For each n: simulate `replicates` series at theta (replicate r seeded with
// seed + r), fit each, report per-parameter mean, bias and SD.
std::vector<ConvergenceRow> convergence_study(std::shared_ptr<const ParametricModel> model,
                                              const std::vector<double>& theta, const FitConfig& estimator,
                                              const std::vector<std::size_t>& n_values, std::size_t replicates,
                                              std::uint64_t seed, double delta = 1.0);

}  // namespace dbw
