#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "dbw/models.hpp"
#include "dbw/types.hpp"

namespace dbw {

// Reproducible random streams: replicate r of a run seeded with `seed`
// draws from std::mt19937_64 initialised with splitmix64(seed + r), and
// Gaussian variates come from the Box-Muller transform below (std::
// normal_distribution is implementation-defined, this is not).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t stream_seed);
  double next();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

// Callback returning lags 0..count-1 of the target autocovariance.
using AutocovarianceSource = std::function<AutocovarianceSequence(std::size_t count)>;

// Circulant embedding of the n x n Toeplitz covariance.
struct SimulationPlan {
  std::size_t n = 0;
  std::size_t embedding_size = 0;  // power of two >= 2(n-1)
  std::vector<double> sqrt_eigenvalues;  // sqrt(lambda_k / N)
  std::vector<double> eigenvalues;       // after clamping
  double variance = 0.0;
  double delta = 1.0;
  std::uint64_t seed = 0;
  std::size_t doublings = 0;
  std::size_t clamped = 0;  // eigenvalues in [-1e-8 s(0), 0) set to zero
};

// Builds the symmetric circulant extension with first row
// s(0), s(1), ..., s(N/2), s(N/2-1), ..., s(1) and takes its eigenvalues by
// FFT. When an eigenvalue falls below -1e-8 s(0) the embedding is doubled
// (requesting more lags from the source), at most 4 times.
SimulationPlan plan_simulation(const AutocovarianceSource& source, std::size_t n, double delta,
                               std::uint64_t seed);
// Fixed sequence: lags beyond those supplied are taken as zero.
SimulationPlan plan_simulation(const AutocovarianceSequence& s, std::size_t n, std::uint64_t seed);
// Model shortcut.
SimulationPlan plan_simulation(const ParametricModel& model, std::span<const double> theta, std::size_t n,
                               double delta, std::uint64_t seed);

// Replicate r: real part of one complex FFT draw (exact Gaussian, zero mean,
// autocovariance s(tau) for tau < n).
TimeSeries simulate_replicate(const SimulationPlan& plan, std::size_t replicate);
std::vector<TimeSeries> simulate_gaussian(const SimulationPlan& plan, std::size_t replicates);

// Proper complex replicate (X1 + i X2) / sqrt(2) from the real and imaginary
// parts of the same draw, which are independent copies.
TimeSeries simulate_complex_replicate(const SimulationPlan& plan, std::size_t replicate);
std::vector<TimeSeries> simulate_complex_proper(const SimulationPlan& plan, std::size_t replicates);

}  // namespace dbw
