#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dbw/spectral.hpp"
#include "dbw/types.hpp"

namespace dbw {

struct Bounds {
  double lower;
  double upper;
};

// A family of second-order stationary processes indexed by a parameter
// vector theta. Implementations are immutable and thread-safe.
class ParametricModel {
 public:
  virtual ~ParametricModel() = default;

  virtual std::string name() const = 0;
  virtual std::vector<std::string> parameter_names() const = 0;
  // Admissible (compact) parameter box; may depend on the sampling interval.
  virtual std::vector<Bounds> bounds(double delta) const = 0;

  // s(tau; theta) for tau = 0..lags-1 at sampling interval delta.
  virtual AutocovarianceSequence autocovariance(std::span<const double> theta, double delta,
                                                std::size_t lags) const = 0;
  // Continuous-time spectrum f~(omega; theta). Discrete-time models return
  // their spectrum inside the Nyquist band and zero outside.
  virtual double spectrum(std::span<const double> theta, double omega, double delta) const = 0;

  // Starting point for optimisation, computed from the data on the
  // frequencies selected by `side` (+1 positive, -1 negative, 0 both).
  virtual std::vector<double> initial_guess(const TimeSeries& x, int side) const = 0;

  // Reparametrised quantities reported with a fit.
  virtual std::map<std::string, double> derived(std::span<const double>) const { return {}; }

  std::size_t parameter_count() const { return parameter_names().size(); }
  bool within_bounds(std::span<const double> theta, double delta) const;
};

// Continuous-time Matern process with spectrum A^2 / (omega^2 + c^2)^alpha.
struct MaternParams {
  double amplitude;  // A
  double damping;    // c, inverse time units
  double slope;      // alpha > 1/2

  void validate() const;
};

double matern_spectrum(const MaternParams& p, double omega);

// s(tau) = (1/2pi) int f~(omega) exp(i omega tau delta) d omega, tau = 0..max_lag.
// Closed form A^2 / (sqrt(pi) Gamma(alpha)) (tau delta / 2c)^nu K_nu(c tau delta),
// nu = alpha - 1/2, with K_nu from a positive trapezoidal sum over its
// integral representation (shared nodes across lags, so every lag costs a
// handful of multiply-adds).
AutocovarianceSequence matern_autocovariance(const MaternParams& p, double delta, std::size_t max_lag);

// Same values through std::cyl_bessel_k, lag by lag. Slower; kept as an
// independent evaluation route.
AutocovarianceSequence matern_autocovariance_bessel(const MaternParams& p, double delta, std::size_t max_lag);

// Proper complex Matern with symmetric spectrum: E{Z_t conj(Z_{t-tau})},
// real-valued and equal to the real Matern autocovariance.
AutocovarianceSequence complex_matern_autocovariance(const MaternParams& p, double delta, std::size_t max_lag);

// kappa = A^2 / (4 c^{2 alpha}).
double diffusivity(const MaternParams& p);

// theta = (A, c, alpha). Bounds: A in [1e-10, 1e10], c in [1e-8, pi]/delta,
// alpha in [0.51, 10].
class MaternModel final : public ParametricModel {
 public:
  std::string name() const override { return "matern"; }
  std::vector<std::string> parameter_names() const override { return {"A", "c", "alpha"}; }
  std::vector<Bounds> bounds(double delta) const override;
  AutocovarianceSequence autocovariance(std::span<const double> theta, double delta,
                                        std::size_t lags) const override;
  double spectrum(std::span<const double> theta, double omega, double delta) const override;
  std::vector<double> initial_guess(const TimeSeries& x, int side) const override;
  std::map<std::string, double> derived(std::span<const double> theta) const override;

  static MaternParams params(std::span<const double> theta);
};

// Matern with known slope and amplitude tied to the damping, A = ratio * c;
// theta = (c). With alpha = 1.5 and ratio = sqrt(pi) the process has unit
// variance and c is a pure inverse length scale.
class FixedSlopeMaternModel final : public ParametricModel {
 public:
  FixedSlopeMaternModel(double slope, double amplitude_ratio);

  std::string name() const override { return "matern_fixed_slope"; }
  std::vector<std::string> parameter_names() const override { return {"c"}; }
  std::vector<Bounds> bounds(double delta) const override;
  AutocovarianceSequence autocovariance(std::span<const double> theta, double delta,
                                        std::size_t lags) const override;
  double spectrum(std::span<const double> theta, double omega, double delta) const override;
  std::vector<double> initial_guess(const TimeSeries& x, int side) const override;
  std::map<std::string, double> derived(std::span<const double> theta) const override;

  double slope() const { return slope_; }
  double amplitude_ratio() const { return ratio_; }
  MaternParams params(std::span<const double> theta) const;

 private:
  double slope_;
  double ratio_;
};

// Discrete white noise, theta = (sigma^2): s(0) = sigma^2, spectrum
// delta sigma^2 on (-pi/delta, pi/delta].
class WhiteNoiseModel final : public ParametricModel {
 public:
  std::string name() const override { return "white_noise"; }
  std::vector<std::string> parameter_names() const override { return {"sigma2"}; }
  std::vector<Bounds> bounds(double delta) const override;
  AutocovarianceSequence autocovariance(std::span<const double> theta, double delta,
                                        std::size_t lags) const override;
  double spectrum(std::span<const double> theta, double omega, double delta) const override;
  std::vector<double> initial_guess(const TimeSeries& x, int side) const override;
};

// Folded spectrum sum_{k=-K}^{K} f~(omega + 2 pi k / delta) plus an
// integral estimate of the |k| > K tails (midpoint Euler-Maclaurin), which
// makes slowly decaying spectra converge in K.
SpectralEstimate aliased_spectrum(const ParametricModel& model, std::span<const double> theta,
                                  const FrequencyGrid& grid, std::size_t wrap_terms);
double aliased_spectrum_at(const ParametricModel& model, std::span<const double> theta, double omega,
                           double delta, std::size_t wrap_terms);

// Starts at K = 1000 and doubles until the relative change is below 1e-6
// at every grid frequency.
SpectralEstimate aliased_spectrum(const ParametricModel& model, std::span<const double> theta,
                                  const FrequencyGrid& grid);

// Factory used by the CLI and experiment specs: "matern", "white_noise",
// "matern_fixed_slope" (needs slope and amplitude_ratio).
std::shared_ptr<const ParametricModel> make_model(const std::string& name, double slope = 1.5,
                                                  double amplitude_ratio = 1.0);

}  // namespace dbw
