#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dbw/tapers.hpp"
#include "dbw/types.hpp"

namespace dbw {

class ParametricModel;

// Fourier frequencies 2 pi k / (n delta), k = -ceil(n/2)+1 .. floor(n/2),
// stored ascending.
class FrequencyGrid {
 public:
  FrequencyGrid(std::size_t n, double delta);

  std::size_t size() const { return omega_.size(); }
  double delta() const { return delta_; }
  std::span<const double> frequencies() const { return omega_; }
  double operator[](std::size_t i) const { return omega_[i]; }

  // Position of omega = 0 in the ascending order.
  std::size_t zero_index() const { return zero_; }
  // FFT bin (k mod n) holding ascending position i.
  std::size_t fft_bin(std::size_t i) const { return (i + size() - zero_) % size(); }

 private:
  std::vector<double> omega_;
  double delta_;
  std::size_t zero_;
};

FrequencyGrid fourier_grid(std::size_t n, double delta);

// Values on an ascending Fourier grid. `clamped` counts expected-spectrum
// entries raised to the positivity floor.
struct SpectralEstimate {
  FrequencyGrid grid;
  std::vector<double> values;
  std::size_t clamped = 0;
};

// I(omega) = |J(omega)|^2, J = (delta/n)^{1/2} sum_t X_t exp(-i omega t delta).
SpectralEstimate periodogram(const TimeSeries& x);

// I(omega; h) = |delta^{1/2} sum_t h_t X_t exp(-i omega t delta)|^2.
SpectralEstimate tapered_periodogram(const TimeSeries& x, const Taper& h);

// F(omega) = (delta / 2 pi n) sin^2(n omega delta / 2) / sin^2(omega delta / 2).
double fejer_kernel(double omega, std::size_t n, double delta);

// Relative positivity floor applied to expected spectra: values below
// kClampEpsilon * s(0) * delta are raised to it and counted.
inline constexpr double kClampEpsilon = 1e-12;

// E{I(omega)} for a length-n sample with autocovariance s (lags 0..n-1 used).
SpectralEstimate expected_periodogram(const AutocovarianceSequence& s, std::size_t n);

// E{I(omega; h)} for a length-n taper.
SpectralEstimate expected_tapered_spectrum(const AutocovarianceSequence& s, const Taper& h, std::size_t n);

// General form: 2 delta Re{sum_tau kernel(tau) s(tau) e^{-i omega tau delta}} - delta kernel(0) s(0).
SpectralEstimate expected_spectrum(const AutocovarianceSequence& s, std::span<const double> kernel);

// O(n^2) reference for expected_periodogram: (delta/n) sum_t sum_u s(t-u) e^{-i omega (t-u) delta}.
std::vector<double> expected_periodogram_direct(const AutocovarianceSequence& s, std::size_t n);

// Y_t = X_{t+1} - X_t.
TimeSeries difference_series(const TimeSeries& x);

// s_Y(tau) = 2 s(tau) - s(tau+1) - s(tau-1), tau = 0..size()-2.
AutocovarianceSequence difference_autocovariance(const AutocovarianceSequence& s);

// Heuristic score-variance bound per parameter,
//   max(fbar)^2 * ||d fbar / d theta_i||_inf^2 / (n * min(fbar)^4),
// with fbar the expected periodogram of the `difference_order`-times
// differenced process over its nonzero Fourier frequencies (all frequencies
// when undifferenced). Derivatives by central differences with step
// 1e-5 * max(1, |theta_i|). A vanishing min(fbar) yields +inf.
std::vector<double> dynamic_range_diagnostic(const ParametricModel& model, std::span<const double> theta,
                                             std::size_t n, double delta, int difference_order = 0);

}  // namespace dbw
