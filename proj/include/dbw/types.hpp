#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace dbw {

using cdouble = std::complex<double>;

// Regularly sampled observations X_t, t = 1..n, with sampling interval delta.
// Real series are stored with zero imaginary part; is_complex() records which
// kind of process the data came from.
class TimeSeries {
 public:
  TimeSeries(std::vector<double> values, double delta);
  TimeSeries(std::vector<cdouble> values, double delta);

  std::size_t size() const { return values_.size(); }
  double delta() const { return delta_; }
  bool is_complex() const { return complex_; }
  std::span<const cdouble> values() const { return values_; }

  // Throws std::logic_error for complex series.
  std::vector<double> real_values() const;

 private:
  std::vector<cdouble> values_;
  double delta_;
  bool complex_;
};

// Autocovariance s(tau) for tau = 0..size()-1. Complex values cover proper
// complex processes, where s(-tau) = conj(s(tau)).
class AutocovarianceSequence {
 public:
  AutocovarianceSequence(std::vector<double> lags, double delta);
  AutocovarianceSequence(std::vector<cdouble> lags, double delta);

  std::size_t size() const { return lags_.size(); }
  double delta() const { return delta_; }
  double variance() const { return lags_.front().real(); }
  cdouble operator[](std::size_t tau) const { return lags_[tau]; }
  std::span<const cdouble> values() const { return lags_; }

  // True when every lag has zero imaginary part.
  bool is_real() const;
  // |s(tau)| <= s(0) for all tau, up to rel_tol * s(0).
  bool satisfies_cauchy_schwarz(double rel_tol = 1e-10) const;

 private:
  std::vector<cdouble> lags_;
  double delta_;
};

}  // namespace dbw
