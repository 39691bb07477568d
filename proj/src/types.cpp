#include "dbw/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dbw {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("sampling interval must be positive and finite");
  }
}

std::vector<cdouble> to_complex(const std::vector<double>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

TimeSeries::TimeSeries(std::vector<double> values, double delta)
    : TimeSeries(to_complex(values), delta) {
  complex_ = false;
}

TimeSeries::TimeSeries(std::vector<cdouble> values, double delta)
    : values_(std::move(values)), delta_(delta), complex_(true) {
  check_delta(delta_);
  if (values_.size() < 2) {
    throw std::invalid_argument("time series needs at least 2 samples");
  }
  for (std::size_t t = 0; t < values_.size(); ++t) {
    if (!std::isfinite(values_[t].real()) || !std::isfinite(values_[t].imag())) {
      throw std::invalid_argument("non-finite sample at index " + std::to_string(t));
    }
  }
}

std::vector<double> TimeSeries::real_values() const {
  if (complex_) {
    throw std::logic_error("real_values() called on a complex series");
  }
  std::vector<double> out(values_.size());
  std::ranges::transform(values_, out.begin(), [](cdouble z) { return z.real(); });
  return out;
}

AutocovarianceSequence::AutocovarianceSequence(std::vector<double> lags, double delta)
    : AutocovarianceSequence(to_complex(lags), delta) {}

AutocovarianceSequence::AutocovarianceSequence(std::vector<cdouble> lags, double delta)
    : lags_(std::move(lags)), delta_(delta) {
  check_delta(delta_);
  if (lags_.empty()) {
    throw std::invalid_argument("autocovariance sequence is empty");
  }
  for (const auto& s : lags_) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      throw std::invalid_argument("non-finite autocovariance value");
    }
  }
  const cdouble s0 = lags_.front();
  if (s0.real() < 0.0 || std::abs(s0.imag()) > 1e-12 * std::max(1.0, std::abs(s0))) {
    throw std::invalid_argument("s(0) must be real and nonnegative");
  }
  lags_.front() = s0.real();
}

bool AutocovarianceSequence::is_real() const {
  return std::ranges::all_of(lags_, [](cdouble s) { return s.imag() == 0.0; });
}

bool AutocovarianceSequence::satisfies_cauchy_schwarz(double rel_tol) const {
  const double s0 = variance();
  return std::ranges::all_of(lags_, [&](cdouble s) { return std::abs(s) <= s0 * (1.0 + rel_tol); });
}

}  // namespace dbw
