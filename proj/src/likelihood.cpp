#include "dbw/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dbw/fft.hpp"
#include "dbw/levinson.hpp"

namespace dbw {

void LikelihoodSpec::validate() const {
  if (difference_order < 0 || difference_order > 2) {
    throw std::invalid_argument("difference_order must be 0, 1 or 2");
  }
  if (variant == Variant::exact_ml && (taper != TaperKind::none || !mask.is_default())) {
    throw std::invalid_argument("exact_ml admits neither a taper nor a frequency mask");
  }
  if (taper == TaperKind::dpss && !(nw >= 1.0)) {
    throw std::invalid_argument("DPSS bandwidth product nw must be >= 1");
  }
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::exact_ml:
      return "exact";
    case Variant::whittle:
      return "whittle";
    case Variant::debiased_whittle:
      return "debiased";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "exact" || s == "exact_ml") {
    return Variant::exact_ml;
  }
  if (s == "whittle") {
    return Variant::whittle;
  }
  if (s == "debiased" || s == "debiased_whittle") {
    return Variant::debiased_whittle;
  }
  throw std::invalid_argument("unknown likelihood '" + s + "' (expected exact, whittle, debiased)");
}

namespace {

std::string describe(std::span<const double> theta) {
  std::ostringstream os;
  os.precision(17);
  os << "theta = (";
  for (std::size_t i = 0; i < theta.size(); ++i) {
    os << (i ? ", " : "") << theta[i];
  }
  os << ")";
  return os.str();
}

double difference_gain(double omega, double delta, int order) {
  const double s = std::sin(omega * delta / 2.0);
  return std::pow(4.0 * s * s, order);
}

}  // namespace

Likelihood::Likelihood(const TimeSeries& x, std::shared_ptr<const ParametricModel> model, LikelihoodSpec spec)
    : model_(std::move(model)),
      spec_(std::move(spec)),
      delta_(x.delta()),
      original_length_(x.size()),
      complex_(x.is_complex()) {
  if (!model_) {
    throw std::invalid_argument("likelihood needs a model");
  }
  spec_.validate();
  const auto order = static_cast<std::size_t>(spec_.difference_order);
  if (x.size() < order + 2) {
    throw std::invalid_argument("series too short for the requested differencing");
  }
  TimeSeries y = x;
  for (std::size_t d = 0; d < order; ++d) {
    y = difference_series(y);
  }
  length_ = y.size();

  if (spec_.variant == Variant::exact_ml) {
    series_.assign(y.values().begin(), y.values().end());
    return;
  }

  SpectralEstimate data = [&] {
    if (spec_.taper == TaperKind::dpss) {
      taper_ = dpss_taper(length_, spec_.nw);
      return tapered_periodogram(y, *taper_);
    }
    return periodogram(y);
  }();
  if (taper_) {
    kernel_.assign(taper_->kernel().begin(), taper_->kernel().end());
  } else {
    kernel_.resize(length_);
    for (std::size_t tau = 0; tau < length_; ++tau) {
      kernel_[tau] = 1.0 - static_cast<double>(tau) / static_cast<double>(length_);
    }
  }

  const std::size_t p = model_->parameter_count();
  for (std::size_t i = 0; i < data.grid.size(); ++i) {
    const double omega = data.grid[i];
    if (order > 0 && i == data.grid.zero_index()) {
      continue;
    }
    if (spec_.mask.side == Side::positive && !(omega > 0.0)) {
      continue;
    }
    if (spec_.mask.side == Side::negative && !(omega < 0.0)) {
      continue;
    }
    if (spec_.mask.band && !spec_.mask.band(omega)) {
      continue;
    }
    index_.push_back(i);
    omega_.push_back(omega);
    data_.push_back(data.values[i]);
  }
  const std::size_t floor = std::max<std::size_t>(8, 2 * p);
  if (index_.size() < floor) {
    throw std::invalid_argument("frequency mask keeps " + std::to_string(index_.size()) +
                                " frequencies; at least " + std::to_string(floor) + " are needed");
  }
}

std::vector<double> Likelihood::expected(std::span<const double> theta, std::size_t* clamped) const {
  auto s = model_->autocovariance(theta, delta_, original_length_);
  if (s.is_real()) {
    return expected_real(s, clamped);
  }
  for (int d = 0; d < spec_.difference_order; ++d) {
    s = difference_autocovariance(s);
  }
  const SpectralEstimate est = expected_spectrum(s, kernel_);
  std::vector<double> out(index_.size());
  std::size_t count = 0;
  const double floor = kClampEpsilon * s.variance() * delta_;
  for (std::size_t k = 0; k < index_.size(); ++k) {
    out[k] = est.values[index_[k]];
    if (out[k] <= floor) {
      ++count;
    }
  }
  if (clamped != nullptr) {
    *clamped = count;
  }
  return out;
}

// Real autocovariance: difference, weight and transform in real arithmetic,
// reading off only the masked bins of a half-length transform.
std::vector<double> Likelihood::expected_real(const AutocovarianceSequence& s, std::size_t* clamped) const {
  std::vector<double> r(s.size());
  for (std::size_t tau = 0; tau < r.size(); ++tau) {
    r[tau] = s[tau].real();
  }
  for (int d = 0; d < spec_.difference_order; ++d) {
    // s_Y(tau) = 2 s(tau) - s(tau + 1) - s(|tau - 1|), in place from the front.
    double prev = r[1];
    for (std::size_t tau = 0; tau + 1 < r.size(); ++tau) {
      const double cur = r[tau];
      r[tau] = 2.0 * cur - r[tau + 1] - prev;
      prev = cur;
    }
    r.pop_back();
    r[0] = std::max(0.0, r[0]);
  }
  const std::size_t m = length_;
  const double s0 = r[0];
  for (std::size_t tau = 0; tau < m; ++tau) {
    r[tau] *= kernel_[tau];
  }
  r.resize(m);
  std::vector<cdouble> half(m / 2 + 1);
  fft::forward_real(r, half);

  const double correction = delta_ * kernel_[0] * s0;
  const double floor = kClampEpsilon * s0 * delta_;
  const std::size_t zero = (m - 1) / 2;  // position of omega = 0 on the ascending grid
  std::vector<double> out(index_.size());
  std::size_t count = 0;
  for (std::size_t k = 0; k < index_.size(); ++k) {
    std::size_t bin = (index_[k] + m - zero) % m;
    if (bin > m / 2) {
      bin = m - bin;
    }
    double v = 2.0 * delta_ * half[bin].real() - correction;
    if (v <= floor) {
      v = floor;
      ++count;
    }
    out[k] = v;
  }
  if (clamped != nullptr) {
    *clamped = count;
  }
  return out;
}

std::vector<double> Likelihood::model_spectrum(std::span<const double> theta) const {
  if (spec_.variant == Variant::exact_ml) {
    throw std::logic_error("model_spectrum is undefined for exact_ml");
  }
  if (spec_.variant == Variant::debiased_whittle) {
    return expected(theta, nullptr);
  }
  std::vector<double> out(omega_.size());
  for (std::size_t k = 0; k < omega_.size(); ++k) {
    const double base = spec_.whittle_uses_aliased ? aliased_spectrum_at(*model_, theta, omega_[k], delta_, 1000)
                                                   : model_->spectrum(theta, omega_[k], delta_);
    out[k] = base * difference_gain(omega_[k], delta_, spec_.difference_order);
  }
  return out;
}

ObjectiveValue Likelihood::whittle_sum(std::span<const double> model_values, std::span<const double> data,
                                       std::size_t clamped) const {
  ObjectiveValue result;
  result.n_frequencies_used = model_values.size();
  // sum log f as the log of a running product of mantissas plus the summed
  // binary exponents: one log per call instead of one per frequency.
  double ratio = 0.0;
  double mantissa = 1.0;
  long long exponent = 0;
  for (std::size_t k = 0; k < model_values.size(); ++k) {
    const double f = model_values[k];
    if (!(f > 1e-300) || !std::isfinite(f)) {
      std::ostringstream os;
      os << "model spectrum is not positive and finite at masked frequency omega = " << omega_[k]
         << "; exclude it from the frequency mask";
      throw std::domain_error(os.str());
    }
    int e = 0;
    mantissa *= std::frexp(f, &e);
    exponent += e;
    if ((k & 255) == 255) {
      mantissa = std::frexp(mantissa, &e);
      exponent += e;
    }
    ratio += data[k] / f;
  }
  const double log_sum = std::log(mantissa) + static_cast<double>(exponent) * std::numbers::ln2;
  result.value = -(log_sum + ratio);
  if (clamped > 0) {
    result.warnings.push_back("expected spectrum clamped to its positivity floor at " + std::to_string(clamped) +
                              " frequencies");
  }
  return result;
}

ObjectiveValue Likelihood::evaluate(std::span<const double> theta) const {
  if (spec_.variant != Variant::exact_ml) {
    return evaluate_against(theta, data_);
  }
  auto s = model_->autocovariance(theta, delta_, original_length_);
  for (int d = 0; d < spec_.difference_order; ++d) {
    s = difference_autocovariance(s);
  }
  ToeplitzLikelihoodTerms terms{};
  try {
    if (complex_ || !s.is_real()) {
      terms = levinson_terms(s.values().first(length_), series_);
    } else {
      std::vector<double> sr(length_);
      std::vector<double> xr(length_);
      for (std::size_t t = 0; t < length_; ++t) {
        sr[t] = s[t].real();
        xr[t] = series_[t].real();
      }
      terms = levinson_terms(sr, xr);
    }
  } catch (const std::domain_error& e) {
    throw std::domain_error(std::string("exact likelihood factorization failed at ") + describe(theta) + ": " +
                            e.what());
  }
  ObjectiveValue result;
  result.value = -terms.log_det - terms.quadratic_form;
  result.n_frequencies_used = length_;
  return result;
}

ObjectiveValue Likelihood::evaluate_against(std::span<const double> theta, std::span<const double> data_spectrum) const {
  if (spec_.variant == Variant::exact_ml) {
    throw std::logic_error("evaluate_against is undefined for exact_ml");
  }
  if (data_spectrum.size() != index_.size()) {
    throw std::invalid_argument("data spectrum has the wrong number of frequencies");
  }
  std::size_t clamped = 0;
  const auto f = spec_.variant == Variant::debiased_whittle ? expected(theta, &clamped) : model_spectrum(theta);
  return whittle_sum(f, data_spectrum, clamped);
}

std::vector<double> Likelihood::score(std::span<const double> theta) const { return score_against(theta, data_); }

std::vector<double> Likelihood::score_against(std::span<const double> theta,
                                              std::span<const double> data_spectrum) const {
  if (spec_.variant == Variant::exact_ml) {
    throw std::logic_error("score is defined for the Whittle variants only");
  }
  const auto f = model_spectrum(theta);
  std::vector<double> th(theta.begin(), theta.end());
  std::vector<double> out(theta.size(), 0.0);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(theta[i]));
    th[i] = theta[i] + h;
    const auto up = model_spectrum(th);
    th[i] = theta[i] - h;
    const auto down = model_spectrum(th);
    th[i] = theta[i];
    double acc = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double df = (up[k] - down[k]) / (2.0 * h);
      acc += df * (data_spectrum[k] - f[k]) / (f[k] * f[k]);
    }
    out[i] = acc;
  }
  return out;
}

ObjectiveValue exact_log_likelihood(const TimeSeries& x, std::shared_ptr<const ParametricModel> model,
                                    std::span<const double> theta) {
  LikelihoodSpec spec;
  spec.variant = Variant::exact_ml;
  return Likelihood(x, std::move(model), spec).evaluate(theta);
}

ObjectiveValue whittle(const TimeSeries& x, std::shared_ptr<const ParametricModel> model,
                       std::span<const double> theta, LikelihoodSpec spec) {
  if (spec.variant != Variant::whittle) {
    throw std::invalid_argument("whittle() needs spec.variant == whittle");
  }
  return Likelihood(x, std::move(model), std::move(spec)).evaluate(theta);
}

ObjectiveValue debiased_whittle(const TimeSeries& x, std::shared_ptr<const ParametricModel> model,
                                std::span<const double> theta, LikelihoodSpec spec) {
  if (spec.variant != Variant::debiased_whittle) {
    throw std::invalid_argument("debiased_whittle() needs spec.variant == debiased_whittle");
  }
  return Likelihood(x, std::move(model), std::move(spec)).evaluate(theta);
}

ScoreHessian score_and_hessian_fd(const std::function<double(std::span<const double>)>& objective,
                                  std::span<const double> theta, std::span<const Bounds> bounds) {
  const std::size_t p = theta.size();
  std::vector<double> step(p);
  for (std::size_t i = 0; i < p; ++i) {
    step[i] = 1e-5 * std::max(1.0, std::abs(theta[i]));
    if (!bounds.empty() &&
        (theta[i] - step[i] < bounds[i].lower || theta[i] + step[i] > bounds[i].upper)) {
      throw std::domain_error("score_and_hessian_fd: parameter " + std::to_string(i) +
                              " is within one step of its bound");
    }
  }
  std::vector<double> th(theta.begin(), theta.end());
  auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
    th[i] += di;
    th[j] += dj;
    const double v = objective(th);
    th[i] -= di;
    th[j] -= dj;
    return v;
  };

  const double f0 = objective(theta);
  ScoreHessian out{std::vector<double>(p), std::vector<std::vector<double>>(p, std::vector<double>(p))};
  for (std::size_t i = 0; i < p; ++i) {
    const double h = step[i];
    const double up = at(i, h, i, 0.0);
    const double down = at(i, -h, i, 0.0);
    out.gradient[i] = (up - down) / (2.0 * h);
    out.hessian[i][i] = (up - 2.0 * f0 + down) / (h * h);
    for (std::size_t j = 0; j < i; ++j) {
      const double k = step[j];
      const double v = (at(i, h, j, k) - at(i, h, j, -k) - at(i, -h, j, k) + at(i, -h, j, -k)) / (4.0 * h * k);
      out.hessian[i][j] = v;
      out.hessian[j][i] = v;
    }
  }
  return out;
}

}  // namespace dbw
