#include "dbw/models.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "dbw/estimation.hpp"

namespace dbw {

bool ParametricModel::within_bounds(std::span<const double> theta, double delta) const {
  const auto b = bounds(delta);
  if (theta.size() != b.size()) {
    return false;
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!(theta[i] >= b[i].lower && theta[i] <= b[i].upper)) {
      return false;
    }
  }
  return true;
}

void MaternParams::validate() const {
  if (!(amplitude > 0.0) || !(damping > 0.0) || !(slope > 0.5) || !std::isfinite(amplitude) ||
      !std::isfinite(damping) || !std::isfinite(slope)) {
    throw std::invalid_argument("invalid Matern parameters: need A > 0, c > 0, alpha > 1/2 (got A=" +
                                std::to_string(amplitude) + ", c=" + std::to_string(damping) +
                                ", alpha=" + std::to_string(slope) + ")");
  }
}

double matern_spectrum(const MaternParams& p, double omega) {
  return p.amplitude * p.amplitude * std::pow(omega * omega + p.damping * p.damping, -p.slope);
}

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

// log of A^2 Gamma(nu) / (2 sqrt(pi) Gamma(alpha) c^{2 nu}), the variance.
double matern_log_variance(const MaternParams& p) {
  const double nu = p.slope - 0.5;
  return 2.0 * std::log(p.amplitude) + std::lgamma(nu) - std::log(2.0 * kSqrtPi) - std::lgamma(p.slope) -
         2.0 * nu * std::log(p.damping);
}

// log of A^2 / (sqrt(pi) Gamma(alpha) (2c)^nu), the prefactor of
// lag^nu K_nu(c lag).
double matern_log_prefactor(const MaternParams& p) {
  const double nu = p.slope - 0.5;
  return 2.0 * std::log(p.amplitude) - std::log(kSqrtPi) - std::lgamma(p.slope) -
         nu * std::log(2.0 * p.damping);
}

class LagPowers {
 public:
  const std::vector<double>& get(double nu, double delta, std::size_t lags) {
    if (nu != nu_ || delta != delta_ || values_.size() < lags) {
      nu_ = nu;
      delta_ = delta;
      values_.resize(lags);
      for (std::size_t tau = 0; tau < lags; ++tau) {
        values_[tau] = std::pow(static_cast<double>(tau) * delta, nu);
      }
    }
    return values_;
  }

 private:
  double nu_ = -1.0;
  double delta_ = -1.0;
  std::vector<double> values_;
};

// Arguments beyond this make K_nu underflow relative to the variance.
constexpr double kBesselCutoff = 650.0;

}  // namespace

AutocovarianceSequence matern_autocovariance(const MaternParams& p, double delta, std::size_t max_lag) {
  p.validate();
  if (!(delta > 0.0)) {
    throw std::invalid_argument("matern_autocovariance: delta must be positive");
  }
  const std::size_t lags = max_lag + 1;
  std::vector<double> s(lags, 0.0);
  s[0] = std::exp(matern_log_variance(p));
  if (lags == 1) {
    return AutocovarianceSequence(std::move(s), delta);
  }

  const double nu = p.slope - 0.5;
  const double x1 = p.damping * delta;
  const double x_max = x1 * static_cast<double>(max_lag);

  // K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt, trapezoid on t_j = j h.
  // The integrand is entire, so the rule converges geometrically; its peak
  // narrows like x^{-1/2}, which sets h from the largest argument that still
  // matters relative to s(0).
  const double x_cap = std::clamp(x_max, 1.0, 150.0);
  const double h = std::min(0.2, std::numbers::pi * std::sqrt(2.0 / (38.0 * x_cap)));

  // Nodes out to where the integrand at x1 (the widest case) has dropped
  // by e^-42 from its peak.
  std::vector<double> cosh_t;
  std::vector<double> weight;
  double peak = -std::numeric_limits<double>::infinity();
  double prev = peak;
  for (std::size_t j = 0; j < 20000; ++j) {
    const double t = static_cast<double>(j) * h;
    const double ct = std::cosh(t);
    // log cosh(nu t) without overflow.
    const double log_cnu = nu * t + std::log1p(std::exp(-2.0 * nu * t)) - std::numbers::ln2;
    const double log_g = -x1 * ct + log_cnu;
    peak = std::max(peak, log_g);
    cosh_t.push_back(ct);
    weight.push_back(j == 0 ? 0.5 * h : h);
    // Weights carry cosh(nu t) in log form relative to the peak to avoid
    // overflow for tiny x1; rescaled below.
    weight.back() = std::log(weight.back()) + log_cnu;
    if (log_g < prev && log_g < peak - 42.0) {
      break;
    }
    prev = log_g;
  }
  // Shift the log weights by a common offset folded back into the prefactor.
  const double offset = *std::ranges::max_element(weight);
  for (auto& w : weight) {
    w = std::exp(w - offset);
  }
  const double log_pref = matern_log_prefactor(p) + offset;

  std::size_t active = weight.size();
  std::vector<double> ratio(active);
  std::vector<double> power(active);
  for (std::size_t j = 0; j < active; ++j) {
    ratio[j] = std::exp(-x1 * cosh_t[j]);
    power[j] = 1.0;
  }

  // (tau delta)^nu depends on theta only through alpha, so repeated calls
  // during a fit reuse the table.
  thread_local LagPowers cache;
  const auto& lag_power = cache.get(nu, delta, lags);
  const double pref = std::exp(log_pref);
  const bool scaled = std::isfinite(pref) && pref > 0.0;

  constexpr std::size_t kResync = 128;
  for (std::size_t tau = 1; tau < lags; ++tau) {
    const double x = x1 * static_cast<double>(tau);
    if (x > kBesselCutoff) {
      break;
    }
    if (tau % kResync == 0) {
      for (std::size_t j = 0; j < active; ++j) {
        power[j] = std::exp(-x * cosh_t[j]);
      }
    } else {
      for (std::size_t j = 0; j < active; ++j) {
        power[j] *= ratio[j];
      }
    }
    // Four partial sums so the reduction pipelines.
    double part[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t j = 0;
    for (; j + 4 <= active; j += 4) {
      for (std::size_t k = 0; k < 4; ++k) {
        part[k] += weight[j + k] * power[j + k];
      }
    }
    for (; j < active; ++j) {
      part[0] += weight[j] * power[j];
    }
    const double sum = (part[0] + part[1]) + (part[2] + part[3]);
    // Nodes further out decay faster in tau than the ones inside, so once
    // negligible they stay negligible.
    while (active > 1 && weight[active - 1] * power[active - 1] < 1e-18 * sum) {
      --active;
    }
    s[tau] = scaled ? pref * lag_power[tau] * sum
                    : std::exp(log_pref + nu * std::log(static_cast<double>(tau) * delta)) * sum;
  }
  return AutocovarianceSequence(std::move(s), delta);
}

AutocovarianceSequence matern_autocovariance_bessel(const MaternParams& p, double delta, std::size_t max_lag) {
  p.validate();
  const double nu = p.slope - 0.5;
  std::vector<double> s(max_lag + 1, 0.0);
  s[0] = std::exp(matern_log_variance(p));
  const double log_pref = matern_log_prefactor(p);
  for (std::size_t tau = 1; tau <= max_lag; ++tau) {
    const double lag = static_cast<double>(tau) * delta;
    const double x = p.damping * lag;
    if (x > kBesselCutoff) {
      break;
    }
    s[tau] = std::exp(log_pref + nu * std::log(lag)) * std::cyl_bessel_k(nu, x);
  }
  return AutocovarianceSequence(std::move(s), delta);
}

AutocovarianceSequence complex_matern_autocovariance(const MaternParams& p, double delta, std::size_t max_lag) {
  const auto real = matern_autocovariance(p, delta, max_lag);
  return AutocovarianceSequence(std::vector<cdouble>(real.values().begin(), real.values().end()), delta);
}

double diffusivity(const MaternParams& p) {
  p.validate();
  return p.amplitude * p.amplitude / (4.0 * std::pow(p.damping, 2.0 * p.slope));
}

// --- MaternModel -----------------------------------------------------------

MaternParams MaternModel::params(std::span<const double> theta) {
  if (theta.size() != 3) {
    throw std::invalid_argument("matern model expects theta = (A, c, alpha)");
  }
  return {theta[0], theta[1], theta[2]};
}

std::vector<Bounds> MaternModel::bounds(double delta) const {
  return {{1e-10, 1e10}, {1e-8 / delta, std::numbers::pi / delta}, {0.51, 10.0}};
}

AutocovarianceSequence MaternModel::autocovariance(std::span<const double> theta, double delta,
                                                   std::size_t lags) const {
  return matern_autocovariance(params(theta), delta, lags - 1);
}

double MaternModel::spectrum(std::span<const double> theta, double omega, double) const {
  return matern_spectrum(params(theta), omega);
}

std::vector<double> MaternModel::initial_guess(const TimeSeries& x, int side) const {
  return initialize_matern(x, side);
}

std::map<std::string, double> MaternModel::derived(std::span<const double> theta) const {
  const auto p = params(theta);
  return {{"damping_timescale", 1.0 / p.damping}, {"slope", 2.0 * p.slope}, {"diffusivity", diffusivity(p)}};
}

// --- FixedSlopeMaternModel -------------------------------------------------

FixedSlopeMaternModel::FixedSlopeMaternModel(double slope, double amplitude_ratio)
    : slope_(slope), ratio_(amplitude_ratio) {
  if (!(slope > 0.5) || !(amplitude_ratio > 0.0)) {
    throw std::invalid_argument("matern_fixed_slope: need slope > 1/2 and amplitude_ratio > 0");
  }
}

MaternParams FixedSlopeMaternModel::params(std::span<const double> theta) const {
  if (theta.size() != 1) {
    throw std::invalid_argument("matern_fixed_slope expects theta = (c)");
  }
  return {ratio_ * theta[0], theta[0], slope_};
}

std::vector<Bounds> FixedSlopeMaternModel::bounds(double delta) const {
  return {{1e-8 / delta, std::numbers::pi / delta}};
}

AutocovarianceSequence FixedSlopeMaternModel::autocovariance(std::span<const double> theta, double delta,
                                                             std::size_t lags) const {
  return matern_autocovariance(params(theta), delta, lags - 1);
}

double FixedSlopeMaternModel::spectrum(std::span<const double> theta, double omega, double) const {
  return matern_spectrum(params(theta), omega);
}

std::vector<double> FixedSlopeMaternModel::initial_guess(const TimeSeries& x, int) const {
  const auto b = bounds(x.delta());
  const double c0 = 100.0 * std::numbers::pi / (static_cast<double>(x.size()) * x.delta());
  return {std::clamp(c0, b[0].lower, b[0].upper)};
}

std::map<std::string, double> FixedSlopeMaternModel::derived(std::span<const double> theta) const {
  const auto p = params(theta);
  return {{"damping_timescale", 1.0 / p.damping}, {"slope", 2.0 * p.slope}, {"diffusivity", diffusivity(p)},
          {"A", p.amplitude}};
}

// --- WhiteNoiseModel -------------------------------------------------------

std::vector<Bounds> WhiteNoiseModel::bounds(double) const { return {{1e-10, 1e10}}; }

AutocovarianceSequence WhiteNoiseModel::autocovariance(std::span<const double> theta, double delta,
                                                       std::size_t lags) const {
  if (theta.size() != 1 || !(theta[0] >= 0.0)) {
    throw std::invalid_argument("white_noise expects theta = (sigma2 >= 0)");
  }
  std::vector<double> s(lags, 0.0);
  s[0] = theta[0];
  return AutocovarianceSequence(std::move(s), delta);
}

// Half-open band (-pi/delta, pi/delta], so folding counts the Nyquist frequency once.
double WhiteNoiseModel::spectrum(std::span<const double> theta, double omega, double delta) const {
  const double nyquist = std::numbers::pi / delta;
  return omega > -nyquist && omega <= nyquist ? theta[0] * delta : 0.0;
}

std::vector<double> WhiteNoiseModel::initial_guess(const TimeSeries& x, int) const {
  double acc = 0.0;
  for (const auto& v : x.values()) {
    acc += std::norm(v);
  }
  const auto b = bounds(x.delta());
  return {std::clamp(acc / static_cast<double>(x.size()), b[0].lower, b[0].upper)};
}

// --- aliasing --------------------------------------------------------------

double aliased_spectrum_at(const ParametricModel& model, std::span<const double> theta, double omega,
                           double delta, std::size_t wrap_terms) {
  const double period = 2.0 * std::numbers::pi / delta;
  double sum = model.spectrum(theta, omega, delta);
  for (std::size_t k = 1; k <= wrap_terms; ++k) {
    const double shift = period * static_cast<double>(k);
    sum += model.spectrum(theta, omega + shift, delta) + model.spectrum(theta, omega - shift, delta);
  }
  // Terms |k| > K: sum_k g(k) ~ int_{K+1/2}^inf g, i.e. (delta / 2 pi) times
  // the spectrum integrated beyond omega +- (K + 1/2) * period.
  const double edge = period * (static_cast<double>(wrap_terms) + 0.5);
  boost::math::quadrature::exp_sinh<double> integrator;
  auto tail = [&](double start, double sign) {
    return integrator.integrate([&](double u) { return model.spectrum(theta, start + sign * u, delta); }, 0.0,
                                std::numeric_limits<double>::infinity());
  };
  sum += (tail(omega + edge, 1.0) + tail(omega - edge, -1.0)) / period;
  return sum;
}

SpectralEstimate aliased_spectrum(const ParametricModel& model, std::span<const double> theta,
                                  const FrequencyGrid& grid, std::size_t wrap_terms) {
  if (wrap_terms < 1) {
    throw std::invalid_argument("aliased_spectrum: wrap_terms must be >= 1");
  }
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    values[i] = aliased_spectrum_at(model, theta, grid[i], grid.delta(), wrap_terms);
  }
  return {grid, std::move(values), 0};
}

SpectralEstimate aliased_spectrum(const ParametricModel& model, std::span<const double> theta,
                                  const FrequencyGrid& grid) {
  std::size_t k = 1000;
  auto current = aliased_spectrum(model, theta, grid, k);
  while (k < 64000) {
    k *= 2;
    auto next = aliased_spectrum(model, theta, grid, k);
    double change = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      change = std::max(change, std::abs(next.values[i] - current.values[i]) / std::abs(next.values[i]));
    }
    current = std::move(next);
    if (change < 1e-6) {
      break;
    }
  }
  return current;
}

std::shared_ptr<const ParametricModel> make_model(const std::string& name, double slope, double amplitude_ratio) {
  if (name == "matern") {
    return std::make_shared<MaternModel>();
  }
  if (name == "matern_fixed_slope") {
    return std::make_shared<FixedSlopeMaternModel>(slope, amplitude_ratio);
  }
  if (name == "white_noise") {
    return std::make_shared<WhiteNoiseModel>();
  }
  throw std::invalid_argument("unknown model '" + name + "' (expected matern, matern_fixed_slope, white_noise)");
}

}  // namespace dbw
