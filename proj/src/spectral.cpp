#include "dbw/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "dbw/fft.hpp"
#include "dbw/models.hpp"

namespace dbw {

FrequencyGrid::FrequencyGrid(std::size_t n, double delta) : delta_(delta) {
  if (n < 2) {
    throw std::invalid_argument("fourier_grid: n must be >= 2");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("fourier_grid: delta must be positive");
  }
  const auto nn = static_cast<long long>(n);
  const long long k_lo = -((nn + 1) / 2) + 1;  // -ceil(n/2) + 1
  zero_ = static_cast<std::size_t>(-k_lo);
  const double spacing = 2.0 * std::numbers::pi / (static_cast<double>(n) * delta);
  omega_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    omega_[i] = spacing * static_cast<double>(k_lo + static_cast<long long>(i));
  }
}

FrequencyGrid fourier_grid(std::size_t n, double delta) { return FrequencyGrid(n, delta); }

namespace {

SpectralEstimate from_fft_bins(const std::vector<cdouble>& bins, double scale, double delta) {
  FrequencyGrid grid(bins.size(), delta);
  std::vector<double> values(bins.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = scale * std::norm(bins[grid.fft_bin(i)]);
  }
  return {std::move(grid), std::move(values), 0};
}

}  // namespace

SpectralEstimate periodogram(const TimeSeries& x) {
  std::vector<cdouble> buf(x.values().begin(), x.values().end());
  fft::forward(buf);
  return from_fft_bins(buf, x.delta() / static_cast<double>(x.size()), x.delta());
}

SpectralEstimate tapered_periodogram(const TimeSeries& x, const Taper& h) {
  if (h.size() != x.size()) {
    throw std::invalid_argument("tapered_periodogram: taper length " + std::to_string(h.size()) +
                                " differs from series length " + std::to_string(x.size()));
  }
  std::vector<cdouble> buf(x.size());
  const auto w = h.weights();
  const auto v = x.values();
  for (std::size_t t = 0; t < buf.size(); ++t) {
    buf[t] = w[t] * v[t];
  }
  fft::forward(buf);
  return from_fft_bins(buf, x.delta(), x.delta());
}

double fejer_kernel(double omega, std::size_t n, double delta) {
  const double nn = static_cast<double>(n);
  const double half = omega * delta / 2.0;
  const double denom = std::sin(half);
  if (std::abs(denom) < 1e-10) {
    return nn * delta / (2.0 * std::numbers::pi);
  }
  const double num = std::sin(nn * half);
  return delta / (2.0 * std::numbers::pi * nn) * (num * num) / (denom * denom);
}

SpectralEstimate expected_spectrum(const AutocovarianceSequence& s, std::span<const double> kernel) {
  const std::size_t n = kernel.size();
  if (n < 2) {
    throw std::invalid_argument("expected spectrum needs n >= 2");
  }
  if (s.size() < n) {
    throw std::invalid_argument("expected spectrum: need " + std::to_string(n) + " lags, got " +
                                std::to_string(s.size()));
  }
  const double delta = s.delta();
  std::vector<cdouble> buf;
  if (s.is_real()) {
    // Real input: half-length transform, the rest by conjugate symmetry
    // (only real parts are used below).
    std::vector<double> in(n);
    for (std::size_t tau = 0; tau < n; ++tau) {
      in[tau] = kernel[tau] * s[tau].real();
    }
    buf.resize(n / 2 + 1);
    fft::forward_real(in, buf);
    buf.resize(n);
    for (std::size_t k = n / 2 + 1; k < n; ++k) {
      buf[k] = std::conj(buf[n - k]);
    }
  } else {
    buf.resize(n);
    for (std::size_t tau = 0; tau < n; ++tau) {
      buf[tau] = kernel[tau] * s[tau];
    }
    fft::forward(buf);
  }

  FrequencyGrid grid(n, delta);
  std::vector<double> values(n);
  const double correction = delta * kernel[0] * s.variance();
  const double floor = kClampEpsilon * s.variance() * delta;
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = 2.0 * delta * buf[grid.fft_bin(i)].real() - correction;
    if (v < floor) {
      v = floor;
      ++clamped;
    }
    values[i] = v;
  }
  return {std::move(grid), std::move(values), clamped};
}

SpectralEstimate expected_periodogram(const AutocovarianceSequence& s, std::size_t n) {
  std::vector<double> triangle(n);
  for (std::size_t tau = 0; tau < n; ++tau) {
    triangle[tau] = 1.0 - static_cast<double>(tau) / static_cast<double>(n);
  }
  return expected_spectrum(s, triangle);
}

SpectralEstimate expected_tapered_spectrum(const AutocovarianceSequence& s, const Taper& h, std::size_t n) {
  if (h.size() != n) {
    throw std::invalid_argument("expected_tapered_spectrum: taper length differs from n");
  }
  return expected_spectrum(s, h.kernel());
}

std::vector<double> expected_periodogram_direct(const AutocovarianceSequence& s, std::size_t n) {
  if (s.size() < n) {
    throw std::invalid_argument("expected_periodogram_direct: too few lags");
  }
  const double delta = s.delta();
  const FrequencyGrid grid(n, delta);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double omega = grid[i];
    cdouble acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t u = 0; u < n; ++u) {
        const auto lag = static_cast<long long>(t) - static_cast<long long>(u);
        const cdouble cov = lag >= 0 ? s[static_cast<std::size_t>(lag)] : std::conj(s[static_cast<std::size_t>(-lag)]);
        acc += cov * std::polar(1.0, -omega * static_cast<double>(lag) * delta);
      }
    }
    out[i] = delta / static_cast<double>(n) * acc.real();
  }
  return out;
}

TimeSeries difference_series(const TimeSeries& x) {
  if (x.size() < 3) {
    throw std::invalid_argument("difference_series: need at least 3 samples");
  }
  const auto v = x.values();
  std::vector<cdouble> y(v.size() - 1);
  for (std::size_t t = 0; t + 1 < v.size(); ++t) {
    y[t] = v[t + 1] - v[t];
  }
  if (x.is_complex()) {
    return TimeSeries(std::move(y), x.delta());
  }
  std::vector<double> yr(y.size());
  std::ranges::transform(y, yr.begin(), [](cdouble z) { return z.real(); });
  return TimeSeries(std::move(yr), x.delta());
}

AutocovarianceSequence difference_autocovariance(const AutocovarianceSequence& s) {
  if (s.size() < 2) {
    throw std::invalid_argument("difference_autocovariance: need at least 2 lags");
  }
  const std::size_t m = s.size() - 1;
  std::vector<cdouble> out(m);
  for (std::size_t tau = 0; tau < m; ++tau) {
    const cdouble prev = tau == 0 ? std::conj(s[1]) : s[tau - 1];
    out[tau] = 2.0 * s[tau] - s[tau + 1] - prev;
  }
  // s_Y(0) = 2 s(0) - 2 Re s(1) is real; guard against rounding to -0.
  out[0] = std::max(0.0, out[0].real());
  return AutocovarianceSequence(std::move(out), s.delta());
}

std::vector<double> dynamic_range_diagnostic(const ParametricModel& model, std::span<const double> theta,
                                             std::size_t n, double delta, int difference_order) {
  if (difference_order < 0 || static_cast<std::size_t>(difference_order) + 2 > n) {
    throw std::invalid_argument("dynamic_range_diagnostic: invalid difference order");
  }
  const std::size_t m = n - static_cast<std::size_t>(difference_order);

  auto spectrum_at = [&](std::span<const double> th) {
    auto s = model.autocovariance(th, delta, n);
    for (int d = 0; d < difference_order; ++d) {
      s = difference_autocovariance(s);
    }
    auto est = expected_periodogram(s, m);
    if (difference_order > 0) {
      est.values.erase(est.values.begin() + static_cast<std::ptrdiff_t>(est.grid.zero_index()));
    }
    return est;
  };

  const auto base_est = spectrum_at(theta);
  const auto& base = base_est.values;
  const auto [lo, hi] = std::ranges::minmax(base);
  // A clamped value means the true minimum is at or below rounding level.
  const bool degenerate = base_est.clamped > 0 || !(lo > 0.0);
  std::vector<double> bound(theta.size());
  std::vector<double> th(theta.begin(), theta.end());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(theta[i]));
    th[i] = theta[i] + h;
    const auto up = spectrum_at(th).values;
    th[i] = theta[i] - h;
    const auto down = spectrum_at(th).values;
    th[i] = theta[i];
    double sup = 0.0;
    for (std::size_t k = 0; k < base.size(); ++k) {
      sup = std::max(sup, std::abs(up[k] - down[k]) / (2.0 * h));
    }
    if (degenerate) {
      bound[i] = sup == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      continue;
    }
    bound[i] = hi * hi * sup * sup / (static_cast<double>(n) * lo * lo * lo * lo);
  }
  return bound;
}

}  // namespace dbw
