#include "dbw/tapers.hpp"

#include <lapacke.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dbw/fft.hpp"

namespace dbw {

namespace {

constexpr std::size_t kDirectKernelLimit = 4096;

}  // namespace

Taper::Taper(std::vector<double> weights, double bandwidth_product)
    : weights_(std::move(weights)), nw_(bandwidth_product) {
  if (weights_.size() < 2) {
    throw std::invalid_argument("taper needs at least 2 weights");
  }
  const double energy = std::inner_product(weights_.begin(), weights_.end(), weights_.begin(), 0.0);
  if (std::abs(energy - 1.0) > 1e-12) {
    throw std::invalid_argument("taper must have unit energy, got sum h^2 = " + std::to_string(energy));
  }
  kernel_ = taper_autocorrelation(weights_);
}

Taper uniform_taper(std::size_t n) {
  if (n < 2) {
    throw std::invalid_argument("uniform_taper: n must be >= 2");
  }
  return Taper(std::vector<double>(n, 1.0 / std::sqrt(static_cast<double>(n))));
}

Taper dpss_taper(std::size_t n, double nw) {
  if (n < 2 || !(nw >= 1.0) || !(nw < static_cast<double>(n) / 2.0)) {
    throw std::invalid_argument("dpss_taper: need n >= 2 and 1 <= nw < n/2");
  }
  const double w = nw / static_cast<double>(n);
  const double cos_term = std::cos(2.0 * std::numbers::pi * w);
  std::vector<double> diag(n);
  std::vector<double> offdiag(n - 1);
  for (std::size_t t = 0; t < n; ++t) {
    const double half = (static_cast<double>(n) - 1.0 - 2.0 * static_cast<double>(t)) / 2.0;
    diag[t] = half * half * cos_term;
  }
  for (std::size_t t = 1; t < n; ++t) {
    offdiag[t - 1] = static_cast<double>(t) * static_cast<double>(n - t) / 2.0;
  }

  // Largest eigenpair only.
  const auto order = static_cast<lapack_int>(n);
  lapack_int found = 0;
  double eigenvalue = 0.0;
  std::vector<double> vec(n);
  std::vector<lapack_int> ifail(n);
  const lapack_int info =
      LAPACKE_dstevx(LAPACK_COL_MAJOR, 'V', 'I', order, diag.data(), offdiag.data(), 0.0, 0.0, order,
                     order, 0.0, &found, &eigenvalue, vec.data(), order, ifail.data());
  if (info != 0 || found != 1) {
    throw std::runtime_error("dpss_taper: tridiagonal eigensolver failed (info=" + std::to_string(info) + ")");
  }

  double norm = std::sqrt(std::inner_product(vec.begin(), vec.end(), vec.begin(), 0.0));
  if (vec[n / 2] < 0.0) {
    norm = -norm;
  }
  for (auto& v : vec) {
    v /= norm;
  }
  // Renormalise once more so the energy check sees a freshly rounded sum.
  const double energy = std::inner_product(vec.begin(), vec.end(), vec.begin(), 0.0);
  for (auto& v : vec) {
    v /= std::sqrt(energy);
  }
  return Taper(std::move(vec), nw);
}

std::vector<double> taper_autocorrelation_direct(std::span<const double> h) {
  const std::size_t n = h.size();
  std::vector<double> k(n, 0.0);
  for (std::size_t tau = 0; tau < n; ++tau) {
    double acc = 0.0;
    for (std::size_t t = 0; t + tau < n; ++t) {
      acc += h[t] * h[t + tau];
    }
    k[tau] = acc;
  }
  return k;
}

std::vector<double> taper_autocorrelation_fft(std::span<const double> h) {
  const std::size_t n = h.size();
  std::size_t m = 1;
  while (m < 2 * n) {
    m <<= 1;
  }
  std::vector<cdouble> buf(m, 0.0);
  std::copy(h.begin(), h.end(), buf.begin());
  fft::forward(buf);
  for (auto& z : buf) {
    z = std::norm(z);
  }
  fft::backward(buf);
  std::vector<double> k(n);
  for (std::size_t tau = 0; tau < n; ++tau) {
    k[tau] = buf[tau].real() / static_cast<double>(m);
  }
  return k;
}

std::vector<double> taper_autocorrelation(std::span<const double> h) {
  return h.size() <= kDirectKernelLimit ? taper_autocorrelation_direct(h) : taper_autocorrelation_fft(h);
}

}  // namespace dbw
