#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dbw {

// Unit-energy data taper h_t together with its autocorrelation kernel
// k(tau) = sum_{t=1}^{n-tau} h_t h_{t+tau}, computed once at construction.
class Taper {
 public:
  // Validates sum h_t^2 = 1 to 1e-12. bandwidth_product is 0 for tapers that
  // are not bandwidth-parametrised.
  explicit Taper(std::vector<double> weights, double bandwidth_product = 0.0);

  std::size_t size() const { return weights_.size(); }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> kernel() const { return kernel_; }
  double bandwidth_product() const { return nw_; }

 private:
  std::vector<double> weights_;
  std::vector<double> kernel_;
  double nw_;
};

// h_t = 1/sqrt(n); kernel is the triangle 1 - tau/n.
Taper uniform_taper(std::size_t n);

// Zeroth-order discrete prolate spheroidal sequence with half-bandwidth
// W = nw/n, from the tridiagonal matrix that commutes with the sinc kernel.
// Unit energy, positive midpoint. Requires 1 <= nw < n/2.
Taper dpss_taper(std::size_t n, double nw);

// Both return k(0..n-1). The dispatching version uses direct summation up to
// n = 4096 and the FFT route above that.
std::vector<double> taper_autocorrelation_direct(std::span<const double> h);
std::vector<double> taper_autocorrelation_fft(std::span<const double> h);
std::vector<double> taper_autocorrelation(std::span<const double> h);

}  // namespace dbw
