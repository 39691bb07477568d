#include "dbw/levinson.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dbw {

namespace {

double conj_of(double v) { return v; }
cdouble conj_of(cdouble v) { return std::conj(v); }
double sq_abs(double v) { return v * v; }
double sq_abs(cdouble v) { return std::norm(v); }

template <typename T>
ToeplitzLikelihoodTerms levinson(std::span<const T> s, std::span<const T> x) {
  const std::size_t n = x.size();
  if (s.size() < n || n == 0) {
    throw std::invalid_argument("levinson: need one autocovariance lag per sample");
  }
  // phi[1..k] predicts X_t from X_{t-1}, ..., X_{t-k}.
  std::vector<T> phi(n, T{});
  std::vector<T> next(n, T{});
  double v = std::real(s[0]);
  if (!(v > 0.0)) {
    throw std::domain_error("levinson: non-positive variance s(0)");
  }
  double log_det = std::log(v);
  double quad = sq_abs(x[0]) / v;

  for (std::size_t k = 1; k < n; ++k) {
    T acc = s[k];
    for (std::size_t j = 1; j < k; ++j) {
      acc -= phi[j] * s[k - j];
    }
    const T kappa = acc / v;
    for (std::size_t j = 1; j < k; ++j) {
      next[j] = phi[j] - kappa * conj_of(phi[k - j]);
    }
    for (std::size_t j = 1; j < k; ++j) {
      phi[j] = next[j];
    }
    phi[k] = kappa;
    v *= 1.0 - sq_abs(kappa);
    if (!(v > 0.0)) {
      throw std::domain_error("levinson: covariance not positive definite at order " + std::to_string(k));
    }

    T e = x[k];
    for (std::size_t j = 1; j <= k; ++j) {
      e -= phi[j] * x[k - j];
    }
    log_det += std::log(v);
    quad += sq_abs(e) / v;
  }
  return {log_det, quad};
}

}  // namespace

ToeplitzLikelihoodTerms levinson_terms(std::span<const double> s, std::span<const double> x) {
  return levinson<double>(s, x);
}

ToeplitzLikelihoodTerms levinson_terms(std::span<const cdouble> s, std::span<const cdouble> x) {
  return levinson<cdouble>(s, x);
}

}  // namespace dbw
