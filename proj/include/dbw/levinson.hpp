#pragma once

#include <span>

#include "dbw/types.hpp"

namespace dbw {

struct ToeplitzLikelihoodTerms {
  double log_det;         // log |C|
  double quadratic_form;  // x^H C^{-1} x
};

// Durbin-Levinson recursion on the Toeplitz (Hermitian) covariance with
// first column s(0..n-1). O(n^2) time, O(n) memory. The log-determinant is
// the sum of log prediction-error variances and the quadratic form the sum
// of squared innovations over those variances. Throws std::domain_error when
// a prediction-error variance is not positive.
ToeplitzLikelihoodTerms levinson_terms(std::span<const double> s, std::span<const double> x);
ToeplitzLikelihoodTerms levinson_terms(std::span<const cdouble> s, std::span<const cdouble> x);

}  // namespace dbw
