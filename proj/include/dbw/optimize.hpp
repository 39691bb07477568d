#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dbw/models.hpp"

namespace dbw {

// theta = lower + (upper - lower) * logistic(u), applied coordinate-wise.
std::vector<double> to_unbounded(std::span<const double> theta, std::span<const Bounds> bounds);
std::vector<double> from_unbounded(std::span<const double> u, std::span<const Bounds> bounds);

struct NelderMeadOptions {
  std::size_t max_iterations = 2000;
  // Converged when both the simplex diameter (max-norm distance of every
  // vertex from the best one) and the objective spread are below tol.
  double tolerance = 1e-8;
  // Initial simplex: 5% of each nonzero coordinate, 0.00025 for zeros.
  double relative_step = 0.05;
  double zero_step = 0.00025;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value;  // minimum found
  std::size_t iterations;
  std::size_t evaluations;
  bool converged;
};

// Minimises f with the standard coefficients (reflection 1, expansion 2,
// contraction 1/2, shrink 1/2). Non-finite values rank as +inf.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::span<const double> x0,
                             const NelderMeadOptions& options = {});

}  // namespace dbw
