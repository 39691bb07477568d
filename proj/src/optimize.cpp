#include "dbw/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dbw {

namespace {

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) {
    throw std::invalid_argument("parameter vector and bounds differ in length");
  }
}

}  // namespace

std::vector<double> to_unbounded(std::span<const double> theta, std::span<const Bounds> bounds) {
  check_sizes(theta.size(), bounds.size());
  std::vector<double> u(theta.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto [lo, hi] = bounds[i];
    if (!(theta[i] > lo && theta[i] < hi)) {
      throw std::domain_error("to_unbounded: parameter " + std::to_string(i) + " not strictly inside its bounds");
    }
    u[i] = std::log((theta[i] - lo) / (hi - theta[i]));
  }
  return u;
}

std::vector<double> from_unbounded(std::span<const double> u, std::span<const Bounds> bounds) {
  check_sizes(u.size(), bounds.size());
  std::vector<double> theta(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto [lo, hi] = bounds[i];
    // Evaluate the logistic on the side where exp() cannot overflow.
    const double frac = u[i] >= 0.0 ? 1.0 / (1.0 + std::exp(-u[i])) : std::exp(u[i]) / (1.0 + std::exp(u[i]));
    const double comp = u[i] >= 0.0 ? std::exp(-u[i]) / (1.0 + std::exp(-u[i])) : 1.0 / (1.0 + std::exp(u[i]));
    // Anchor on the nearer bound so values close to it keep full precision.
    theta[i] = frac <= 0.5 ? lo + (hi - lo) * frac : hi - (hi - lo) * comp;
  }
  return theta;
}

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::span<const double> x0,
                             const NelderMeadOptions& options) {
  const std::size_t dim = x0.size();
  if (dim == 0) {
    throw std::invalid_argument("nelder_mead: empty starting point");
  }
  std::size_t evaluations = 0;
  auto eval = [&](std::span<const double> x) {
    ++evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> simplex(dim + 1, std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t i = 0; i < dim; ++i) {
    double& c = simplex[i + 1][i];
    c = c != 0.0 ? (1.0 + options.relative_step) * c : options.zero_step;
  }
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) {
    values[i] = eval(simplex[i]);
  }

  std::vector<std::size_t> order(dim + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s(dim + 1);
    std::vector<double> v(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) {
      s[i] = std::move(simplex[order[i]]);
      v[i] = values[order[i]];
    }
    simplex = std::move(s);
    values = std::move(v);
  };
  auto converged = [&] {
    double diameter = 0.0;
    double spread = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[0][j]));
      }
      spread = std::max(spread, std::abs(values[i] - values[0]));
    }
    return diameter <= options.tolerance && spread <= options.tolerance;
  };

  sort_simplex();
  std::size_t iterations = 0;
  bool done = converged();
  std::vector<double> centroid(dim);
  std::vector<double> trial(dim);
  auto point = [&](double t, std::vector<double>& out) {
    // centroid + t * (centroid - worst)
    for (std::size_t j = 0; j < dim; ++j) {
      out[j] = centroid[j] + t * (centroid[j] - simplex[dim][j]);
    }
  };

  while (!done && iterations < options.max_iterations) {
    ++iterations;
    std::ranges::fill(centroid, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        centroid[j] += simplex[i][j] / static_cast<double>(dim);
      }
    }

    point(1.0, trial);
    const double reflected = eval(trial);
    if (reflected < values[0]) {
      std::vector<double> expanded(dim);
      point(2.0, expanded);
      const double ev = eval(expanded);
      if (ev < reflected) {
        simplex[dim] = std::move(expanded);
        values[dim] = ev;
      } else {
        simplex[dim] = trial;
        values[dim] = reflected;
      }
    } else if (reflected < values[dim - 1]) {
      simplex[dim] = trial;
      values[dim] = reflected;
    } else {
      bool shrink = false;
      if (reflected < values[dim]) {
        std::vector<double> outside(dim);
        point(0.5, outside);
        const double ov = eval(outside);
        if (ov <= reflected) {
          simplex[dim] = std::move(outside);
          values[dim] = ov;
        } else {
          shrink = true;
        }
      } else {
        std::vector<double> inside(dim);
        point(-0.5, inside);
        const double iv = eval(inside);
        if (iv < values[dim]) {
          simplex[dim] = std::move(inside);
          values[dim] = iv;
        } else {
          shrink = true;
        }
      }
      if (shrink) {
        for (std::size_t i = 1; i <= dim; ++i) {
          for (std::size_t j = 0; j < dim; ++j) {
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          }
          values[i] = eval(simplex[i]);
        }
      }
    }
    sort_simplex();
    done = converged();
  }
  return {simplex[0], values[0], iterations, evaluations, done};
}

}  // namespace dbw
