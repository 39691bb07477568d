#include "dbw/estimation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dbw/optimize.hpp"
#include "dbw/parallel.hpp"
#include "dbw/simulate.hpp"
#include "dbw/spectral.hpp"

namespace dbw {

namespace {

constexpr double kSlopeInitMargin = 1e-3;

int side_code(Side s) {
  switch (s) {
    case Side::positive:
      return 1;
    case Side::negative:
      return -1;
    default:
      return 0;
  }
}

// Push theta strictly inside the box so the logistic transform is defined.
std::vector<double> interior(std::vector<double> theta, const std::vector<Bounds>& b) {
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double lo = b[i].lower;
    const double hi = b[i].upper;
    const double width = hi - lo;
    const double lo_in = lo + std::max(std::abs(lo) * 1e-6, width * 1e-12);
    const double hi_in = hi - std::max(std::abs(hi) * 1e-6, width * 1e-12);
    if (!std::isfinite(theta[i])) {
      theta[i] = 0.5 * (lo + hi);
    }
    theta[i] = std::clamp(theta[i], lo_in, hi_in);
  }
  return theta;
}

std::string format_theta(std::span<const double> theta) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < theta.size(); ++i) {
    os << (i ? ", " : "") << theta[i];
  }
  os << ')';
  return os.str();
}

}  // namespace

void FitConfig::validate() const {
  spec.validate();
  if (!(convergence_tol > 0.0)) {
    throw std::invalid_argument("FitConfig: convergence_tol must be positive");
  }
  if (max_iterations == 0) {
    throw std::invalid_argument("FitConfig: max_iterations must be positive");
  }
}

nlohmann::json to_json(const FitResult& r, const ParametricModel& model) {
  nlohmann::json j;
  const auto names = model.parameter_names();
  j["model"] = model.name();
  j["parameters"] = names;
  j["theta_hat"] = r.theta_hat;
  j["objective"] = r.objective_at_max;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["derived"] = r.derived;
  j["wall_time_s"] = r.wall_time;
  j["init_theta"] = r.init_theta;
  j["objective_at_init"] = r.objective_at_init;
  j["warnings"] = r.warnings;
  return j;
}

std::vector<double> initialize_matern(const TimeSeries& x, int side) {
  const std::size_t n = x.size();
  if (n < 16) {
    throw std::invalid_argument("initialize_matern: need at least 16 samples, got " + std::to_string(n));
  }
  const double delta = x.delta();
  const auto I = periodogram(x);
  const double lo = std::numbers::pi / (4.0 * delta);
  const double hi = 3.0 * std::numbers::pi / (4.0 * delta);
  // Real data: the two sides are mirror images, use the positive one.
  const int use = (side == 0 && !x.is_complex()) ? 1 : side;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < I.values.size(); ++i) {
    const double w = I.grid[i];
    if ((use > 0 && w <= 0.0) || (use < 0 && w >= 0.0)) {
      continue;
    }
    const double aw = std::abs(w);
    if (aw < lo || aw > hi || !(I.values[i] > 0.0)) {
      continue;
    }
    const double lx = std::log(aw);
    const double ly = std::log(I.values[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) {
    throw std::invalid_argument("initialize_matern: too few frequencies in [pi/4delta, 3pi/4delta]");
  }
  const double dm = static_cast<double>(m);
  const double denom = sxx - sx * sx / dm;
  const double slope = denom > 0.0 ? (sxy - sx * sy / dm) / denom : 0.0;
  const double intercept = (sy - slope * sx) / dm;

  std::vector<double> theta{std::exp(0.5 * intercept), 100.0 * std::numbers::pi / (static_cast<double>(n) * delta),
                            -0.5 * slope};
  // A slope estimate below the admissible range (aliasing flattens the
  // high-frequency periodogram) is clipped to a point where the logistic
  // transform is not saturated, otherwise the simplex cannot move alpha.
  const auto b = MaternModel{}.bounds(delta);
  const double margin = kSlopeInitMargin * (b[2].upper - b[2].lower);
  theta[2] = std::clamp(theta[2], b[2].lower + margin, b[2].upper - margin);
  return interior(theta, b);
}

FitResult fit(const TimeSeries& x, std::shared_ptr<const ParametricModel> model, const FitConfig& config) {
  config.validate();
  const Likelihood likelihood(x, std::move(model), config.spec);
  return fit(likelihood, x, config);
}

FitResult fit(const Likelihood& likelihood, const TimeSeries& x, const FitConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const ParametricModel& model = likelihood.model();
  const auto bounds = model.bounds(x.delta());

  std::vector<double> theta0 =
      config.initial_theta ? *config.initial_theta : model.initial_guess(x, side_code(config.spec.mask.side));
  if (theta0.size() != bounds.size()) {
    throw std::invalid_argument("fit: initial theta has " + std::to_string(theta0.size()) + " entries, model " +
                                model.name() + " expects " + std::to_string(bounds.size()));
  }
  theta0 = interior(std::move(theta0), bounds);

  FitResult result;
  result.init_theta = theta0;
  ObjectiveValue at_init;
  try {
    at_init = likelihood.evaluate(theta0);
  } catch (const std::exception& e) {
    throw std::runtime_error("fit: objective cannot be evaluated at the initial point " + format_theta(theta0) +
                             ": " + e.what());
  }
  if (!std::isfinite(at_init.value)) {
    throw std::runtime_error("fit: non-finite objective at the initial point " + format_theta(theta0));
  }
  result.objective_at_init = at_init.value;

  auto negative = [&](std::span<const double> u) {
    try {
      return -likelihood.evaluate(from_unbounded(u, bounds)).value;
    } catch (const std::domain_error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  NelderMeadOptions options;
  options.max_iterations = config.max_iterations;
  options.tolerance = config.convergence_tol;
  const auto u0 = to_unbounded(theta0, bounds);
  auto best = nelder_mead(negative, u0, options);
  std::size_t iterations = best.iterations;

  if (!best.converged && config.restart) {
    GaussianStream rng(splitmix64(config.seed));
    std::vector<double> u1 = best.x;
    for (double& v : u1) {
      v += 0.1 * std::max(1.0, std::abs(v)) * rng.next();
    }
    auto second = nelder_mead(negative, u1, options);
    iterations += second.iterations;
    if (second.value < best.value) {
      best = std::move(second);
    }
  }

  // Never report a point worse than the start.
  if (!(best.value <= -at_init.value)) {
    best.x = u0;
    best.value = -at_init.value;
  }

  result.theta_hat = from_unbounded(best.x, bounds);
  result.objective_at_max = -best.value;
  result.iterations = iterations;
  result.converged = best.converged;
  result.derived = model.derived(result.theta_hat);
  try {
    result.warnings = likelihood.evaluate(result.theta_hat).warnings;
  } catch (const std::exception& e) {
    result.warnings.emplace_back(e.what());
  }
  if (!result.converged) {
    result.warnings.emplace_back("Nelder-Mead stopped at max_iterations without meeting the tolerance");
  }
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<ConvergenceRow> convergence_study(std::shared_ptr<const ParametricModel> model,
                                              const std::vector<double>& theta, const FitConfig& estimator,
                                              const std::vector<std::size_t>& n_values, std::size_t replicates,
                                              std::uint64_t seed, double delta) {
  if (replicates < 50) {
    throw std::invalid_argument("convergence_study: need at least 50 replicates");
  }
  estimator.validate();
  const std::size_t p = theta.size();
  std::vector<ConvergenceRow> rows;
  for (const std::size_t n : n_values) {
    const auto plan = plan_simulation(*model, theta, n, delta, seed);
    std::vector<std::optional<std::vector<double>>> estimates(replicates);
    parallel_for(replicates, [&](std::size_t r) {
      try {
        estimates[r] = fit(simulate_replicate(plan, r), model, estimator).theta_hat;
      } catch (const std::exception&) {
        estimates[r].reset();
      }
    });

    ConvergenceRow row;
    row.n = n;
    row.mean.assign(p, 0.0);
    row.bias.assign(p, 0.0);
    row.sd.assign(p, 0.0);
    std::size_t ok = 0;
    for (const auto& e : estimates) {
      if (!e) {
        ++row.failures;
        continue;
      }
      ++ok;
      for (std::size_t i = 0; i < p; ++i) {
        row.mean[i] += (*e)[i];
      }
    }
    if (ok > 0) {
      for (std::size_t i = 0; i < p; ++i) {
        row.mean[i] /= static_cast<double>(ok);
        row.bias[i] = row.mean[i] - theta[i];
      }
      for (const auto& e : estimates) {
        if (e) {
          for (std::size_t i = 0; i < p; ++i) {
            row.sd[i] += ((*e)[i] - row.mean[i]) * ((*e)[i] - row.mean[i]);
          }
        }
      }
      for (std::size_t i = 0; i < p; ++i) {
        row.sd[i] = std::sqrt(row.sd[i] / static_cast<double>(ok));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dbw
