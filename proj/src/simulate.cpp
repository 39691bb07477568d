#include "dbw/simulate.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "dbw/fft.hpp"

namespace dbw {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

GaussianStream::GaussianStream(std::uint64_t stream_seed) : engine_(stream_seed) {}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 53-bit uniforms; u1 in (0, 1] keeps the log finite.
  const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

namespace {

constexpr std::size_t kMaxDoublings = 4;
constexpr double kNegativeTolerance = 1e-8;

}  // namespace

SimulationPlan plan_simulation(const AutocovarianceSource& source, std::size_t n, double delta,
                               std::uint64_t seed) {
  if (n < 2) {
    throw std::invalid_argument("plan_simulation: need n >= 2");
  }
  std::size_t size = std::bit_ceil(std::max<std::size_t>(2 * (n - 1), 2));
  for (std::size_t doubling = 0;; ++doubling, size *= 2) {
    const std::size_t half = size / 2;
    const auto s = source(half + 1);
    if (s.size() < half + 1) {
      throw std::logic_error("plan_simulation: autocovariance source returned too few lags");
    }
    if (!s.is_real()) {
      throw std::invalid_argument("plan_simulation: circulant embedding needs a real autocovariance");
    }
    const double s0 = s.variance();
    std::vector<cdouble> row(size);
    for (std::size_t j = 0; j < size; ++j) {
      row[j] = s[j <= half ? j : size - j].real();
    }
    fft::forward(row);

    const double floor = -kNegativeTolerance * s0;
    bool ok = true;
    for (const auto& v : row) {
      if (v.real() < floor) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      if (doubling == kMaxDoublings) {
        throw std::runtime_error("plan_simulation: circulant embedding has negative eigenvalues after " +
                                 std::to_string(kMaxDoublings) +
                                 " doublings; the model may be close to non-stationary");
      }
      continue;
    }

    SimulationPlan plan;
    plan.n = n;
    plan.embedding_size = size;
    plan.variance = s0;
    plan.delta = delta;
    plan.seed = seed;
    plan.doublings = doubling;
    plan.eigenvalues.resize(size);
    plan.sqrt_eigenvalues.resize(size);
    for (std::size_t k = 0; k < size; ++k) {
      double lambda = row[k].real();
      if (lambda < 0.0) {
        lambda = 0.0;
        ++plan.clamped;
      }
      plan.eigenvalues[k] = lambda;
      plan.sqrt_eigenvalues[k] = std::sqrt(lambda / static_cast<double>(size));
    }
    return plan;
  }
}

SimulationPlan plan_simulation(const AutocovarianceSequence& s, std::size_t n, std::uint64_t seed) {
  if (s.size() < n) {
    throw std::invalid_argument("plan_simulation: autocovariance covers " + std::to_string(s.size()) +
                                " lags, need " + std::to_string(n));
  }
  auto source = [&s](std::size_t count) {
    std::vector<cdouble> lags(count, cdouble{});
    for (std::size_t j = 0; j < std::min(count, s.size()); ++j) {
      lags[j] = s[j];
    }
    return AutocovarianceSequence(std::move(lags), s.delta());
  };
  return plan_simulation(source, n, s.delta(), seed);
}

SimulationPlan plan_simulation(const ParametricModel& model, std::span<const double> theta, std::size_t n,
                               double delta, std::uint64_t seed) {
  const std::vector<double> th(theta.begin(), theta.end());
  auto source = [&model, th, delta](std::size_t count) { return model.autocovariance(th, delta, count); };
  return plan_simulation(source, n, delta, seed);
}

namespace {

std::vector<cdouble> draw(const SimulationPlan& plan, std::size_t replicate) {
  GaussianStream rng(splitmix64(plan.seed + replicate));
  std::vector<cdouble> y(plan.embedding_size);
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double a = rng.next();
    const double b = rng.next();
    y[k] = plan.sqrt_eigenvalues[k] * cdouble(a, b);
  }
  fft::forward(y);
  y.resize(plan.n);
  return y;
}

}  // namespace

TimeSeries simulate_replicate(const SimulationPlan& plan, std::size_t replicate) {
  const auto y = draw(plan, replicate);
  std::vector<double> x(plan.n);
  for (std::size_t t = 0; t < plan.n; ++t) {
    x[t] = y[t].real();
  }
  return TimeSeries(std::move(x), plan.delta);
}

std::vector<TimeSeries> simulate_gaussian(const SimulationPlan& plan, std::size_t replicates) {
  std::vector<TimeSeries> out;
  out.reserve(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    out.push_back(simulate_replicate(plan, r));
  }
  return out;
}

TimeSeries simulate_complex_replicate(const SimulationPlan& plan, std::size_t replicate) {
  auto y = draw(plan, replicate);
  for (auto& v : y) {
    v *= std::numbers::sqrt2 / 2.0;
  }
  return TimeSeries(std::move(y), plan.delta);
}

std::vector<TimeSeries> simulate_complex_proper(const SimulationPlan& plan, std::size_t replicates) {
  std::vector<TimeSeries> out;
  out.reserve(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    out.push_back(simulate_complex_replicate(plan, r));
  }
  return out;
}

}  // namespace dbw
