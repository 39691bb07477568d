#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dbw/models.hpp"
#include "dbw/spectral.hpp"
#include "dbw/tapers.hpp"
#include "dbw/types.hpp"

namespace dbw {

enum class Variant { exact_ml, whittle, debiased_whittle };
enum class TaperKind { none, dpss };
enum class Side { all, positive, negative };

// Subset of Fourier frequencies entering a frequency-domain likelihood.
// `side` keeps strictly positive or strictly negative frequencies; `band`,
// when set, must also accept omega. Differenced likelihoods always drop
// omega = 0.
struct FrequencyMask {
  Side side = Side::all;
  std::function<bool(double)> band;

  bool is_default() const { return side == Side::all && !band; }
};

struct LikelihoodSpec {
  Variant variant = Variant::debiased_whittle;
  TaperKind taper = TaperKind::none;
  double nw = 4.0;  // DPSS time-bandwidth product
  int difference_order = 0;
  FrequencyMask mask;
  // Diagnostic only: standard Whittle against the aliased spectrum instead of f~.
  bool whittle_uses_aliased = false;

  void validate() const;
};

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

// Log-likelihood with theta-independent constants dropped.
struct ObjectiveValue {
  double value = 0.0;
  std::size_t n_frequencies_used = 0;  // sample length for exact_ml
  std::vector<std::string> warnings;
};

// A likelihood bound to one series, model and spec. Everything that does
// not depend on theta (differenced data, taper and its kernel, periodogram,
// masked frequency set) is computed once here; evaluate() is then
// O(n log n) for the Whittle variants and O(n^2) for exact_ml.
class Likelihood {
 public:
  Likelihood(const TimeSeries& x, std::shared_ptr<const ParametricModel> model, LikelihoodSpec spec);

  ObjectiveValue evaluate(std::span<const double> theta) const;

  // Same objective with the data spectrum on the masked frequencies replaced
  // by `data_spectrum` (one value per masked frequency). Whittle variants only.
  ObjectiveValue evaluate_against(std::span<const double> theta, std::span<const double> data_spectrum) const;

  // Model spectrum on the masked frequencies: f~ (or f~_Y) for whittle, the
  // expected (tapered, differenced) periodogram for debiased_whittle.
  std::vector<double> model_spectrum(std::span<const double> theta) const;

  // Score sum_omega (d f / d theta_i) (I - f) / f^2 with d f / d theta_i by
  // central differences, step 1e-5 * max(1, |theta_i|). Whittle variants only.
  std::vector<double> score(std::span<const double> theta) const;
  std::vector<double> score_against(std::span<const double> theta, std::span<const double> data_spectrum) const;

  const LikelihoodSpec& spec() const { return spec_; }
  const ParametricModel& model() const { return *model_; }
  std::shared_ptr<const ParametricModel> model_ptr() const { return model_; }
  // Length after differencing.
  std::size_t analysed_length() const { return length_; }
  double delta() const { return delta_; }
  // Masked frequencies and the matching data spectrum (I, I(h) or I_Y).
  std::span<const double> frequencies() const { return omega_; }
  std::span<const double> data_spectrum() const { return data_; }

 private:
  std::vector<double> expected(std::span<const double> theta, std::size_t* clamped) const;
  std::vector<double> expected_real(const AutocovarianceSequence& s, std::size_t* clamped) const;
  ObjectiveValue whittle_sum(std::span<const double> model_values, std::span<const double> data,
                             std::size_t clamped) const;

  std::shared_ptr<const ParametricModel> model_;
  LikelihoodSpec spec_;
  double delta_;
  std::size_t original_length_;
  std::size_t length_;
  bool complex_;
  std::optional<Taper> taper_;
  std::vector<double> kernel_;  // taper autocorrelation, or the triangle 1 - tau/n
  std::vector<std::size_t> index_;  // masked positions on the ascending grid
  std::vector<double> omega_;
  std::vector<double> data_;
  std::vector<cdouble> series_;  // differenced series, exact_ml only
};

// Eq.-by-eq. entry points; each builds a Likelihood and evaluates once.
ObjectiveValue exact_log_likelihood(const TimeSeries& x, std::shared_ptr<const ParametricModel> model,
                                    std::span<const double> theta);
ObjectiveValue whittle(const TimeSeries& x, std::shared_ptr<const ParametricModel> model,
                       std::span<const double> theta, LikelihoodSpec spec);
ObjectiveValue debiased_whittle(const TimeSeries& x, std::shared_ptr<const ParametricModel> model,
                                std::span<const double> theta, LikelihoodSpec spec);

struct ScoreHessian {
  std::vector<double> gradient;
  std::vector<std::vector<double>> hessian;  // symmetric
};

// Central differences with step 1e-5 * max(1, |theta_i|). When bounds are
// given, theta must sit at least one step inside them.
ScoreHessian score_and_hessian_fd(const std::function<double(std::span<const double>)>& objective,
                                  std::span<const double> theta, std::span<const Bounds> bounds = {});

}  // namespace dbw
