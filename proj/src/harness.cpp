#include "dbw/harness.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "dbw/io.hpp"
#include "dbw/parallel.hpp"
#include "dbw/simulate.hpp"

namespace dbw {

namespace {

Side parse_side(const std::string& s) {
  if (s == "none" || s == "all") {
    return Side::all;
  }
  if (s == "positive") {
    return Side::positive;
  }
  if (s == "negative") {
    return Side::negative;
  }
  throw std::invalid_argument("unknown side '" + s + "' (expected none, positive, negative)");
}

TaperKind parse_taper(const std::string& s) {
  if (s == "none") {
    return TaperKind::none;
  }
  if (s == "dpss") {
    return TaperKind::dpss;
  }
  throw std::invalid_argument("unknown taper '" + s + "' (expected none, dpss)");
}

EstimatorSpec parse_estimator(const nlohmann::json& j) {
  EstimatorSpec e;
  e.id = j.at("id").get<std::string>();
  auto& spec = e.config.spec;
  spec.variant = parse_variant(j.value("likelihood", std::string("debiased")));
  spec.taper = parse_taper(j.value("taper", std::string("none")));
  spec.nw = j.value("nw", 4.0);
  spec.difference_order = j.value("difference", 0);
  spec.mask.side = parse_side(j.value("side", std::string("none")));
  e.config.max_iterations = j.value("max_iterations", std::size_t{2000});
  e.config.convergence_tol = j.value("tol", 1e-8);
  e.config.seed = j.value("seed", std::uint64_t{0});
  e.config.validate();
  return e;
}

struct Scenario {
  std::shared_ptr<const ParametricModel> model;
  std::vector<double> theta;
};

Scenario scenario(const ExperimentSpec& spec, std::optional<double> alpha) {
  Scenario sc{make_model(spec.model, alpha && spec.model == "matern_fixed_slope" ? *alpha : spec.slope,
                         spec.amplitude_ratio),
              spec.theta};
  if (alpha && spec.model == "matern") {
    sc.theta.at(2) = *alpha;
  } else if (alpha && spec.model != "matern_fixed_slope") {
    throw std::invalid_argument("alpha_sweep needs a matern model");
  }
  if (sc.theta.size() != sc.model->parameter_count()) {
    throw std::invalid_argument("theta has " + std::to_string(sc.theta.size()) + " entries, model " +
                                spec.model + " expects " + std::to_string(sc.model->parameter_count()));
  }
  if (!sc.model->within_bounds(sc.theta, spec.delta)) {
    throw std::invalid_argument("true theta lies outside the model bounds");
  }
  return sc;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (replicates < 10) {
    throw std::invalid_argument("experiment: need at least 10 replicates");
  }
  if (estimators.empty()) {
    throw std::invalid_argument("experiment: estimator list is empty");
  }
  if (n < 16) {
    throw std::invalid_argument("experiment: need n >= 16");
  }
  if (!(delta > 0.0)) {
    throw std::invalid_argument("experiment: delta must be positive");
  }
  for (const auto& e : estimators) {
    e.config.validate();
  }
}

ExperimentSpec parse_experiment_spec(const nlohmann::json& j) {
  ExperimentSpec s;
  s.model = j.value("model", s.model);
  s.theta = j.at("theta").get<std::vector<double>>();
  s.slope = j.value("slope", s.slope);
  s.amplitude_ratio = j.value("amplitude_ratio", s.amplitude_ratio);
  s.n = j.at("n").get<std::size_t>();
  s.delta = j.value("delta", s.delta);
  s.replicates = j.value("replicates", s.replicates);
  s.seed = j.value("seed", s.seed);
  s.complex = j.value("complex", s.complex);
  s.alpha_sweep = j.value("alpha_sweep", std::vector<double>{});
  s.output = j.value("output", std::string{});
  s.workers = j.value("workers", s.workers);
  for (const auto& e : j.at("estimators")) {
    s.estimators.push_back(parse_estimator(e));
  }
  s.validate();
  return s;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return parse_experiment_spec(nlohmann::json::parse(in));
}

AggregateRow aggregate(const std::string& estimator, double sweep_value, const std::vector<std::string>& parameters,
                       const std::vector<double>& truth, std::span<const ReplicateEstimate> estimates) {
  const std::size_t p = truth.size();
  AggregateRow row;
  row.estimator = estimator;
  row.sweep_value = sweep_value;
  row.parameters = parameters;
  row.truth = truth;
  for (auto* v : {&row.mean, &row.bias, &row.percent_bias, &row.sd, &row.rmse, &row.percent_sd, &row.percent_rmse}) {
    v->assign(p, 0.0);
  }
  double wall = 0.0;
  for (const auto& e : estimates) {
    wall += e.wall_time;
    if (!e.theta_hat) {
      ++row.failures;
      continue;
    }
    ++row.successes;
    for (std::size_t i = 0; i < p; ++i) {
      row.mean[i] += (*e.theta_hat)[i];
    }
  }
  if (!estimates.empty()) {
    row.mean_wall_time = wall / static_cast<double>(estimates.size());
  }
  if (row.successes == 0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (auto* v : {&row.mean, &row.bias, &row.percent_bias, &row.sd, &row.rmse, &row.percent_sd,
                    &row.percent_rmse}) {
      v->assign(p, nan);
    }
    return row;
  }
  const double k = static_cast<double>(row.successes);
  for (std::size_t i = 0; i < p; ++i) {
    row.mean[i] /= k;
  }
  for (const auto& e : estimates) {
    if (e.theta_hat) {
      for (std::size_t i = 0; i < p; ++i) {
        const double d = (*e.theta_hat)[i] - row.mean[i];
        row.sd[i] += d * d;
      }
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    row.sd[i] = std::sqrt(row.sd[i] / k);
    row.bias[i] = row.mean[i] - truth[i];
    row.rmse[i] = std::sqrt(row.bias[i] * row.bias[i] + row.sd[i] * row.sd[i]);
    const double scale = 100.0 / std::abs(truth[i]);
    row.percent_bias[i] = row.bias[i] * scale;
    row.percent_sd[i] = row.sd[i] * scale;
    row.percent_rmse[i] = row.rmse[i] * scale;
  }
  return row;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<std::optional<double>> sweep;
  if (spec.alpha_sweep.empty()) {
    sweep.emplace_back();
  } else {
    sweep.assign(spec.alpha_sweep.begin(), spec.alpha_sweep.end());
  }
  const std::size_t m = spec.estimators.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  ExperimentResult result;
  for (const auto& alpha : sweep) {
    const auto sc = scenario(spec, alpha);
    const auto plan = plan_simulation(*sc.model, sc.theta, spec.n, spec.delta, spec.seed);
    const double sweep_value = alpha.value_or(nan);

    // slot [r * m + e]
    std::vector<ReplicateEstimate> est(spec.replicates * m);
    parallel_for(
        spec.replicates,
        [&](std::size_t r) {
          const TimeSeries x =
              spec.complex ? simulate_complex_replicate(plan, r) : simulate_replicate(plan, r);
          for (std::size_t e = 0; e < m; ++e) {
            auto& slot = est[r * m + e];
            slot.estimator = spec.estimators[e].id;
            slot.sweep_value = sweep_value;
            slot.replicate = r;
            FitConfig config = spec.estimators[e].config;
            config.seed = config.seed + spec.seed + r;
            try {
              const auto fr = fit(x, sc.model, config);
              slot.theta_hat = fr.theta_hat;
              slot.wall_time = fr.wall_time;
            } catch (const std::exception& ex) {
              slot.error = ex.what();
            }
          }
        },
        spec.workers);

    for (std::size_t e = 0; e < m; ++e) {
      std::vector<ReplicateEstimate> mine;
      mine.reserve(spec.replicates);
      for (std::size_t r = 0; r < spec.replicates; ++r) {
        mine.push_back(est[r * m + e]);
      }
      result.rows.push_back(
          aggregate(spec.estimators[e].id, sweep_value, sc.model->parameter_names(), sc.theta, mine));
    }
    result.estimates.insert(result.estimates.end(), std::make_move_iterator(est.begin()),
                            std::make_move_iterator(est.end()));
  }
  return result;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "estimator,sweep,parameter,truth,mean,bias,percent_bias,sd,rmse,percent_sd,percent_rmse,"
         "mean_wall_time_s,successes,failures\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.truth.size(); ++i) {
      out << r.estimator << ',' << (std::isnan(r.sweep_value) ? std::string{} : format_double(r.sweep_value))
          << ',' << r.parameters[i] << ',' << format_double(r.truth[i]) << ',' << format_double(r.mean[i]) << ','
          << format_double(r.bias[i]) << ',' << format_double(r.percent_bias[i]) << ',' << format_double(r.sd[i])
          << ',' << format_double(r.rmse[i]) << ',' << format_double(r.percent_sd[i]) << ','
          << format_double(r.percent_rmse[i]) << ',' << format_double(r.mean_wall_time) << ',' << r.successes
          << ',' << r.failures << '\n';
    }
  }
}

FitResult semiparametric_sideband_fit(const TimeSeries& z, std::shared_ptr<const ParametricModel> model,
                                      FitConfig config, Side side) {
  if (!z.is_complex()) {
    throw std::invalid_argument("semiparametric_sideband_fit: needs a complex series");
  }
  if (side == Side::all) {
    throw std::invalid_argument("semiparametric_sideband_fit: side must be positive or negative");
  }
  config.spec.variant = Variant::debiased_whittle;
  config.spec.mask.side = side;
  return fit(z, std::move(model), config);
}

}  // namespace dbw
