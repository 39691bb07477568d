// Acceptance checks, one [PASS]/[FAIL] line per criterion.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dbw/estimation.hpp"
#include "dbw/harness.hpp"
#include "dbw/likelihood.hpp"
#include "dbw/models.hpp"
#include "dbw/parallel.hpp"
#include "dbw/simulate.hpp"
#include "dbw/spectral.hpp"
#include "dbw/tapers.hpp"
#include "oracles.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double max_rel(const std::vector<double>& ref, std::span<const double> got) {
  double err = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    err = std::max(err, std::abs(got[i] - ref[i]) / std::abs(ref[i]));
  }
  return err;
}

dbw::EstimatorSpec estimator(const std::string& id, dbw::Variant v, int difference = 0,
                             dbw::TaperKind taper = dbw::TaperKind::none) {
  dbw::EstimatorSpec e;
  e.id = id;
  e.config.spec.variant = v;
  e.config.spec.difference_order = difference;
  e.config.spec.taper = taper;
  return e;
}

const dbw::AggregateRow& row_for(const dbw::ExperimentResult& res, const std::string& id, double sweep) {
  for (const auto& r : res.rows) {
    if (r.estimator == id && (std::isnan(sweep) ? std::isnan(r.sweep_value) : r.sweep_value == sweep)) {
      return r;
    }
  }
  throw std::logic_error("missing row " + id);
}

// E{I(omega; h)} = delta sum_t sum_u h_t h_u s(t - u) e^{-i omega (t - u) delta}
// for a real series differenced `order` times, in long double.
std::vector<double> expected_periodogram_oracle(const dbw::ParametricModel& model, std::span<const double> theta,
                                                std::size_t n, int order, std::span<const double> h,
                                                std::span<const double> omegas) {
  const auto acv = model.autocovariance(theta, 1.0, n + 2);
  std::vector<long double> s(acv.values().size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    s[k] = acv.values()[k].real();
  }
  for (int d = 0; d < order; ++d) {
    std::vector<long double> y(s.size() - 1);
    for (std::size_t k = 0; k < y.size(); ++k) {
      y[k] = 2 * s[k] - s[k + 1] - s[k == 0 ? 1 : k - 1];
    }
    s = std::move(y);
  }
  const std::size_t m = h.size();
  std::vector<long double> lag(m, 0.0L);
  for (std::size_t t = 0; t < m; ++t) {
    for (std::size_t u = 0; u < m; ++u) {
      lag[t > u ? t - u : u - t] += static_cast<long double>(h[t]) * h[u];
    }
  }
  std::vector<double> out;
  for (const double w : omegas) {
    long double acc = 0.0L;
    for (std::size_t k = 0; k < m; ++k) {
      acc += lag[k] * s[k] * std::cos(static_cast<long double>(w) * k);
    }
    out.push_back(static_cast<double>(acc));
  }
  return out;
}

// 1. The score, with the data spectrum replaced by an independent O(n^2)
// computation of E{I}, vanishes for random configurations.
Outcome de_biasing_identity() {
  const auto t0 = Clock::now();
  const std::size_t n = 128;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  std::string where;
  std::string over;
  for (int trial = 0; trial < 20; ++trial) {
    std::shared_ptr<const dbw::ParametricModel> model;
    std::vector<double> theta;
    switch (trial % 3) {
      case 0:
        model = dbw::make_model("matern");
        theta = {0.5 + 1.5 * u(rng), 0.05 + 0.5 * u(rng), 0.6 + 2.4 * u(rng)};
        break;
      case 1: {
        const double slope = 0.7 + 2.0 * u(rng);
        const double ratio = 0.5 + 2.0 * u(rng);
        model = dbw::make_model("matern_fixed_slope", slope, ratio);
        theta = {0.02 + 0.3 * u(rng)};
        break;
      }
      default:
        model = dbw::make_model("white_noise");
        theta = {0.2 + 3.0 * u(rng)};
        break;
    }
    dbw::LikelihoodSpec spec;
    spec.variant = dbw::Variant::debiased_whittle;
    spec.taper = u(rng) < 0.5 ? dbw::TaperKind::none : dbw::TaperKind::dpss;
    spec.nw = 1.5 + 2.5 * u(rng);
    spec.difference_order = static_cast<int>(3.0 * u(rng));
    const auto plan = dbw::plan_simulation(*model, theta, n, 1.0, 100 + trial);
    const dbw::Likelihood L(dbw::simulate_replicate(plan, 0), model, spec);
    const std::size_t m = L.analysed_length();
    std::vector<double> h(m, 1.0 / std::sqrt(double(m)));
    if (spec.taper == dbw::TaperKind::dpss) {
      const auto taper = dbw::dpss_taper(m, spec.nw);
      h.assign(taper.weights().begin(), taper.weights().end());
    }
    const std::vector<double> omegas(L.frequencies().begin(), L.frequencies().end());
    const auto expected = expected_periodogram_oracle(*model, theta, n, spec.difference_order, h, omegas);
    const auto score = L.score_against(theta, expected);
    const double largest = std::abs(*std::ranges::max_element(score, {}, [](double g) { return std::abs(g); }));
    if (largest >= 1e-8) {
      // s(0) delta / min f-bar: f-bar cancels down from lags of size s(0)
      const double ratio = model->autocovariance(theta, 1.0, 1)[0].real() / *std::ranges::min_element(expected);
      over += fmt(" trial %d (%s, s(0)/min f-bar = %.1e)", trial, model->name().c_str(), ratio);
    }
    for (const double g : score) {
      if (std::abs(g) >= worst) {
        worst = std::abs(g);
        where = model->name() + fmt(" taper=%s diff=%d", spec.taper == dbw::TaperKind::dpss ? "dpss" : "none",
                                    spec.difference_order);
      }
    }
  }
  const double t = seconds_since(t0);
  return {worst < 1e-8 && t < 10.0,
          fmt("20 configurations, max |score| = %.2e (< 1e-8, at %s), %.2f s (< 10 s)", worst, where.c_str(), t) +
              (over.empty() ? std::string{} : "; at or above 1e-8:" + over)};
}

// 2. f-bar against quadrature of the aliased spectrum and against the double sum.
// Below alpha = 1.5 the K = 2000 fold is itself too far from converged.
Outcome expected_periodogram_correctness() {
  const auto t0 = Clock::now();
  const std::size_t n = 64;
  const double delta = 1.0;
  const auto nodes = oracle::period_nodes(n, delta, 2);
  const std::vector<double> uniform(n, 1.0 / std::sqrt(double(n)));
  double quad_err = 0.0, sum_err = 0.0;
  for (const double alpha : {1.5, 2.5}) {
    std::vector<double> f;
    for (const double w : nodes.x) {
      f.push_back(oracle::aliased([&](double v) { return oracle::matern(1.0, 0.2, alpha, v); }, w, delta, 2000));
    }
    const auto ref = oracle::window_convolution(nodes, f, uniform, delta, oracle::grid(n, delta));
    const auto s = dbw::matern_autocovariance({1.0, 0.2, alpha}, delta, n);
    const auto fbar = dbw::expected_periodogram(s, n);
    quad_err = std::max(quad_err, max_rel(ref, fbar.values));
    std::vector<oracle::cd> sc(s.values().begin(), s.values().end());
    std::vector<double> dsum;
    for (const double w : oracle::grid(n, delta)) {
      dsum.push_back(oracle::double_sum_periodogram(sc, n, delta, w));
    }
    sum_err = std::max(sum_err, max_rel(dsum, fbar.values));
  }
  const double t = seconds_since(t0);
  return {quad_err < 1e-4 && sum_err < 1e-10 && t < 30.0,
          fmt("alpha in {1.5, 2.5}: vs aliased convolution %.2e (< 1e-4), vs double sum %.2e (< 1e-10), "
              "%.1f s (< 30 s)",
              quad_err, sum_err, t)};
}

// 3. Mean periodogram of simulated series.
Outcome mean_periodogram() {
  const auto t0 = Clock::now();
  const std::size_t n = 128, reps = 5000;
  const dbw::MaternModel model;
  const std::vector<double> theta{1.0, 0.2, 1.5};
  const auto plan = dbw::plan_simulation(model, theta, n, 1.0, 3);
  const auto fbar = dbw::expected_periodogram(model.autocovariance(theta, 1.0, n), n);
  std::vector<double> mean(n, 0.0);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto I = dbw::periodogram(dbw::simulate_replicate(plan, r));
    for (std::size_t i = 0; i < n; ++i) {
      mean[i] += I.values[i] / double(reps);
    }
  }
  const double cut = 0.01 * *std::ranges::max_element(fbar.values);
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (fbar.values[i] > cut) {
      ++checked;
      worst = std::max(worst, std::abs(mean[i] - fbar.values[i]) / fbar.values[i]);
    }
  }
  const double t = seconds_since(t0);
  return {worst < 0.05 && t < 120.0,
          fmt("%zu frequencies above 1%% of max, worst relative gap %.2f%% (< 5%%), %.1f s (< 120 s)", checked,
              100.0 * worst, t)};
}

// 4. Table 2 process at desk scale.
Outcome table2(std::size_t workers) {
  const auto t0 = Clock::now();
  dbw::ExperimentSpec s;
  s.model = "matern_fixed_slope";
  s.slope = 1.5;
  s.amplitude_ratio = 1.7725;
  s.theta = {0.0197};
  s.n = 1024;
  s.replicates = 500;
  s.seed = 2;
  s.workers = workers;
  s.estimators = {estimator("exact", dbw::Variant::exact_ml), estimator("whittle", dbw::Variant::whittle),
                  estimator("debiased_diff", dbw::Variant::debiased_whittle, 1),
                  estimator("debiased_dpss", dbw::Variant::debiased_whittle, 0, dbw::TaperKind::dpss)};
  const auto res = dbw::run_experiment(s);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto& ex = row_for(res, "exact", nan);
  const auto& wh = row_for(res, "whittle", nan);
  const auto& dd = row_for(res, "debiased_diff", nan);
  const auto& dt = row_for(res, "debiased_dpss", nan);
  const bool a = std::abs(dd.percent_bias[0]) < 1.0 && std::abs(ex.percent_bias[0]) < 1.0;
  const bool b = std::abs(wh.percent_bias[0]) > 50.0;
  const double sd_ratio = dd.sd[0] / ex.sd[0];
  const bool c = std::abs(sd_ratio - 1.0) <= 0.25;
  const bool d = std::abs(dt.percent_bias[0]) < 1.0;
  const double t = seconds_since(t0);
  return {a && b && c && d && t < 1800.0,
          fmt("percent bias: debiased-diff %.3f%%, exact %.3f%% (both < 1%%); whittle %.3f%% (> 50%%); "
              "SD debiased-diff/exact %.3f (within 25%%); debiased-dpss %.3f%% (< 1%%); failures %zu/%zu/%zu/%zu; "
              "%.0f s (< 1800 s)",
              dd.percent_bias[0], ex.percent_bias[0], wh.percent_bias[0], sd_ratio, dt.percent_bias[0],
              ex.failures, wh.failures, dd.failures, dt.failures, t)};
}

// 5. Slope sweep.
Outcome slope_sweep(std::size_t workers) {
  const auto t0 = Clock::now();
  dbw::ExperimentSpec s;
  s.model = "matern";
  s.theta = {1.0, 0.2, 1.5};
  s.n = 1000;
  s.replicates = 200;
  s.seed = 5;
  s.workers = workers;
  s.alpha_sweep = {0.6, 1.5, 2.5};
  s.estimators = {estimator("whittle", dbw::Variant::whittle),
                  estimator("debiased_diff", dbw::Variant::debiased_whittle, 1)};
  const auto res = dbw::run_experiment(s);
  bool ok = true;
  std::string detail;
  for (const double alpha : s.alpha_sweep) {
    const double w = std::abs(row_for(res, "whittle", alpha).bias[2]);
    const double d = std::abs(row_for(res, "debiased_diff", alpha).bias[2]);
    const bool pass = alpha == 1.5 ? d < 2.0 * w : d < w;
    ok = ok && pass;
    detail += fmt("alpha=%.1f |bias| debiased-diff %.4f vs whittle %.4f%s; ", alpha, d, w,
                  alpha == 1.5 ? " (< 2x)" : "");
  }
  const double t = seconds_since(t0);
  return {ok && t < 1800.0, detail + fmt("%.0f s (< 1800 s)", t)};
}

// 6. Root-n convergence of the de-biased estimator.
Outcome convergence_rate() {
  dbw::FitConfig cfg;
  cfg.spec.variant = dbw::Variant::debiased_whittle;
  const auto rows =
      dbw::convergence_study(dbw::make_model("matern"), {1.0, 0.2, 1.5}, cfg, {1024, 4096}, 200, 6, 1.0);
  const double ratio = rows[1].sd[2] / rows[0].sd[2];
  return {ratio >= 0.4 && ratio <= 0.65,
          fmt("SD(alpha) n=1024 %.4f, n=4096 %.4f, ratio %.3f (in [0.4, 0.65]); failures %zu/%zu", rows[0].sd[2],
              rows[1].sd[2], ratio, rows[0].failures, rows[1].failures)};
}

double min_time(const std::function<void()>& f, int runs) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < runs; ++i) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

// 7. Evaluation scaling and fit speed.
Outcome speed() {
  const auto model = dbw::make_model("matern");
  const std::vector<double> theta{1.0, 0.2, 1.5};
  auto eval_time = [&](std::size_t n) {
    const auto plan = dbw::plan_simulation(*model, theta, n, 1.0, 1);
    const dbw::Likelihood L(dbw::simulate_replicate(plan, 0), model, {});
    volatile double sink = 0.0;
    return min_time([&] { sink = L.evaluate(theta).value; }, 15);
  };
  const double small = eval_time(std::size_t{1} << 14);
  const double large = eval_time(std::size_t{1} << 17);
  const double scaling = large / small;

  const auto fixed = dbw::make_model("matern_fixed_slope", 1.5, 1.7725);
  const std::vector<double> c{0.0197};
  const auto plan = dbw::plan_simulation(*fixed, c, 1024, 1.0, 7);
  dbw::FitConfig exact_cfg, deb_cfg;
  exact_cfg.spec.variant = dbw::Variant::exact_ml;
  deb_cfg.spec.variant = dbw::Variant::debiased_whittle;
  double exact_total = 0.0, deb_total = 0.0;
  const std::size_t reps = 20;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto x = dbw::simulate_replicate(plan, r);
    exact_total += min_time([&] { dbw::fit(x, fixed, exact_cfg); }, 3);
    deb_total += min_time([&] { dbw::fit(x, fixed, deb_cfg); }, 3);
  }
  const double fit_ratio = deb_total / exact_total;
  return {scaling < 12.0 && fit_ratio < 1.0 / 20.0,
          fmt("evaluation time 2^17/2^14 = %.2f (< 12; %.2f ms vs %.2f ms); mean fit time debiased %.2f ms vs "
              "exact %.2f ms, ratio 1/%.1f (< 1/20)",
              scaling, 1e3 * large, 1e3 * small, 1e3 * deb_total / reps, 1e3 * exact_total / reps,
              exact_total / deb_total)};
}

// 8. Positive-side fit of proper complex draws and their complementary covariance.
Outcome complex_pipeline(std::size_t workers) {
  const std::size_t reps = 100, n = 1024;
  const std::vector<double> truth{1.0, 0.2, 1.5};
  const auto model = dbw::make_model("matern");
  const auto plan = dbw::plan_simulation(*model, truth, n, 1.0, 8);
  std::vector<std::vector<double>> est(3, std::vector<double>(reps));
  std::vector<std::vector<double>> comp(8, std::vector<double>(reps));
  dbw::parallel_for(
      reps,
      [&](std::size_t r) {
        const auto z = dbw::simulate_complex_replicate(plan, r);
        const auto fr = dbw::semiparametric_sideband_fit(z, model, {}, dbw::Side::positive);
        for (std::size_t i = 0; i < 3; ++i) {
          est[i][r] = fr.theta_hat[i];
        }
        // per-replicate sample complementary covariance at lags 0..3
        const auto v = z.values();
        for (std::size_t tau = 0; tau < 4; ++tau) {
          dbw::cdouble acc = 0.0;
          for (std::size_t t = tau; t < n; ++t) {
            acc += v[t] * v[t - tau];
          }
          acc /= double(n - tau);
          comp[2 * tau][r] = acc.real();
          comp[2 * tau + 1][r] = acc.imag();
        }
      },
      workers);
  bool ok = true;
  std::string detail = "theta-hat - truth in SE units:";
  for (std::size_t i = 0; i < 3; ++i) {
    const auto m = oracle::moments(est[i]);
    const double z = (m.mean - truth[i]) / m.se;
    ok = ok && std::abs(z) < 3.0;
    detail += fmt(" %.2f", z);
  }
  detail += " (|.| < 3); complementary covariance lags 0..3 (re, im) in SE units:";
  for (const auto& c : comp) {
    const auto m = oracle::moments(c);
    const double z = m.mean / m.se;
    ok = ok && std::abs(z) < 4.0;
    detail += fmt(" %.2f", z);
  }
  return {ok, detail + " (|.| < 4)"};
}

// 9. DPSS energy and concentration.
Outcome dpss() {
  double energy_err = 0.0;
  for (const std::size_t n : {64u, 100u, 1000u, 4096u}) {
    for (const double nw : {1.0, 2.5, 4.0}) {
      const auto h = dbw::dpss_taper(n, nw);
      double e = 0.0;
      for (const double w : h.weights()) {
        e += w * w;
      }
      energy_err = std::max(energy_err, std::abs(e - 1.0));
    }
  }
  const auto h = dbw::dpss_taper(64, 4.0);
  const std::vector<double> w(h.weights().begin(), h.weights().end());
  const double lambda = oracle::concentration(w, 4.0);
  const auto ref = oracle::leading_slepian(64, 4.0);
  const bool ok = energy_err < 1e-12 && lambda > 0.9999 && std::abs(lambda - ref.value) < 1e-10;
  return {ok, fmt("max |energy - 1| %.1e (< 1e-12); concentration %.12f (> 0.9999), dense eigensolver %.12f",
                  energy_err, lambda, ref.value)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> criteria;
  std::size_t workers = 0;
  app.add_option("--criterion", criteria, "Criteria to run (default: all)")->check(CLI::Range(1, 9));
  app.add_option("--workers", workers, "Worker threads for Monte Carlo runs (0 = all cores)");
  CLI11_PARSE(app, argc, argv);
  if (criteria.empty()) {
    criteria = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> all = {
      {"de-biasing identity", de_biasing_identity},
      {"expected periodogram correctness", expected_periodogram_correctness},
      {"mean periodogram", mean_periodogram},
      {"Table 2 desk scale", [&] { return table2(workers); }},
      {"slope sweep desk scale", [&] { return slope_sweep(workers); }},
      {"convergence rate", convergence_rate},
      {"speed", speed},
      {"complex sideband pipeline", [&] { return complex_pipeline(workers); }},
      {"DPSS", dpss},
  };
  bool all_pass = true;
  for (const int k : criteria) {
    const auto& [name, run] = all[static_cast<std::size_t>(k - 1)];
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << k << ". " << name << ": " << o.detail << std::endl;
  }
  return all_pass ? 0 : 1;
}
