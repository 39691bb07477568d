#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dbw/models.hpp"
#include "dbw/spectral.hpp"
#include "oracles.hpp"

using std::numbers::pi;

TEST_CASE("matern spectrum") {
  CHECK(dbw::matern_spectrum({1.0, 0.2, 1.0}, 0.0) == doctest::Approx(25.0).epsilon(1e-14));
  const double far = dbw::matern_spectrum({1.0, 0.2, 1.0}, 1e4);
  CHECK(far * 1e8 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(dbw::matern_spectrum({1.0, 0.2, 1.0}, 2e4) / far == doctest::Approx(0.25).epsilon(1e-6));
  for (const double w : {0.0, 0.3, -2.0, 7.0}) {
    CHECK(dbw::matern_spectrum({2.0, 0.4, 1.7}, w) ==
          doctest::Approx(4.0 * dbw::matern_spectrum({1.0, 0.4, 1.7}, w)).epsilon(1e-14));
    CHECK(dbw::matern_spectrum({2.0, 0.4, 1.7}, w) == dbw::matern_spectrum({2.0, 0.4, 1.7}, -w));
    CHECK(dbw::matern_spectrum({1.3, 0.4, 0.8}, w) == doctest::Approx(oracle::matern(1.3, 0.4, 0.8, w)));
  }
  CHECK_THROWS(dbw::MaternParams{1.0, 0.2, 0.5}.validate());
  CHECK_THROWS(dbw::MaternParams{0.0, 0.2, 1.5}.validate());
  CHECK_THROWS(dbw::MaternParams{1.0, -0.2, 1.5}.validate());
  CHECK_THROWS(dbw::matern_autocovariance({1.0, 0.2, 0.4}, 1.0, 10));
}

TEST_CASE("matern variance against quadrature") {
  const auto s = dbw::matern_autocovariance({1.0, 0.2, 1.5}, 1.0, 10);
  const double ref = oracle::matern_acv(1.0, 0.2, 1.5, 0.0);
  CHECK(std::abs(s.variance() - ref) < 1e-8 * ref);
  for (std::size_t t = 1; t <= 10; ++t) {
    const double q = oracle::matern_acv(1.0, 0.2, 1.5, static_cast<double>(t));
    CHECK(std::abs(s[t].real() - q) < 1e-6 * q);
  }
}

TEST_CASE("matern autocovariance over the parameter lattice") {
  for (const double a : {0.5, 1.0, 2.0}) {
    for (const double c : {0.05, 0.2, 1.0}) {
      for (const double alpha : {0.6, 1.0, 1.5, 2.5}) {
        for (const double delta : {1.0, 0.5}) {
          const auto s = dbw::matern_autocovariance({a, c, alpha}, delta, 100);
          REQUIRE(s.size() == 101);
          const double s0 = oracle::matern_acv(a, c, alpha, 0.0);
          double worst = 0.0;
          for (std::size_t t = 0; t <= 100; ++t) {
            const double ref = oracle::matern_acv(a, c, alpha, static_cast<double>(t) * delta);
            // values far below s(0) are limited by the oracle's absolute accuracy
            worst = std::max(worst, std::abs(s[t].real() - ref) / std::max(std::abs(ref), 1e-9 * s0));
          }
          INFO("A=" << a << " c=" << c << " alpha=" << alpha << " delta=" << delta);
          CHECK(worst < 1e-6);
        }
      }
    }
  }
}

TEST_CASE("matern autocovariance decays monotonically") {
  const auto s = dbw::matern_autocovariance({1.0, 0.2, 1.5}, 1.0, 51);
  for (std::size_t t = 0; t <= 50; ++t) {
    CHECK(s[t + 1].real() > 0.0);
    CHECK(s[t + 1].real() < s[t].real());
  }
  CHECK(s.satisfies_cauchy_schwarz());
}

TEST_CASE("fast autocovariance agrees with the Bessel route") {
  for (const double alpha : {0.51, 0.6, 1.0, 1.5, 2.0, 2.5, 3.7, 10.0}) {
    for (const double c : {1e-3, 0.0197, 0.2, 3.0}) {
      const dbw::MaternParams p{1.7, c, alpha};
      const auto fast = dbw::matern_autocovariance(p, 1.0, 2000);
      const auto ref = dbw::matern_autocovariance_bessel(p, 1.0, 2000);
      double worst = 0.0;
      for (std::size_t t = 0; t < fast.size(); ++t) {
        worst = std::max(worst, std::abs(fast[t].real() - ref[t].real()) / std::max(ref[t].real(), 1e-280));
      }
      INFO("alpha=" << alpha << " c=" << c);
      // relative to s(0) once the values underflow relative precision
      double tail = 0.0;
      for (std::size_t t = 0; t < fast.size(); ++t) {
        tail = std::max(tail, std::abs(fast[t].real() - ref[t].real()) / ref.variance());
      }
      CHECK(tail < 1e-10);
      if (c * 2000 < 200) {
        CHECK(worst < 1e-9);
      }
    }
  }
}

TEST_CASE("unit-variance fixed-slope matern") {
  const dbw::FixedSlopeMaternModel model(1.5, std::sqrt(pi));
  for (const double c : {0.0197, 0.3}) {
    const std::vector<double> theta{c};
    CHECK(model.autocovariance(theta, 1.0, 4).variance() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(model.spectrum(theta, 0.7, 1.0) == doctest::Approx(oracle::matern(std::sqrt(pi) * c, c, 1.5, 0.7)));
  }
  CHECK(model.parameter_count() == 1);
  CHECK(model.derived(std::vector<double>{0.5}).at("A") == doctest::Approx(0.5 * std::sqrt(pi)));
  CHECK_THROWS(dbw::FixedSlopeMaternModel(0.5, 1.0));
  CHECK_THROWS(dbw::FixedSlopeMaternModel(1.5, 0.0));
}

TEST_CASE("model bounds and factory") {
  const dbw::MaternModel m;
  const auto b = m.bounds(0.5);
  REQUIRE(b.size() == 3);
  CHECK(b[0].lower == 1e-10);
  CHECK(b[0].upper == 1e10);
  CHECK(b[1].lower == doctest::Approx(2e-8));
  CHECK(b[1].upper == doctest::Approx(2 * pi));
  CHECK(b[2].lower == 0.51);
  CHECK(b[2].upper == 10.0);
  CHECK(m.within_bounds(std::vector<double>{1.0, 0.2, 1.5}, 1.0));
  CHECK_FALSE(m.within_bounds(std::vector<double>{1.0, 0.2, 0.5}, 1.0));
  CHECK_FALSE(m.within_bounds(std::vector<double>{1.0, 4.0, 1.5}, 1.0));
  CHECK(dbw::make_model("matern")->name() == "matern");
  CHECK(dbw::make_model("white_noise")->parameter_count() == 1);
  CHECK(dbw::make_model("matern_fixed_slope", 2.0, 3.0)->name() == "matern_fixed_slope");
  CHECK_THROWS(dbw::make_model("arma"));
  CHECK_THROWS(m.autocovariance(std::vector<double>{1.0, 0.2}, 1.0, 4));
}

TEST_CASE("model spectra are even") {
  const dbw::MaternModel m;
  const dbw::WhiteNoiseModel w;
  const std::vector<double> theta{1.2, 0.3, 1.1};
  const std::vector<double> sigma{2.0};
  for (const double omega : {0.0, 0.1, 1.0, 3.0, 50.0}) {
    CHECK(m.spectrum(theta, omega, 1.0) == m.spectrum(theta, -omega, 1.0));
    CHECK(w.spectrum(sigma, omega, 1.0) == w.spectrum(sigma, -omega, 1.0));
  }
  CHECK(w.spectrum(sigma, 1.0, 0.5) == 1.0);
  CHECK(w.spectrum(sigma, 7.0, 0.5) == 0.0);
}

TEST_CASE("diffusivity") {
  CHECK(dbw::diffusivity({1.0, 0.2, 1.0}) == doctest::Approx(6.25).epsilon(1e-14));
  CHECK(dbw::diffusivity({2.0, 0.2, 1.0}) == doctest::Approx(25.0).epsilon(1e-14));
  for (const double alpha : {0.6, 1.5, 4.0}) {
    CHECK(dbw::diffusivity({1.0, 1.0, alpha}) == doctest::Approx(0.25).epsilon(1e-14));
  }
  const dbw::MaternModel m;
  const auto d = m.derived(std::vector<double>{1.0, 0.2, 1.0});
  CHECK(d.at("damping_timescale") == doctest::Approx(5.0));
  CHECK(d.at("slope") == doctest::Approx(2.0));
  CHECK(d.at("diffusivity") == doctest::Approx(6.25));
}

TEST_CASE("complex matern autocovariance") {
  for (const auto& p : {dbw::MaternParams{1.0, 0.2, 1.5}, dbw::MaternParams{0.3, 0.05, 0.7}}) {
    const auto real = dbw::matern_autocovariance(p, 1.0, 40);
    const auto z = dbw::complex_matern_autocovariance(p, 1.0, 40);
    REQUIRE(z.size() == real.size());
    CHECK(z.variance() > 0.0);
    for (std::size_t t = 0; t < z.size(); ++t) {
      CHECK(z[t].imag() == 0.0);
      CHECK(z[t].real() == real[t].real());
    }
  }
}

TEST_CASE("aliased spectrum") {
  const dbw::WhiteNoiseModel w;
  const std::vector<double> sigma{1.5};
  const auto grid = dbw::fourier_grid(16, 1.0);
  const auto flat = dbw::aliased_spectrum(w, sigma, grid, 10);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(flat.values[i] == doctest::Approx(w.spectrum(sigma, grid[i], 1.0)).epsilon(1e-12));
  }

  const dbw::MaternModel m;
  const std::vector<double> rough{1.0, 0.2, 0.6};
  const double k500 = dbw::aliased_spectrum_at(m, rough, pi, 1.0, 500);
  const double k1000 = dbw::aliased_spectrum_at(m, rough, pi, 1.0, 1000);
  CHECK(std::abs(k500 - k1000) < 1e-4 * k1000);
  CHECK(k1000 > m.spectrum(rough, pi, 1.0));

  // against a long plain folding sum where the tail is negligible
  const std::vector<double> smooth{1.0, 0.2, 1.5};
  for (const double omega : {0.0, 1.0, pi}) {
    const double ref =
        oracle::aliased([](double v) { return oracle::matern(1.0, 0.2, 1.5, v); }, omega, 1.0, 200000);
    CHECK(dbw::aliased_spectrum_at(m, smooth, omega, 1.0, 2000) == doctest::Approx(ref).epsilon(1e-9));
  }
  const auto auto_k = dbw::aliased_spectrum(m, smooth, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(auto_k.values[i] >= m.spectrum(smooth, grid[i], 1.0));
  }
  CHECK_THROWS(dbw::aliased_spectrum(m, smooth, grid, 0));
}

TEST_CASE("expected periodogram agrees with the Fejer convolution of the aliased spectrum") {
  const dbw::MaternModel m;
  for (const double alpha : {0.6, 1.5, 2.5}) {
    for (const std::size_t n : {32u, 128u}) {
      const std::vector<double> theta{1.0, 0.2, alpha};
      const auto nodes = oracle::period_nodes(n, 1.0);
      std::vector<double> f;
      for (const double x : nodes.x) {
        f.push_back(dbw::aliased_spectrum_at(m, theta, x, 1.0, 2000));
      }
      const auto ref = oracle::window_convolution(
          nodes, f, std::vector<double>(n, 1.0 / std::sqrt(static_cast<double>(n))), 1.0, oracle::grid(n, 1.0));
      const auto fbar = dbw::expected_periodogram(m.autocovariance(theta, 1.0, n), n);
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(fbar.values[i] - ref[i]) / ref[i]);
      }
      INFO("alpha=" << alpha << " n=" << n);
      CHECK(worst < 1e-4);
    }
  }
}
