#include <doctest.h>

#include <algorithm>
#include <random>

#include "catsim/analysis.hpp"
#include "catsim/dynamics.hpp"

using namespace catsim;

namespace {

std::vector<Sample> exact(double amp, double tau, std::size_t n, double t_max) {
  std::vector<Sample> s;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t_max * static_cast<double>(k) / static_cast<double>(n - 1);
    s.push_back({t, amp * std::exp(-t / tau)});
  }
  return s;
}

}  // namespace

TEST_CASE("fit_exponential recovers generating lifetimes") {
  for (double tau : {0.029, 0.49}) {
    const auto fit = fit_exponential(exact(1.0, tau, 12, 3.5 * tau));
    CHECK(std::abs(fit.tau - tau) <= 1e-6);
    CHECK(fit.amplitude == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.r_squared <= 1.0);
    CHECK(fit.r_squared >= 1.0 - 1e-12);
    CHECK(fit.residual_rms < 1e-12);
  }
}

TEST_CASE("fit_exponential rejects degenerate input") {
  CHECK_THROWS_AS(fit_exponential(std::vector<Sample>{{0, 0}, {1, 0}, {2, 0}, {3, 0}}), FitError);
  CHECK_THROWS_AS(fit_exponential(std::vector<Sample>{{0, 1}, {1, 0.5}}), FitError);
  CHECK_THROWS_AS(fit_exponential(std::vector<Sample>{{0, 1}, {1, 1}, {2, 1}}), FitError);
  CHECK_THROWS_AS(fit_exponential(std::vector<Sample>{{0, 1}, {1, -0.5}, {2, -0.2}, {3, -0.1}}), FitError);
  CHECK_THROWS_AS(fit_exponential(std::vector<Sample>{{-1, 1}, {1, 0.5}, {2, 0.2}}), FitError);
  CHECK_THROWS_AS(fit_exponential(std::vector<Sample>{{0, 0.2}, {1, 0.5}, {2, 1.0}}), FitError);  // growth
  CHECK_THROWS_AS(fit_exponential(std::vector<Sample>{{1, 0.2}, {1, 0.5}, {1, 1.0}}), FitError);
}

TEST_CASE("fit_exponential keeps non-positive points out of the log stage only") {
  auto s = exact(1.0, 0.1, 10, 0.4);
  s.push_back({2.0, -1e-4});  // a noisy tail sample
  const auto fit = fit_exponential(s);
  CHECK(fit.tau == doctest::Approx(0.1).epsilon(1e-3));
  CHECK(fit.residual_rms > 0.0);
}

TEST_CASE("fit_exponential is scale equivariant") {
  const auto base = exact(0.8, 0.05, 9, 0.2);
  const auto f0 = fit_exponential(base);
  for (double c : {1e-3, 0.5, 7.0, 1e4}) {
    auto s = base;
    for (auto& p : s) p.y *= c;
    const auto f = fit_exponential(s);
    CHECK(std::abs(f.tau - f0.tau) <= 1e-9 * f0.tau);
    CHECK(f.amplitude == doctest::Approx(c * f0.amplitude).epsilon(1e-9));
  }
}

TEST_CASE("any 5+ point subset recovers tau on noiseless data (100 seeds)") {
  const auto full = exact(1.0, 0.029, 12, 0.11);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    auto pts = full;
    std::shuffle(pts.begin(), pts.end(), rng);
    pts.resize(5 + seed % 8);
    CHECK(std::abs(fit_exponential(pts).tau - 0.029) <= 1e-6);
  }
}

TEST_CASE("linear_regression") {
  const std::vector<double> x{1, 2, 3, 4, 5}, y{3, 5, 7, 9, 11};
  const auto f = linear_regression(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r == doctest::Approx(1.0));
  CHECK(f.slope_stderr == doctest::Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(linear_regression(std::vector<double>{1}, std::vector<double>{1}), FitError);
  CHECK_THROWS_AS(linear_regression(std::vector<double>{1, 1}, std::vector<double>{1, 2}), FitError);

  // Textbook standard errors on a small noisy set.
  const std::vector<double> xn{0, 1, 2, 3}, yn{0.1, 0.9, 2.2, 2.8};
  const auto g = linear_regression(xn, yn);
  CHECK(g.slope == doctest::Approx(0.94));
  CHECK(g.intercept == doctest::Approx(0.09));
  // residuals: 0.01, -0.13, 0.23, -0.11 -> SSE 0.082; s^2 = 0.041; Sxx = 5
  CHECK(g.slope_stderr == doctest::Approx(std::sqrt(0.041 / 5.0)));
  CHECK(g.intercept_stderr == doctest::Approx(std::sqrt(0.041 * 14.0 / (4.0 * 5.0))));
}

TEST_CASE("analytic scaling study: rate = N gamma / 2") {
  const double gamma = 10.0;
  std::vector<std::size_t> ns{1, 2, 3, 4, 5, 6, 7};
  const std::vector<double> delays{0.0, 0.01, 0.02, 0.03, 0.04, 0.05};
  const auto pts = scaling_study(ns, NoiseModel::uniform(1, gamma, 0.0), delays);
  REQUIRE(pts.size() == ns.size());
  for (const auto& p : pts) CHECK(p.rate == doctest::Approx(p.n * gamma / 2.0).epsilon(1e-12));
  CHECK(pts[0].rate == doctest::Approx(gamma / 2.0));

  std::vector<double> x, y;
  for (const auto& p : pts)
    if (p.n >= 2) {
      x.push_back(static_cast<double>(p.n));
      y.push_back(p.rate);
    }
  const auto fit = linear_regression(x, y);
  CHECK(fit.slope == doctest::Approx(gamma / 2.0).epsilon(1e-12));
  CHECK(std::abs(fit.intercept) <= 1e-9);
  CHECK(fit.r >= 0.9999);
}

TEST_CASE("scaling study with per-spin rates sums them") {
  NoiseModel m = NoiseModel::none(4);
  m.dephasing_rates = {2.0, 4.0, 6.0, 8.0};
  const std::vector<std::size_t> ns{2, 4};
  const std::vector<double> delays{0.0, 0.05, 0.1, 0.15};
  const auto pts = scaling_study(ns, m, delays);
  CHECK(pts[0].rate == doctest::Approx(3.0));
  CHECK(pts[1].rate == doctest::Approx(10.0));
  const std::vector<std::size_t> too_many{5};
  CHECK_THROWS(scaling_study(too_many, m, delays));
  CHECK_THROWS_AS(scaling_study(ns, m, std::vector<double>{0.0, 0.1}), FitError);
}

TEST_CASE("Monte Carlo scaling slope within 3 standard errors of gamma/2") {
  const double gamma = 10.0;
  NoiseModel m = NoiseModel::uniform(1, gamma, 0.0);
  m.mc_trajectories = 10000;
  const std::vector<std::size_t> ns{2, 3, 4, 5, 6};
  const std::vector<double> delays{0.0, 0.01, 0.02, 0.03, 0.04};
  const auto pts = scaling_study(ns, m, delays, NoiseMode::monte_carlo, 5);
  std::vector<double> x, y;
  for (const auto& p : pts) {
    x.push_back(static_cast<double>(p.n));
    y.push_back(p.rate);
  }
  const auto fit = linear_regression(x, y);
  CAPTURE(fit.slope);
  CAPTURE(fit.slope_stderr);
  CHECK(std::abs(fit.slope - gamma / 2.0) <= 3.0 * fit.slope_stderr);
}
