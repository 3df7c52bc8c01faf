#include "catsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "catsim/states.hpp"

namespace catsim {

DecayFit fit_exponential(std::span<const Sample> points) {
  if (points.size() < 3) throw FitError("need at least 3 points, got " + std::to_string(points.size()));
  std::size_t positive = 0;
  for (const auto& p : points) {
    if (!std::isfinite(p.t) || p.t < 0.0 || !std::isfinite(p.y)) throw FitError("times must be >= 0 and values finite");
    if (p.y > 0.0) ++positive;
  }
  if (2 * positive <= points.size()) throw FitError("most values are non-positive; wrong observable?");
  if (positive < 3) throw FitError("fewer than 3 usable (positive) points");
  const bool all_equal = std::all_of(points.begin(), points.end(), [&](const Sample& p) { return p.y == points[0].y; });
  if (all_equal) throw FitError("data are constant: no decay to fit");

  // ln y = c - k t over positive points
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  for (const auto& p : points) {
    if (p.y <= 0.0) continue;
    const double l = std::log(p.y);
    st += p.t;
    sl += l;
    stt += p.t * p.t;
    stl += p.t * l;
  }
  const double m = static_cast<double>(positive);
  const double den = m * stt - st * st;
  if (den <= 0.0) throw FitError("sample times are not distinct");
  double k = -(m * stl - st * sl) / den;
  double amp = std::exp((sl + k * st) / m);

  // One Gauss-Newton step on r_i = y_i - A exp(-k t_i).
  double jaa = 0.0, jak = 0.0, jkk = 0.0, ga = 0.0, gk = 0.0;
  for (const auto& p : points) {
    const double e = std::exp(-k * p.t);
    const double r = p.y - amp * e;
    const double da = e;
    const double dk = -amp * p.t * e;
    jaa += da * da;
    jak += da * dk;
    jkk += dk * dk;
    ga += da * r;
    gk += dk * r;
  }
  const double det = jaa * jkk - jak * jak;
  if (det > 0.0 && std::isfinite(det)) {
    amp += (jkk * ga - jak * gk) / det;
    k += (jaa * gk - jak * ga) / det;
  }
  if (!(k > 0.0) || !std::isfinite(k) || !std::isfinite(amp))
    throw FitError("fitted rate is not positive: the data do not decay");

  double mean = 0.0;
  for (const auto& p : points) mean += p.y;
  mean /= static_cast<double>(points.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& p : points) {
    const double r = p.y - amp * std::exp(-k * p.t);
    ss_res += r * r;
    ss_tot += (p.y - mean) * (p.y - mean);
  }
  DecayFit fit;
  fit.tau = 1.0 / k;
  fit.amplitude = amp;
  fit.residual_rms = std::sqrt(ss_res / static_cast<double>(points.size()));
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

LinearFit linear_regression(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw FitError("linear regression needs >= 2 paired values");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw FitError("linear regression: x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 1.0;
  if (x.size() > 2) {
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (f.intercept + f.slope * x[i]);
      ss += r * r;
    }
    const double s2 = ss / (n - 2.0);
    f.slope_stderr = std::sqrt(s2 / sxx);
    double sum_x2 = 0.0;
    for (double v : x) sum_x2 += v * v;
    f.intercept_stderr = std::sqrt(s2 * sum_x2 / (n * sxx));
  }
  return f;
}

std::vector<ScalingPoint> scaling_study(std::span<const std::size_t> n_range, const NoiseModel& noise,
                                        std::span<const double> delays, NoiseMode mode, std::uint64_t seed) {
  if (delays.size() < 3) throw FitError("scaling study needs at least 3 delays");
  const auto& rates = noise.dephasing_rates;
  if (rates.empty()) throw std::invalid_argument("scaling study: no dephasing rates given");
  std::vector<ScalingPoint> out;
  for (std::size_t n : n_range) {
    if (n == 0) throw std::invalid_argument("scaling study: N must be >= 1");
    if (rates.size() != 1 && rates.size() < n)
      throw std::invalid_argument("scaling study: " + std::to_string(rates.size()) + " rates for N = " + std::to_string(n));
    NoiseModel local = NoiseModel::none(n);
    for (std::size_t i = 0; i < n; ++i) local.dephasing_rates[i] = rates.size() == 1 ? rates[0] : rates[i];
    local.mc_trajectories = noise.mc_trajectories;

    const DensityMatrix cat = cat_state(n, CatWeights::balanced());
    const double base = std::abs(cat(0, cat.dim() - 1));
    std::vector<Sample> pts;
    for (std::size_t k = 0; k < delays.size(); ++k) {
      const double t = delays[k];
      DensityMatrix rho = cat;
      if (mode == NoiseMode::analytic) {
        rho = apply_dephasing(cat, local, t);
      } else {
        std::vector<double> sigma(n);
        for (std::size_t i = 0; i < n; ++i) sigma[i] = std::sqrt(local.dephasing_rates[i] * t);
        NoiseModel kicks = local;
        kicks.mc_phase_sigma = std::move(sigma);
        rho = apply_phase_kicks_mc(cat, kicks, seed + 1000 * n + k);
      }
      // Real part: the Monte Carlo mean of e^{-i phi} is unbiased there, its modulus is not.
      pts.push_back({t, rho(0, rho.dim() - 1).real() / base});
    }
    out.push_back({n, 1.0 / fit_exponential(pts).tau});
  }
  return out;
}

}  // namespace catsim
