#pragma once

// Single-exponential lifetime fits and the N-scaling study of NQ decay.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "catsim/dynamics.hpp"

namespace catsim {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Sample {
  double t{};
  double y{};
};

struct DecayFit {
  double tau{};
  double amplitude{};
  double residual_rms{};
  double r_squared{};
};

/// Fits y = A exp(-t / tau): log-linear regression over the y > 0 points,
/// then one Gauss-Newton pass on the untransformed model using every point.
/// Throws FitError on degenerate or non-decaying data.
DecayFit fit_exponential(std::span<const Sample> points);

struct LinearFit {
  double slope{};
  double intercept{};
  double r{};  // Pearson correlation
  double slope_stderr{};
  double intercept_stderr{};
};

LinearFit linear_regression(std::span<const double> x, std::span<const double> y);

struct ScalingPoint {
  std::size_t n{};
  double rate{};  // 1/s
};

/// For each N, decays the balanced N-spin cat under `noise` (rates taken
/// from the first N entries, or broadcast from a single entry), fits the
/// NQ amplitude over `delays`, and reports the fitted rate.
std::vector<ScalingPoint> scaling_study(std::span<const std::size_t> n_range, const NoiseModel& noise,
                                        std::span<const double> delays, NoiseMode mode = NoiseMode::analytic,
                                        std::uint64_t seed = 1);

}  // namespace catsim
