#pragma once

// Small-tip-angle linear-response spectra, computed from eigenbasis
// transition amplitudes rather than a time-domain FID.

#include <iosfwd>
#include <span>
#include <vector>

#include "catsim/dynamics.hpp"
#include "catsim/states.hpp"

namespace catsim {

struct Stick {
  double freq_hz{};
  cplx amplitude{};
};

struct FrequencyGrid {
  double min_hz{-2000.0};
  double max_hz{2000.0};
  std::size_t points{4001};

  std::vector<double> values() const;
};

struct Spectrum {
  std::vector<Stick> sticks;  // ascending in frequency
  std::vector<double> frequencies;
  std::vector<double> trace;  // Lorentzian absorption sampled on `frequencies`
  double linewidth_hz{};      // full width at half maximum
};

struct Peak {
  double freq_hz{};
  double amplitude{};  // real part of the summed stick amplitudes
};

/// Sticks at (E_a - E_b) / 2pi with amplitude <b|F-|a> <a|-i[Fy, rho]|b>,
/// F summed over `observe`. Couplings to `decouple` spins are dropped from
/// the detection Hamiltonian. Sticks closer than 1e-6 Hz are merged.
Spectrum linear_response_spectrum(const DensityMatrix& rho, const SpinSystem& sys,
                                  std::span<const std::size_t> observe, std::span<const std::size_t> decouple,
                                  double linewidth_hz, const FrequencyGrid& grid);

/// Clusters sticks separated by less than linewidth/2, sums each cluster and
/// drops clusters below threshold_fraction of the largest one.
std::vector<Peak> peak_list(const Spectrum& spec, double threshold_fraction);

/// Two columns: frequency_hz, amplitude.
void write_trace_table(std::ostream& os, const Spectrum& spec);

/// Four columns: frequency_hz, re, im, abs.
void write_stick_table(std::ostream& os, const Spectrum& spec);

/// High-temperature equilibrium: I/2^n + epsilon * sum_i w_i Sz_i / 2^n with
/// w = 1 for system spins and control_gyro_ratio for control spins.
DensityMatrix thermal_state(const SpinSystem& sys, double epsilon = 1e-2, double control_gyro_ratio = 0.2515);

}  // namespace catsim
