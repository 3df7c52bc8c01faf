#include "catsim/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "catsim/kernels.hpp"

namespace catsim {

namespace {

constexpr double kMergeHz = 1e-6;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<double> FrequencyGrid::values() const {
  if (points < 2 || !(max_hz > min_hz)) throw std::invalid_argument("frequency grid needs >= 2 points and max > min");
  std::vector<double> v(points);
  const double step = (max_hz - min_hz) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) v[k] = min_hz + step * static_cast<double>(k);
  return v;
}

Spectrum linear_response_spectrum(const DensityMatrix& rho, const SpinSystem& sys,
                                  std::span<const std::size_t> observe, std::span<const std::size_t> decouple,
                                  double linewidth_hz, const FrequencyGrid& grid) {
  const std::size_t n = sys.n_spins();
  if (rho.n_spins() != n) throw DimensionError("spectrum: state and spin system sizes differ");
  const Sites obs = checked_sites(observe, n);
  Sites dec;
  if (!decouple.empty()) dec = checked_sites(decouple, n);
  for (auto d : dec)
    if (std::binary_search(obs.begin(), obs.end(), d))
      throw std::invalid_argument("spectrum: observed and decoupled spins overlap");
  if (!(linewidth_hz > 0.0)) throw std::invalid_argument("spectrum: linewidth must be > 0");

  const std::size_t dim = rho.dim();
  ComplexMatrix fy(dim), fminus(dim);
  for (auto i : obs) {
    fy += single_spin_operator(SpinOp::y, SpinIndex(i), n);
    fminus += single_spin_operator(SpinOp::minus, SpinIndex(i), n);
  }
  // Coherence created by a small y rotation: -i [Fy, rho].
  ComplexMatrix created = fy * rho.matrix() - rho.matrix() * fy;
  created *= cplx(0.0, -1.0);

  const HermitianEigen eig = hermitian_eigen(build_hamiltonian(sys.without_couplings_to(dec)));
  const ComplexMatrix vdag = eig.vectors.adjoint();
  const ComplexMatrix rho_e = vdag * created * eig.vectors;
  const ComplexMatrix fm_e = vdag * fminus * eig.vectors;

  std::vector<Stick> raw;
  double peak = 0.0;
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b) {
      const cplx amp = fm_e(b, a) * rho_e(a, b);
      if (std::abs(amp) < 1e-15) continue;
      raw.push_back({(eig.values[a] - eig.values[b]) / (2.0 * std::numbers::pi), amp});
      peak = std::max(peak, std::abs(amp));
    }
  std::sort(raw.begin(), raw.end(), [](const Stick& x, const Stick& y) { return x.freq_hz < y.freq_hz; });

  Spectrum spec;
  spec.linewidth_hz = linewidth_hz;
  for (std::size_t k = 0; k < raw.size();) {
    std::size_t e = k + 1;
    cplx sum = raw[k].amplitude;
    double fsum = raw[k].freq_hz;
    while (e < raw.size() && raw[e].freq_hz - raw[e - 1].freq_hz < kMergeHz) {
      sum += raw[e].amplitude;
      fsum += raw[e].freq_hz;
      ++e;
    }
    if (std::abs(sum) > 1e-12 * peak) spec.sticks.push_back({fsum / static_cast<double>(e - k), sum});
    k = e;
  }

  spec.frequencies = grid.values();
  spec.trace.assign(spec.frequencies.size(), 0.0);
  for (const auto& s : spec.sticks)
    kernels::lorentzian_accumulate(spec.frequencies.size(), spec.frequencies.data(), s.freq_hz, 0.5 * linewidth_hz,
                                   s.amplitude, spec.trace.data());
  return spec;
}

std::vector<Peak> peak_list(const Spectrum& spec, double threshold_fraction) {
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
    throw std::invalid_argument("peak_list: threshold must lie in (0, 1)");
  struct Cluster {
    cplx sum;
    double fweight;
    double wsum;
  };
  std::vector<Cluster> clusters;
  const double gap = 0.5 * spec.linewidth_hz;
  for (std::size_t k = 0; k < spec.sticks.size(); ++k) {
    const auto& s = spec.sticks[k];
    const double w = std::abs(s.amplitude);
    if (k == 0 || s.freq_hz - spec.sticks[k - 1].freq_hz >= gap) clusters.push_back({{}, 0.0, 0.0});
    auto& c = clusters.back();
    c.sum += s.amplitude;
    c.fweight += w * s.freq_hz;
    c.wsum += w;
  }
  double largest = 0.0;
  for (const auto& c : clusters) largest = std::max(largest, std::abs(c.sum));
  std::vector<Peak> peaks;
  for (const auto& c : clusters) {
    if (std::abs(c.sum) < threshold_fraction * largest || c.wsum == 0.0) continue;
    peaks.push_back({c.fweight / c.wsum, c.sum.real()});
  }
  return peaks;
}

void write_trace_table(std::ostream& os, const Spectrum& spec) {
  os << "# frequency_hz,amplitude\n";
  for (std::size_t k = 0; k < spec.frequencies.size(); ++k)
    os << fmt17(spec.frequencies[k]) << ',' << fmt17(spec.trace[k]) << '\n';
}

void write_stick_table(std::ostream& os, const Spectrum& spec) {
  os << "# frequency_hz,re,im,abs\n";
  for (const auto& s : spec.sticks)
    os << fmt17(s.freq_hz) << ',' << fmt17(s.amplitude.real()) << ',' << fmt17(s.amplitude.imag()) << ','
       << fmt17(std::abs(s.amplitude)) << '\n';
}

DensityMatrix thermal_state(const SpinSystem& sys, double epsilon, double control_gyro_ratio) {
  const std::size_t n = sys.n_spins();
  const std::size_t dim = std::size_t{1} << n;
  if (!(epsilon > 0.0) || epsilon * static_cast<double>(n) >= 2.0)
    throw std::invalid_argument("thermal_state: epsilon out of range");
  std::vector<double> diag(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = sys.roles()[i] == SpinRole::control ? control_gyro_ratio : 1.0;
      z += w * (is_down(r, i, n) ? -0.5 : 0.5);
    }
    diag[r] = (1.0 + epsilon * z) / static_cast<double>(dim);
  }
  return DensityMatrix(ComplexMatrix::diagonal(std::span<const double>(diag)));
}

}  // namespace catsim
