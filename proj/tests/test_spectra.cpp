#include <doctest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "catsim/dynamics.hpp"
#include "catsim/spectra.hpp"
#include "catsim/spin_ops.hpp"
#include "oracles.hpp"

using namespace catsim;
using oracle::Op;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const FrequencyGrid kGrid{-3000.0, 3000.0, 601};

DensityMatrix up_u(std::size_t n, double f) { return pseudopure(n, ferro_state(n, Ferro::alive), f); }

// Free-induction signal Tr(F- U rho' U^+) with rho' = -i[Fy, rho], U = exp(-i H t),
// everything from kron chains and a Taylor exponential.
cplx fid_oracle(const DensityMatrix& rho, const SpinSystem& sys, const Sites& observe, const Sites& decouple, double t) {
  const std::size_t n = sys.n_spins();
  ComplexMatrix fy(std::size_t{1} << n), fm(std::size_t{1} << n);
  for (auto i : observe) {
    fy = oracle::add(fy, oracle::embed(Op::y, i, n));
    fm = oracle::add(fm, oracle::embed(Op::minus, i, n));
  }
  const auto created =
      oracle::scaled(oracle::add(oracle::matmul(fy, rho.matrix()), oracle::matmul(rho.matrix(), fy), -1.0), cplx(0, -1));
  const auto h = build_hamiltonian(decouple.empty() ? sys : sys.without_couplings_to(decouple));
  const auto u = oracle::expm(oracle::scaled(h, cplx(0.0, -t)));
  const auto evolved = oracle::matmul(oracle::matmul(u, created), oracle::dagger(u));
  cplx s = 0.0;
  for (std::size_t r = 0; r < fm.dim(); ++r)
    for (std::size_t c = 0; c < fm.dim(); ++c) s += fm(r, c) * evolved(c, r);
  return s;
}

cplx fid_from_sticks(const Spectrum& spec, double t) {
  cplx s = 0.0;
  for (const auto& st : spec.sticks) s += st.amplitude * std::exp(cplx(0.0, -kTwoPi * st.freq_hz * t));
  return s;
}

std::size_t sticks_above(const Spectrum& spec, double frac) {
  double peak = 0.0;
  for (const auto& s : spec.sticks) peak = std::max(peak, std::abs(s.amplitude));
  std::size_t k = 0;
  for (const auto& s : spec.sticks)
    if (std::abs(s.amplitude) > frac * peak) ++k;
  return k;
}

cplx total_amplitude(const Spectrum& spec) {
  cplx s = 0.0;
  for (const auto& st : spec.sticks) s += st.amplitude;
  return s;
}

// Looks up the stick at frequency f (within 1e-6 Hz).
const Stick* stick_at(const Spectrum& spec, double f) {
  for (const auto& s : spec.sticks)
    if (std::abs(s.freq_hz - f) < 1e-6) return &s;
  return nullptr;
}

}  // namespace

TEST_CASE("decoupled pseudopure |u> gives a single peak") {
  const auto sys = SpinSystem::benzene_13c();
  const Sites observe = sys.system_sites(), decouple = sys.control_sites();
  for (double f : {1.0, 0.4, 0.05}) {
    const auto spec = linear_response_spectrum(up_u(7, f), sys, observe, decouple, 2.0, kGrid);
    CHECK(sticks_above(spec, 0.01) == 1);
    CHECK(peak_list(spec, 0.01).size() == 1);
  }
}

TEST_CASE("stick lists reproduce the time-domain signal") {
  const auto sys = SpinSystem::benzene_13c();
  const Sites observe = sys.system_sites(), decouple = sys.control_sites();
  std::mt19937_64 rng(8);
  const std::vector<DensityMatrix> states{up_u(7, 1.0), thermal_state(sys), DensityMatrix(oracle::random_density(7, rng))};
  for (const auto& rho : states) {
    for (bool dec : {false, true}) {
      const Sites d = dec ? decouple : Sites{};
      const auto spec = linear_response_spectrum(rho, sys, observe, d, 2.0, kGrid);
      for (double t : {0.0, 1.3e-4, 7.1e-4}) {
        const cplx ref = fid_oracle(rho, sys, observe, d, t);
        CHECK(std::abs(fid_from_sticks(spec, t) - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
      }
    }
  }
}

TEST_CASE("C-H coupling pattern controls the coupled line count") {
  // Equal C-H couplings keep the ring symmetric: |up>|u> excites one line.
  const auto equal = SpinSystem::ring(6, -500.0, -120.0);
  const Sites observe = equal.system_sites();
  const auto s_equal = linear_response_spectrum(up_u(7, 1.0), equal, observe, {}, 2.0, kGrid);
  CHECK(sticks_above(s_equal, 0.01) == 1);

  const auto benzene = SpinSystem::benzene_13c();
  const auto s_het = linear_response_spectrum(up_u(7, 1.0), benzene, observe, {}, 2.0, kGrid);
  CHECK(sticks_above(s_het, 0.01) > 1);
  for (double t : {2e-4, 9e-4}) {
    const cplx ref = fid_oracle(up_u(7, 1.0), benzene, observe, {}, t);
    CHECK(std::abs(fid_from_sticks(s_het, t) - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("global 180 degree pulse mirrors the spectrum with inverted sign") {
  const auto sys = SpinSystem::ring(4, -300.0, 90.0);
  const Sites observe = sys.system_sites();
  std::mt19937_64 rng(2);
  for (int k = 0; k < 4; ++k) {
    const DensityMatrix rho = k == 0 ? up_u(5, 1.0) : DensityMatrix(oracle::random_density(5, rng));
    const auto flipped = apply_pulse(rho, Pulse{all_sites(5), Axis::x, std::numbers::pi, 0.0});
    const auto a = linear_response_spectrum(rho, sys, observe, {}, 2.0, kGrid);
    const auto b = linear_response_spectrum(flipped, sys, observe, {}, 2.0, kGrid);
    REQUIRE(a.sticks.size() == b.sticks.size());
    for (const auto& s : a.sticks) {
      const Stick* m = stick_at(b, -s.freq_hz);
      REQUIRE(m != nullptr);
      CHECK(std::abs(m->amplitude + std::conj(s.amplitude)) <= 1e-9);
    }
  }
  // ferro(dead) against ferro(alive) with no offsets: same relation.
  const auto alive = linear_response_spectrum(ferro_state(5, Ferro::alive), sys, observe, {}, 2.0, kGrid);
  const auto dead = linear_response_spectrum(ferro_state(5, Ferro::dead), sys, observe, {}, 2.0, kGrid);
  REQUIRE(alive.sticks.size() == dead.sticks.size());
  for (const auto& s : alive.sticks) {
    const Stick* m = stick_at(dead, -s.freq_hz);
    REQUIRE(m != nullptr);
    CHECK(std::abs(m->amplitude + std::conj(s.amplitude)) <= 1e-9);
  }
}

TEST_CASE("pseudopure scaling and invisible background") {
  const auto sys = SpinSystem::benzene_13c();
  const Sites observe = sys.system_sites();
  const auto full = linear_response_spectrum(up_u(7, 1.0), sys, observe, {}, 2.0, kGrid);
  for (double f : {0.7, 0.2, 0.01}) {
    const auto part = linear_response_spectrum(up_u(7, f), sys, observe, {}, 2.0, kGrid);
    REQUIRE(part.sticks.size() == full.sticks.size());
    for (std::size_t k = 0; k < full.sticks.size(); ++k) {
      CHECK(part.sticks[k].freq_hz == doctest::Approx(full.sticks[k].freq_hz));
      CHECK(std::abs(part.sticks[k].amplitude - f * full.sticks[k].amplitude) <= 1e-9);
    }
  }
  CHECK(linear_response_spectrum(maximally_mixed(7), sys, observe, {}, 2.0, kGrid).sticks.empty());
}

TEST_CASE("decoupling conserves total stick weight for diagonal states") {
  const auto sys = SpinSystem::benzene_13c();
  const Sites observe = sys.system_sites(), decouple = sys.control_sites();
  std::mt19937_64 rng(44);
  for (int k = 0; k < 5; ++k) {
    const auto r = oracle::random_density(7, rng);
    ComplexMatrix d(128);
    for (std::size_t i = 0; i < 128; ++i) d(i, i) = r(i, i);
    const DensityMatrix diag(d);
    const auto a = linear_response_spectrum(diag, sys, observe, {}, 2.0, kGrid);
    const auto b = linear_response_spectrum(diag, sys, observe, decouple, 2.0, kGrid);
    CHECK(std::abs(total_amplitude(a) - total_amplitude(b)) <= 1e-9);
  }
}

TEST_CASE("trace is the sum of Lorentzians at the sticks") {
  const auto sys = SpinSystem::ring(3, -200.0, 60.0);
  const auto spec = linear_response_spectrum(thermal_state(sys, 0.05), sys, sys.system_sites(), {}, 4.0, kGrid);
  const double hw = 2.0;
  for (std::size_t k = 0; k < spec.frequencies.size(); k += 37) {
    double ref = 0.0;
    for (const auto& s : spec.sticks) {
      const double x = spec.frequencies[k] - s.freq_hz;
      ref += (s.amplitude.real() * hw + s.amplitude.imag() * x) / (std::numbers::pi * (hw * hw + x * x));
    }
    CHECK(spec.trace[k] == doctest::Approx(ref).epsilon(1e-12).scale(1e-12));
  }
}

TEST_CASE("spectrum argument checks") {
  const auto sys = SpinSystem::ring(2, -200.0, 60.0);
  const auto rho = up_u(3, 1.0);
  CHECK_THROWS(linear_response_spectrum(rho, sys, Sites{1, 2}, Sites{2}, 2.0, kGrid));
  CHECK_THROWS(linear_response_spectrum(rho, sys, Sites{}, Sites{}, 2.0, kGrid));
  CHECK_THROWS(linear_response_spectrum(rho, sys, Sites{1}, Sites{}, 0.0, kGrid));
  CHECK_THROWS(linear_response_spectrum(up_u(2, 1.0), sys, Sites{1}, Sites{}, 2.0, kGrid));
  CHECK_THROWS(linear_response_spectrum(rho, sys, Sites{1}, Sites{}, 2.0, FrequencyGrid{1.0, 0.0, 10}));
}

TEST_CASE("peak_list clustering") {
  Spectrum s;
  s.linewidth_hz = 2.0;
  s.sticks = {{10.0, 1.0}};
  CHECK(peak_list(s, 0.01).size() == 1);

  s.sticks = {{0.0, 1.0}, {20.0, 0.5}};
  CHECK(peak_list(s, 0.01).size() == 2);

  s.sticks = {{0.0, 1.0}, {0.5, 0.5}};  // linewidth / 4 apart
  const auto merged = peak_list(s, 0.01);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].amplitude == doctest::Approx(1.5));
  CHECK(merged[0].freq_hz == doctest::Approx(0.5 * 0.5 / 1.5));

  s.sticks = {{0.0, 1.0}, {50.0, 0.005}};
  CHECK(peak_list(s, 0.01).size() == 1);

  CHECK_THROWS(peak_list(s, 0.0));
  CHECK_THROWS(peak_list(s, 1.0));
}

TEST_CASE("tables use '#' headers and 17 significant digits") {
  Spectrum s;
  s.linewidth_hz = 1.0;
  s.sticks = {{1.0 / 3.0, cplx(2.0 / 3.0, -0.1)}};
  s.frequencies = {0.1};
  s.trace = {1.0 / 7.0};
  std::ostringstream t, k;
  write_trace_table(t, s);
  write_stick_table(k, s);
  CHECK(t.str() == "# frequency_hz,amplitude\n0.10000000000000001,0.14285714285714285\n");
  CHECK(k.str().rfind("# frequency_hz,re,im,abs\n0.33333333333333331,0.66666666666666663,-0.10000000000000001,", 0) == 0);
}

TEST_CASE("thermal_state") {
  const auto sys = SpinSystem::benzene_13c();
  const auto th = thermal_state(sys, 1e-2);
  CHECK_NOTHROW(th.validate());
  const auto sz_h = total_sz(7, sys.system_sites());
  CHECK(expectation(th, sz_h) == doctest::Approx(1e-2 * 6 * 0.25).epsilon(1e-12));
  CHECK_THROWS(thermal_state(sys, 0.0));
}
