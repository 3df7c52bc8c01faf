#include "catsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <tuple>

#include "catsim/kernels.hpp"

namespace catsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_nonnegative_time(double t, const char* where) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw std::invalid_argument(std::string(where) + ": time must be finite and non-negative");
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_rates(const std::vector<double>& v, std::size_t n, const char* name) {
  if (v.size() != n)
    throw std::invalid_argument(std::string(name) + ": expected " + std::to_string(n) + " entries, got " +
                                std::to_string(v.size()));
  for (double r : v)
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument(std::string(name) + ": rates must be >= 0");
}

}  // namespace

// ---------------------------------------------------------------------------
// SpinSystem

SpinSystem::SpinSystem(std::vector<SpinRole> roles, std::vector<double> offsets_hz, std::vector<Coupling> couplings)
    : roles_(std::move(roles)), offsets_(std::move(offsets_hz)), couplings_(std::move(couplings)) {
  const std::size_t n = roles_.size();
  if (n == 0) throw std::invalid_argument("spin system needs at least one spin");
  if (offsets_.size() != n)
    throw std::invalid_argument("spin system: " + std::to_string(offsets_.size()) + " offsets for " +
                                std::to_string(n) + " spins");
  for (double v : offsets_)
    if (!std::isfinite(v)) throw std::invalid_argument("spin system: offsets must be finite");
  for (auto& c : couplings_) {
    if (c.i >= n || c.j >= n) throw SiteError("coupling references a spin outside the system");
    if (c.i == c.j) throw std::invalid_argument("coupling table must have a zero diagonal");
    if (!std::isfinite(c.hz)) throw std::invalid_argument("coupling strength must be finite");
    if (c.i > c.j) std::swap(c.i, c.j);
  }
  std::sort(couplings_.begin(), couplings_.end(),
            [](const Coupling& a, const Coupling& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  for (std::size_t k = 1; k < couplings_.size(); ++k)
    if (couplings_[k].i == couplings_[k - 1].i && couplings_[k].j == couplings_[k - 1].j)
      throw std::invalid_argument("coupling (" + std::to_string(couplings_[k].i) + ", " +
                                  std::to_string(couplings_[k].j) + ") listed twice");
}

SpinSystem SpinSystem::benzene_13c() {
  // Ring separations 1/2/3 are ortho/meta/para; the carbon sits under H1.
  constexpr double kHH[4] = {0.0, -640.0, -123.0, -80.0};
  constexpr double kCH[4] = {-1200.0, -154.0, -40.0, -26.0};
  std::vector<SpinRole> roles(7, SpinRole::system);
  roles[0] = SpinRole::control;
  std::vector<Coupling> cs;
  for (std::size_t k = 1; k <= 6; ++k) {
    const std::size_t sep = std::min(k - 1, 7 - k);
    cs.push_back({0, k, kCH[sep], CouplingKind::heteronuclear_zz});
    for (std::size_t l = k + 1; l <= 6; ++l) {
      const std::size_t d = l - k;
      cs.push_back({k, l, kHH[std::min(d, 6 - d)], CouplingKind::homonuclear_dipolar});
    }
  }
  return SpinSystem(std::move(roles), std::vector<double>(7, 0.0), std::move(cs));
}

SpinSystem SpinSystem::ring(std::size_t n_system, double coupling_hz, std::optional<double> control_coupling_hz) {
  if (n_system == 0) throw std::invalid_argument("ring needs at least one spin");
  const std::size_t base = control_coupling_hz ? 1 : 0;
  const std::size_t n = n_system + base;
  std::vector<SpinRole> roles(n, SpinRole::system);
  std::vector<Coupling> cs;
  if (control_coupling_hz) {
    roles[0] = SpinRole::control;
    for (std::size_t k = 1; k < n; ++k) cs.push_back({0, k, *control_coupling_hz, CouplingKind::heteronuclear_zz});
  }
  if (n_system == 2) {
    cs.push_back({base, base + 1, coupling_hz, CouplingKind::homonuclear_dipolar});
  } else if (n_system > 2) {
    for (std::size_t k = 0; k < n_system; ++k)
      cs.push_back({base + k, base + (k + 1) % n_system, coupling_hz, CouplingKind::homonuclear_dipolar});
  }
  return SpinSystem(std::move(roles), std::vector<double>(n, 0.0), std::move(cs));
}

double SpinSystem::coupling_hz(std::size_t i, std::size_t j) const noexcept {
  if (i > j) std::swap(i, j);
  for (const auto& c : couplings_)
    if (c.i == i && c.j == j) return c.hz;
  return 0.0;
}

Sites SpinSystem::control_sites() const {
  Sites s;
  for (std::size_t i = 0; i < roles_.size(); ++i)
    if (roles_[i] == SpinRole::control) s.push_back(i);
  return s;
}

Sites SpinSystem::system_sites() const {
  Sites s;
  for (std::size_t i = 0; i < roles_.size(); ++i)
    if (roles_[i] == SpinRole::system) s.push_back(i);
  return s;
}

std::size_t SpinSystem::control_site() const {
  const Sites c = control_sites();
  if (c.size() != 1)
    throw std::invalid_argument("expected exactly one control spin, found " + std::to_string(c.size()));
  return c.front();
}

SpinSystem SpinSystem::without_couplings_to(std::span<const std::size_t> sites) const {
  if (!sites.empty()) checked_sites(sites, n_spins());
  std::vector<Coupling> kept;
  for (const auto& c : couplings_) {
    const bool touches = std::find(sites.begin(), sites.end(), c.i) != sites.end() ||
                         std::find(sites.begin(), sites.end(), c.j) != sites.end();
    if (!touches) kept.push_back(c);
  }
  return SpinSystem(roles_, offsets_, std::move(kept));
}

// ---------------------------------------------------------------------------
// NoiseModel

NoiseModel NoiseModel::none(std::size_t n) { return uniform(n, 0.0, 0.0); }

NoiseModel NoiseModel::uniform(std::size_t n, double dephasing_rate, double flip_rate) {
  NoiseModel m;
  m.dephasing_rates.assign(n, dephasing_rate);
  m.flip_rates.assign(n, flip_rate);
  return m;
}

void NoiseModel::validate(std::size_t n) const {
  check_rates(dephasing_rates, n, "dephasing_rates");
  check_rates(flip_rates, n, "flip_rates");
  if (mc_phase_sigma) {
    check_rates(*mc_phase_sigma, n, "mc_phase_sigma");
    if (mc_trajectories < 1) throw std::invalid_argument("mc_trajectories must be >= 1");
  }
}

bool NoiseModel::has_flips() const noexcept {
  return std::any_of(flip_rates.begin(), flip_rates.end(), [](double k) { return k > 0.0; });
}

// ---------------------------------------------------------------------------
// Hamiltonian and unitaries

ComplexMatrix build_hamiltonian(const SpinSystem& sys) {
  const std::size_t n = sys.n_spins();
  const std::size_t dim = std::size_t{1} << n;
  ComplexMatrix h(dim);
  const auto& nu = sys.offsets_hz();
  for (std::size_t r = 0; r < dim; ++r) {
    double diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) diag += kTwoPi * nu[i] * (is_down(r, i, n) ? -0.5 : 0.5);
    for (const auto& c : sys.couplings()) {
      const double zi = is_down(r, c.i, n) ? -0.5 : 0.5;
      const double zj = is_down(r, c.j, n) ? -0.5 : 0.5;
      diag += kTwoPi * c.hz * 2.0 * zi * zj;
    }
    h(r, r) = diag;
  }
  // SxSx + SySy = (S+S- + S-S+)/2 swaps antiparallel pairs with amplitude 1/2.
  for (const auto& c : sys.couplings()) {
    if (c.kind != CouplingKind::homonuclear_dipolar) continue;
    const std::size_t mi = site_mask(c.i, n);
    const std::size_t mj = site_mask(c.j, n);
    for (std::size_t r = 0; r < dim; ++r) {
      const bool bi = (r & mi) != 0;
      const bool bj = (r & mj) != 0;
      if (bi == bj) continue;
      h(r, r ^ mi ^ mj) += -kTwoPi * c.hz * 0.5;
    }
  }
  return h;
}

ComplexMatrix pulse_unitary(const Pulse& p, std::size_t n) {
  const Sites targets = checked_sites(p.targets, n);
  if (!std::isfinite(p.angle) || !std::isfinite(p.phase)) throw std::invalid_argument("pulse angle must be finite");
  // exp(-i angle n.S) = cos(angle/2) I - i sin(angle/2) (n.sigma)
  double nx = 0.0, ny = 0.0, nz = 0.0;
  switch (p.axis) {
    case Axis::x:
      nx = std::cos(p.phase);
      ny = std::sin(p.phase);
      break;
    case Axis::y:
      nx = -std::sin(p.phase);
      ny = std::cos(p.phase);
      break;
    case Axis::z:
      nz = 1.0;
      break;
  }
  const double c = std::cos(0.5 * p.angle);
  const double s = std::sin(0.5 * p.angle);
  const cplx mi(0.0, -s);
  ComplexMatrix r(2);
  r(0, 0) = c + mi * nz;
  r(0, 1) = mi * cplx(nx, -ny);
  r(1, 0) = mi * cplx(nx, ny);
  r(1, 1) = c - mi * nz;

  const ComplexMatrix id = ComplexMatrix::identity(2);
  ComplexMatrix u = std::binary_search(targets.begin(), targets.end(), 0) ? r : id;
  for (std::size_t i = 1; i < n; ++i) u = kron(u, std::binary_search(targets.begin(), targets.end(), i) ? r : id);
  return u;
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const ComplexMatrix& u) {
  return rho.with_matrix(conjugate(u, rho.matrix()));
}

DensityMatrix apply_pulse(const DensityMatrix& rho, const Pulse& p) {
  if (p.angle == 0.0) {
    checked_sites(p.targets, rho.n_spins());
    return rho;
  }
  return apply_unitary(rho, pulse_unitary(p, rho.n_spins()));
}

DensityMatrix evolve(const DensityMatrix& rho, const ComplexMatrix& h, double t) {
  require_nonnegative_time(t, "evolve");
  if (h.dim() != rho.dim()) throw DimensionError("evolve: Hamiltonian and state dimensions differ");
  if (t == 0.0) return rho;
  return apply_unitary(rho, propagator(h, t));
}

DensityMatrix rotate_z(const DensityMatrix& rho, std::span<const double> angles) {
  const std::size_t n = rho.n_spins();
  if (angles.size() != n) throw DimensionError("rotate_z: need one angle per spin");
  const std::size_t dim = rho.dim();
  std::vector<cplx> z(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    double theta = 0.0;
    for (std::size_t i = 0; i < n; ++i) theta += angles[i] * (is_down(r, i, n) ? -0.5 : 0.5);
    z[r] = std::polar(1.0, -theta);
  }
  ComplexMatrix m = rho.matrix();
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) m(r, c) *= z[r] * std::conj(z[c]);
  return rho.with_matrix(std::move(m));
}

// ---------------------------------------------------------------------------
// Channels

DensityMatrix apply_dephasing(const DensityMatrix& rho, const NoiseModel& noise, double t) {
  require_nonnegative_time(t, "apply_dephasing");
  const std::size_t n = rho.n_spins();
  check_rates(noise.dephasing_rates, n, "dephasing_rates");
  if (t == 0.0) return rho;
  const std::size_t dim = rho.dim();
  // Factor depends only on which spins differ, i.e. on r XOR c.
  std::vector<double> by_mask(dim);
  for (std::size_t x = 0; x < dim; ++x) {
    double rate = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (x & site_mask(i, n)) rate += noise.dephasing_rates[i];
    by_mask[x] = std::exp(-0.5 * t * rate);
  }
  ComplexMatrix m = rho.matrix();
  std::vector<double> row_factor(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) row_factor[c] = by_mask[r ^ c];
    kernels::scale_by_real(dim, row_factor.data(), m.row(r).data());
  }
  return rho.with_matrix(std::move(m));
}

DensityMatrix apply_flip_relaxation(const DensityMatrix& rho, const NoiseModel& noise, double t) {
  require_nonnegative_time(t, "apply_flip_relaxation");
  const std::size_t n = rho.n_spins();
  check_rates(noise.flip_rates, n, "flip_rates");
  if (t == 0.0) return rho;
  const std::size_t dim = rho.dim();
  ComplexMatrix m = rho.matrix();
  for (std::size_t i = 0; i < n; ++i) {
    const double k = noise.flip_rates[i];
    if (k == 0.0) continue;
    const double lambda = std::exp(-2.0 * k * t);
    const double keep = 0.5 * (1.0 + lambda);
    const double swap = 0.5 * (1.0 - lambda);
    const double coh = std::exp(-k * t);
    const std::size_t mask = site_mask(i, n);
    for (std::size_t r = 0; r < dim; ++r) {
      if (r & mask) continue;
      for (std::size_t c = 0; c < dim; ++c) {
        if (c & mask) continue;
        const cplx uu = m(r, c);
        const cplx dd = m(r | mask, c | mask);
        m(r, c) = keep * uu + swap * dd;
        m(r | mask, c | mask) = swap * uu + keep * dd;
        m(r, c | mask) *= coh;
        m(r | mask, c) *= coh;
      }
    }
  }
  return rho.with_matrix(std::move(m));
}

DensityMatrix apply_phase_kicks_mc(const DensityMatrix& rho, const NoiseModel& noise, std::uint64_t rng_seed) {
  const std::size_t n = rho.n_spins();
  if (!noise.mc_phase_sigma) throw std::invalid_argument("apply_phase_kicks_mc: mc_phase_sigma is not set");
  if (noise.mc_trajectories < 1) throw std::invalid_argument("apply_phase_kicks_mc: mc_trajectories must be >= 1");
  const auto& sigma = *noise.mc_phase_sigma;
  check_rates(sigma, n, "mc_phase_sigma");
  if (std::all_of(sigma.begin(), sigma.end(), [](double s) { return s == 0.0; })) return rho;

  const std::size_t dim = rho.dim();
  const std::size_t total = noise.mc_trajectories;
  // Fixed block partition: each block owns an accumulator and the blocks are
  // reduced in index order, so the result does not depend on scheduling.
  constexpr std::size_t kBlocks = 16;
  std::vector<std::vector<cplx>> acc(kBlocks);

  std::vector<std::vector<double>> sz(n, std::vector<double>(dim));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < dim; ++r) sz[i][r] = is_down(r, i, n) ? -0.5 : 0.5;

  auto run_block = [&](std::size_t b) {
    const std::size_t begin = b * total / kBlocks;
    const std::size_t end = (b + 1) * total / kBlocks;
    auto& a = acc[b];
    a.assign(dim * dim, cplx{});
    std::vector<double> theta(dim);
    std::vector<cplx> z(dim), zc(dim);
    for (std::size_t traj = begin; traj < end; ++traj) {
      std::mt19937_64 rng(splitmix64(rng_seed ^ splitmix64(traj)));
      std::fill(theta.begin(), theta.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (sigma[i] == 0.0) continue;
        std::normal_distribution<double> dist(0.0, sigma[i]);
        const double phi = dist(rng);
        for (std::size_t r = 0; r < dim; ++r) theta[r] += phi * sz[i][r];
      }
      for (std::size_t r = 0; r < dim; ++r) {
        z[r] = std::polar(1.0, -theta[r]);
        zc[r] = std::conj(z[r]);
      }
      for (std::size_t r = 0; r < dim; ++r) kernels::caxpy(dim, z[r], zc.data(), a.data() + r * dim);
    }
  };

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(kBlocks, std::thread::hardware_concurrency()));
  if (workers == 1 || total < 64) {
    for (std::size_t b = 0; b < kBlocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t b = w; b < kBlocks; b += workers) run_block(b);
      });
    for (auto& th : pool) th.join();
  }

  std::vector<cplx> factor(dim * dim, cplx{});
  for (std::size_t b = 0; b < kBlocks; ++b)
    for (std::size_t k = 0; k < factor.size(); ++k) factor[k] += acc[b][k];
  // |z_r|^2 = 1 and F is Hermitian by construction; pin both exactly so
  // populations and Hermiticity survive rounding.
  for (std::size_t r = 0; r < dim; ++r) {
    factor[r * dim + r] = static_cast<double>(total);
    for (std::size_t c = r + 1; c < dim; ++c) factor[c * dim + r] = std::conj(factor[r * dim + c]);
  }
  const double inv = 1.0 / static_cast<double>(total);
  ComplexMatrix m = rho.matrix();
  auto data = m.data();
  for (std::size_t k = 0; k < factor.size(); ++k) data[k] *= factor[k] * inv;
  return rho.with_matrix(std::move(m));
}

DensityMatrix apply_permutation(const DensityMatrix& rho, std::span<const std::size_t> perm) {
  const std::size_t dim = rho.dim();
  if (perm.size() != dim) throw DimensionError("permutation length does not match dimension");
  ComplexMatrix m(dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) m(perm[r], perm[c]) = rho(r, c);
  return rho.with_matrix(std::move(m));
}

DensityMatrix controlled_not_all(const DensityMatrix& rho, SpinIndex control, std::span<const std::size_t> targets) {
  const std::size_t n = rho.n_spins();
  if (control.site >= n) throw SiteError("control site out of range");
  const Sites t = checked_sites(targets, n);
  if (std::binary_search(t.begin(), t.end(), control.site))
    throw std::invalid_argument("controlled_not_all: control spin is also a target");
  std::size_t flip = 0;
  for (auto i : t) flip |= site_mask(i, n);
  const std::size_t cmask = site_mask(control.site, n);
  std::vector<std::size_t> perm(rho.dim());
  for (std::size_t r = 0; r < perm.size(); ++r) perm[r] = (r & cmask) ? (r ^ flip) : r;
  return apply_permutation(rho, perm);
}

}  // namespace catsim
