#pragma once

// Hamiltonians, ideal pulses, gates and decoherence channels.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "catsim/matrix.hpp"
#include "catsim/spin_ops.hpp"
#include "catsim/states.hpp"

namespace catsim {

enum class CouplingKind { homonuclear_dipolar, heteronuclear_zz };

struct Coupling {
  std::size_t i{};
  std::size_t j{};
  double hz{};
  CouplingKind kind{CouplingKind::homonuclear_dipolar};
};

/// Spin cluster: roles, Larmor offsets (Hz) and pairwise couplings (Hz).
class SpinSystem {
 public:
  SpinSystem(std::vector<SpinRole> roles, std::vector<double> offsets_hz, std::vector<Coupling> couplings);

  /// Single-labelled 13C-benzene: carbon control at site 0, ring protons at
  /// sites 1..6 with site 1 bonded to the carbon. Coupling values are
  /// representative 1/r^3-scaled numbers, not measured constants.
  static SpinSystem benzene_13c();

  /// n_system equivalent spins with uniform nearest-neighbour ring coupling.
  /// With control_coupling_hz set, a control spin sits at site 0 with that
  /// heteronuclear coupling to every system spin.
  static SpinSystem ring(std::size_t n_system, double coupling_hz,
                         std::optional<double> control_coupling_hz = std::nullopt);

  std::size_t n_spins() const noexcept { return roles_.size(); }
  const std::vector<SpinRole>& roles() const noexcept { return roles_; }
  const std::vector<double>& offsets_hz() const noexcept { return offsets_; }
  const std::vector<Coupling>& couplings() const noexcept { return couplings_; }

  /// Coupling strength between i and j, 0 if uncoupled. Symmetric in (i, j).
  double coupling_hz(std::size_t i, std::size_t j) const noexcept;

  Sites control_sites() const;
  Sites system_sites() const;
  /// The unique control site; throws std::invalid_argument unless exactly one.
  std::size_t control_site() const;

  /// Copy with every coupling that touches one of `sites` removed.
  SpinSystem without_couplings_to(std::span<const std::size_t> sites) const;

 private:
  std::vector<SpinRole> roles_;
  std::vector<double> offsets_;
  std::vector<Coupling> couplings_;
};

/// Per-spin decoherence parameters.
struct NoiseModel {
  std::vector<double> dephasing_rates;  // 1/s, jump operator sqrt(gamma) Sz
  std::vector<double> flip_rates;       // 1/s, symmetric up <-> down flips
  std::optional<std::vector<double>> mc_phase_sigma;  // rad, Monte Carlo kicks
  std::size_t mc_trajectories{1};

  static NoiseModel none(std::size_t n);
  static NoiseModel uniform(std::size_t n, double dephasing_rate, double flip_rate);

  /// Throws std::invalid_argument on size mismatch or negative rates.
  void validate(std::size_t n) const;
  bool has_flips() const noexcept;
};

enum class NoiseMode { analytic, monte_carlo };

enum class Axis { x, y, z };

/// Ideal instantaneous rotation of `targets` by `angle` about an axis in the
/// xy plane at `phase` from x (axis x), or about z.
struct Pulse {
  Sites targets;
  Axis axis{Axis::x};
  double angle{};
  double phase{};
};

/// H = sum_i 2 pi nu_i Sz_i + sum_{i<j} 2 pi d_ij T_ij (rad/s), with
/// T = 2 SzSz - SxSx - SySy (homonuclear) or 2 SzSz (heteronuclear).
ComplexMatrix build_hamiltonian(const SpinSystem& sys);

ComplexMatrix pulse_unitary(const Pulse& p, std::size_t n);

DensityMatrix apply_unitary(const DensityMatrix& rho, const ComplexMatrix& u);
DensityMatrix apply_pulse(const DensityMatrix& rho, const Pulse& p);

/// rho -> U rho U^dagger with U = exp(-i H t); throws on negative t.
DensityMatrix evolve(const DensityMatrix& rho, const ComplexMatrix& h, double t);

/// Per-spin z rotations prod_i exp(-i angle_i Sz_i); angles.size() == n.
DensityMatrix rotate_z(const DensityMatrix& rho, std::span<const double> angles);

/// Exact solution of independent z-dephasing: element (r, c) scales by
/// exp(-t/2 sum_i gamma_i [bit_i(r) != bit_i(c)]).
DensityMatrix apply_dephasing(const DensityMatrix& rho, const NoiseModel& noise, double t);

/// Exact solution of per-spin flips with jump operators sqrt(k) S+ and
/// sqrt(k) S-: populations relax toward uniform at 2k, coherences decay at k.
DensityMatrix apply_flip_relaxation(const DensityMatrix& rho, const NoiseModel& noise, double t);

/// Ensemble average of random z kicks with Gaussian angles of std
/// mc_phase_sigma[i]. Bitwise deterministic for a fixed seed, independent of
/// thread count.
DensityMatrix apply_phase_kicks_mc(const DensityMatrix& rho, const NoiseModel& noise, std::uint64_t rng_seed);

/// Flips every target spin iff the control spin is down.
DensityMatrix controlled_not_all(const DensityMatrix& rho, SpinIndex control, std::span<const std::size_t> targets);

/// rho(perm[r], perm[c]) = rho(r, c) for a permutation of basis indices.
DensityMatrix apply_permutation(const DensityMatrix& rho, std::span<const std::size_t> perm);

}  // namespace catsim
