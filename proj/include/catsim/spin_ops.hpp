#pragma once

// Spin-1/2 operator construction on N-spin product spaces.
//
// Basis convention: spin 0 is the most significant bit of a basis index,
// |up> is bit 0 and |down> is bit 1. Index 0 is |up up ... up> and index
// 2^N - 1 is |down down ... down>.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "catsim/matrix.hpp"

namespace catsim {

enum class SpinRole { control, system };

/// A site in an N-spin register together with its role in the experiment.
struct SpinIndex {
  std::size_t site{};
  SpinRole role{SpinRole::system};

  constexpr explicit SpinIndex(std::size_t s, SpinRole r = SpinRole::system) : site(s), role(r) {}
};

enum class SpinOp { x, y, z, plus, minus };

using Sites = std::vector<std::size_t>;

class SiteError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class NotHermitianError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

constexpr std::size_t site_mask(std::size_t site, std::size_t n) noexcept {
  return std::size_t{1} << (n - 1 - site);
}

constexpr bool is_down(std::size_t index, std::size_t site, std::size_t n) noexcept {
  return (index & site_mask(site, n)) != 0;
}

/// Total Sz eigenvalue of a basis state: (#up - #down) / 2.
double magnetization(std::size_t index, std::size_t n) noexcept;

/// Tensor product; spin 0 of a ends up as the leftmost (most significant) factor.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// The 2x2 single-spin operator. x, y, z carry the factor 1/2; plus = Sx + iSy.
ComplexMatrix pauli_half(SpinOp kind);

/// I x ... x O x ... x I with O at `site`.
ComplexMatrix single_spin_operator(SpinOp kind, SpinIndex site, std::size_t n);

/// Sum of Sz over the given sites; the one-argument form sums over every spin.
ComplexMatrix total_sz(std::size_t n, std::span<const std::size_t> sites);
ComplexMatrix total_sz(std::size_t n);

/// prod_{i in sites} S_i^+  +  prod_{i in sites} S_i^-
ComplexMatrix nq_coherence_operator(std::size_t n, std::span<const std::size_t> sites);

/// U = exp(-i H t), H in rad/s, via Hermitian eigendecomposition.
ComplexMatrix propagator(const ComplexMatrix& h, double t);

/// Reduced matrix on `keep`; kept spins retain their relative order.
ComplexMatrix partial_trace(const ComplexMatrix& rho, std::span<const std::size_t> keep);

/// Validates a site list against n: non-empty, in range, no duplicates.
/// Returns it sorted ascending.
Sites checked_sites(std::span<const std::size_t> sites, std::size_t n);

Sites all_sites(std::size_t n);

}  // namespace catsim
