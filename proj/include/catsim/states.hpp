#pragma once

// Named states of the cat-state experiment and the quantities measured on
// them: coherence orders, NQ amplitudes, entropy and fidelity.

#include <map>
#include <optional>
#include <span>
#include <stdexcept>

#include "catsim/matrix.hpp"
#include "catsim/spin_ops.hpp"

namespace catsim {

class InvalidStateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Hermitian, unit-trace, positive semidefinite matrix over 2^N states.
///
/// Trace and Hermiticity are checked on construction. Positivity needs an
/// eigendecomposition, so it is checked only by validate().
class DensityMatrix {
 public:
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kPositivityTol = 1e-8;

  explicit DensityMatrix(ComplexMatrix m, std::optional<double> pseudopure_background = std::nullopt);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  std::size_t n_spins() const noexcept { return m_.num_spins(); }
  std::size_t dim() const noexcept { return m_.dim(); }
  const cplx& operator()(std::size_t r, std::size_t c) const noexcept { return m_(r, c); }

  /// Weight of the identity mixed in by pseudopure(), if any.
  std::optional<double> pseudopure_background() const noexcept { return background_; }

  /// Same background bookkeeping, new matrix. Unital maps preserve the identity
  /// part, so channels and unitaries carry the background through.
  DensityMatrix with_matrix(ComplexMatrix m) const { return DensityMatrix(std::move(m), background_); }

  double min_eigenvalue() const;
  /// Tr(rho^2)
  double purity() const;
  /// Throws InvalidStateError if any invariant is violated.
  void validate() const;

 private:
  ComplexMatrix m_;
  std::optional<double> background_;
};

/// Amplitudes of a|u> + b|d>.
struct CatWeights {
  cplx a{1.0};
  cplx b{0.0};

  static CatWeights balanced();
  /// Rescales (a, b) to unit norm.
  static CatWeights normalized(cplx a, cplx b);
  double norm_error() const noexcept;
};

enum class Ferro { alive, dead };

struct CoherenceComponent {
  ComplexMatrix matrix;
  double weight{};  // Frobenius norm of the component
};

/// Order q -> component, for every q in [-N, N].
using CoherenceDecomposition = std::map<int, CoherenceComponent>;

/// Coherence order of element (r, c): M(r) - M(c), so |u><d| is order +N.
int coherence_order(std::size_t r, std::size_t c) noexcept;

DensityMatrix pure_state(std::span<const cplx> psi);
DensityMatrix maximally_mixed(std::size_t n);

DensityMatrix ferro_state(std::size_t n, Ferro which);

/// Projector onto a|u> + b|d> over n spins.
DensityMatrix cat_state(std::size_t n, const CatWeights& w);

/// a|up>|u> + b|down>|d> over n system spins plus the control at site 0.
DensityMatrix entangled_pair_state(std::size_t n, const CatWeights& w);

/// |a|^2 |up><up| x |u><u| + |b|^2 |down><down| x |d><d|, n + 1 spins.
DensityMatrix decohered_mixture(std::size_t n, const CatWeights& w);

/// (1 - f) I / 2^n + f * target
DensityMatrix pseudopure(std::size_t n, const DensityMatrix& target, double purity_fraction);

CoherenceDecomposition coherence_orders(const DensityMatrix& rho);

/// Frobenius weight per order without materializing the components.
std::map<int, double> coherence_weights(const ComplexMatrix& m);

/// Zeroes every element whose coherence order is not in keep_orders.
ComplexMatrix strip_coherences(const ComplexMatrix& m, std::span<const int> keep_orders);

/// <u_S| rho_S |d_S> for the reduced state on sites S.
cplx nq_amplitude(const DensityMatrix& rho, std::span<const std::size_t> sites);

/// Reduced state on `keep`; the pseudopure background is not carried over.
DensityMatrix reduced_state(const DensityMatrix& rho, std::span<const std::size_t> keep);

/// -sum lambda ln lambda in units of k_B; eigenvalues below 1e-14 count as 0.
double von_neumann_entropy(const DensityMatrix& rho);

/// Tr(rho * target) for a rank-1 target; throws if the target is not pure.
double fidelity(const DensityMatrix& rho, const DensityMatrix& target_pure);

/// Re Tr(rho * op)
double expectation(const DensityMatrix& rho, const ComplexMatrix& op);

}  // namespace catsim
