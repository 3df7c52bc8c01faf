#include "catsim/states.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace catsim {

namespace {

constexpr double kWeightTol = 1e-9;

void require_normalized(const CatWeights& w, const char* where) {
  if (w.norm_error() > kWeightTol)
    throw std::invalid_argument(std::string(where) + ": cat weights are not normalized (|a|^2+|b|^2-1 = " +
                                std::to_string(w.norm_error()) + ")");
}

void require_spins(std::size_t n, const char* where) {
  if (n == 0) throw std::invalid_argument(std::string(where) + ": need at least one spin");
  if (n > 16) throw std::invalid_argument(std::string(where) + ": dense storage limited to 16 spins");
}

DensityMatrix two_corner_state(std::size_t n, cplx a, cplx b) {
  const std::size_t last = (std::size_t{1} << n) - 1;
  ComplexMatrix m(last + 1);
  m(0, 0) = a * std::conj(a);
  m(0, last) += a * std::conj(b);
  m(last, 0) += b * std::conj(a);
  m(last, last) += b * std::conj(b);
  return DensityMatrix(std::move(m));
}

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix m, std::optional<double> pseudopure_background)
    : m_(std::move(m)), background_(pseudopure_background) {
  const cplx tr = m_.trace();
  if (std::abs(tr - 1.0) > kTraceTol)
    throw InvalidStateError("density matrix trace is " + std::to_string(tr.real()) + (tr.imag() >= 0 ? "+" : "") +
                            std::to_string(tr.imag()) + "i, expected 1");
  const double herm = m_.hermiticity_error();
  if (herm > kHermitianTol)
    throw InvalidStateError("density matrix is not Hermitian (error " + std::to_string(herm) + ")");
}

double DensityMatrix::min_eigenvalue() const { return hermitian_eigenvalues(m_).front(); }

double DensityMatrix::purity() const { return trace_of_product(m_, m_).real(); }

void DensityMatrix::validate() const {
  const cplx tr = m_.trace();
  if (std::abs(tr - 1.0) > kTraceTol) throw InvalidStateError("trace drifted from 1");
  if (m_.hermiticity_error() > kHermitianTol) throw InvalidStateError("Hermiticity lost");
  const double lo = min_eigenvalue();
  if (lo < -kPositivityTol)
    throw InvalidStateError("negative eigenvalue " + std::to_string(lo) + " in density matrix");
}

CatWeights CatWeights::balanced() {
  const double s = std::sqrt(0.5);
  return {s, s};
}

CatWeights CatWeights::normalized(cplx a, cplx b) {
  const double nrm = std::sqrt(std::norm(a) + std::norm(b));
  if (nrm == 0.0) throw std::invalid_argument("cat weights are both zero");
  return {a / nrm, b / nrm};
}

double CatWeights::norm_error() const noexcept { return std::abs(std::norm(a) + std::norm(b) - 1.0); }

int coherence_order(std::size_t r, std::size_t c) noexcept {
  return std::popcount(c) - std::popcount(r);
}

DensityMatrix pure_state(std::span<const cplx> psi) {
  ComplexMatrix m(psi.size());
  for (std::size_t r = 0; r < psi.size(); ++r)
    for (std::size_t c = 0; c < psi.size(); ++c) m(r, c) = psi[r] * std::conj(psi[c]);
  return DensityMatrix(std::move(m));
}

DensityMatrix maximally_mixed(std::size_t n) {
  require_spins(n, "maximally_mixed");
  const std::size_t dim = std::size_t{1} << n;
  ComplexMatrix m = ComplexMatrix::identity(dim);
  m *= 1.0 / static_cast<double>(dim);
  return DensityMatrix(std::move(m), 1.0);
}

DensityMatrix ferro_state(std::size_t n, Ferro which) {
  require_spins(n, "ferro_state");
  const std::size_t dim = std::size_t{1} << n;
  ComplexMatrix m(dim);
  const std::size_t k = which == Ferro::alive ? 0 : dim - 1;
  m(k, k) = 1.0;
  return DensityMatrix(std::move(m));
}

DensityMatrix cat_state(std::size_t n, const CatWeights& w) {
  require_spins(n, "cat_state");
  require_normalized(w, "cat_state");
  return two_corner_state(n, w.a, w.b);
}

DensityMatrix entangled_pair_state(std::size_t n, const CatWeights& w) {
  require_spins(n + 1, "entangled_pair_state");
  require_normalized(w, "entangled_pair_state");
  // With the control as the most significant bit, |up>|u> and |down>|d> are
  // the two corners of the (n + 1)-spin register.
  return two_corner_state(n + 1, w.a, w.b);
}

DensityMatrix decohered_mixture(std::size_t n, const CatWeights& w) {
  require_spins(n + 1, "decohered_mixture");
  require_normalized(w, "decohered_mixture");
  const std::size_t last = (std::size_t{1} << (n + 1)) - 1;
  ComplexMatrix m(last + 1);
  m(0, 0) = std::norm(w.a);
  m(last, last) = std::norm(w.b);
  return DensityMatrix(std::move(m));
}

DensityMatrix pseudopure(std::size_t n, const DensityMatrix& target, double purity_fraction) {
  if (!(purity_fraction > 0.0 && purity_fraction <= 1.0))
    throw std::invalid_argument("pseudopure: purity fraction must lie in (0, 1]");
  if (target.n_spins() != n)
    throw DimensionError("pseudopure: target has " + std::to_string(target.n_spins()) + " spins, expected " +
                         std::to_string(n));
  const std::size_t dim = target.dim();
  const double f = purity_fraction;
  ComplexMatrix m = target.matrix();
  m *= f;
  for (std::size_t i = 0; i < dim; ++i) m(i, i) += (1.0 - f) / static_cast<double>(dim);
  const double prior = target.pseudopure_background().value_or(0.0);
  return DensityMatrix(std::move(m), 1.0 - f * (1.0 - prior));
}

CoherenceDecomposition coherence_orders(const DensityMatrix& rho) {
  const std::size_t n = rho.n_spins();
  const std::size_t dim = rho.dim();
  CoherenceDecomposition out;
  for (int q = -static_cast<int>(n); q <= static_cast<int>(n); ++q) out.emplace(q, CoherenceComponent{ComplexMatrix(dim), 0.0});
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      auto& comp = out.at(coherence_order(r, c));
      comp.matrix(r, c) = rho(r, c);
      comp.weight += std::norm(rho(r, c));
    }
  for (auto& [q, comp] : out) comp.weight = std::sqrt(comp.weight);
  return out;
}

std::map<int, double> coherence_weights(const ComplexMatrix& m) {
  const int n = static_cast<int>(m.num_spins());
  std::map<int, double> w;
  for (int q = -n; q <= n; ++q) w[q] = 0.0;
  const std::size_t dim = m.dim();
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) w[coherence_order(r, c)] += std::norm(m(r, c));
  for (auto& [q, v] : w) v = std::sqrt(v);
  return w;
}

ComplexMatrix strip_coherences(const ComplexMatrix& m, std::span<const int> keep_orders) {
  ComplexMatrix out(m.dim());
  const std::size_t dim = m.dim();
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      const int q = coherence_order(r, c);
      if (std::find(keep_orders.begin(), keep_orders.end(), q) != keep_orders.end()) out(r, c) = m(r, c);
    }
  return out;
}

cplx nq_amplitude(const DensityMatrix& rho, std::span<const std::size_t> sites) {
  const Sites s = checked_sites(sites, rho.n_spins());
  if (s.size() == rho.n_spins()) return rho(0, rho.dim() - 1);
  const ComplexMatrix reduced = partial_trace(rho.matrix(), s);
  return reduced(0, reduced.dim() - 1);
}

DensityMatrix reduced_state(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  return DensityMatrix(partial_trace(rho.matrix(), keep));
}

double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double lambda : hermitian_eigenvalues(rho.matrix())) {
    if (lambda < 1e-14) continue;
    s -= lambda * std::log(lambda);
  }
  // A pure state's eigenvalue can come out as 1 + ulp.
  return std::max(s, 0.0);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& target_pure) {
  if (rho.dim() != target_pure.dim()) throw DimensionError("fidelity: dimension mismatch");
  if (std::abs(target_pure.purity() - 1.0) > 1e-8)
    throw std::invalid_argument("fidelity: target is not a rank-1 projector");
  const double f = trace_of_product(rho.matrix(), target_pure.matrix()).real();
  return std::clamp(f, 0.0, 1.0);
}

double expectation(const DensityMatrix& rho, const ComplexMatrix& op) {
  return trace_of_product(rho.matrix(), op).real();
}

}  // namespace catsim
