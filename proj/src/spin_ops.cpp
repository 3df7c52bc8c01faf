#include "catsim/spin_ops.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace catsim {

double magnetization(std::size_t index, std::size_t n) noexcept {
  const auto down = static_cast<double>(std::popcount(index));
  return 0.5 * (static_cast<double>(n) - 2.0 * down);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t da = a.dim();
  const std::size_t db = b.dim();
  ComplexMatrix out(da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j) {
      const cplx s = a(i, j);
      if (s == cplx{}) continue;
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l) out(i * db + k, j * db + l) = s * b(k, l);
    }
  return out;
}

ComplexMatrix pauli_half(SpinOp kind) {
  ComplexMatrix m(2);
  switch (kind) {
    case SpinOp::x:
      m(0, 1) = 0.5;
      m(1, 0) = 0.5;
      break;
    case SpinOp::y:
      m(0, 1) = cplx(0.0, -0.5);
      m(1, 0) = cplx(0.0, 0.5);
      break;
    case SpinOp::z:
      m(0, 0) = 0.5;
      m(1, 1) = -0.5;
      break;
    case SpinOp::plus:
      m(0, 1) = 1.0;
      break;
    case SpinOp::minus:
      m(1, 0) = 1.0;
      break;
  }
  return m;
}

Sites checked_sites(std::span<const std::size_t> sites, std::size_t n) {
  if (sites.empty()) throw std::invalid_argument("site set is empty");
  Sites s(sites.begin(), sites.end());
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    throw std::invalid_argument("site set contains duplicates");
  if (s.back() >= n)
    throw SiteError("site " + std::to_string(s.back()) + " out of range for " + std::to_string(n) +
                    " spins");
  return s;
}

Sites all_sites(std::size_t n) {
  Sites s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = i;
  return s;
}

ComplexMatrix single_spin_operator(SpinOp kind, SpinIndex site, std::size_t n) {
  if (site.site >= n)
    throw SiteError("site " + std::to_string(site.site) + " out of range for " + std::to_string(n) +
                    " spins");
  // Direct placement: element (r, c) = O(bit_r, bit_c) when all other bits agree.
  const ComplexMatrix o = pauli_half(kind);
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t mask = site_mask(site.site, n);
  ComplexMatrix out(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    const std::size_t br = (r & mask) ? 1 : 0;
    const std::size_t base = r & ~mask;
    for (std::size_t bc = 0; bc < 2; ++bc) {
      const cplx v = o(br, bc);
      if (v != cplx{}) out(r, base | (bc ? mask : 0)) = v;
    }
  }
  return out;
}

ComplexMatrix total_sz(std::size_t n, std::span<const std::size_t> sites) {
  const Sites s = checked_sites(sites, n);
  const std::size_t dim = std::size_t{1} << n;
  ComplexMatrix out(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    double m = 0.0;
    for (auto i : s) m += is_down(r, i, n) ? -0.5 : 0.5;
    out(r, r) = m;
  }
  return out;
}

ComplexMatrix total_sz(std::size_t n) {
  const Sites s = all_sites(n);
  return total_sz(n, s);
}

ComplexMatrix nq_coherence_operator(std::size_t n, std::span<const std::size_t> sites) {
  const Sites s = checked_sites(sites, n);
  std::size_t mask = 0;
  for (auto i : s) mask |= site_mask(i, n);
  const std::size_t dim = std::size_t{1} << n;
  ComplexMatrix out(dim);
  // prod S^+ maps a state with all chosen spins down to the same state with
  // them all up; its adjoint does the reverse.
  for (std::size_t r = 0; r < dim; ++r) {
    if ((r & mask) != 0) continue;
    const std::size_t c = r | mask;
    out(r, c) = 1.0;
    out(c, r) = 1.0;
  }
  return out;
}

ComplexMatrix propagator(const ComplexMatrix& h, double t) {
  const double tol = 1e-10 * std::max(1.0, h.max_abs());
  if (!h.is_hermitian(tol)) throw NotHermitianError("propagator: generator is not Hermitian");
  const std::size_t dim = h.dim();
  if (t == 0.0) return ComplexMatrix::identity(dim);
  const HermitianEigen eig = hermitian_eigen(h);
  ComplexMatrix scaled = eig.vectors;
  for (std::size_t c = 0; c < dim; ++c) {
    const cplx phase = std::polar(1.0, -eig.values[c] * t);
    for (std::size_t r = 0; r < dim; ++r) scaled(r, c) *= phase;
  }
  return scaled * eig.vectors.adjoint();
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, std::span<const std::size_t> keep) {
  const std::size_t n = rho.num_spins();
  const Sites k = checked_sites(keep, n);
  Sites traced;
  for (std::size_t i = 0; i < n; ++i)
    if (!std::binary_search(k.begin(), k.end(), i)) traced.push_back(i);

  auto scatter = [n](std::size_t compact, const Sites& positions) {
    std::size_t full = 0;
    const std::size_t m = positions.size();
    for (std::size_t b = 0; b < m; ++b)
      if (compact & (std::size_t{1} << (m - 1 - b))) full |= site_mask(positions[b], n);
    return full;
  };

  const std::size_t dk = std::size_t{1} << k.size();
  const std::size_t dt = std::size_t{1} << traced.size();
  std::vector<std::size_t> keep_idx(dk), trace_idx(dt);
  for (std::size_t i = 0; i < dk; ++i) keep_idx[i] = scatter(i, k);
  for (std::size_t t = 0; t < dt; ++t) trace_idx[t] = scatter(t, traced);

  ComplexMatrix out(dk);
  for (std::size_t i = 0; i < dk; ++i)
    for (std::size_t j = 0; j < dk; ++j) {
      cplx s{};
      for (std::size_t t = 0; t < dt; ++t) s += rho(keep_idx[i] | trace_idx[t], keep_idx[j] | trace_idx[t]);
      out(i, j) = s;
    }
  return out;
}

}  // namespace catsim
