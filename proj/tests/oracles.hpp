#pragma once

// Reference computations for the tests. Deliberately naive: triple loops,
// Taylor series, explicit integrators. None of them call into catsim
// algorithms beyond the container type.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "catsim/matrix.hpp"
#include "catsim/states.hpp"

namespace oracle {

using catsim::ComplexMatrix;
using catsim::cplx;

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t n = a.dim();
  ComplexMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c(i, j) += a(i, k) * b(k, j);
  return c;
}

inline ComplexMatrix dagger(const ComplexMatrix& a) {
  ComplexMatrix d(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) d(i, j) = std::conj(a(j, i));
  return d;
}

inline ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b, cplx sb = 1.0) {
  ComplexMatrix c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) c(i, j) = a(i, j) + sb * b(i, j);
  return c;
}

inline ComplexMatrix scaled(const ComplexMatrix& a, cplx s) {
  ComplexMatrix c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) c(i, j) = s * a(i, j);
  return c;
}

inline double maxdiff(const ComplexMatrix& a, const ComplexMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

/// Kronecker product from the index formula (a_ij b_kl at (i*nb+k, j*nb+l)).
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  ComplexMatrix c(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l) c(i * nb + k, j * nb + l) = a(i, j) * b(k, l);
  return c;
}

enum class Op { x, y, z, plus, minus };

inline ComplexMatrix single(Op op) {
  ComplexMatrix m(2);
  const cplx i(0.0, 1.0);
  switch (op) {
    case Op::x: m(0, 1) = 0.5; m(1, 0) = 0.5; break;
    case Op::y: m(0, 1) = -0.5 * i; m(1, 0) = 0.5 * i; break;
    case Op::z: m(0, 0) = 0.5; m(1, 1) = -0.5; break;
    case Op::plus: m(0, 1) = 1.0; break;   // |up><down|
    case Op::minus: m(1, 0) = 1.0; break;
  }
  return m;
}

/// I x ... x O x ... x I built as a kron chain, spin 0 leftmost.
inline ComplexMatrix embed(Op op, std::size_t site, std::size_t n) {
  ComplexMatrix acc = ComplexMatrix::identity(1);
  for (std::size_t s = 0; s < n; ++s) acc = oracle::kron(acc, s == site ? single(op) : ComplexMatrix::identity(2));
  return acc;
}

/// exp(A) by scaling and squaring with a long Taylor series.
inline ComplexMatrix expm(const ComplexMatrix& a) {
  double norm = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < a.dim(); ++j) row += std::abs(a(i, j));
    norm = std::max(norm, row);
  }
  int squarings = 0;
  while (norm > 0.05) {
    norm /= 2.0;
    ++squarings;
  }
  const ComplexMatrix as = scaled(a, std::ldexp(1.0, -squarings));
  ComplexMatrix term = ComplexMatrix::identity(a.dim());
  ComplexMatrix sum = term;
  for (int k = 1; k <= 20; ++k) {
    term = scaled(matmul(term, as), 1.0 / k);
    sum = add(sum, term);
  }
  for (int s = 0; s < squarings; ++s) sum = matmul(sum, sum);
  return sum;
}

/// Partial trace by explicit enumeration of the traced indices.
inline ComplexMatrix ptrace(const ComplexMatrix& rho, const std::vector<std::size_t>& keep) {
  const std::size_t n = rho.num_spins();
  std::vector<bool> kept(n, false);
  for (auto k : keep) kept[k] = true;
  const std::size_t nk = keep.size();
  ComplexMatrix out(std::size_t{1} << nk);
  auto bit = [&](std::size_t idx, std::size_t site) { return (idx >> (n - 1 - site)) & 1U; };
  for (std::size_t r = 0; r < rho.dim(); ++r)
    for (std::size_t c = 0; c < rho.dim(); ++c) {
      bool same = true;
      for (std::size_t s = 0; s < n; ++s)
        if (!kept[s] && bit(r, s) != bit(c, s)) same = false;
      if (!same) continue;
      std::size_t rr = 0, cc = 0;
      for (std::size_t k = 0; k < nk; ++k) {  // keep order as given
        rr = (rr << 1) | bit(r, keep[k]);
        cc = (cc << 1) | bit(c, keep[k]);
      }
      out(rr, cc) += rho(r, c);
    }
  return out;
}

/// Lindblad generator L(rho) = -i[H, rho] + sum_k (L_k rho L_k^+ - 1/2 {L_k^+ L_k, rho}).
struct Lindblad {
  ComplexMatrix h;
  std::vector<ComplexMatrix> jumps;

  ComplexMatrix operator()(const ComplexMatrix& rho) const {
    const cplx mi(0.0, -1.0);
    ComplexMatrix out = scaled(add(matmul(h, rho), matmul(rho, h), -1.0), mi);
    for (const auto& l : jumps) {
      const ComplexMatrix ld = dagger(l);
      const ComplexMatrix ldl = matmul(ld, l);
      out = add(out, matmul(matmul(l, rho), ld));
      out = add(out, add(matmul(ldl, rho), matmul(rho, ldl)), -0.5);
    }
    return out;
  }
};

/// Classic fixed-step RK4 from 0 to t.
inline ComplexMatrix integrate_rk4(const Lindblad& gen, ComplexMatrix rho, double t, std::size_t steps) {
  const double h = t / static_cast<double>(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    const ComplexMatrix k1 = gen(rho);
    const ComplexMatrix k2 = gen(add(rho, k1, 0.5 * h));
    const ComplexMatrix k3 = gen(add(rho, k2, 0.5 * h));
    const ComplexMatrix k4 = gen(add(rho, k3, h));
    ComplexMatrix incr = add(add(k1, k2, 2.0), add(k3, k4, 0.5), 2.0);  // k1 + 2k2 + 2k3 + k4
    rho = add(rho, incr, h / 6.0);
  }
  return rho;
}

// Random inputs ---------------------------------------------------------------

inline std::vector<cplx> random_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<cplx> v(dim);
  double nrm = 0.0;
  for (auto& x : v) {
    x = {g(rng), g(rng)};
    nrm += std::norm(x);
  }
  for (auto& x : v) x /= std::sqrt(nrm);
  return v;
}

/// Random full-rank density matrix: G G^+ / Tr with Gaussian G.
inline ComplexMatrix random_density(std::size_t n, std::mt19937_64& rng) {
  const std::size_t dim = std::size_t{1} << n;
  std::normal_distribution<double> g;
  ComplexMatrix gm(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) gm(i, j) = {g(rng), g(rng)};
  ComplexMatrix rho = matmul(gm, dagger(gm));
  cplx tr = 0.0;
  for (std::size_t i = 0; i < dim; ++i) tr += rho(i, i);
  rho = scaled(rho, 1.0 / tr.real());
  for (std::size_t i = 0; i < dim; ++i) rho(i, i) = rho(i, i).real();
  return rho;
}

inline ComplexMatrix random_hermitian(std::size_t dim, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g;
  ComplexMatrix h(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    h(i, i) = scale * g(rng);
    for (std::size_t j = i + 1; j < dim; ++j) {
      h(i, j) = scale * cplx(g(rng), g(rng));
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

/// Haar-ish random unitary via Gram-Schmidt on Gaussian columns.
inline ComplexMatrix random_unitary(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<std::vector<cplx>> cols(dim, std::vector<cplx>(dim));
  for (auto& col : cols)
    for (auto& x : col) x = {g(rng), g(rng)};
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      cplx dot = 0.0;
      for (std::size_t i = 0; i < dim; ++i) dot += std::conj(cols[j][i]) * cols[k][i];
      for (std::size_t i = 0; i < dim; ++i) cols[k][i] -= dot * cols[j][i];
    }
    double nrm = 0.0;
    for (auto& x : cols[k]) nrm += std::norm(x);
    for (auto& x : cols[k]) x /= std::sqrt(nrm);
  }
  ComplexMatrix u(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) u(i, j) = cols[j][i];
  return u;
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
inline std::vector<double> jacobi_eigenvalues(ComplexMatrix a) {
  const std::size_t n = a.dim();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const cplx phase = apq / std::abs(apq);
        const double theta = 0.5 * std::atan2(2.0 * std::abs(apq), aqq - app);
        const double c = std::cos(theta), s = std::sin(theta);
        // Rotation J acting on columns p, q: a <- J^+ a J
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * std::conj(phase) * akq;
          a(k, q) = s * phase * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * std::conj(phase) * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace oracle
