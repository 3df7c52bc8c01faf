// Reference kernels. Complex products are written out on re/im parts so the
// compiler does not route them through the C99 Annex G slow path.

#include "catsim/kernels.hpp"

#include <numbers>

namespace catsim::kernels::scalar {

void cgemm(std::size_t n, const cplx* a, const cplx* b, cplx* c) noexcept {
  const auto* bd = reinterpret_cast<const double*>(b);
  auto* cd = reinterpret_cast<double*>(c);
  for (std::size_t i = 0; i < n * n; ++i) c[i] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double* crow = cd + 2 * i * n;
    for (std::size_t k = 0; k < n; ++k) {
      const double ar = a[i * n + k].real();
      const double ai = a[i * n + k].imag();
      if (ar == 0.0 && ai == 0.0) continue;
      const double* brow = bd + 2 * k * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double br = brow[2 * j];
        const double bi = brow[2 * j + 1];
        crow[2 * j] += ar * br - ai * bi;
        crow[2 * j + 1] += ar * bi + ai * br;
      }
    }
  }
}

void scale_by_real(std::size_t n, const double* f, cplx* x) noexcept {
  auto* xd = reinterpret_cast<double*>(x);
  for (std::size_t i = 0; i < n; ++i) {
    xd[2 * i] *= f[i];
    xd[2 * i + 1] *= f[i];
  }
}

void caxpy(std::size_t n, cplx alpha, const cplx* x, cplx* y) noexcept {
  const double ar = alpha.real();
  const double ai = alpha.imag();
  const auto* xd = reinterpret_cast<const double*>(x);
  auto* yd = reinterpret_cast<double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = xd[2 * i];
    const double xi = xd[2 * i + 1];
    yd[2 * i] += ar * xr - ai * xi;
    yd[2 * i + 1] += ar * xi + ai * xr;
  }
}

void lorentzian_accumulate(std::size_t n, const double* grid, double center, double hw, cplx amp,
                           double* out) noexcept {
  // Re[(ar + i ai)(hw - i d)] / (pi (hw^2 + d^2))
  const double ar = amp.real();
  const double ai = amp.imag();
  const double inv_pi = std::numbers::inv_pi;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = grid[k] - center;
    out[k] += inv_pi * (ar * hw + ai * d) / (hw * hw + d * d);
  }
}

}  // namespace catsim::kernels::scalar
