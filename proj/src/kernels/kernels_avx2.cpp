// AVX2/FMA variants. This translation unit is the only one built with
// -mavx2 -mfma; callers reach it through the dispatcher after a CPUID check.
//
// A __m256d holds two interleaved complex values (re0, im0, re1, im1).

#include "catsim/kernels.hpp"

#include <immintrin.h>

#include <numbers>

namespace catsim::kernels::avx2 {

namespace {

// (ar + i ai) * (x pair), using fmaddsub: even lanes a*b - c, odd a*b + c.
inline __m256d cmul_broadcast(__m256d ar, __m256d ai, __m256d x) {
  const __m256d xswap = _mm256_permute_pd(x, 0b0101);
  return _mm256_fmaddsub_pd(ar, x, _mm256_mul_pd(ai, xswap));
}

}  // namespace

void cgemm(std::size_t n, const cplx* a, const cplx* b, cplx* c) noexcept {
  const auto* bd = reinterpret_cast<const double*>(b);
  auto* cd = reinterpret_cast<double*>(c);
  const std::size_t pairs = n / 2;
  for (std::size_t i = 0; i < n * n; ++i) c[i] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double* crow = cd + 2 * i * n;
    for (std::size_t k = 0; k < n; ++k) {
      const double ar = a[i * n + k].real();
      const double ai = a[i * n + k].imag();
      if (ar == 0.0 && ai == 0.0) continue;
      const __m256d var = _mm256_set1_pd(ar);
      const __m256d vai = _mm256_set1_pd(ai);
      const double* brow = bd + 2 * k * n;
      for (std::size_t p = 0; p < pairs; ++p) {
        const __m256d bv = _mm256_loadu_pd(brow + 4 * p);
        const __m256d cv = _mm256_loadu_pd(crow + 4 * p);
        _mm256_storeu_pd(crow + 4 * p, _mm256_add_pd(cv, cmul_broadcast(var, vai, bv)));
      }
      for (std::size_t j = 2 * pairs; j < n; ++j) {
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
  const std::size_t pairs = n / 2;
  for (std::size_t p = 0; p < pairs; ++p) {
    const __m128d f2 = _mm_loadu_pd(f + 2 * p);
    const __m256d fv = _mm256_permute4x64_pd(_mm256_castpd128_pd256(f2), 0b01010000);
    const __m256d xv = _mm256_loadu_pd(xd + 4 * p);
    _mm256_storeu_pd(xd + 4 * p, _mm256_mul_pd(xv, fv));
  }
  for (std::size_t i = 2 * pairs; i < n; ++i) {
    xd[2 * i] *= f[i];
    xd[2 * i + 1] *= f[i];
  }
}

void caxpy(std::size_t n, cplx alpha, const cplx* x, cplx* y) noexcept {
  const double ar = alpha.real();
  const double ai = alpha.imag();
  const __m256d var = _mm256_set1_pd(ar);
  const __m256d vai = _mm256_set1_pd(ai);
  const auto* xd = reinterpret_cast<const double*>(x);
  auto* yd = reinterpret_cast<double*>(y);
  const std::size_t pairs = n / 2;
  for (std::size_t p = 0; p < pairs; ++p) {
    const __m256d xv = _mm256_loadu_pd(xd + 4 * p);
    const __m256d yv = _mm256_loadu_pd(yd + 4 * p);
    _mm256_storeu_pd(yd + 4 * p, _mm256_add_pd(yv, cmul_broadcast(var, vai, xv)));
  }
  for (std::size_t i = 2 * pairs; i < n; ++i) {
    const double xr = xd[2 * i];
    const double xi = xd[2 * i + 1];
    yd[2 * i] += ar * xr - ai * xi;
    yd[2 * i + 1] += ar * xi + ai * xr;
  }
}

void lorentzian_accumulate(std::size_t n, const double* grid, double center, double hw, cplx amp,
                           double* out) noexcept {
  const double ar = amp.real();
  const double ai = amp.imag();
  const __m256d vcenter = _mm256_set1_pd(center);
  const __m256d vhw2 = _mm256_set1_pd(hw * hw);
  const __m256d varhw = _mm256_set1_pd(ar * hw);
  const __m256d vai = _mm256_set1_pd(ai);
  const __m256d vinvpi = _mm256_set1_pd(std::numbers::inv_pi);
  const std::size_t quads = n / 4;
  for (std::size_t q = 0; q < quads; ++q) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(grid + 4 * q), vcenter);
    const __m256d num = _mm256_fmadd_pd(vai, d, varhw);
    const __m256d den = _mm256_fmadd_pd(d, d, vhw2);
    const __m256d o = _mm256_loadu_pd(out + 4 * q);
    _mm256_storeu_pd(out + 4 * q, _mm256_fmadd_pd(vinvpi, _mm256_div_pd(num, den), o));
  }
  for (std::size_t k = 4 * quads; k < n; ++k) {
    const double d = grid[k] - center;
    out[k] += std::numbers::inv_pi * (ar * hw + ai * d) / (hw * hw + d * d);
  }
}

}  // namespace catsim::kernels::avx2
