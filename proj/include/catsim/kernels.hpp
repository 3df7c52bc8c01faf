#pragma once

// Data-parallel inner loops used by the density-matrix code.
//
// Every kernel has a scalar reference implementation and, where the build
// and the CPU allow it, an AVX2/FMA variant. The variant is chosen once at
// startup (CPUID plus the CATSIM_SIMD environment variable) and can be
// overridden for equivalence testing with set_backend().

#include <complex>
#include <cstddef>
#include <string_view>

namespace catsim::kernels {

using cplx = std::complex<double>;

enum class Backend { scalar, avx2 };

std::string_view backend_name(Backend b) noexcept;

/// True if the backend was compiled in and the running CPU supports it.
bool backend_available(Backend b) noexcept;

Backend active_backend() noexcept;

/// Switches the process-wide backend. Returns false (and leaves the
/// current backend in place) if the requested one is unavailable.
bool set_backend(Backend b) noexcept;

/// C = A * B for row-major n x n complex matrices. C must not alias A or B.
void cgemm(std::size_t n, const cplx* a, const cplx* b, cplx* c) noexcept;

/// x[i] *= f[i]
void scale_by_real(std::size_t n, const double* f, cplx* x) noexcept;

/// y[i] += alpha * x[i]
void caxpy(std::size_t n, cplx alpha, const cplx* x, cplx* y) noexcept;

/// out[k] += Re(amp / (pi * (hw + i (grid[k] - center))))
///
/// A unit-area absorption Lorentzian of half width hw for real amp; the
/// imaginary part of amp contributes the matching dispersion shape.
void lorentzian_accumulate(std::size_t n, const double* grid, double center, double hw, cplx amp,
                           double* out) noexcept;

namespace scalar {
void cgemm(std::size_t n, const cplx* a, const cplx* b, cplx* c) noexcept;
void scale_by_real(std::size_t n, const double* f, cplx* x) noexcept;
void caxpy(std::size_t n, cplx alpha, const cplx* x, cplx* y) noexcept;
void lorentzian_accumulate(std::size_t n, const double* grid, double center, double hw, cplx amp,
                           double* out) noexcept;
}  // namespace scalar

#ifdef CATSIM_HAVE_AVX2
namespace avx2 {
void cgemm(std::size_t n, const cplx* a, const cplx* b, cplx* c) noexcept;
void scale_by_real(std::size_t n, const double* f, cplx* x) noexcept;
void caxpy(std::size_t n, cplx alpha, const cplx* x, cplx* y) noexcept;
void lorentzian_accumulate(std::size_t n, const double* grid, double center, double hw, cplx amp,
                           double* out) noexcept;
}  // namespace avx2
#endif

}  // namespace catsim::kernels
