// Runtime selection between kernel variants. No intrinsics in this file.

#include "catsim/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace catsim::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(CATSIM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("CATSIM_SIMD")) {
    if (std::string_view(env) == "scalar") return Backend::scalar;
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() noexcept {
  static std::atomic<Backend> b{initial_backend()};
  return b;
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "unknown";
}

bool backend_available(Backend b) noexcept {
  if (b == Backend::scalar) return true;
  return cpu_has_avx2();
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

bool set_backend(Backend b) noexcept {
  if (!backend_available(b)) return false;
  current().store(b, std::memory_order_relaxed);
  return true;
}

#ifdef CATSIM_HAVE_AVX2
#define CATSIM_DISPATCH(fn, ...)                                      \
  do {                                                                \
    if (active_backend() == Backend::avx2) return avx2::fn(__VA_ARGS__); \
    return scalar::fn(__VA_ARGS__);                                   \
  } while (0)
#else
#define CATSIM_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

void cgemm(std::size_t n, const cplx* a, const cplx* b, cplx* c) noexcept {
  CATSIM_DISPATCH(cgemm, n, a, b, c);
}

void scale_by_real(std::size_t n, const double* f, cplx* x) noexcept {
  CATSIM_DISPATCH(scale_by_real, n, f, x);
}

void caxpy(std::size_t n, cplx alpha, const cplx* x, cplx* y) noexcept {
  CATSIM_DISPATCH(caxpy, n, alpha, x, y);
}

void lorentzian_accumulate(std::size_t n, const double* grid, double center, double hw, cplx amp,
                           double* out) noexcept {
  CATSIM_DISPATCH(lorentzian_accumulate, n, grid, center, hw, amp, out);
}

#undef CATSIM_DISPATCH

}  // namespace catsim::kernels
