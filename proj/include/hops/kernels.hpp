#pragma once

#include <cstddef>
#include <string_view>

namespace hops::kern {

// Vector primitives behind every dense routine in the library. Each entry has
// a scalar reference implementation and, where the platform provides one, a
// SIMD variant; the active table is picked once at startup from CPU features
// and can be pinned with set_backend() or the HOPS_SIMD environment variable
// ("scalar", "avx2", "neon", "auto").
//
// Reductions (dot, sum_sq) accumulate lane-wise and combine lanes in a fixed
// order, so every backend is deterministic run-to-run; scalar and SIMD results
// agree to rounding, not bit-for-bit.
struct Ops {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_sq)(const double* x, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*scal)(double alpha, double* x, std::size_t n);
  // plane rotation: (x, y) <- (c*x - s*y, s*x + c*y)
  void (*rot)(double* x, double* y, std::size_t n, double c, double s);
  const char* name;
};

const Ops& scalar_ops();

#if defined(__x86_64__) || defined(__i386__)
bool avx2_supported();
const Ops& avx2_ops();  // only callable when avx2_supported()
#endif
#if defined(__aarch64__)
const Ops& neon_ops();
#endif

const Ops& ops();                         // active table
bool set_backend(std::string_view name);  // false if unknown/unsupported
const char* backend_name();

inline double dot(const double* a, const double* b, std::size_t n) {
  return ops().dot(a, b, n);
}
inline double sum_sq(const double* x, std::size_t n) { return ops().sum_sq(x, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  ops().axpy(alpha, x, y, n);
}
inline void scal(double alpha, double* x, std::size_t n) { ops().scal(alpha, x, n); }
inline void rot(double* x, double* y, std::size_t n, double c, double s) {
  ops().rot(x, y, n, c, s);
}

}  // namespace hops::kern
