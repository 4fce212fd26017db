#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Low-level array kernels used on the simulation hot path (RK4 stage
// combines over the stacked state, blockwise Laplacian application,
// norm accumulation). A scalar reference backend always exists; SIMD
// backends (AVX2 on x86-64, NEON on aarch64) are compiled when the
// toolchain allows and selected at runtime after a CPU check.

namespace dlsq::kernels {

struct Backend {
  const char* name;
  // y += a*x
  void (*axpy)(std::size_t n, double a, const double* x, double* y);
  // out = x + a*k
  void (*add_scaled)(std::size_t n, const double* x, double a, const double* k, double* out);
  // y += (h/6)*(k1 + 2*k2 + 2*k3 + k4)
  void (*rk4_combine)(std::size_t n, double* y, double h, const double* k1,
                      const double* k2, const double* k3, const double* k4);
  double (*dot)(std::size_t n, const double* x, const double* y);
  // y = A*x, A row-major (rows x cols)
  void (*matvec)(std::size_t rows, std::size_t cols, const double* a, const double* x, double* y);
};

const Backend& scalar_backend();

#ifdef DLSQ_KERNELS_AVX2
const Backend& avx2_backend();
bool avx2_supported();
#endif
#ifdef DLSQ_KERNELS_NEON
const Backend& neon_backend();
#endif

/// Currently active backend (best available unless overridden).
const Backend& active();

/// Force a backend: "auto", "scalar", "avx2" or "neon".
/// Throws std::invalid_argument for unknown or unavailable names.
void select(std::string_view name);

/// Names selectable on this machine, "auto" excluded.
std::vector<std::string> available();

inline void axpy(std::size_t n, double a, const double* x, double* y) {
  active().axpy(n, a, x, y);
}
inline void add_scaled(std::size_t n, const double* x, double a, const double* k, double* out) {
  active().add_scaled(n, x, a, k, out);
}
inline void rk4_combine(std::size_t n, double* y, double h, const double* k1,
                        const double* k2, const double* k3, const double* k4) {
  active().rk4_combine(n, y, h, k1, k2, k3, k4);
}
inline double dot(std::size_t n, const double* x, const double* y) {
  return active().dot(n, x, y);
}
inline void matvec(std::size_t rows, std::size_t cols, const double* a, const double* x, double* y) {
  active().matvec(rows, cols, a, x, y);
}

}  // namespace dlsq::kernels
