#include "dlsq/kernels.hpp"

#ifdef DLSQ_KERNELS_AVX2

#include <immintrin.h>

namespace dlsq::kernels {
namespace {

constexpr std::size_t kLanes = 4;  // doubles per __m256d

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void axpy_avx2(std::size_t n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void add_scaled_avx2(std::size_t n, const double* x, double a, const double* k, double* out) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d v = _mm256_fmadd_pd(va, _mm256_loadu_pd(k + i), _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < n; ++i) out[i] = x[i] + a * k[i];
}

void rk4_combine_avx2(std::size_t n, double* y, double h, const double* k1,
                      const double* k2, const double* k3, const double* k4) {
  const double c = h / 6.0;
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d acc = _mm256_loadu_pd(k1 + i);
    acc = _mm256_fmadd_pd(two, _mm256_loadu_pd(k2 + i), acc);
    acc = _mm256_fmadd_pd(two, _mm256_loadu_pd(k3 + i), acc);
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(k4 + i));
    __m256d vy = _mm256_fmadd_pd(vc, acc, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i)
    y[i] += c * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

double dot_avx2(std::size_t n, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void matvec_avx2(std::size_t rows, std::size_t cols, const double* a, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(cols, a + r * cols, x);
}

}  // namespace

bool avx2_supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const Backend& avx2_backend() {
  static const Backend b{"avx2",          axpy_avx2, add_scaled_avx2,
                         rk4_combine_avx2, dot_avx2,  matvec_avx2};
  return b;
}

}  // namespace dlsq::kernels

#endif  // DLSQ_KERNELS_AVX2
