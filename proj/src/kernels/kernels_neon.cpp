#include "dlsq/kernels.hpp"

#ifdef DLSQ_KERNELS_NEON

#include <arm_neon.h>

namespace dlsq::kernels {
namespace {

constexpr std::size_t kLanes = 2;  // doubles per float64x2_t

void axpy_neon(std::size_t n, double a, const double* x, double* y) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    float64x2_t vy = vld1q_f64(y + i);
    vy = vfmaq_f64(vy, va, vld1q_f64(x + i));
    vst1q_f64(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void add_scaled_neon(std::size_t n, const double* x, double a, const double* k, double* out) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    float64x2_t v = vfmaq_f64(vld1q_f64(x + i), va, vld1q_f64(k + i));
    vst1q_f64(out + i, v);
  }
  for (; i < n; ++i) out[i] = x[i] + a * k[i];
}

void rk4_combine_neon(std::size_t n, double* y, double h, const double* k1,
                      const double* k2, const double* k3, const double* k4) {
  const double c = h / 6.0;
  const float64x2_t vc = vdupq_n_f64(c);
  const float64x2_t two = vdupq_n_f64(2.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    float64x2_t acc = vld1q_f64(k1 + i);
    acc = vfmaq_f64(acc, two, vld1q_f64(k2 + i));
    acc = vfmaq_f64(acc, two, vld1q_f64(k3 + i));
    acc = vaddq_f64(acc, vld1q_f64(k4 + i));
    float64x2_t vy = vfmaq_f64(vld1q_f64(y + i), vc, acc);
    vst1q_f64(y + i, vy);
  }
  for (; i < n; ++i)
    y[i] += c * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

double dot_neon(std::size_t n, const double* x, const double* y) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void matvec_neon(std::size_t rows, std::size_t cols, const double* a, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_neon(cols, a + r * cols, x);
}

}  // namespace

const Backend& neon_backend() {
  static const Backend b{"neon",          axpy_neon, add_scaled_neon,
                         rk4_combine_neon, dot_neon,  matvec_neon};
  return b;
}

}  // namespace dlsq::kernels

#endif  // DLSQ_KERNELS_NEON
