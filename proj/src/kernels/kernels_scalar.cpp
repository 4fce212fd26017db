#include "dlsq/kernels.hpp"

namespace dlsq::kernels {
namespace {

void axpy_scalar(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void add_scaled_scalar(std::size_t n, const double* x, double a, const double* k, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + a * k[i];
}

void rk4_combine_scalar(std::size_t n, double* y, double h, const double* k1,
                        const double* k2, const double* k3, const double* k4) {
  const double c = h / 6.0;
  for (std::size_t i = 0; i < n; ++i)
    y[i] += c * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

double dot_scalar(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void matvec_scalar(std::size_t rows, std::size_t cols, const double* a, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
    y[r] = s;
  }
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend b{"scalar",         axpy_scalar, add_scaled_scalar,
                         rk4_combine_scalar, dot_scalar,  matvec_scalar};
  return b;
}

}  // namespace dlsq::kernels
