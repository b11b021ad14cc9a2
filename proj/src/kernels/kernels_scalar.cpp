#include "kernels_impl.hpp"

namespace stringlmi::kernels::detail {

void stencil_accumulate_scalar(const double* u, double* v, std::size_t n, double coef) {
  for (std::size_t i = 1; i + 1 < n; ++i) {
    v[i] += coef * (u[i + 1] - 2.0 * u[i] + u[i - 1]);
  }
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double weighted_dot_scalar(const double* w, const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += w[i] * a[i] * b[i];
  return sum;
}

void central_difference_scalar(const double* u, double* out, std::size_t n, double scale) {
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (u[i + 1] - u[i - 1]) * scale;
}

}  // namespace stringlmi::kernels::detail
