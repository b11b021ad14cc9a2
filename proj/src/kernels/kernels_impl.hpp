#pragma once

#include <cstddef>

namespace stringlmi::kernels::detail {

void stencil_accumulate_scalar(const double* u, double* v, std::size_t n, double coef);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
double weighted_dot_scalar(const double* w, const double* a, const double* b, std::size_t n);
void central_difference_scalar(const double* u, double* out, std::size_t n, double scale);

#if defined(STRINGLMI_HAVE_AVX2)
void stencil_accumulate_avx2(const double* u, double* v, std::size_t n, double coef);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
double weighted_dot_avx2(const double* w, const double* a, const double* b, std::size_t n);
void central_difference_avx2(const double* u, double* out, std::size_t n, double scale);
#endif

}  // namespace stringlmi::kernels::detail
