// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace stringlmi::kernels::detail {

namespace {

inline double horizontal_sum(__m256d x) {
  __m128d lo = _mm256_castpd256_pd128(x);
  __m128d hi = _mm256_extractf128_pd(x, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

}  // namespace

void stencil_accumulate_avx2(const double* u, double* v, std::size_t n, double coef) {
  if (n < 3) return;
  const __m256d vcoef = _mm256_set1_pd(coef);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 1;
  for (; i + 4 < n; i += 4) {
    __m256d left = _mm256_loadu_pd(u + i - 1);
    __m256d mid = _mm256_loadu_pd(u + i);
    __m256d right = _mm256_loadu_pd(u + i + 1);
    // (right - 2*mid) + left, same association as the scalar loop
    __m256d lap = _mm256_add_pd(_mm256_sub_pd(right, _mm256_mul_pd(two, mid)), left);
    __m256d acc = _mm256_loadu_pd(v + i);
    _mm256_storeu_pd(v + i, _mm256_fmadd_pd(vcoef, lap, acc));
  }
  for (; i + 1 < n; ++i) {
    v[i] += coef * (u[i + 1] - 2.0 * u[i] + u[i - 1]);
  }
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double weighted_dot_avx2(const double* w, const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
    __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(a + i + 4));
    acc0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
    acc0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(b + i), acc0);
  }
  double sum = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += w[i] * a[i] * b[i];
  return sum;
}

void central_difference_avx2(const double* u, double* out, std::size_t n, double scale) {
  if (n < 3) return;
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t i = 1;
  for (; i + 4 < n; i += 4) {
    __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(u + i + 1), _mm256_loadu_pd(u + i - 1));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(diff, vs));
  }
  for (; i + 1 < n; ++i) out[i] = (u[i + 1] - u[i - 1]) * scale;
}

}  // namespace stringlmi::kernels::detail
