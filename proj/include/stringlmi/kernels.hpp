#pragma once

// Data-parallel inner loops shared by the simulator and the quadrature code.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant compiled in its own translation unit. The variant is picked
// once at runtime from the CPU feature bits; setting STRINGLMI_SIMD=scalar in
// the environment forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace stringlmi::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;

  /// v[i] += coef * (u[i+1] - 2 u[i] + u[i-1]) for 1 <= i < n-1.
  void (*stencil_accumulate)(const double* u, double* v, std::size_t n, double coef);

  /// y[i] += a * x[i].
  void (*axpy)(double a, const double* x, double* y, std::size_t n);

  /// sum_i w[i] * a[i] * b[i].
  double (*weighted_dot)(const double* w, const double* a, const double* b, std::size_t n);

  /// out[i] = (u[i+1] - u[i-1]) * scale for 1 <= i < n-1; out[0], out[n-1] untouched.
  void (*central_difference)(const double* u, double* out, std::size_t n, double scale);
};

const KernelTable& scalar_table() noexcept;

/// Returns nullptr when the ISA is not compiled in or the CPU lacks it.
const KernelTable* table_for(Isa isa) noexcept;

/// Table chosen for this process (best supported ISA unless overridden).
const KernelTable& active() noexcept;

// Span conveniences over the active table.

inline double weighted_dot(std::span<const double> w, std::span<const double> a,
                           std::span<const double> b) {
  return active().weighted_dot(w.data(), a.data(), b.data(), w.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}

}  // namespace stringlmi::kernels
