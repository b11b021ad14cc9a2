#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"
#include "stringlmi/kernels.hpp"

namespace stringlmi::kernels {

namespace {

constexpr KernelTable kScalarTable{
    Isa::kScalar,
    "scalar",
    &detail::stencil_accumulate_scalar,
    &detail::axpy_scalar,
    &detail::weighted_dot_scalar,
    &detail::central_difference_scalar,
};

#if defined(STRINGLMI_HAVE_AVX2)
constexpr KernelTable kAvx2Table{
    Isa::kAvx2,
    "avx2",
    &detail::stencil_accumulate_avx2,
    &detail::axpy_avx2,
    &detail::weighted_dot_avx2,
    &detail::central_difference_avx2,
};

bool cpu_has_avx2() noexcept {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable& select() noexcept {
  if (const char* env = std::getenv("STRINGLMI_SIMD")) {
    if (std::string_view(env) == "scalar") return kScalarTable;
  }
  if (const KernelTable* t = table_for(Isa::kAvx2)) return *t;
  return kScalarTable;
}

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalarTable; }

const KernelTable* table_for(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar:
      return &kScalarTable;
    case Isa::kAvx2:
#if defined(STRINGLMI_HAVE_AVX2)
      return cpu_has_avx2() ? &kAvx2Table : nullptr;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& active() noexcept {
  static const KernelTable& table = select();
  return table;
}

}  // namespace stringlmi::kernels
