#include <cstdlib>
#include <string>

#include "optsample/kernels.hpp"

namespace optsample::kernels {

namespace {

constexpr KernelTable kScalarTable{Isa::Scalar, &scalar::min_sup_distance,
                                   &scalar::min_torus_distance, &scalar::weighted_abs2_sum};
constexpr KernelTable kAvx2Table{Isa::Avx2, &avx2::min_sup_distance, &avx2::min_torus_distance,
                                 &avx2::weighted_abs2_sum};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() {
  if (const char* forced = std::getenv("OPTSAMPLE_SIMD")) {
    if (std::string(forced) == "scalar") return kScalarTable;
  }
  return isa_available(Isa::Avx2) ? kAvx2Table : kScalarTable;
}

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2: {
      static const bool ok = avx2::compiled() && cpu_has_avx2();
      return ok;
    }
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
  return (isa == Isa::Avx2 && isa_available(Isa::Avx2)) ? kAvx2Table : kScalarTable;
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace optsample::kernels
