#include <cstdlib>
#include <string_view>

#include "dynid/errors.hpp"
#include "dynid/kernels.hpp"

namespace dynid::kernels {

#ifndef DYNID_HAVE_AVX2
const Table* avx2_table() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(DYNID_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Isa detect() {
  const char* env = std::getenv("DYNID_SIMD");
  const std::string_view choice = env ? env : "";
  if (choice == "scalar") return Isa::kScalar;
  if (choice == "avx2") {
    if (!cpu_has_avx2()) {
      throw usage_error("DYNID_SIMD=avx2 requested but the CPU or build lacks AVX2/FMA");
    }
    return Isa::kAvx2;
  }
  return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

const char* isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

const Table& table_for(Isa isa) {
  if (isa == Isa::kAvx2) {
    const Table* t = avx2_table();
    if (t == nullptr || !cpu_has_avx2()) throw usage_error("AVX2 kernels unavailable");
    return *t;
  }
  return scalar_table();
}

const Table& active() {
  static const Table& table = table_for(active_isa());
  return table;
}

}  // namespace dynid::kernels
