#include <cstdlib>
#include <cstring>

#include "rbody/simd.hpp"

namespace rbody {

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

SimdLevel simd_level() {
  static const SimdLevel level = [] {
    const char* env = std::getenv("RBODY_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return SimdLevel::Scalar;
    return avx2_available() ? SimdLevel::Avx2 : SimdLevel::Scalar;
  }();
  return level;
}

std::string simd_name(SimdLevel l) { return l == SimdLevel::Avx2 ? "avx2" : "scalar"; }

LogDistance log_distance(const double* y, std::size_t n, double x) {
  return simd_level() == SimdLevel::Avx2 ? log_distance_avx2(y, n, x) : log_distance_scalar(y, n, x);
}

}  // namespace rbody
