#pragma once

#include <cstddef>
#include <string>

namespace rbody {

// sum_j ln|x - y_j| and min_j |x - y_j| over n points.
struct LogDistance {
  double sum = 0.0;
  double min_abs = 0.0;
};

LogDistance log_distance_scalar(const double* y, std::size_t n, double x);
LogDistance log_distance_avx2(const double* y, std::size_t n, double x);

enum class SimdLevel { Scalar, Avx2 };

// Chosen once from the CPU; RBODY_SIMD=scalar forces the portable kernel.
SimdLevel simd_level();
bool avx2_available();
std::string simd_name(SimdLevel l);
LogDistance log_distance(const double* y, std::size_t n, double x);

}  // namespace rbody
