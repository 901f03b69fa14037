#include <cmath>
#include <limits>

#include "rbody/simd.hpp"

namespace rbody {

LogDistance log_distance_scalar(const double* y, std::size_t n, double x) {
  LogDistance r;
  r.min_abs = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    double d = std::abs(x - y[j]);
    r.sum += std::log(d);
    r.min_abs = std::min(r.min_abs, d);
  }
  return r;
}

}  // namespace rbody
