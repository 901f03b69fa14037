#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "rbody/simd.hpp"

using namespace rbody;

TEST_CASE("vector and scalar log-distance kernels agree") {
  if (!avx2_available()) {
    MESSAGE("AVX2 not available; only the scalar kernel is exercised");
    return;
  }
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-5, 5);
  for (std::size_t n = 0; n <= 67; ++n) {
    std::vector<double> y(n);
    for (auto& v : y) v = u(g);
    const double x = u(g);
    auto s = log_distance_scalar(y.data(), n, x);
    auto v = log_distance_avx2(y.data(), n, x);
    CHECK(std::abs(s.sum - v.sum) <= 1e-12 * std::max(1.0, std::abs(s.sum)));
    CHECK(s.min_abs == v.min_abs);
  }
}

TEST_CASE("edge values") {
  std::vector<double> y{0.0, 1.0, 2.0, 3.0, 4.0};
  auto s = log_distance_scalar(y.data(), y.size(), 2.0);
  CHECK(s.min_abs == 0.0);
  CHECK(std::isinf(s.sum));
  std::vector<double> tiny{1e-310, 2e-310, 3e-310, 4e-310, 5e-310};
  auto a = log_distance_scalar(tiny.data(), tiny.size(), 1.0);
  CHECK(std::abs(a.sum) < 1e-300);
  if (avx2_available()) {
    auto b = log_distance_avx2(tiny.data(), tiny.size(), 1.0);
    CHECK(std::abs(a.sum - b.sum) < 1e-15);
    auto z = log_distance_avx2(y.data(), y.size(), 2.0);
    CHECK(z.min_abs == 0.0);
  }
}

TEST_CASE("dispatch reports a consistent level") {
  SimdLevel l = simd_level();
  if (!avx2_available()) CHECK(l == SimdLevel::Scalar);
  CHECK(!simd_name(l).empty());
  std::vector<double> y{0.5, -1.5, 2.5};
  auto d = log_distance(y.data(), y.size(), 0.0);
  CHECK(d.sum == doctest::Approx(std::log(0.5 * 1.5 * 2.5)));
}
