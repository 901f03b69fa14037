#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <limits>

#include "rbody/simd.hpp"

namespace rbody {

// Products of |x - y_j| are accumulated per lane as mantissa in [1, 2) plus an
// integer exponent, so only four logarithms are taken at the end.
LogDistance log_distance_avx2(const double* y, std::size_t n, double x) {
  const __m256d vx = _mm256_set1_pd(x);
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  const __m256i bias = _mm256_set1_epi64x(1023);
  __m256d m = _mm256_set1_pd(1.0);
  __m256i e = _mm256_setzero_si256();
  __m256d mn = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t j = 0;
  auto split = [&](__m256d v, __m256d& mant, __m256i& ex) {
    __m256i bits = _mm256_castpd_si256(v);
    ex = _mm256_sub_epi64(_mm256_srli_epi64(bits, 52), bias);
    mant = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
  };
  for (; j + 4 <= n; j += 4) {
    __m256d d = _mm256_andnot_pd(sign, _mm256_sub_pd(vx, _mm256_loadu_pd(y + j)));
    mn = _mm256_min_pd(mn, d);
    __m256d dm;
    __m256i de;
    split(d, dm, de);
    m = _mm256_mul_pd(m, dm);
    __m256d mm;
    __m256i me;
    split(m, mm, me);
    m = mm;
    e = _mm256_add_epi64(e, _mm256_add_epi64(de, me));
  }
  alignas(32) double ml[4], mnl[4];
  alignas(32) std::int64_t el[4];
  _mm256_store_pd(ml, m);
  _mm256_store_pd(mnl, mn);
  _mm256_store_si256(reinterpret_cast<__m256i*>(el), e);
  LogDistance r;
  r.min_abs = std::min(std::min(mnl[0], mnl[1]), std::min(mnl[2], mnl[3]));
  std::int64_t et = el[0] + el[1] + el[2] + el[3];
  r.sum = std::log(ml[0] * ml[1]) + std::log(ml[2] * ml[3]) + static_cast<double>(et) * 0.69314718055994530942;
  for (; j < n; ++j) {
    double d = std::abs(x - y[j]);
    r.sum += std::log(d);
    r.min_abs = std::min(r.min_abs, d);
  }
  // zero or subnormal distances break the exponent split; fall back
  if (!(r.min_abs >= 2.2250738585072014e-308)) {
    r.sum = -std::numeric_limits<double>::infinity();
    if (r.min_abs != 0.0) return log_distance_scalar(y, n, x);
  }
  return r;
}

}  // namespace rbody
