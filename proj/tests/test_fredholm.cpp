#include <doctest.h>

#include "rbody/fredholm.hpp"

using namespace rbody;

TEST_CASE("Fredholm determinant of a rank-two kernel") {
  for (auto [a, b] : {std::pair{0.3, -0.2}, std::pair{-0.7, 0.4}, std::pair{1.5, 0.9}}) {
    RankTwoKernel k;
    k.a = a;
    k.b = b;
    CMat A = nystrom_matrix(gauss_legendre(40), [&](double x, double y) { return k(x, y); });
    cplx lu = fredholm_det_lu(A), series = fredholm_det_series(A, 8), exact = k.exact_det();
    CHECK(std::abs(lu - series) < 1e-6);
    CHECK(std::abs(lu - exact) < 1e-10);
    CHECK(resolvent_residual(A, fredholm_resolvent(A)) < 1e-8);
  }
}

TEST_CASE("series truncation converges geometrically for a small kernel") {
  RankTwoKernel k;
  CMat A = nystrom_matrix(gauss_legendre(30), [&](double x, double y) { return k(x, y); });
  double e1 = std::abs(fredholm_det_series(A, 1) - fredholm_det_lu(A));
  double e2 = std::abs(fredholm_det_series(A, 2) - fredholm_det_lu(A));
  CHECK(e2 < e1);
  CHECK(e2 < 1e-12);  // rank two: the series terminates
}
