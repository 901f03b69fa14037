#include <doctest.h>

#include <cmath>

#include "rbody/theta.hpp"

using namespace rbody;

namespace {
ThetaParams one_dim(double T, double gamma, cplx v) {
  ThetaParams p;
  p.T = RMat::Constant(1, 1, T);
  p.gamma = RVec::Constant(1, gamma);
  p.v = CVec::Constant(1, v);
  return p;
}
}  // namespace

TEST_CASE("theta against a brute-force lattice sum") {
  ThetaParams p;
  p.T.resize(2, 2);
  p.T << 3.0, 0.7, 0.7, 2.0;
  p.gamma.resize(2);
  p.gamma << 0.25, -0.4;
  p.v.resize(2);
  p.v << cplx(0.3, 0.2), cplx(-0.1, 1.0);
  cplx brute = 0.0;
  for (int a = -30; a <= 30; ++a)
    for (int b = -30; b <= 30; ++b) {
      Eigen::Vector2d m(a + p.gamma[0], b + p.gamma[1]);
      brute += std::exp(-0.5 * m.dot(p.T * m) + p.v[0] * m[0] + p.v[1] * m[1]);
    }
  CHECK(std::abs(theta(p) - brute) < 1e-12 * std::abs(brute));
}

TEST_CASE("quasi-periodicity and characteristic shifts") {
  const double T = 2.3;
  auto p = one_dim(T, 0.3, cplx(0.4, 0.7));
  auto q = one_dim(T, 0.3, cplx(0.4 + T, 0.7));
  CHECK(std::abs(theta(q) - std::exp(T / 2 + cplx(0.4, 0.7)) * theta(p)) < 1e-11 * std::abs(theta(q)));
  CHECK(std::abs(theta(one_dim(T, 1.3, 0.2)) - theta(one_dim(T, 0.3, 0.2))) < 1e-13);
  // gamma = 1/2 at v = 0 is symmetric: derivative vanishes
  CHECK(std::abs(theta_grad(one_dim(T, 0.5, 0.0), {0})) < 1e-13);
}

TEST_CASE("theta derivatives match finite differences") {
  const double h = 1e-4;
  auto p = one_dim(1.7, 0.2, 0.3);
  auto at = [&](double v) { return theta(one_dim(1.7, 0.2, v)); };
  cplx d1 = (at(0.3 + h) - at(0.3 - h)) / (2 * h);
  cplx d2 = (at(0.3 + h) - 2.0 * at(0.3) + at(0.3 - h)) / (h * h);
  CHECK(std::abs(theta_grad(p, {0}) - d1) < 1e-7);
  CHECK(std::abs(theta_grad(p, {0, 0}) - d2) < 1e-5);
}

TEST_CASE("N-power exponents per edge class are exact rationals") {
  Rational two(2);
  CHECK(gamma_exponent(EdgeClass::SoftSoft, two) == Rational(5, 12));
  CHECK(gamma_exponent(EdgeClass::SoftHard, two) == Rational(1, 3));
  CHECK(gamma_exponent(EdgeClass::HardHard, two) == Rational(1, 4));
  CHECK(gamma_exponent({EdgeClass::SoftSoft, EdgeClass::SoftSoft}, two) == Rational(5, 6));
  Rational one(1);
  CHECK(gamma_exponent(EdgeClass::SoftSoft, one).value() == doctest::Approx((3 + 0.5 + 2.0) / 12));
  Rational b;
  CHECK(rational_beta(0.5, b));
  CHECK(b == Rational(1, 2));
  CHECK_FALSE(rational_beta(std::sqrt(2.0), b));
  CHECK((Rational(1, 6) + Rational(1, 3)) == Rational(1, 2));
  CHECK(Rational(2, -4).str() == "-1/2");
}
