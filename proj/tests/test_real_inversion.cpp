#include <doctest.h>

#include <cmath>

#include "rbody/real_inversion.hpp"

using namespace rbody;

TEST_CASE("zero data gives the zero density") {
  TbarOperator op(build_domain({{-1, 1}}), 2.0);
  auto r = invert_T_real(op, [](double) { return 0.0; });
  CHECK(r.residual < 1e-12);
  for (double x : {-0.9, 0.0, 0.4}) CHECK(std::abs(r.phi(x)) < 1e-12);
}

TEST_CASE("logarithmic kernel on an interval") {
  // -beta int ln|x-y| T_2(y)/(pi sqrt(1-y^2)) dy = beta T_2(x)/2
  const double beta = 2.0;
  TbarOperator op(build_domain({{-1, 1}}), beta);
  auto r = invert_T_real(op, [&](double x) { return beta * (2 * x * x - 1) / 2; }, 1e-10);
  for (double x : {-0.7, 0.1, 0.55}) {
    double exact = (2 * x * x - 1) / (kPi * std::sqrt(1 - x * x));
    CHECK(std::abs(r.phi(x) - exact) < 1e-8);
  }
  CHECK(std::abs(r.phi.mass(0)) < 1e-12);
}

TEST_CASE("two segments with a smooth pair term") {
  Domain A = build_domain({{-2, -0.5}, {0.5, 2}});
  RBodyPotential T;
  Poly x = Poly::monomial(1);
  T.add(separable_component(2, {{-0.3, {x, x}}}));
  auto tau = tau_from_potential(T, A);
  REQUIRE(tau);
  CHECK(tau(0.7, -1.1) == doctest::Approx(-0.3 * 0.7 * -1.1));
  TbarOperator op(A, 2.0, tau);
  auto f = [](double t) { return std::cos(t) + 0.3 * t; };
  auto r = invert_T_real(op, f);
  CHECK(r.residual <= 1e-6);
  CHECK(std::abs(r.phi.mass(0) + r.phi.mass(1)) < 1e-10);
  for (double t : {-1.73, -0.61, 0.93, 1.88}) CHECK(std::abs(op.apply(r.phi, t) - (f(t) - r.mean_removed)) < 1e-6);
}

TEST_CASE("unreachable tolerance is reported") {
  TbarOperator op(build_domain({{-1, 1}}), 2.0);
  CHECK_THROWS_AS(invert_T_real(op, [](double x) { return std::abs(x); }, 1e-14, 32), Error);
}

TEST_CASE("one-body potentials have no pair kernel") {
  RBodyPotential T;
  T.add(one_body_polynomial(Poly({0, 0, -1})));
  CHECK(!tau_from_potential(T, build_domain({{-1, 1}})));
}
