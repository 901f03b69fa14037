#include <doctest.h>

#include <cmath>

#include "models.hpp"
#include "rbody/convexity.hpp"
#include "rbody/equilibrium.hpp"

using namespace rbody;

namespace {
double slope(const EquilibriumMeasure& eq, double edge, double side) {
  double d1 = 1e-4, d2 = 1e-2;
  return std::log(eq.density_at(edge + side * d2) / eq.density_at(edge + side * d1)) / std::log(d2 / d1);
}
}  // namespace

TEST_CASE("semicircle from the quadratic one-body term") {
  auto eq = solve_equilibrium(testmodels::gaussian());
  REQUIRE(eq.support.count() == 1);
  const auto& c = eq.support.cuts()[0];
  CHECK(std::abs(c.a + std::sqrt(2.0)) < 1e-8);
  CHECK(std::abs(c.b - std::sqrt(2.0)) < 1e-8);
  double err = 0.0;
  for (int i = 1; i < 280; ++i) {
    double x = -1.4 + 2.8 * i / 280.0;
    err = std::max(err, std::abs(eq.density_at(x) - std::sqrt(2.0 - x * x) / kPi));
  }
  CHECK(err < 1e-7);
  CHECK(std::abs(eq.density.mass() - 1.0) < 1e-10);
  auto h = check_hypotheses(eq);
  CHECK(h.pass());
  CHECK(h.edges[0].first == EdgeType::Soft);
  CHECK(h.edges[0].second == EdgeType::Soft);
  // Stieltjes transform 2 - sqrt(2) at x = 2 (x - sqrt(x^2 - 2))
  CHECK(eq.W(2.0).real() == doctest::Approx(2.0 - std::sqrt(2.0)));
}

TEST_CASE("hard edge at a domain endpoint") {
  auto eq = solve_equilibrium(testmodels::gaussian(2.0, 0.0, 3.0));
  const auto& c = eq.support.cuts()[0];
  CHECK(c.lo == EdgeType::Hard);
  CHECK(c.hi == EdgeType::Soft);
  CHECK(c.a == 0.0);
  CHECK(slope(eq, c.a, 1.0) == doctest::Approx(-0.5).epsilon(0.1));
  CHECK(std::abs(slope(eq, c.a, 1.0) + 0.5) < 0.05);
  CHECK(std::abs(slope(eq, c.b, -1.0) - 0.5) < 0.05);
}

TEST_CASE("symmetric two-cut with a two-body term") {
  auto cfg = testmodels::two_cut();
  auto eq = solve_equilibrium(cfg);
  REQUIRE(eq.support.count() == 2);
  const auto& a = eq.support.cuts()[0];
  const auto& b = eq.support.cuts()[1];
  CHECK(a.a == doctest::Approx(-b.b).epsilon(1e-9));
  CHECK(a.b == doctest::Approx(-b.a).epsilon(1e-9));
  CHECK(std::abs(eq.cut_mass[0] - 0.5) < 1e-8);
  CHECK(eq.C[0] == doctest::Approx(eq.C[1]).epsilon(1e-8));
  CHECK(check_hypotheses(eq).pass());
}

TEST_CASE("Fourier symbol of the logarithm") {
  for (double k : {0.5, 1.0, 3.0}) {
    double n = coulomb_fourier_numeric(k, 1e-3);
    CHECK(std::abs(n - coulomb_fourier_abel(k, 1e-3)) < 1e-6);
    CHECK(std::abs(n - kPi / k) < 1e-2 * kPi / k);
  }
  RBodyPotential none;
  none.add(one_body_polynomial(Poly({0, 0, -1})));
  RBodyPotential sinh;
  sinh.add(kernel_component(sinh_kernel(2.0, 0.3)));
  Domain A = build_domain({{-3, 3}});
  auto r = check_convexity(sinh, A, 2.0, ConvexityMode::Fourier);
  CHECK(r.pass);
  CHECK(fourier_symbol(sinh, A, 2.0, 1.0) > 0.0);
  // pure Coulomb: the symbol is beta pi everywhere
  auto r0 = check_convexity(none, A, 2.0, ConvexityMode::Fourier);
  CHECK(r0.symbol_min == doctest::Approx(2.0 * kPi));
  Poly x = Poly::monomial(1);
  RBodyPotential sep;
  sep.add(separable_component(2, {{1.0, {x, x}}}));
  CHECK_THROWS(check_convexity(sep, A, 2.0, ConvexityMode::Fourier));
}

TEST_CASE("quadratic form on zero-mass densities") {
  Domain A = build_domain({{-1, 1}});
  RBodyPotential none;
  CHECK(quadratic_form([](double) { return 0.0; }, A, none, 2.0) == 0.0);
  auto nu = [](double x) { return std::cos(kPi * x); };
  double q = quadratic_form(nu, A, none, 2.0);
  CHECK(q > 0.0);
  // independent: -beta int int ln|x-y| via Chebyshev moments
  GridMeasure g = chebyshev_measure({{-1, 1}}, {0}, nu, 256);
  CHECK(q == doctest::Approx(-2.0 * log_energy(g)).epsilon(1e-4));
  // sampled mode on a confining two-body interaction
  Poly x = Poly::monomial(1);
  RBodyPotential T;
  T.add(separable_component(2, {{-0.5, {x, x}}}));
  auto r = check_convexity(T, build_domain({{-2, -0.5}, {0.5, 2}}), 2.0, ConvexityMode::Sampled);
  CHECK(r.pass);
  CHECK(r.q_values.size() == 16u);
  // strongly attractive x y breaks positivity for some nu
  RBodyPotential bad;
  bad.add(separable_component(2, {{40.0, {x, x}}}));
  auto rb = check_convexity(bad, A, 2.0, ConvexityMode::Sampled);
  CHECK_FALSE(rb.pass);
}
