#include <doctest.h>

#include <cmath>

#include "rbody/config.hpp"
#include "rbody/domain.hpp"
#include "rbody/measure.hpp"
#include "rbody/poly.hpp"
#include "rbody/potential.hpp"
#include "rbody/quadrature.hpp"

using namespace rbody;

TEST_CASE("polynomial arithmetic and calculus") {
  Poly p({1, -2, 3});  // 1 - 2x + 3x^2
  CHECK(p(2.0) == doctest::Approx(9.0));
  CHECK(p.derivative()(1.0) == doctest::Approx(4.0));
  CHECK((p * p)(0.5) == doctest::Approx(p(0.5) * p(0.5)));
  CHECK(p.antiderivative()(1.0) == doctest::Approx(1.0 - 1.0 + 1.0));
  CHECK((p - p).is_zero());
}

TEST_CASE("divided differences at coincident points") {
  Poly p({0, 1, 0, 2});  // x + 2x^3
  cplx x(0.3, 0.1);
  CHECK(std::abs(divided_diff1(p, x, x) - p.derivative()(x)) < 1e-14);
  cplx y(1.1, -0.4);
  CHECK(std::abs(divided_diff1(p, x, y) - (p(x) - p(y)) / (x - y)) < 1e-13);
  CHECK(std::abs(divided_diff2(p, x, x, x) - 0.5 * p.derivative().derivative()(x)) < 1e-13);
}

TEST_CASE("sigma polynomial rejects duplicate roots") {
  CHECK(sigma_poly({-1, 1})(0.0) == doctest::Approx(-1.0));
  CHECK_THROWS(sigma_poly({1, 1}));
}

TEST_CASE("Gauss rules integrate polynomials exactly") {
  QuadRule g = gauss_legendre(8);
  double s = 0.0;
  for (size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * std::pow(g.x[i], 14);
  CHECK(s == doctest::Approx(2.0 / 15.0).epsilon(1e-14));
  QuadRule c = gauss_chebyshev1(10);
  double t = 0.0;
  for (size_t i = 0; i < c.x.size(); ++i) t += c.w[i] * c.x[i] * c.x[i];
  CHECK(t == doctest::Approx(kPi / 2));
  QuadRule j = gauss_jacobi(12, 0.5, -0.5);
  double m = 0.0;
  for (size_t i = 0; i < j.x.size(); ++i) m += j.w[i];
  CHECK(m == doctest::Approx(kPi));
}

TEST_CASE("domain lookup") {
  Domain d = build_domain({{-3, -1}, {1, 2}});
  CHECK(d.count() == 2);
  CHECK(d.segment_of(-2.0) == 0);
  CHECK(d.segment_of(1.5) == 1);
  CHECK(d.segment_of(0.0) == -1);
  CHECK(d.nearest_segment(0.9) == 1);
}

TEST_CASE("separable components are symmetrized") {
  Poly x = Poly::monomial(1), x2 = Poly::monomial(2);
  RBodyPotential T;
  T.add(separable_component(2, {{1.0, {x, x2}}}));
  cplx a(0.3), b(-1.2);
  // T_2(x, y) = (x y^2 + y x^2) / 2
  Component c = T.components()[0];
  cplx pts[2] = {a, b}, rev[2] = {b, a};
  CHECK(std::abs(c.value(pts) - c.value(rev)) < 1e-15);
  CHECK(std::abs(c.value(pts) - 0.5 * (a * b * b + b * a * a)) < 1e-15);
}

TEST_CASE("log potential of the semicircle") {
  auto rho = [](double x) { return std::sqrt(std::max(0.0, 2.0 - x * x)) / kPi; };
  const double r = std::sqrt(2.0);
  GridMeasure mu = chebyshev_measure({{-r, r}}, {0}, rho, 128);
  CHECK(mu.mass() == doctest::Approx(1.0).epsilon(1e-12));
  // inside the support: x^2/2 - 1/2 - ln(r/2) ... with radius R: x^2/R^2 - 1/2 + ln(R/2)
  for (double x : {0.0, 0.7, -1.2}) CHECK(log_potential(mu, x) == doctest::Approx(x * x / 2.0 - 0.5 + std::log(r / 2.0)));
}

TEST_CASE("configuration parsing") {
  auto j = nlohmann::json::parse(R"({"beta": 2, "N": 10, "r": 2, "segments": [[-1, 1]],
     "potential": {"type": "polynomial_sum", "terms": [{"arity": 1, "coeff": -1, "factors": [[0, 0, 1]]},
                                                       {"arity": 2, "coeff": 0.1, "factors": [[0, 1], [0, 1]]}]}})");
  ModelConfig cfg = parse_config(j);
  CHECK(cfg.potential.r() == 2);
  CHECK(cfg.N == 10);
  j["r"] = 3;
  CHECK_THROWS_AS(parse_config(j), Error);
  j.erase("r");
  j["segments"] = {{1, -1}};
  CHECK_THROWS(parse_config(j));
  j["segments"] = {{-1, 1}};
  j["potential"]["type"] = "nonsense";
  try {
    parse_config(j);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(exit_code(e.kind()) == 2);
  }
  CHECK(config_hash(j) == config_hash(nlohmann::json::parse(j.dump())));
}
