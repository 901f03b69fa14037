#include <doctest.h>

#include <cmath>
#include <memory>

#include "models.hpp"
#include "rbody/partition.hpp"

using namespace rbody;

namespace {
ModelConfig gaussian_with_pair() {
  auto cfg = testmodels::gaussian();
  Poly x = Poly::monomial(1), x2 = Poly::monomial(2);
  cfg.potential.add(separable_component(2, {{0.2, {x, x}}, {0.05, {x2, x2}}}));
  return cfg;
}
}  // namespace

TEST_CASE("stencil derivatives are exact on quartics") {
  const double h = 0.01;
  std::array<double, 5> f;
  for (int i = 0; i < 5; ++i) {
    double x = (i - 2) * h;
    f[i] = 1 + 2 * x + 3 * x * x + 4 * x * x * x + 5 * x * x * x * x;
  }
  auto d = stencil_derivatives(f, h);
  CHECK(d[0] == doctest::Approx(1.0));
  CHECK(d[1] == doctest::Approx(2.0));
  CHECK(d[2] == doctest::Approx(6.0));
  CHECK(d[3] == doctest::Approx(24.0).epsilon(1e-6));
  CHECK(d[4] == doctest::Approx(120.0).epsilon(1e-6));
}

TEST_CASE("leading free energy coefficient is the energy difference") {
  auto cfg = gaussian_with_pair();
  auto e4 = free_energy_coeffs(cfg, {1.0}, 4);
  CHECK(std::abs(e4.G[0] - (-e4.energy + e4.reference_energy)) < 1e-8);
  CHECK(std::abs(e4.G[1]) < 1e-10);  // beta = 2
  CHECK(e4.edge_drift < 1e-8);
  auto e8 = free_energy_coeffs(cfg, {1.0}, 8);
  CHECK(std::abs(e4.G[2] - e8.G[2]) < 1e-6);
}

TEST_CASE("one-body models have no interpolation correction") {
  auto e = free_energy_coeffs(testmodels::gaussian(), {1.0}, 4);
  CHECK(std::abs(e.G[2]) < 1e-12);
}

TEST_CASE("one-cut assembly has no theta factor") {
  auto d = build_free_energy_data(testmodels::gaussian(), 0.01, 4);
  CHECK(d.g == 0);
  CHECK(d.gamma == doctest::Approx(5.0 / 12.0));
  for (int N : {50, 51}) {
    auto z = assemble_Z(N, d);
    CHECK(z.theta_only == 1.0);
    CHECK(z.log_Z() == doctest::Approx(lattice_sum_log(N, d)));
  }
}

TEST_CASE("Gaussian fluctuations of the quadratic statistic") {
  auto cfg = testmodels::gaussian();
  auto eq = std::make_shared<EquilibriumMeasure>(solve_equilibrium(cfg));
  auto ops = std::make_shared<OperatorSet>(eq, cfg.potential);
  auto cc = expand_correlators(ops, 1);
  auto f = linear_stat_fluctuations([](cplx x) { return x * x; }, cc);
  // Tr M^2 is (1/2N) chi^2 with N^2 degrees of freedom: mean N/2, variance 1/2
  CHECK(f.mean_leading == doctest::Approx(0.5));
  CHECK(std::abs(f.M1) < 1e-12);
  CHECK(f.M2.real() == doctest::Approx(0.25));
  for (double s : {-2.0, 0.5, 3.0}) CHECK(std::abs(clt_charfn(s, f, 100, nullptr) - std::exp(-s * s / 4)) < 1e-10);
  auto g = linear_stat_fluctuations([](cplx) { return cplx(1.0); }, cc);
  CHECK(std::abs(g.M2) < 1e-12);
}

TEST_CASE("mass derivative carries opposite unit masses") {
  auto cfg = testmodels::two_cut();
  auto eq = std::make_shared<EquilibriumMeasure>(solve_equilibrium(cfg));
  OperatorSet ops(eq, cfg.potential);
  CVec eta(2);
  eta << -1.0, 1.0;
  auto md = mass_derivative(ops, eta);
  CHECK(md.cut_mass[0] == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(md.cut_mass[1] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("assembly is limited to two segments") {
  ModelConfig cfg = testmodels::gaussian();
  cfg.domain = build_domain({{-3, -2}, {-1, 1}, {2, 3}});
  CHECK_THROWS_AS(build_free_energy_data(cfg, 0.01, 4), Error);
}
