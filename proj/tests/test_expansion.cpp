#include <doctest.h>

#include <cmath>
#include <memory>

#include "models.hpp"
#include "rbody/expansion.hpp"

using namespace rbody;

namespace {
CorrelatorCache expand(const ModelConfig& cfg) {
  auto eq = std::make_shared<EquilibriumMeasure>(solve_equilibrium(cfg));
  auto ops = std::make_shared<OperatorSet>(eq, cfg.potential);
  return expand_correlators(ops, 1);
}

cplx moment(const CorrelatorCache& cc, const AnalyticFunction& f, int k) {
  const Grid& g = *cc.ops->grid();
  CVec v = f.on_grid();
  for (int j = 0; j < g.size(); ++j) v[j] *= std::pow(g.x()[j], k);
  return g.integrate(v);
}
}  // namespace

TEST_CASE("orders below the leading one vanish identically") {
  auto cc = expand(testmodels::gaussian());
  for (int n = 1; n <= 5; ++n)
    for (int k = -3; k < n - 2; ++k) {
      std::vector<cplx> x(n);
      for (int i = 0; i < n; ++i) x[i] = cplx(2.0 + i, 0.5);
      CHECK(cc.Wn_at(n, k, x) == cplx(0.0));
    }
  // beta = 2, one soft cut: no source at order zero
  CHECK(cc.W1[0].coef().cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS(cc.Wn_at(3, 1, {1.0, 2.0, 3.0}));
}

TEST_CASE("two-point function matches the one-cut closed form") {
  auto cc = expand(testmodels::gaussian());
  const double r = std::sqrt(2.0);
  double err = 0.0;
  for (int i = 0; i < 25; ++i) {
    cplx x1(2.0 + 0.1 * i, 0.3 * (i % 3)), x2(-1.5 - 0.05 * i, 0.7 - 0.1 * (i % 5));
    if (i % 4 == 0) x2 = cplx(0.2, 1.0);
    err = std::max(err, std::abs(cc.W20(x1, x2) - universal_two_point(-r, r, x1, x2)));
  }
  CHECK(err < 1e-6);
  CHECK(cc.symmetry_defect < 1e-8);
}

TEST_CASE("first correction reproduces the Gaussian moments") {
  // E[N^-1 Tr M^4] = 1/2 + 1/(4N^2), E[N^-1 Tr M^6] = 5/8 + 5/(4N^2), Tr M^2 has no correction
  auto cc = expand(testmodels::gaussian());
  CHECK(std::abs(moment(cc, cc.W1[1], 2)) < 1e-10);
  CHECK(std::abs(moment(cc, cc.W1[1], 4) - 0.25) < 1e-9);
  CHECK(std::abs(moment(cc, cc.W1[1], 6) - 1.25) < 1e-9);
}

TEST_CASE("beta != 2 creates an order-zero source") {
  auto cc = expand(testmodels::gaussian(1.0));
  CHECK(cc.W1[0].coef().cwiseAbs().maxCoeff() > 1e-3);
  // total mass of the correction vanishes
  CHECK(std::abs(moment(cc, cc.W1[0], 0)) < 1e-10);
  // W_2^[0] scales like 2/beta against the beta = 2 closed form
  const auto& eq = cc.ops->eq();
  const auto& c = eq.support.cuts()[0];
  cplx x1(2.5, 0.2), x2(-2.0, 0.5);
  CHECK(std::abs(cc.W20(x1, x2) - 2.0 * universal_two_point(c.a, c.b, x1, x2)) < 1e-6);
}

TEST_CASE("two-cut expansion certifies zero periods") {
  auto cc = expand(testmodels::two_cut());
  CHECK(cc.max_period < 1e-8);
  CHECK(cc.notes.empty());
}
