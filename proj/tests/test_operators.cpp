#include <doctest.h>

#include <memory>

#include "models.hpp"
#include "rbody/operators.hpp"

using namespace rbody;

namespace {
std::shared_ptr<const OperatorSet> two_cut_ops() {
  static std::shared_ptr<const OperatorSet> ops = [] {
    auto cfg = testmodels::two_cut();
    auto eq = std::make_shared<EquilibriumMeasure>(solve_equilibrium(cfg));
    return std::make_shared<const OperatorSet>(eq, cfg.potential);
  }();
  return ops;
}
}  // namespace

TEST_CASE("factorization of the master operator") {
  auto ops = two_cut_ops();
  const Grid& g = *ops->grid();
  double worst = 0.0;
  for (unsigned s = 0; s < 30; ++s) worst = std::max(worst, ops->factorization_residual(random_rational_coefficients(g, 100 + s)));
  CHECK(worst < 1e-7);
}

TEST_CASE("inverse of the master operator on period-free functions") {
  auto ops = two_cut_ops();
  const Grid& g = *ops->grid();
  double worst = 0.0;
  for (unsigned s = 0; s < 10; ++s) {
    CVec c = random_rational_coefficients(g, 300 + s);
    CVec p = ops->Pi() * c;
    for (int h = 0; h < g.cuts(); ++h) c[h * g.kmax()] -= p[h] / ops->Pi()(h, h * g.kmax());
    CHECK((ops->Pi() * c).cwiseAbs().maxCoeff() < 1e-12);
    CVec back = ops->invert_K(CVec(ops->K() * c));
    worst = std::max(worst, (back - c).cwiseAbs().maxCoeff() / c.cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("periods of the Stieltjes transform are the cut masses") {
  auto ops = two_cut_ops();
  CVec p = ops->Pi() * ops->eq().W_function().coef();
  CHECK(std::abs(p[0] - 0.5) < 1e-10);
  CHECK(std::abs(p[1] - 0.5) < 1e-10);
}

TEST_CASE("mass derivative has unit periods") {
  auto ops = two_cut_ops();
  CVec eta(2);
  eta << -1.0, 1.0;
  CVec phi = ops->mass_derivative(eta);
  CVec p = ops->Pi() * phi;
  CHECK(std::abs(p[0] + 1.0) < 1e-10);
  CHECK(std::abs(p[1] - 1.0) < 1e-10);
  CHECK(ops->condition() > 1.0);
}
