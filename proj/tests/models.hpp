#pragma once

#include "rbody/model.hpp"

namespace testmodels {

using namespace rbody;

// weight exp(-N sum x^2): semicircle on [-sqrt 2, sqrt 2]
inline ModelConfig gaussian(double beta = 2.0, double lo = -3.0, double hi = 3.0) {
  ModelConfig cfg;
  cfg.beta = beta;
  cfg.domain = build_domain({{lo, hi}});
  cfg.potential.add(one_body_polynomial(Poly({0, 0, -1})));
  return cfg;
}

// symmetric double well split by a gap, with a separable two-body term
inline ModelConfig two_cut(bool with_pair = true) {
  ModelConfig cfg;
  cfg.beta = 2.0;
  cfg.domain = build_domain({{-3, -0.1}, {0.1, 3}});
  cfg.potential.add(one_body_polynomial(Poly({0, 0, 1.5, 0, -0.25})));
  if (with_pair) {
    Poly x = Poly::monomial(1), x2 = Poly::monomial(2);
    cfg.potential.add(separable_component(2, {{0.2, {x, x}}, {0.05, {x2, x2}}}));
  }
  cfg.filling = std::vector<double>{0.5, 0.5};
  return cfg;
}

}  // namespace testmodels
