#include "rbody/analytic.hpp"

namespace rbody {

AnalyticFunction AnalyticFunction::from_grid(std::shared_ptr<const Grid> g, const CVec& values, int decay) {
  if (values.size() != g->size()) throw config_error("analytic function: node count mismatch");
  CVec c = g->proj() * values;
  return AnalyticFunction(std::move(g), std::move(c), decay);
}

cplx AnalyticFunction::operator()(cplx x) const { return (grid_->row(x) * coef_)(0); }

cplx AnalyticFunction::derivative(cplx x, int order) const { return (grid_->row(x, order) * coef_)(0); }

double AnalyticFunction::norm() const { return on_grid().cwiseAbs().maxCoeff(); }

AnalyticFunction AnalyticFunction::operator+(const AnalyticFunction& o) const {
  return AnalyticFunction(grid_, coef_ + o.coef_, std::min(decay_, o.decay_));
}
AnalyticFunction AnalyticFunction::operator-(const AnalyticFunction& o) const {
  return AnalyticFunction(grid_, coef_ - o.coef_, std::min(decay_, o.decay_));
}
AnalyticFunction AnalyticFunction::operator*(cplx s) const { return AnalyticFunction(grid_, coef_ * s, decay_); }

AnalyticFunction2 AnalyticFunction2::from_grid(std::shared_ptr<const Grid> g, const CMat& values) {
  if (values.rows() != g->size() || values.cols() != g->size())
    throw config_error("analytic function: node count mismatch");
  CMat C = g->proj() * values * g->proj().transpose();
  return AnalyticFunction2(std::move(g), std::move(C));
}

cplx AnalyticFunction2::operator()(cplx x1, cplx x2) const {
  return (grid_->row(x1) * C_ * grid_->row(x2).transpose())(0, 0);
}

AnalyticFunction AnalyticFunction2::slice(cplx x2) const {
  CVec c = C_ * grid_->row(x2).transpose();
  return AnalyticFunction(grid_, c, 1);
}

cplx contour_integral(const CVec& f, const Grid& g) {
  if (f.size() != g.size()) throw config_error("contour_integral: node count mismatch");
  return g.integrate(f);
}

}  // namespace rbody
