#pragma once

#include <memory>

#include "rbody/common.hpp"
#include "rbody/contour.hpp"

namespace rbody {

// Holomorphic function on C \ S vanishing at infinity (member of H^m with
// m = decay), stored by scaled out-coefficients on a Grid.
class AnalyticFunction {
 public:
  AnalyticFunction() = default;
  AnalyticFunction(std::shared_ptr<const Grid> g, CVec coef, int decay = 1)
      : grid_(std::move(g)), coef_(std::move(coef)), decay_(decay) {}

  // Cauchy projection of grid samples.
  static AnalyticFunction from_grid(std::shared_ptr<const Grid> g, const CVec& values, int decay = 1);

  const Grid& grid() const { return *grid_; }
  std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
  const CVec& coef() const { return coef_; }
  int decay() const { return decay_; }

  cplx operator()(cplx x) const;
  cplx derivative(cplx x, int order = 1) const;
  CVec on_grid() const { return grid_->eval() * coef_; }
  CVec periods() const { return grid_->periods(coef_); }
  double norm() const;  // max on the grid

  AnalyticFunction operator+(const AnalyticFunction& o) const;
  AnalyticFunction operator-(const AnalyticFunction& o) const;
  AnalyticFunction operator*(cplx s) const;

 private:
  std::shared_ptr<const Grid> grid_;
  CVec coef_;
  int decay_ = 1;
};

// Symmetric two-variable function stored as C with f(x1,x2) = row(x1) C row(x2)^T.
class AnalyticFunction2 {
 public:
  AnalyticFunction2() = default;
  AnalyticFunction2(std::shared_ptr<const Grid> g, CMat C) : grid_(std::move(g)), C_(std::move(C)) {}
  static AnalyticFunction2 from_grid(std::shared_ptr<const Grid> g, const CMat& values);

  const CMat& coef() const { return C_; }
  const Grid& grid() const { return *grid_; }
  cplx operator()(cplx x1, cplx x2) const;
  CMat on_grid() const { return grid_->eval() * C_ * grid_->eval().transpose(); }
  // Slot-1 function with slot 2 frozen at x2.
  AnalyticFunction slice(cplx x2) const;

 private:
  std::shared_ptr<const Grid> grid_;
  CMat C_;
};

// Trapezoid value of oint f dxi/2i pi from node samples.
cplx contour_integral(const CVec& f, const Grid& g);

}  // namespace rbody
