#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "rbody/common.hpp"
#include "rbody/support.hpp"

namespace rbody {

// Nested Joukowski ellipses around each cut: level i has radius rho[h][i] in
// the J-plane of cut h. Radii follow 1 + 0.25 (i+1), shrunk when an ellipse
// would come within 45% of a neighbouring gap or leave the kernel domain.
class ContourFamily {
 public:
  using PairCheck = std::function<bool(cplx, cplx)>;

  ContourFamily(const Support& s, int levels = 4, const PairCheck& omega = nullptr);

  int levels() const { return levels_; }
  double rho(int h, int level) const { return rho_[h][level]; }
  std::vector<double> level_radii(int level) const;
  const Support& support() const { return support_; }

 private:
  Support support_;
  int levels_;
  std::vector<std::vector<double>> rho_;
};

// Trapezoid discretization of one circle |J_h| = rho_h per cut.
//
// Functions holomorphic outside the cuts and vanishing at infinity are stored
// through scaled coefficients chat[h,k] = c[h,k] rho_h^{-k}, k = 1..K, with
// phi(x) = sum_h sum_k chat[h,k] (rho_h / J_h(x))^k.
class Grid {
 public:
  Grid(const Support& s, const std::vector<double>& rho, int nq);

  const Support& support() const { return support_; }
  int nq() const { return nq_; }
  int kmax() const { return kmax_; }
  int size() const { return static_cast<int>(x_.size()); }
  int ncoef() const { return kmax_ * support_.count(); }
  int cuts() const { return support_.count(); }
  double rho(int h) const { return rho_[h]; }

  const CVec& x() const { return x_; }
  const CVec& w() const { return w_; }  // weights of  oint f dxi / 2 i pi
  const CVec& J() const { return J_; }
  int cut_of_node(int j) const { return j / nq_; }
  double theta(int j) const { return 2.0 * kPi * (j % nq_) / nq_; }

  // Grid values -> scaled coefficients of the Cauchy projection
  //   Proj[G](x) = sum_h oint_{Gamma_h} G(xi)/(x - xi) dxi/2i pi.
  const CMat& proj() const { return P_; }
  // Scaled coefficients -> values on the grid.
  const CMat& eval() const { return E_; }

  // Row evaluating a coefficient vector (or its derivatives) at an arbitrary
  // point; valid for points on or outside every working circle.
  Eigen::RowVectorXcd row(cplx x, int deriv = 0) const;
  CMat rows(const std::vector<cplx>& xs, int deriv = 0) const;
  // Contribution of the coefficients of cut h alone (valid outside circle h).
  cplx eval_cut(const CVec& coef, int h, cplx x, int deriv = 0) const;
  bool outside_circles(cplx x, double margin = 0.0) const;
  int inside_circle(cplx x) const;  // cut whose circle contains x, or -1

  cplx integrate(const CVec& f) const { return (w_.array() * f.array()).sum(); }
  cplx integrate_cut(const CVec& f, int h) const;
  // Periods oint_{A_h} phi for phi given by scaled coefficients.
  CVec periods(const CVec& coef) const;

  // Laurent coefficients A_m (m = 0..nq/2) of the grid restriction of G to
  // circle h, unscaled in the angle: G = sum A_m rho^{-m} J^m.
  CVec laurent(const CVec& G, int h) const;
  // The part of G holomorphic inside circle h, a_0 + sum_m a_m (J^m + J^-m),
  // evaluated at a point with |J_h(x)| <= rho_h.
  cplx inner(const CVec& A, int h, cplx x) const;

 private:
  Support support_;
  std::vector<double> rho_;
  int nq_, kmax_;
  CVec x_, w_, J_;
  CMat P_, E_;
};

std::shared_ptr<Grid> make_grid(const ContourFamily& fam, int level, int nq);

}  // namespace rbody
