#pragma once

#include <memory>
#include <vector>

#include "rbody/analytic.hpp"
#include "rbody/equilibrium.hpp"

namespace rbody {

// Linear operators around an equilibrium measure, discretized on the working
// grid. Square matrices act on scaled out-coefficients (see Grid).
//
//   O[phi](x)  = (2/beta) sum_comp w/(a-2)! oint d_x T_a(x, xi, ...) phi(xi) prod W_eq
//   K[phi]     = Proj[sigma_hd ((2W - V') phi + W O[phi])] / sigma_hd
//   L[phi]     = Proj[sigma^{1/2} O[phi] / 2] / sigma^{1/2}
//   P[phi]     = Pol[sigma^{1/2} phi] / sigma^{1/2}
//   I[psi]     = Proj[sigma_hd psi / M],   I^{-1}[phi] = Proj[M phi / sigma_hd]
//
// so that id + L - P = sigma^{-1/2} I K.
class OperatorSet {
 public:
  OperatorSet(std::shared_ptr<const EquilibriumMeasure> eq, const RBodyPotential& T);

  const EquilibriumMeasure& eq() const { return *eq_; }
  std::shared_ptr<const EquilibriumMeasure> eq_ptr() const { return eq_; }
  std::shared_ptr<const Grid> grid() const { return eq_->grid; }
  const RBodyPotential& potential() const { return T_; }
  int node_segment(int j) const { return seg_[j]; }
  const std::vector<int>& node_segments() const { return seg_; }

  const CMat& O() const { return O_; }  // grid values -> grid values
  const CMat& K() const { return K_; }
  const CMat& L() const { return L_; }
  const CMat& P() const { return P_; }
  const CMat& I() const { return I_; }
  const CMat& Iinv() const { return Iinv_; }
  const CMat& Pi() const { return Pi_; }          // period rows, one per cut
  const CMat& p_basis() const { return pb_; }     // columns: p_h / sigma^{1/2}
  double p_basis_condition() const { return pcond_; }

  // Multiply grid values by 1/sigma^{1/2} and project.
  CVec over_sqrt_sigma(const CVec& coef) const;

  // Bordered Fredholm system on C^{g+1} + coefficients:
  //   (v, phi) -> (-v + Pi phi, (L - P) phi + sigma^{-1/2} sum v_h p_h)
  const CMat& N() const { return N_; }
  cplx det_id_plus_N() const { return det_; }
  double condition() const;  // 2-norm condition number of id + N

  // Solve (id + N)(v, phi) = (top, bottom); returns (v, phi) stacked.
  CVec solve_bordered(const CVec& top, const CVec& bottom) const;
  // Solution of K phi = 0 with Pi phi = eta (derivative of W_eq along filling fractions).
  CVec mass_derivative(const CVec& eta) const;
  // Solution of K phi = psi with Pi phi = 0.
  CVec invert_K(const CVec& psi) const;
  CMat invert_K(const CMat& psi) const;  // column-wise
  // Relative residual of the last factorization check (testing aid).
  double factorization_residual(const CVec& phi) const;

 private:
  std::shared_ptr<const EquilibriumMeasure> eq_;
  RBodyPotential T_;
  std::vector<int> seg_;
  CMat O_, K_, L_, P_, I_, Iinv_, Pi_, pb_, N_;
  Eigen::FullPivLU<CMat> lu_;
  double pcond_ = 0.0;
  mutable double cond_ = 0.0;
  cplx det_ = 0.0;
};

// O on grid values for an arbitrary potential (used for interpolated families).
CMat interaction_matrix(const EquilibriumMeasure& eq, const RBodyPotential& T, const std::vector<int>& node_seg);

// Random rational test function with poles strictly inside the working circles.
CVec random_rational_coefficients(const Grid& g, unsigned seed, int poles = 3);

}  // namespace rbody
