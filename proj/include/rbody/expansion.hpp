#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rbody/operators.hpp"

namespace rbody {

// Building blocks of the loop-equation sources, acting on grid data.
class SourceKit {
 public:
  explicit SourceKit(std::shared_ptr<const OperatorSet> ops);

  const OperatorSet& ops() const { return *ops_; }

  // (2/beta) oint sigma_hd(xi)/sigma_hd(x1) phi(xi) / ((x1 - xi)(x2 - xi)^2), grid x grid
  CMat D1(const CVec& phi_grid) const;
  // f(x,x) - oint oint sigma_hd^{[2]}(x; xi1, xi2)/sigma_hd(x) f(xi1, xi2), returned as coefficients
  CVec D2(const CMat& f_grid) const;
  // oint sigma_hd^{[2]}(x; xi, xi)/sigma_hd(x) phi(xi) on the grid
  CVec diag_sigma_term(const CVec& phi_grid) const;
  // sum_comp (2/beta) w/(a-1)! oint sigma_hd(xi1)/sigma_hd(x) d_1 T_a / (x - xi1) F, with F the
  // sum over slot pairs of B(xi_i, xi_j) times W_eq in the other slots; coefficients.
  CVec pair_term(const CMat& B_grid) const;
  // grid values of the derivative of a function given by coefficients
  CVec derivative_grid(const CVec& coef) const;

 private:
  std::shared_ptr<const OperatorSet> ops_;
  CMat E1_, E2_;
  std::vector<double> s_;  // sigma_hd coefficients
  CVec Wg_;
};

// Coefficients W_n^{[k]} of the 1/N expansion of the correlators with fixed
// filling fractions: W_1 = N W_eq + W_1^{[0]} + W_1^{[1]}/N + ...,
// W_2 = W_2^{[0]} + ... (W_n^{[k]} = 0 for k < n - 2).
struct CorrelatorCache {
  std::shared_ptr<const OperatorSet> ops;
  int kmax = 1;                 // highest order computed for W_1
  AnalyticFunction Weq;         // W_1^{[-1]}
  std::vector<AnalyticFunction> W1;  // W1[k], k = 0..kmax
  AnalyticFunction2 W20;
  double symmetry_defect = 0.0;
  double max_period = 0.0;
  std::vector<std::string> notes;

  cplx W1_at(int k, cplx x) const;
  cplx W2_at(int k, cplx x1, cplx x2) const;
  // Generic accessor; exact zero below the leading order k = n - 2.
  cplx Wn_at(int n, int k, const std::vector<cplx>& x) const;
  bool available(int n, int k) const;
};

// kmax = highest k for W_1 (0 or 1); W_2^{[0]} is always built.
CorrelatorCache expand_correlators(std::shared_ptr<const OperatorSet> ops, int kmax = 1);

// Closed-form connected two-point function at leading order for beta = 2,
// one soft-edged cut [a, b]; independent of the recursion.
cplx universal_two_point(double a, double b, cplx x1, cplx x2);

}  // namespace rbody
