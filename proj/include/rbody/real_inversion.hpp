#pragma once

#include <functional>
#include <vector>

#include "rbody/common.hpp"
#include "rbody/domain.hpp"
#include "rbody/equilibrium.hpp"

namespace rbody {

using TwoPoint = std::function<double(double, double)>;

// tau(x, y) = sum_comp w/(a-2)! int T_a(x, y, .) dmu^{a-2}; eq is needed only for arity >= 3.
TwoPoint tau_from_potential(const RBodyPotential& T, const Domain& A, const EquilibriumMeasure* eq = nullptr);

// Density on A with inverse-square-root edges:
//   phi(x) = sum_n c_{h,n} T_n(t) / (d_h sqrt(1 - t^2)),  x = c_h + d_h t on segment h.
struct EdgeDensity {
  Domain A;
  std::vector<RVec> c;  // per segment

  double operator()(double x) const;
  double mass(int h) const { return kPi * c[h](0); }
  int degree() const { return c.empty() ? -1 : static_cast<int>(c[0].size()) - 1; }
};

// Tbar[phi](x) = -L[phi](x) + mean_A L[phi],  L[phi](x) = int_A (beta ln|x-y| + tau(x,y)) phi(y) dy.
class TbarOperator {
 public:
  TbarOperator(Domain A, double beta, TwoPoint tau = nullptr);

  const Domain& domain() const { return A_; }
  double beta() const { return beta_; }
  double L(const EdgeDensity& phi, double x) const;
  double mean_L(const EdgeDensity& phi) const;
  double apply(const EdgeDensity& phi, double x) const { return -L(phi, x) + mean_L(phi); }
  // Column of L for a single basis function.
  double basis_L(int h, int n, double x) const;

 private:
  double log_part(int h, int n, double x) const;
  double tau_part(int h, int n, double x) const;

  Domain A_;
  double beta_;
  TwoPoint tau_;
  int quad_ = 160;
};

struct InversionResult {
  EdgeDensity phi;
  double residual = 0.0;      // sup |Tbar[phi] - (f - mean f)| on a check grid
  double mean_removed = 0.0;  // mean_A f
  double constant = 0.0;
  int degree = 0;
};

// Solve Tbar[phi] = f - mean_A f with int_A phi = 0 by Chebyshev collocation;
// the degree is doubled until the check-grid residual is below tol.
InversionResult invert_T_real(const TbarOperator& op, const std::function<double(double)>& f, double tol = 1e-6,
                              int max_degree = 128);

}  // namespace rbody
