#pragma once

#include <functional>
#include <vector>

#include "rbody/common.hpp"
#include "rbody/quadrature.hpp"

namespace rbody {

// Nystrom matrix A_ij = w_j k(x_i, x_j) of an integral operator.
CMat nystrom_matrix(const QuadRule& q, const std::function<cplx(double, double)>& k);

// det(id + A) by LU.
cplx fredholm_det_lu(const CMat& A);
// Fredholm series sum_{n <= nmax} (1/n!) sum of n x n principal minors, with
// the minors summed through the trace recursion e_n = (1/n) sum (-1)^{i-1} e_{n-i} tr A^i.
cplx fredholm_det_series(const CMat& A, int nmax);
// R = id - (id + A)^{-1}, so that (id + A)(id - R) = id.
CMat fredholm_resolvent(const CMat& A);
double resolvent_residual(const CMat& A, const CMat& R);

// Rank-two test kernel k(x,y) = a f1(x) g1(y) + b f2(x) g2(y) on [-1,1].
struct RankTwoKernel {
  double a = 0.3, b = -0.2;
  cplx operator()(double x, double y) const;
  // exact det(id + K) from the 2x2 Gram matrix
  cplx exact_det() const;
};

}  // namespace rbody
