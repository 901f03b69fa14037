#include "rbody/fredholm.hpp"

#include <cmath>

namespace rbody {

CMat nystrom_matrix(const QuadRule& q, const std::function<cplx(double, double)>& k) {
  const int n = static_cast<int>(q.x.size());
  CMat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = q.w[j] * k(q.x[i], q.x[j]);
  return A;
}

cplx fredholm_det_lu(const CMat& A) {
  CMat B = CMat::Identity(A.rows(), A.cols()) + A;
  return Eigen::PartialPivLU<CMat>(B).determinant();
}

cplx fredholm_det_series(const CMat& A, int nmax) {
  std::vector<cplx> tr(nmax + 1), e(nmax + 1);
  CMat P = A;
  for (int i = 1; i <= nmax; ++i) {
    tr[i] = P.trace();
    if (i < nmax) P = P * A;
  }
  e[0] = 1.0;
  cplx det = 1.0;
  for (int n = 1; n <= nmax; ++n) {
    cplx s = 0.0;
    for (int i = 1; i <= n; ++i) s += ((i % 2) ? 1.0 : -1.0) * e[n - i] * tr[i];
    e[n] = s / static_cast<double>(n);
    det += e[n];
  }
  return det;
}

CMat fredholm_resolvent(const CMat& A) {
  const int n = static_cast<int>(A.rows());
  CMat B = CMat::Identity(n, n) + A;
  return CMat::Identity(n, n) - Eigen::PartialPivLU<CMat>(B).inverse();
}

double resolvent_residual(const CMat& A, const CMat& R) {
  const int n = static_cast<int>(A.rows());
  CMat Id = CMat::Identity(n, n);
  return ((Id + A) * (Id - R) - Id).cwiseAbs().maxCoeff();
}

namespace {
double f1(double x) { return std::exp(x); }
double g1(double y) { return std::cos(y); }
double f2(double x) { return x; }
double g2(double y) { return 1.0 + y * y; }
}  // namespace

cplx RankTwoKernel::operator()(double x, double y) const { return a * f1(x) * g1(y) + b * f2(x) * g2(y); }

cplx RankTwoKernel::exact_det() const {
  // det(id + K) = det(I_2 + G), G_ij = coef_j int g_i f_j
  QuadRule q = gauss_legendre(64);
  double m[2][2] = {{0, 0}, {0, 0}};
  for (size_t k = 0; k < q.x.size(); ++k) {
    double x = q.x[k];
    m[0][0] += q.w[k] * g1(x) * f1(x);
    m[0][1] += q.w[k] * g1(x) * f2(x);
    m[1][0] += q.w[k] * g2(x) * f1(x);
    m[1][1] += q.w[k] * g2(x) * f2(x);
  }
  double G00 = 1.0 + a * m[0][0], G01 = b * m[0][1], G10 = a * m[1][0], G11 = 1.0 + b * m[1][1];
  return G00 * G11 - G01 * G10;
}

}  // namespace rbody
