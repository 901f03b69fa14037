#include "rbody/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "rbody/common.hpp"

namespace rbody {

QuadRule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw config_error("gauss_jacobi: n must be positive");
  if (alpha <= -1.0 || beta <= -1.0) throw config_error("gauss_jacobi: exponents must exceed -1");
  const double s = alpha + beta;
  Eigen::VectorXd diag(n), off(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) {
    double t = 2.0 * k + s;
    if (k == 0)
      diag[k] = (beta - alpha) / (s + 2.0);
    else
      diag[k] = (beta * beta - alpha * alpha) / (t * (t + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    double t = 2.0 * k + s;
    double b;
    if (k == 1)
      b = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + s) * (2.0 + s) * (3.0 + s));
    else
      b = 4.0 * k * (k + alpha) * (k + beta) * (k + s) / (t * t * (t + 1.0) * (t - 1.0));
    off[k - 1] = std::sqrt(b);
  }
  const double mu0 = std::exp((s + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                              std::lgamma(s + 2.0));
  QuadRule r;
  r.x.resize(n);
  r.w.resize(n);
  if (n == 1) {
    r.x[0] = diag[0];
    r.w[0] = mu0;
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off.head(n - 1), Eigen::ComputeEigenvectors);
  for (int k = 0; k < n; ++k) {
    r.x[k] = es.eigenvalues()[k];
    double v0 = es.eigenvectors()(0, k);
    r.w[k] = mu0 * v0 * v0;
  }
  return r;
}

QuadRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

QuadRule gauss_chebyshev1(int n) {
  QuadRule r;
  r.x.resize(n);
  r.w.assign(n, kPi / n);
  for (int j = 0; j < n; ++j) r.x[j] = std::cos((2.0 * (n - 1 - j) + 1.0) * kPi / (2.0 * n));
  return r;
}

QuadRule map_rule(const QuadRule& r, double a, double b) {
  QuadRule m = r;
  double c = 0.5 * (a + b), d = 0.5 * (b - a);
  for (size_t k = 0; k < r.x.size(); ++k) {
    m.x[k] = c + d * r.x[k];
    m.w[k] = d * r.w[k];
  }
  return m;
}

}  // namespace rbody
