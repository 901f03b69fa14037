#pragma once

#include <vector>

#include "rbody/common.hpp"

namespace rbody {

// Real polynomial, ascending coefficients.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<double> c) : c_(std::move(c)) { trim(); }
  static Poly constant(double v) { return Poly({v}); }
  static Poly monomial(int k, double v = 1.0);

  int degree() const { return c_.empty() ? -1 : static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coeffs() const { return c_; }
  double coeff(int k) const { return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : 0.0; }
  bool is_zero() const { return c_.empty(); }

  double operator()(double x) const;
  cplx operator()(cplx x) const;
  Poly derivative() const;
  Poly antiderivative() const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(double s) const;

 private:
  void trim();
  std::vector<double> c_;
};

// Monic polynomial with the given simple roots.
Poly sigma_poly(const std::vector<double>& roots);

// First and second divided differences of p, computed through complete
// homogeneous symmetric polynomials (no cancellation at coincident points).
cplx divided_diff1(const Poly& p, cplx x, cplx xi);
cplx divided_diff2(const Poly& p, cplx x, cplx xi1, cplx xi2);
cplx divided_diff(const Poly& p, int order, const std::vector<cplx>& pts);

// Laurent coefficients s_m (m = g+1, g, ..., g+1-count+1) at infinity of
// prod_e sqrt(x - e) over an even number of edges; s[0] is the leading one.
std::vector<double> sqrt_laurent_at_infinity(const std::vector<double>& edges, int count);

}  // namespace rbody
