#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rbody/common.hpp"
#include "rbody/support.hpp"

namespace rbody {

// Theta_gamma(v | T) = sum_{m in Z^g} exp(-1/2 (m+gamma).T(m+gamma) + v.(m+gamma)),
// T symmetric positive definite.
struct ThetaParams {
  RVec gamma;
  CVec v;
  RMat T;
  double tol = 1e-12;  // bound on the neglected tail relative to the leading term
};

struct ThetaLattice {
  std::vector<RVec> points;  // m + gamma with |m + gamma| <= radius
  double radius = 0.0;
  double tail_bound = 0.0;
  double lambda_min = 0.0;
};

ThetaLattice theta_lattice(const ThetaParams& p);
cplx theta(const ThetaParams& p);
cplx theta(const ThetaParams& p, const ThetaLattice& lat);
// d^k Theta / dv_{i1} ... dv_{ik}
cplx theta_grad(const ThetaParams& p, const std::vector<int>& dirs);
// Sum of exp(...) * poly(m + gamma) over the lattice.
cplx theta_weighted(const ThetaParams& p, const ThetaLattice& lat, const std::function<cplx(const RVec&)>& poly);

struct Rational {
  long long p = 0, q = 1;
  Rational() = default;
  Rational(long long a, long long b = 1);
  double value() const { return static_cast<double>(p) / static_cast<double>(q); }
  std::string str() const;
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  bool operator==(const Rational& o) const { return p == o.p && q == o.q; }
};

enum class EdgeClass { SoftSoft, SoftHard, HardHard };

EdgeClass edge_class(const Cut& c);
// Exponent of N contributed by one cut.
Rational gamma_exponent(EdgeClass e, const Rational& beta);
double gamma_exponent(EdgeClass e, double beta);
Rational gamma_exponent(const std::vector<EdgeClass>& e, const Rational& beta);
double gamma_exponent(const std::vector<EdgeClass>& e, double beta);
// beta as an exact rational when it is one with a small denominator.
bool rational_beta(double beta, Rational& out);

}  // namespace rbody
