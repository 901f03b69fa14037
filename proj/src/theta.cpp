#include "rbody/theta.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace rbody {

ThetaLattice theta_lattice(const ThetaParams& p) {
  const int g = static_cast<int>(p.T.rows());
  if (p.T.cols() != g || p.gamma.size() != g || p.v.size() != g) throw config_error("theta: dimension mismatch");
  ThetaLattice lat;
  if (g == 0) {
    lat.points.push_back(RVec());
    return lat;
  }
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (p.T + p.T.transpose()));
  lat.lambda_min = es.eigenvalues()(0);
  const double lmax = es.eigenvalues()(g - 1);
  if (!(lat.lambda_min > 0.0)) throw numerical_error("theta: T is not positive definite");
  RVec c = p.T.ldlt().solve(RVec(p.v.real()));
  // tail of sum exp(-lambda/2 |x - c|^2) outside radius R, counted by unit shells
  const double lead = std::exp(-lmax * g / 8.0);
  auto tail = [&](double R) {
    double s = 0.0;
    for (int n = static_cast<int>(std::floor(R)); n < R + 200; ++n)
      s += std::pow(2.0 * n + 3.0, g) * std::exp(-0.5 * lat.lambda_min * n * n);
    return s / lead;
  };
  double R = 1.0;
  while (tail(R) > p.tol) R += 0.5;
  lat.radius = R;
  lat.tail_bound = tail(R);
  std::vector<long long> lo(g), hi(g);
  for (int i = 0; i < g; ++i) {
    lo[i] = static_cast<long long>(std::ceil(c[i] - R - p.gamma[i]));
    hi[i] = static_cast<long long>(std::floor(c[i] + R - p.gamma[i]));
  }
  std::vector<long long> m(lo);
  while (true) {
    RVec x(g);
    for (int i = 0; i < g; ++i) x[i] = m[i] + p.gamma[i];
    if ((x - c).norm() <= R) lat.points.push_back(x);
    int i = 0;
    while (i < g && ++m[i] > hi[i]) {
      m[i] = lo[i];
      ++i;
    }
    if (i == g) break;
  }
  return lat;
}

cplx theta_weighted(const ThetaParams& p, const ThetaLattice& lat, const std::function<cplx(const RVec&)>& poly) {
  cplx s = 0.0;
  for (const RVec& x : lat.points) {
    if (x.size() == 0) {
      s += poly(x);
      continue;
    }
    cplx e = -0.5 * x.dot(p.T * x) + (p.v.transpose() * x.cast<cplx>())(0);
    s += std::exp(e) * poly(x);
  }
  return s;
}

cplx theta(const ThetaParams& p, const ThetaLattice& lat) {
  return theta_weighted(p, lat, [](const RVec&) { return cplx(1.0); });
}

cplx theta(const ThetaParams& p) { return theta(p, theta_lattice(p)); }

cplx theta_grad(const ThetaParams& p, const std::vector<int>& dirs) {
  ThetaLattice lat = theta_lattice(p);
  return theta_weighted(p, lat, [&](const RVec& x) {
    double f = 1.0;
    for (int d : dirs) f *= x[d];
    return cplx(f);
  });
}

Rational::Rational(long long a, long long b) {
  if (b == 0) throw numerical_error("rational with zero denominator");
  if (b < 0) a = -a, b = -b;
  long long g = std::gcd(a < 0 ? -a : a, b);
  if (g == 0) g = 1;
  p = a / g;
  q = b / g;
}

std::string Rational::str() const {
  std::ostringstream os;
  os << p;
  if (q != 1) os << "/" << q;
  return os.str();
}

Rational Rational::operator+(const Rational& o) const { return Rational(p * o.q + o.p * q, q * o.q); }
Rational Rational::operator-(const Rational& o) const { return Rational(p * o.q - o.p * q, q * o.q); }
Rational Rational::operator*(const Rational& o) const { return Rational(p * o.p, q * o.q); }
Rational Rational::operator/(const Rational& o) const { return Rational(p * o.q, q * o.p); }

EdgeClass edge_class(const Cut& c) {
  switch (c.hard_count()) {
    case 0: return EdgeClass::SoftSoft;
    case 1: return EdgeClass::SoftHard;
    default: return EdgeClass::HardHard;
  }
}

Rational gamma_exponent(EdgeClass e, const Rational& beta) {
  Rational sym = beta / Rational(2) + Rational(2) / beta;
  switch (e) {
    case EdgeClass::SoftSoft: return (Rational(3) + sym) / Rational(12);
    case EdgeClass::SoftHard: return sym / Rational(6);
    default: return (Rational(-1) + sym) / Rational(4);
  }
}

double gamma_exponent(EdgeClass e, double beta) {
  double sym = beta / 2.0 + 2.0 / beta;
  switch (e) {
    case EdgeClass::SoftSoft: return (3.0 + sym) / 12.0;
    case EdgeClass::SoftHard: return sym / 6.0;
    default: return (-1.0 + sym) / 4.0;
  }
}

Rational gamma_exponent(const std::vector<EdgeClass>& e, const Rational& beta) {
  Rational s(0);
  for (auto c : e) s = s + gamma_exponent(c, beta);
  return s;
}

double gamma_exponent(const std::vector<EdgeClass>& e, double beta) {
  double s = 0.0;
  for (auto c : e) s += gamma_exponent(c, beta);
  return s;
}

bool rational_beta(double beta, Rational& out) {
  for (long long q = 1; q <= 64; ++q) {
    double pq = beta * q;
    long long pn = std::llround(pq);
    if (std::abs(pq - pn) < 1e-12 * std::max(1.0, std::abs(pq))) {
      out = Rational(pn, q);
      return true;
    }
  }
  return false;
}

}  // namespace rbody
