#include "rbody/poly.hpp"

#include <algorithm>
#include <cmath>

namespace rbody {

Poly Poly::monomial(int k, double v) {
  std::vector<double> c(k + 1, 0.0);
  c[k] = v;
  return Poly(c);
}

void Poly::trim() {
  while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double Poly::operator()(double x) const {
  double r = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
  return r;
}

cplx Poly::operator()(cplx x) const {
  cplx r = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
  return r;
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly();
  std::vector<double> d(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
  return Poly(d);
}

Poly Poly::antiderivative() const {
  std::vector<double> d(c_.size() + 1, 0.0);
  for (size_t k = 0; k < c_.size(); ++k) d[k + 1] = c_[k] / static_cast<double>(k + 1);
  return Poly(d);
}

Poly Poly::operator+(const Poly& o) const {
  std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
  for (size_t k = 0; k < c_.size(); ++k) r[k] += c_[k];
  for (size_t k = 0; k < o.c_.size(); ++k) r[k] += o.c_[k];
  return Poly(r);
}

Poly Poly::operator-(const Poly& o) const { return *this + o * -1.0; }

Poly Poly::operator*(const Poly& o) const {
  if (c_.empty() || o.c_.empty()) return Poly();
  std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return Poly(r);
}

Poly Poly::operator*(double s) const {
  std::vector<double> r = c_;
  for (auto& v : r) v *= s;
  return Poly(r);
}

Poly sigma_poly(const std::vector<double>& roots) {
  std::vector<double> sorted = roots;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] == sorted[i - 1]) throw domain_error("sigma_poly: duplicate root " + std::to_string(sorted[i]));
  Poly p = Poly::constant(1.0);
  for (double r : roots) p = p * Poly({-r, 1.0});
  return p;
}

// h_n(x, y) for n = 0..nmax
static std::vector<cplx> homogeneous2(cplx x, cplx y, int nmax) {
  std::vector<cplx> h(std::max(nmax + 1, 1));
  cplx yp = 1.0;
  h[0] = 1.0;
  for (int n = 1; n <= nmax; ++n) {
    yp *= y;
    h[n] = x * h[n - 1] + yp;
  }
  return h;
}

cplx divided_diff1(const Poly& p, cplx x, cplx xi) {
  int d = p.degree();
  if (d < 1) return 0.0;
  auto h = homogeneous2(x, xi, d - 1);
  cplx s = 0.0;
  for (int k = 1; k <= d; ++k) s += p.coeff(k) * h[k - 1];
  return s;
}

cplx divided_diff2(const Poly& p, cplx x, cplx xi1, cplx xi2) {
  int d = p.degree();
  if (d < 2) return 0.0;
  auto h2 = homogeneous2(x, xi1, d - 2);
  // h_n(x, xi1, xi2) = h_n(x, xi1) + xi2 * h_{n-1}(x, xi1, xi2)
  std::vector<cplx> h3(d - 1);
  h3[0] = 1.0;
  for (int n = 1; n <= d - 2; ++n) h3[n] = h2[n] + xi2 * h3[n - 1];
  cplx s = 0.0;
  for (int k = 2; k <= d; ++k) s += p.coeff(k) * h3[k - 2];
  return s;
}

cplx divided_diff(const Poly& p, int order, const std::vector<cplx>& pts) {
  if (order == 1) {
    if (pts.size() != 2) throw config_error("divided_diff order 1 needs 2 points");
    return divided_diff1(p, pts[0], pts[1]);
  }
  if (order == 2) {
    if (pts.size() != 3) throw config_error("divided_diff order 2 needs 3 points");
    return divided_diff2(p, pts[0], pts[1], pts[2]);
  }
  throw config_error("divided_diff: order must be 1 or 2");
}

std::vector<double> sqrt_laurent_at_infinity(const std::vector<double>& edges, int count) {
  // prod_e (1 - e z)^{1/2} as a power series in z = 1/x
  std::vector<double> s(count, 0.0);
  s[0] = 1.0;
  for (double e : edges) {
    std::vector<double> b(count, 0.0);  // binomial series of (1 - e z)^{1/2}
    b[0] = 1.0;
    for (int k = 1; k < count; ++k) b[k] = b[k - 1] * (0.5 - (k - 1)) / k * (-e);
    std::vector<double> r(count, 0.0);
    for (int i = 0; i < count; ++i)
      for (int j = 0; i + j < count; ++j) r[i + j] += s[i] * b[j];
    s = r;
  }
  return s;
}

}  // namespace rbody
