#include "rbody/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rbody {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

class SinhKernel : public Kernel2 {
 public:
  SinhKernel(double beta, double s) : c_(beta * s) {}
  cplx value(cplx x, cplx y, int, int) const override { return c_ * log_sinhc(0.5 * (x - y)); }
  cplx d1(cplx x, cplx y, int, int) const override { return 0.5 * c_ * dlog_sinhc(0.5 * (x - y)); }
  bool in_domain(cplx x, cplx y) const override { return std::abs((x - y).imag()) < 0.9 * kPi; }
  std::string name() const override { return "sinh"; }
  bool translation_invariant() const override { return true; }

 private:
  double c_;
};

class OnKernel : public Kernel2 {
 public:
  OnKernel(double beta, double n) : c_(-0.5 * n * beta) {}
  cplx value(cplx x, cplx y, int, int) const override { return c_ * std::log(x + y); }
  cplx d1(cplx x, cplx y, int, int) const override { return c_ / (x + y); }
  bool in_domain(cplx x, cplx y) const override { return (x + y).real() > 1e-3; }
  std::string name() const override { return "onmodel"; }

 private:
  double c_;
};

class QKernel : public Kernel2 {
 public:
  QKernel(double beta, double q, double s) : beta_(beta * s), q_(q) {
    if (!(q > 0.0 && q < 1.0)) throw config_error("qdeformed: q must lie in (0,1)");
  }
  cplx value(cplx x, cplx y, int, int) const override {
    cplx u = x - y;
    cplx v = beta_ * log_sinhc(0.5 * u);
    cplx eu = std::exp(u), emu = std::exp(-u);
    double qk = q_;
    for (int k = 1; k < 2000; ++k) {
      v += 0.5 * beta_ * (std::log(1.0 - qk * eu) + std::log(1.0 - qk * emu));
      qk *= q_;
      if (qk * std::max(std::abs(eu), std::abs(emu)) < 1e-18) break;
    }
    return v;
  }
  cplx d1(cplx x, cplx y, int, int) const override {
    cplx u = x - y;
    cplx v = 0.5 * beta_ * dlog_sinhc(0.5 * u);
    cplx eu = std::exp(u), emu = std::exp(-u);
    double qk = q_;
    for (int k = 1; k < 2000; ++k) {
      v += 0.5 * beta_ * (-qk * eu / (1.0 - qk * eu) + qk * emu / (1.0 - qk * emu));
      qk *= q_;
      if (qk * std::max(std::abs(eu), std::abs(emu)) < 1e-18) break;
    }
    return v;
  }
  bool in_domain(cplx x, cplx y) const override {
    cplx u = x - y;
    return std::abs(u.real()) < 0.9 * std::log(1.0 / q_) && std::abs(u.imag()) < 0.9 * kPi;
  }
  std::string name() const override { return "qdeformed"; }
  bool translation_invariant() const override { return true; }

 private:
  double beta_, q_;
};

}  // namespace

cplx log_sinhc(cplx z) {
  if (std::abs(z) < 0.2) {
    cplx z2 = z * z;
    // z^2/6 - z^4/180 + z^6/2835 - z^8/37800 + z^10/467775
    return z2 * (1.0 / 6 + z2 * (-1.0 / 180 + z2 * (1.0 / 2835 + z2 * (-1.0 / 37800 + z2 * (1.0 / 467775)))));
  }
  return std::log(std::sinh(z) / z);
}

cplx dlog_sinhc(cplx z) {
  if (std::abs(z) < 0.2) {
    cplx z2 = z * z;
    // coth z - 1/z = z/3 - z^3/45 + 2z^5/945 - z^7/4725 + 2z^9/93555
    return z * (1.0 / 3 + z2 * (-1.0 / 45 + z2 * (2.0 / 945 + z2 * (-1.0 / 4725 + z2 * (2.0 / 93555)))));
  }
  return std::cosh(z) / std::sinh(z) - 1.0 / z;
}

cplx Component::value(const cplx* x, const int* seg) const {
  if (func) return weight * func->value(x[0], seg ? seg[0] : -1);
  if (kernel) return weight * kernel->value(x[0], x[1], seg ? seg[0] : -1, seg ? seg[1] : -1);
  cplx s = 0.0;
  for (const auto& t : sep) {
    cplx p = t.c;
    for (int j = 0; j < arity; ++j) p *= t.f[j](x[j]);
    s += p;
  }
  return weight * s;
}

cplx Component::d1(const cplx* x, const int* seg) const {
  if (func) return weight * func->deriv(x[0], seg ? seg[0] : -1);
  if (kernel) return weight * kernel->d1(x[0], x[1], seg ? seg[0] : -1, seg ? seg[1] : -1);
  cplx s = 0.0;
  for (const auto& t : sep) {
    cplx p = t.c * t.f[0].derivative()(x[0]);
    for (int j = 1; j < arity; ++j) p *= t.f[j](x[j]);
    s += p;
  }
  return weight * s;
}

bool Component::in_domain(const cplx* x) const {
  if (kernel) return kernel->in_domain(x[0], x[1]);
  return true;
}

Component separable_component(int arity, const std::vector<SepTerm>& raw, double weight) {
  if (arity < 1) throw config_error("component arity must be >= 1");
  Component c;
  c.arity = arity;
  c.weight = weight;
  std::vector<int> perm(arity);
  double nf = factorial(arity);
  for (const auto& t : raw) {
    if (static_cast<int>(t.f.size()) != arity) throw config_error("separable term has wrong number of factors");
    std::iota(perm.begin(), perm.end(), 0);
    do {
      SepTerm s;
      s.c = t.c / nf;
      for (int j = 0; j < arity; ++j) s.f.push_back(t.f[perm[j]]);
      c.sep.push_back(s);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return c;
}

Component one_body_polynomial(const Poly& p, double weight) {
  SepTerm t;
  t.c = 1.0;
  t.f = {p};
  return separable_component(1, {t}, weight);
}

Component kernel_component(std::shared_ptr<const Kernel2> k, double weight) {
  Component c;
  c.arity = 2;
  c.weight = weight;
  c.kernel = std::move(k);
  return c;
}

Component func_component(std::shared_ptr<const Func1> f, double weight) {
  Component c;
  c.arity = 1;
  c.weight = weight;
  c.func = std::move(f);
  return c;
}

std::shared_ptr<const Kernel2> sinh_kernel(double beta, double strength) {
  return std::make_shared<SinhKernel>(beta, strength);
}
std::shared_ptr<const Kernel2> onmodel_kernel(double beta, double n) { return std::make_shared<OnKernel>(beta, n); }
std::shared_ptr<const Kernel2> qdeformed_kernel(double beta, double q, double strength) {
  return std::make_shared<QKernel>(beta, q, strength);
}

RBodyPotential::RBodyPotential(std::vector<Component> comps) : comps_(std::move(comps)) {}

int RBodyPotential::r() const {
  int r = 1;
  for (const auto& c : comps_) r = std::max(r, c.arity);
  return r;
}

void RBodyPotential::add(Component c) { comps_.push_back(std::move(c)); }

RBodyPotential RBodyPotential::scaled(double s) const {
  RBodyPotential p = *this;
  for (auto& c : p.comps_) c.weight *= s;
  return p;
}

bool RBodyPotential::has_kernel() const {
  for (const auto& c : comps_)
    if (c.kernel) return true;
  return false;
}

int RBodyPotential::max_poly_degree() const {
  int d = 0;
  for (const auto& c : comps_)
    for (const auto& t : c.sep)
      for (const auto& f : t.f) d = std::max(d, f.degree());
  return d;
}

cplx RBodyPotential::eval(const std::vector<cplx>& pts, bool derivative) const {
  const int r = static_cast<int>(pts.size());
  if (r < this->r()) throw config_error("eval_potential: need at least r arguments");
  cplx total = 0.0;
  for (const auto& c : comps_) {
    const int a = c.arity;
    if (c.kernel)
      for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
          if (!c.kernel->in_domain(pts[i], pts[j]))
            throw domain_error("eval_potential: point outside the analyticity neighbourhood of " + c.kernel->name());
    double pad = factorial(r - a);
    // subsets J of size a; for the derivative only subsets containing slot 0 count
    std::vector<int> sel(r, 0);
    std::fill(sel.begin(), sel.begin() + a, 1);
    std::sort(sel.begin(), sel.end(), std::greater<int>());
    do {
      std::vector<cplx> x;
      for (int j = 0; j < r; ++j)
        if (sel[j]) x.push_back(pts[j]);
      if (derivative) {
        if (sel[0]) total += pad * c.d1(x.data());
      } else {
        total += pad * c.value(x.data());
      }
    } while (std::prev_permutation(sel.begin(), sel.end()));
  }
  return total;
}

cplx eval_potential(const RBodyPotential& T, const std::vector<cplx>& pts, bool derivative) {
  return T.eval(pts, derivative);
}

std::string RBodyPotential::describe() const {
  std::ostringstream os;
  os << "r=" << r() << " components=" << comps_.size();
  for (const auto& c : comps_) {
    os << " [arity " << c.arity << ", w=" << c.weight << ", ";
    if (c.kernel)
      os << c.kernel->name();
    else if (c.func)
      os << c.func->name();
    else
      os << c.sep.size() << " sep terms";
    os << "]";
  }
  return os.str();
}

}  // namespace rbody
