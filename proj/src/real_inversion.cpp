#include "rbody/real_inversion.hpp"

#include <cmath>
#include <sstream>

#include "rbody/quadrature.hpp"

namespace rbody {

namespace {

double fact(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double cheb(int n, double t) {
  if (std::abs(t) <= 1.0) return std::cos(n * std::acos(t));
  double p0 = 1.0, p1 = t;
  if (n == 0) return 1.0;
  for (int k = 1; k < n; ++k) {
    double p2 = 2.0 * t * p1 - p0;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double domain_length(const Domain& A) {
  double s = 0.0;
  for (const auto& g : A.segments) s += g.length();
  return s;
}

}  // namespace

TwoPoint tau_from_potential(const RBodyPotential& T, const Domain& A, const EquilibriumMeasure* eq) {
  struct Sep {
    double f;
    Poly p, q;
  };
  std::vector<Sep> seps;
  std::vector<std::pair<std::shared_ptr<const Kernel2>, double>> ks;
  for (const auto& c : T.components()) {
    const int a = c.arity;
    if (a < 2) continue;
    const double fw = c.weight / fact(a - 2);
    if (c.kernel) {
      ks.push_back({c.kernel, fw});
    } else if (c.func) {
      throw config_error("one-body function component with arity >= 2");
    } else {
      for (const auto& t : c.sep) {
        double prod = fw * t.c;
        for (int k = 2; k < a; ++k) {
          if (!eq) throw config_error("two-point reduction of arity >= 3 needs the equilibrium measure");
          prod *= eq->density.integrate([&](double x) { return t.f[k](x); });
        }
        seps.push_back({prod, t.f[0], t.f[1]});
      }
    }
  }
  if (seps.empty() && ks.empty()) return nullptr;
  return [seps, ks, A](double x, double y) {
    double s = 0.0;
    for (const auto& t : seps) s += t.f * t.p(x) * t.q(y);
    for (const auto& [k, w] : ks) s += w * k->value(x, y, A.nearest_segment(x), A.nearest_segment(y)).real();
    return s;
  };
}

double EdgeDensity::operator()(double x) const {
  int h = A.segment_of(x);
  if (h < 0) return 0.0;
  const auto& s = A.segments[h];
  const double d = 0.5 * s.length(), t = (x - s.mid()) / d;
  double v = 0.0;
  for (int n = 0; n < c[h].size(); ++n) v += c[h](n) * cheb(n, t);
  return v / (d * std::sqrt(std::max(1e-300, 1.0 - t * t)));
}

TbarOperator::TbarOperator(Domain A, double beta, TwoPoint tau) : A_(std::move(A)), beta_(beta), tau_(std::move(tau)) {
  if (!(beta_ > 0.0)) throw config_error("beta must be positive");
}

// int ln|x - y| T_n(t) / (d sqrt(1 - t^2)) dy over segment h
double TbarOperator::log_part(int h, int n, double x) const {
  const auto& sg = A_.segments[h];
  const double d = 0.5 * sg.length(), s = (x - sg.mid()) / d;
  double v;
  if (std::abs(s) <= 1.0) {
    v = n == 0 ? -kPi * std::log(2.0) : -kPi * cheb(n, s) / n;
  } else {
    const double J = s + std::copysign(std::sqrt(s * s - 1.0), s);
    v = n == 0 ? kPi * std::log(std::abs(J) / 2.0) : -(kPi / n) * std::pow(J, -n);
  }
  if (n == 0) v += kPi * std::log(d);
  return v;
}

double TbarOperator::tau_part(int h, int n, double x) const {
  if (!tau_) return 0.0;
  const auto& sg = A_.segments[h];
  const double d = 0.5 * sg.length();
  double s = 0.0;
  for (int q = 0; q < quad_; ++q) {
    double th = kPi * (q + 0.5) / quad_;
    s += tau_(x, sg.mid() + d * std::cos(th)) * std::cos(n * th);
  }
  return s * kPi / quad_;
}

double TbarOperator::basis_L(int h, int n, double x) const { return beta_ * log_part(h, n, x) + tau_part(h, n, x); }

double TbarOperator::L(const EdgeDensity& phi, double x) const {
  double v = 0.0;
  for (int h = 0; h < A_.count(); ++h)
    for (int n = 0; n < phi.c[h].size(); ++n)
      if (phi.c[h](n) != 0.0) v += phi.c[h](n) * basis_L(h, n, x);
  return v;
}

double TbarOperator::mean_L(const EdgeDensity& phi) const {
  QuadRule g = gauss_legendre(64);
  double s = 0.0;
  for (const auto& sg : A_.segments)
    for (size_t q = 0; q < g.x.size(); ++q) s += 0.5 * sg.length() * g.w[q] * L(phi, sg.mid() + 0.5 * sg.length() * g.x[q]);
  return s / domain_length(A_);
}

InversionResult invert_T_real(const TbarOperator& op, const std::function<double(double)>& f, double tol,
                              int max_degree) {
  const Domain& A = op.domain();
  const int G = A.count();
  QuadRule gl = gauss_legendre(64);
  double fm = 0.0;
  for (const auto& sg : A.segments)
    for (size_t q = 0; q < gl.x.size(); ++q) fm += 0.5 * sg.length() * gl.w[q] * f(sg.mid() + 0.5 * sg.length() * gl.x[q]);
  fm /= domain_length(A);

  InversionResult best;
  for (int deg = 16; deg <= max_degree; deg *= 2) {
    const int nb = deg + 1, M = 2 * nb;
    const int unknowns = G * nb + 1;
    RMat S = RMat::Zero(G * M + 1, unknowns);
    RVec rhs = RVec::Zero(G * M + 1);
    int row = 0;
    for (int h = 0; h < G; ++h) {
      const auto& sg = A.segments[h];
      for (int m = 0; m < M; ++m, ++row) {
        double x = sg.mid() - 0.5 * sg.length() * std::cos(kPi * m / (M - 1));
        for (int k = 0; k < G; ++k)
          for (int n = 0; n < nb; ++n) S(row, k * nb + n) = -op.basis_L(k, n, x);
        S(row, G * nb) = 1.0;
        rhs(row) = f(x) - fm;
      }
    }
    for (int h = 0; h < G; ++h) S(row, h * nb) = kPi;  // zero total mass
    RVec sol = S.colPivHouseholderQr().solve(rhs);

    InversionResult r;
    r.degree = deg;
    r.mean_removed = fm;
    r.constant = sol(G * nb);
    r.phi.A = A;
    for (int h = 0; h < G; ++h) r.phi.c.push_back(sol.segment(h * nb, nb));
    const double ml = op.mean_L(r.phi);
    for (const auto& sg : A.segments)
      for (int m = 0; m < 97; ++m) {
        double x = sg.lo + sg.length() * (m + 0.5) / 97.0;
        r.residual = std::max(r.residual, std::abs(-op.L(r.phi, x) + ml - (f(x) - fm)));
      }
    best = r;
    if (r.residual <= tol) return r;
  }
  std::ostringstream os;
  os << "real-line inversion: reconstruction residual " << best.residual << " above " << tol;
  throw numerical_error(os.str());
}

}  // namespace rbody
