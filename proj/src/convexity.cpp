#include "rbody/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "rbody/quadrature.hpp"

namespace rbody {

namespace {

constexpr double kEuler = 0.57721566490153286061;

double fact(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

struct Nodes {
  std::vector<double> x, w;
  std::vector<int> seg;
};

Nodes composite(const Domain& A, int panels, int order) {
  Nodes n;
  QuadRule g = gauss_legendre(order);
  for (int h = 0; h < A.count(); ++h) {
    const auto& s = A.segments[h];
    const double step = s.length() / panels;
    for (int p = 0; p < panels; ++p) {
      const double a = s.lo + p * step;
      for (size_t q = 0; q < g.x.size(); ++q) {
        n.x.push_back(a + 0.5 * step * (g.x[q] + 1.0));
        n.w.push_back(0.5 * step * g.w[q]);
        n.seg.push_back(h);
      }
    }
  }
  return n;
}

double diameter(const Domain& A) { return A.hi() - A.lo(); }

double legendre(int n, double t) {
  double p0 = 1.0, p1 = t;
  if (n == 0) return p0;
  for (int k = 1; k < n; ++k) {
    double p2 = ((2 * k + 1) * t * p1 - k * p0) / (k + 1);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// sum_comp w K(z, 0) over translation-invariant two-body kernels
std::function<double(double)> kernel_profile(const RBodyPotential& T) {
  std::vector<std::pair<std::shared_ptr<const Kernel2>, double>> ks;
  for (const auto& c : T.components()) {
    if (c.arity == 1) continue;
    if (c.arity == 2 && c.kernel && c.kernel->translation_invariant()) {
      ks.push_back({c.kernel, c.weight});
      continue;
    }
    throw config_error("fourier convexity mode requires T(x,y) = u(x-y) + (v(x)+v(y))/2 with an analytic kernel u");
  }
  return [ks](double z) {
    double s = 0.0;
    for (const auto& [k, w] : ks) s += w * k->value(z, 0.0, -1, -1).real();
    return s;
  };
}

// 2 int_0^L (u(z) - u(L)) cos(kz) dz
double truncated_cosine(const std::function<double(double)>& u, double L, double k) {
  const double uL = u(L);
  const int panels = std::max(16, static_cast<int>(k * L / kPi * 2.0) + 1);
  QuadRule g = gauss_legendre(10);
  const double step = L / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p)
    for (size_t q = 0; q < g.x.size(); ++q) {
      double z = p * step + 0.5 * step * (g.x[q] + 1.0);
      s += 0.5 * step * g.w[q] * (u(z) - uL) * std::cos(k * z);
    }
  return 2.0 * s;
}

}  // namespace

double fourier_symbol(const RBodyPotential& T, const Domain& A, double beta, double k) {
  auto u = kernel_profile(T);
  return beta * kPi - std::abs(k) * truncated_cosine(u, diameter(A), std::abs(k));
}

double coulomb_form(const Density& nu, const Domain& A, double beta) {
  const Nodes n = composite(A, 64, 16);
  std::vector<double> f(n.x.size());
  for (size_t i = 0; i < f.size(); ++i) f[i] = n.w[i] * nu(n.x[i]);
  auto hat2 = [&](double k) {
    double re = 0.0, im = 0.0;
    for (size_t i = 0; i < f.size(); ++i) {
      re += f[i] * std::cos(k * n.x[i]);
      im += f[i] * std::sin(k * n.x[i]);
    }
    return re * re + im * im;
  };
  const double D = diameter(A);
  const double dk = kPi / (2.0 * D), K = 500.0 / D;
  const int panels = static_cast<int>(std::ceil(K / dk));
  QuadRule g = gauss_legendre(8);
  double s = 0.0, tail_acc = 0.0;
  int tail_n = 0;
  for (int p = 0; p < panels; ++p)
    for (size_t q = 0; q < g.x.size(); ++q) {
      double k = p * dk + 0.5 * dk * (g.x[q] + 1.0);
      double h = hat2(k);
      s += 0.5 * dk * g.w[q] * h / k;
      if (p >= panels * 9 / 10) {
        tail_acc += h * k * k;
        ++tail_n;
      }
    }
  // |nu^|^2 ~ a / k^2 beyond the scan
  const double Kend = panels * dk;
  s += (tail_n ? tail_acc / tail_n : 0.0) / (2.0 * Kend * Kend);
  return beta * s;
}

double interaction_form(const Density& nu, const Domain& A, const RBodyPotential& T, const EquilibriumMeasure* eq) {
  const Nodes n = composite(A, 16, 12);
  const size_t M = n.x.size();
  std::vector<double> f(M);
  for (size_t i = 0; i < M; ++i) f[i] = n.w[i] * nu(n.x[i]);
  auto integ = [&](const Poly& p) {
    double s = 0.0;
    for (size_t i = 0; i < M; ++i) s += f[i] * p(n.x[i]);
    return s;
  };
  double q = 0.0;
  for (const auto& c : T.components()) {
    const int a = c.arity;
    if (a < 2) continue;
    const double fw = c.weight / fact(a - 2);
    if (c.kernel) {
      if (a != 2) throw config_error("kernel components must be two-body");
      double s = 0.0;
      for (size_t i = 0; i < M; ++i)
        for (size_t j = 0; j < M; ++j) s += f[i] * f[j] * c.kernel->value(n.x[i], n.x[j], n.seg[i], n.seg[j]).real();
      q -= fw * s;
    } else if (c.func) {
      throw config_error("one-body function component with arity >= 2");
    } else {
      for (const auto& t : c.sep) {
        double prod = t.c * integ(t.f[0]) * integ(t.f[1]);
        for (int k = 2; k < a; ++k) {
          if (!eq) throw config_error("convexity: interactions of arity >= 3 need the equilibrium measure");
          prod *= eq->density.integrate([&](double x) { return t.f[k](x); });
        }
        q -= fw * prod;
      }
    }
  }
  return q;
}

double quadratic_form(const Density& nu, const Domain& A, const RBodyPotential& T, double beta,
                      const EquilibriumMeasure* eq) {
  return coulomb_form(nu, A, beta) + interaction_form(nu, A, T, eq);
}

Density random_zero_mass_density(const Domain& A, int degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> c(A.count(), std::vector<double>(degree + 1));
  for (auto& v : c)
    for (int n = 0; n <= degree; ++n) v[n] = g(rng) / (n + 1);
  // mass of (1 - t^2) P_n(t) on a segment of half-length d: d * (4/3, 0, -4/15, 0, ...); compute by quadrature
  QuadRule q = gauss_legendre(degree + 4);
  double mass = 0.0;
  for (int h = 0; h < A.count(); ++h) {
    const double d = 0.5 * A.segments[h].length();
    for (size_t k = 0; k < q.x.size(); ++k) {
      double t = q.x[k], s = 0.0;
      for (int n = 0; n <= degree; ++n) s += c[h][n] * legendre(n, t);
      mass += q.w[k] * d * (1.0 - t * t) * s;
    }
  }
  const double d0 = 0.5 * A.segments[0].length();
  c[0][0] -= mass / (d0 * 4.0 / 3.0);
  return [A, c, degree](double x) {
    int h = A.segment_of(x);
    if (h < 0) return 0.0;
    const auto& s = A.segments[h];
    double t = (x - s.mid()) / (0.5 * s.length()), v = 0.0;
    for (int n = 0; n <= degree; ++n) v += c[h][n] * legendre(n, t);
    return (1.0 - t * t) * v;
  };
}

ConvexityReport check_convexity(const RBodyPotential& T, const Domain& A, double beta, ConvexityMode mode,
                                const EquilibriumMeasure* eq, const ConvexityOptions& opt) {
  ConvexityReport r;
  r.mode = mode;
  if (mode == ConvexityMode::Fourier) {
    auto u = kernel_profile(T);
    const double L = diameter(A);
    const double kmax = opt.kmax > 0.0 ? opt.kmax : 400.0 / L;
    r.symbol_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < opt.kpoints; ++i) {
      double k = opt.kmin * std::pow(kmax / opt.kmin, double(i) / (opt.kpoints - 1));
      double v = beta * kPi - k * truncated_cosine(u, L, k);
      if (v < r.symbol_min) {
        r.symbol_min = v;
        r.k_at_min = k;
      }
    }
    r.notes.push_back("kernel shifted by its value at the diameter of A and truncated there");
    r.pass = r.symbol_min > 0.0;
    return r;
  }
  r.pass = true;
  for (int s = 0; s < opt.samples; ++s) {
    auto nu = random_zero_mass_density(A, opt.degree, opt.seed + 7919 * s);
    double q = quadratic_form(nu, A, T, beta, eq);
    r.q_values.push_back(q);
    if (!(q > -1e-10)) r.pass = false;
  }
  r.symbol_min = *std::min_element(r.q_values.begin(), r.q_values.end());
  return r;
}

double coulomb_fourier_abel(double k, double eps) {
  cplx z(eps, -k);
  return 2.0 * ((kEuler + std::log(z)) / z).real();
}

double coulomb_fourier_numeric(double k, double eps) {
  // first half period with x = a u^3 to tame the logarithm, then one panel per half period
  const double a = kPi / k;
  QuadRule g = gauss_legendre(32);
  double s = 0.0;
  for (size_t q = 0; q < g.x.size(); ++q) {
    double u = 0.5 * (g.x[q] + 1.0), x = a * u * u * u;
    s += 0.5 * g.w[q] * 3.0 * a * u * u * (-(std::log(a) + 3.0 * std::log(u))) * std::cos(k * x) * std::exp(-eps * x);
  }
  QuadRule h = gauss_legendre(12);
  const double xend = 40.0 / eps;
  for (double lo = a; lo < xend; lo += a)
    for (size_t q = 0; q < h.x.size(); ++q) {
      double x = lo + 0.5 * a * (h.x[q] + 1.0);
      s += 0.5 * a * h.w[q] * (-std::log(x)) * std::cos(k * x) * std::exp(-eps * x);
    }
  return 2.0 * s;
}

}  // namespace rbody
