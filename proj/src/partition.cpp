#include "rbody/partition.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
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

class HatPotential : public Func1 {
 public:
  HatPotential(const EquilibriumMeasure& eq) : beta_(eq.beta), dom_(eq.domain), mu_(eq.density) {
    for (const auto& c : eq.T.components()) {
      const int a = c.arity;
      const double f = c.weight / fact(a - 1);
      if (c.kernel) {
        if (a != 2) throw config_error("kernel components must have arity 2");
        kernels_.push_back({c.kernel, f});
      } else if (c.func) {
        funcs_.push_back({c.func, f});
      } else {
        for (const auto& t : c.sep) {
          double prod = t.c * f;
          for (int k = 1; k < a; ++k) prod *= mu_.integrate([&](double x) { return t.f[k](x); });
          poly_ = poly_ + t.f[0] * prod;
        }
      }
    }
    dpoly_ = poly_.derivative();
  }

  cplx value(cplx x, int seg) const override { return eval(x, seg, false); }
  cplx deriv(cplx x, int seg) const override { return eval(x, seg, true); }
  std::string name() const override { return "reference_one_body"; }

 private:
  cplx eval(cplx x, int seg, bool d) const {
    if (seg < 0) seg = dom_.nearest_segment(x.real());
    cplx v = d ? dpoly_(x) : poly_(x);
    for (const auto& [k, f] : kernels_)
      for (const auto& p : mu_.pieces)
        for (size_t j = 0; j < p.x.size(); ++j)
          v += f * p.w[j] * (d ? k->d1(x, p.x[j], seg, p.segment) : k->value(x, p.x[j], seg, p.segment));
    for (const auto& [fn, f] : funcs_) v += f * (d ? fn->deriv(x, seg) : fn->value(x, seg));
    for (const auto& p : mu_.pieces) {
      if (p.segment == seg) continue;
      const double s = p.segment < seg ? 1.0 : -1.0;
      for (size_t j = 0; j < p.x.size(); ++j)
        v += beta_ * p.w[j] * (d ? 1.0 / (x - p.x[j]) : std::log(s * (x - p.x[j])));
    }
    return v;
  }

  double beta_;
  Domain dom_;
  GridMeasure mu_;
  Poly poly_, dpoly_;
  std::vector<std::pair<std::shared_ptr<const Kernel2>, double>> kernels_;
  std::vector<std::pair<std::shared_ptr<const Func1>, double>> funcs_;
};

class CrossLog : public Kernel2 {
 public:
  CrossLog(double beta, Domain d) : beta_(beta), dom_(std::move(d)) {}
  cplx value(cplx x, cplx y, int sx, int sy) const override {
    resolve(x, y, sx, sy);
    if (sx == sy) return 0.0;
    return beta_ * std::log((sx > sy ? 1.0 : -1.0) * (x - y));
  }
  cplx d1(cplx x, cplx y, int sx, int sy) const override {
    resolve(x, y, sx, sy);
    if (sx == sy) return 0.0;
    return beta_ / (x - y);
  }
  bool in_domain(cplx, cplx) const override { return true; }
  std::string name() const override { return "cross_log"; }

 private:
  void resolve(cplx x, cplx y, int& sx, int& sy) const {
    if (sx < 0) sx = dom_.nearest_segment(x.real());
    if (sy < 0) sy = dom_.nearest_segment(y.real());
  }
  double beta_;
  Domain dom_;
};

std::vector<double> all_edges(const EquilibriumMeasure& eq) { return eq.support.edges(); }

RBodyPotential difference_potential(const RBodyPotential& T, std::shared_ptr<const Func1> hat,
                                    std::shared_ptr<const Kernel2> cross) {
  RBodyPotential D;
  for (const auto& c : T.components()) D.add(c);
  D.add(func_component(hat, -1.0));
  if (cross) D.add(kernel_component(cross, 1.0));
  return D;
}

double self_log_energy(const GridMeasure& mu) {
  double s = 0.0;
  for (const auto& p : mu.pieces) {
    GridMeasure one;
    one.pieces.push_back(p);
    s += log_energy(one);
  }
  return s;
}

}  // namespace

std::shared_ptr<const Func1> hat_potential(const EquilibriumMeasure& eq) { return std::make_shared<HatPotential>(eq); }

std::shared_ptr<const Kernel2> cross_log_kernel(double beta, const Domain& d) {
  return std::make_shared<CrossLog>(beta, d);
}

RBodyPotential interpolated_potential(const RBodyPotential& T, std::shared_ptr<const Func1> hat,
                                      std::shared_ptr<const Kernel2> cross, double t) {
  RBodyPotential out;
  for (auto c : T.components()) {
    c.weight *= t;
    out.add(c);
  }
  out.add(func_component(std::move(hat), 1.0 - t));
  if (cross) out.add(kernel_component(std::move(cross), -(1.0 - t)));
  return out;
}

std::array<double, 3> linear_response(const CorrelatorCache& cc, const RBodyPotential& D) {
  if (cc.kmax < 1) throw config_error("linear_response: needs W_1 up to order 1");
  const OperatorSet& ops = *cc.ops;
  const EquilibriumMeasure& eq = ops.eq();
  const Grid& g = *eq.grid;
  const int M = g.size();
  const auto& seg = ops.node_segments();
  const CVec& wq = g.w();
  const CVec& Wg = eq.W_grid;
  CVec u = cc.W1[0].on_grid();
  CVec u1 = cc.W1[1].on_grid();
  CMat B = cc.W20.on_grid() + u * u.transpose();
  std::array<double, 3> r{0.0, 0.0, 0.0};
  r[0] = interaction_average(D, eq.density);
  for (const auto& c : D.components()) {
    const int a = c.arity;
    const double w = c.weight;
    if (c.func) {
      CVec f(M);
      for (int j = 0; j < M; ++j) f[j] = c.func->value(g.x()[j], seg[j]);
      r[1] += w * (wq.cwiseProduct(f).cwiseProduct(u)).sum().real();
      r[2] += w * (wq.cwiseProduct(f).cwiseProduct(u1)).sum().real();
    } else if (c.kernel) {
      CMat K(M, M);
      for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) K(i, j) = wq[i] * wq[j] * c.kernel->value(g.x()[i], g.x()[j], seg[i], seg[j]);
      r[1] += w * (u.transpose() * K * Wg)(0).real();
      r[2] += w * ((u1.transpose() * K * Wg)(0).real() + 0.5 * K.cwiseProduct(B).sum().real());
    } else {
      for (const auto& t : c.sep) {
        std::vector<CVec> v(a, CVec(M));
        std::vector<double> m(a);
        for (int k = 0; k < a; ++k) {
          for (int j = 0; j < M; ++j) v[k][j] = wq[j] * t.f[k](g.x()[j]);
          m[k] = eq.density.integrate([&](double x) { return t.f[k](x); });
        }
        double rest1 = t.c;
        for (int k = 1; k < a; ++k) rest1 *= m[k];
        r[1] += w / fact(a - 1) * rest1 * (v[0].transpose() * u)(0).real();
        r[2] += w / fact(a - 1) * rest1 * (v[0].transpose() * u1)(0).real();
        if (a >= 2) {
          double rest2 = t.c;
          for (int k = 2; k < a; ++k) rest2 *= m[k];
          r[2] += w / (2.0 * fact(a - 2)) * rest2 * (v[0].transpose() * B * v[1])(0).real();
        }
      }
    }
  }
  return r;
}

FreeEnergyEntry free_energy_coeffs(const ModelConfig& cfg, const std::vector<double>& eps, int t_nodes, bool resolve) {
  FreeEnergyEntry out;
  out.eps = eps;
  ModelConfig ce = cfg;
  if (cfg.domain.count() > 1) ce.filling = eps;
  SolveOptions so;
  so.filling = ce.filling;
  auto eq = std::make_shared<EquilibriumMeasure>(solve_equilibrium(ce, so));
  out.eq = eq;
  out.C = eq->C;
  out.energy = energy(eq->density, cfg.potential, cfg.beta);
  auto hat = hat_potential(*eq);
  std::shared_ptr<const Kernel2> cross;
  if (cfg.domain.count() > 1) cross = cross_log_kernel(cfg.beta, cfg.domain);
  RBodyPotential D = difference_potential(cfg.potential, hat, cross);
  out.reference_energy = -eq->density.integrate([&](double x) { return hat->value(x, eq->segment_hint(x)).real(); }) -
                         0.5 * cfg.beta * self_log_energy(eq->density);
  QuadRule q = gauss_legendre(t_nodes);
  const auto e0 = all_edges(*eq);
  for (int i = 0; i < t_nodes; ++i) {
    const double t = 0.5 * (q.x[i] + 1.0), wt = 0.5 * q.w[i];
    ModelConfig ct = ce;
    ct.potential = interpolated_potential(cfg.potential, hat, cross, t);
    std::shared_ptr<EquilibriumMeasure> eqt;
    // the interpolated models share mu_eq; re-solve at the ends and the middle to confirm it
    if (resolve && (i == 0 || i == t_nodes / 2 || i == t_nodes - 1)) {
      SolveOptions st;
      st.filling = ce.filling;
      st.initial_cuts = eq->support.cuts();
      eqt = std::make_shared<EquilibriumMeasure>(solve_equilibrium(ct, st));
      auto et = all_edges(*eqt);
      if (et.size() != e0.size()) throw numerical_error("interpolation changed the number of cuts");
      for (size_t j = 0; j < et.size(); ++j) out.edge_drift = std::max(out.edge_drift, std::abs(et[j] - e0[j]));
    } else {
      auto copy = std::make_shared<EquilibriumMeasure>(*eq);
      copy->T = ct.potential;
      eqt = copy;
    }
    auto ops = std::make_shared<OperatorSet>(eqt, ct.potential);
    CorrelatorCache cc = expand_correlators(ops, 1);
    auto r = linear_response(cc, D);
    for (int k = 0; k < 3; ++k) out.G[k] += wt * r[k];
  }
  return out;
}

std::array<double, 5> stencil_derivatives(const std::array<double, 5>& f, double h) {
  // f at -2h, -h, 0, h, 2h
  std::array<double, 5> d;
  d[0] = f[2];
  d[1] = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h);
  d[2] = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h);
  d[3] = (-f[0] + 2.0 * f[1] - 2.0 * f[3] + f[4]) / (2.0 * h * h * h);
  d[4] = (f[0] - 4.0 * f[1] + 6.0 * f[2] - 4.0 * f[3] + f[4]) / (h * h * h * h);
  return d;
}

FreeEnergyData build_free_energy_data(const ModelConfig& cfg, double step, int t_nodes, int jobs) {
  FreeEnergyData data;
  data.g = cfg.domain.count() - 1;
  data.beta = cfg.beta;
  data.step = step;
  if (data.g > 1) throw config_error("partition assembly is implemented for at most two segments");
  if (data.g == 1 && !cfg.filling) throw config_error("partition: two-segment models need the filling fractions eps*");
  data.eps_star = cfg.filling ? *cfg.filling : std::vector<double>{1.0};
  const int npts = data.g == 1 ? 5 : 1;
  std::array<std::array<double, 5>, 3> f{};
  std::vector<FreeEnergyEntry> entries(npts);
  std::vector<std::exception_ptr> errors(npts);
  auto work = [&](int i) {
    try {
      double off = data.g == 1 ? (i - 2) * step : 0.0;
      std::vector<double> eps = data.eps_star;
      if (data.g == 1) {
        eps[0] -= off;
        eps[1] += off;
        if (eps[0] <= 0.0 || eps[1] <= 0.0) throw config_error("partition: stencil leaves the simplex");
      }
      entries[i] = free_energy_coeffs(cfg, eps, t_nodes);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int j = 0; j < std::max(1, std::min(jobs, npts)); ++j)
    pool.emplace_back([&] {
      for (int i; (i = next++) < npts;) work(i);
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (int i = 0; i < npts; ++i) {
    double off = data.g == 1 ? (i - 2) * step : 0.0;
    const FreeEnergyEntry& e = entries[i];
    data.offsets.push_back(off);
    data.values.push_back({-e.energy, e.G[1], e.G[2]});
    data.edge_drift = std::max(data.edge_drift, e.edge_drift);
    const int slot = data.g == 1 ? i : 2;
    for (int k = 0; k < 3; ++k) f[k][slot] = data.values.back()[k];
    if (off == 0.0) {
      data.C_star = e.C;
      data.eq_star = e.eq;
      for (const auto& c : e.eq->support.cuts()) data.edges.push_back(edge_class(c));
    }
  }
  data.gamma = gamma_exponent(data.edges, cfg.beta);
  for (int k = 0; k < 3; ++k) {
    if (data.g == 1) {
      data.deriv[k] = stencil_derivatives(f[k], step);
      double d2h = (f[k][3] - 2.0 * f[k][2] + f[k][1]) / (step * step);
      double d22 = (f[k][4] - 2.0 * f[k][2] + f[k][0]) / (4.0 * step * step);
      data.richardson[k] = std::abs(d2h - d22) / 3.0;
    } else {
      data.deriv[k] = {f[k][2], 0.0, 0.0, 0.0, 0.0};
    }
  }
  return data;
}

MassDerivative mass_derivative(const OperatorSet& ops, const CVec& eta, int cheb) {
  const EquilibriumMeasure& eq = ops.eq();
  const Grid& g = *eq.grid;
  const Support& S = eq.support;
  const int G = g.cuts();
  MassDerivative md;
  md.coef = ops.mass_derivative(eta);
  CVec phi = g.eval() * md.coef;
  CVec F = 0.5 * eq.sqrt_sigma_grid.cwiseProduct(ops.O() * phi);
  CVec cF = g.proj() * F;
  // sigma^{1/2} phi + Proj[F] is a polynomial of degree <= g; fit it far from the cuts
  const double R = 2.0 * std::max(std::abs(S.edges().front()), std::abs(S.edges().back())) + 1.0;
  const int np = 4 * (G + 1) + 8;
  CMat A(np, G);
  CVec b(np);
  for (int j = 0; j < np; ++j) {
    cplx z = R * std::polar(1.0, 2.0 * kPi * (j + 0.5) / np);
    b[j] = S.sqrt_sigma(z) * (g.row(z) * md.coef)(0) + (g.row(z) * cF)(0);
    for (int k = 0; k < G; ++k) A(j, k) = std::pow(z, k);
  }
  CVec pol = A.colPivHouseholderQr().solve(b);
  std::vector<CVec> lau(G);
  for (int h = 0; h < G; ++h) lau[h] = g.laurent(F, h);
  auto density = [&](double x) {
    int k = S.cut_of(x);
    if (k < 0) return 0.0;
    cplx r = 0.0;
    for (int j = G - 1; j >= 0; --j) r = r * x + pol[j];
    for (int h = 0; h < G; ++h)
      if (h != k) r -= g.eval_cut(cF, h, x);
    r += g.inner(lau[k], k, x);
    return (r / (kPi * kI * S.sqrt_sigma_minus(x))).real();
  };
  std::vector<std::pair<double, double>> iv;
  std::vector<int> segs;
  for (const auto& c : S.cuts()) {
    iv.push_back({c.a, c.b});
    segs.push_back(c.segment);
  }
  md.nu = chebyshev_measure(iv, segs, density, cheb);
  for (const auto& p : md.nu.pieces) md.cut_mass.push_back(p.mass());
  return md;
}

HessianRoutes energy_hessian(const ModelConfig& cfg, const FreeEnergyData& data) {
  if (data.g != 1) throw config_error("energy_hessian: two-segment models only");
  HessianRoutes hr;
  hr.fd = RMat::Constant(1, 1, -data.deriv[0][2]);
  const EquilibriumMeasure& eq = *data.eq_star;
  if (eq.support.count() != 2) throw numerical_error("energy_hessian: expected one cut per segment");
  auto ops = std::make_shared<OperatorSet>(data.eq_star, cfg.potential);
  CVec eta(2);
  eta << -1.0, 1.0;
  MassDerivative md = mass_derivative(*ops, eta);
  LogPotential U(md.nu);
  auto dC = [&](double x) {
    int seg = eq.segment_hint(x);
    double v = cfg.beta * U(x);
    for (const auto& c : cfg.potential.components()) {
      const int a = c.arity;
      if (a < 2) continue;
      const double f = c.weight / fact(a - 2);
      if (c.kernel) {
        for (const auto& p : md.nu.pieces)
          for (size_t j = 0; j < p.x.size(); ++j) v += f * p.w[j] * c.kernel->value(x, p.x[j], seg, p.segment).real();
      } else if (c.func) {
        throw config_error("energy_hessian: one-body function of arity >= 2");
      } else {
        for (const auto& t : c.sep) {
          double prod = t.c * t.f[0](x) * md.nu.integrate([&](double y) { return t.f[1](y); });
          for (int k = 2; k < a; ++k) prod *= eq.density.integrate([&](double y) { return t.f[k](y); });
          v += f * prod;
        }
      }
    }
    return v;
  };
  double q = 0.0;
  for (int h = 0; h < 2; ++h) {
    const Cut& c = eq.support.cuts()[h];
    double v0 = dC(c.center()), v1 = dC(c.center() + 0.4 * c.half()), v2 = dC(c.center() - 0.6 * c.half());
    hr.constancy = std::max({hr.constancy, std::abs(v1 - v0), std::abs(v2 - v0)});
    q -= eta[h].real() * v0;
  }
  hr.q = RMat::Constant(1, 1, q);
  hr.rel_diff = std::abs(hr.q(0, 0) - hr.fd(0, 0)) / std::abs(hr.q(0, 0));
  return hr;
}

namespace {

struct Bracket {
  std::array<double, 3> o1{}, o2{};  // coefficients of x^3, x^2, x (order 1) and x^4, x^3, x^2 (order 2)
};

double taylor_exponent(const FreeEnergyData& d, int N, double x) {
  // sum_k N^{-k} sum_l F^{[k],(l)} (x/N)^l / l!, k = -2, -1, 0
  double s = 0.0;
  const double del = x / N;
  for (int k = 0; k < 3; ++k) {
    double p = 0.0, pw = 1.0;
    for (int l = 0; l <= 4; ++l) {
      p += d.deriv[k][l] * pw / fact(l);
      pw *= del;
    }
    s += std::pow(static_cast<double>(N), 2 - k) * p;
  }
  return s;
}

}  // namespace

double ZAssembly::log_Z() const { return log_smooth + std::log(std::abs(bracket_theta)); }

ZAssembly assemble_Z(int N, const FreeEnergyData& d, int k0) {
  ZAssembly z;
  z.N = N;
  const double n = N;
  z.log_power = (0.5 * d.beta * n + d.gamma) * std::log(n);
  z.log_smooth = n * n * d.deriv[0][0] + n * d.deriv[1][0] + d.deriv[2][0];
  if (d.g == 0) {
    z.bracket_theta = 1.0;
    z.theta_only = 1.0;
    z.terms.push_back({"theta", 1.0});
    return z;
  }
  ThetaParams tp;
  tp.T = RMat::Constant(1, 1, -d.deriv[0][2]);
  tp.v = CVec::Constant(1, n * d.deriv[0][1] + d.deriv[1][1]);
  double gam = -n * d.eps_star[1];
  z.gammaN = gam - std::floor(gam);
  tp.gamma = RVec::Constant(1, z.gammaN);
  ThetaLattice lat = theta_lattice(tp);
  const auto& F = d.deriv;
  auto X1 = [&](double x) { return (F[0][3] * x * x * x / 6.0 + F[1][2] * x * x / 2.0 + F[2][1] * x) / n; };
  auto X2 = [&](double x) {
    return (F[0][4] * std::pow(x, 4) / 24.0 + F[1][3] * x * x * x / 6.0 + F[2][2] * x * x / 2.0) / (n * n);
  };
  cplx th = theta(tp, lat);
  z.theta_only = th.real();
  z.terms.push_back({"theta", th});
  z.bracket_theta = th;
  if (k0 >= 1) {
    cplx t1 = theta_weighted(tp, lat, [&](const RVec& x) { return cplx(X1(x[0])); });
    z.terms.push_back({"order1", t1});
    z.bracket_theta += t1;
  }
  if (k0 >= 2) {
    cplx t2 = theta_weighted(tp, lat, [&](const RVec& x) { return cplx(X2(x[0])); });
    cplx t11 = theta_weighted(tp, lat, [&](const RVec& x) { return cplx(0.5 * X1(x[0]) * X1(x[0])); });
    z.terms.push_back({"order2", t2});
    z.terms.push_back({"order1_squared", t11});
    z.bracket_theta += t2 + t11;
  }
  return z;
}

double lattice_sum_log(int N, const FreeEnergyData& d) {
  const double n = N;
  if (d.g == 0) return taylor_exponent(d, N, 0.0);
  const double T = -d.deriv[0][2];
  if (!(T > 0.0)) throw numerical_error("lattice sum: energy Hessian is not positive");
  const double xmax = std::sqrt(160.0 / T);  // exp(-T x^2 / 2) < 1e-34 beyond
  const double c = n * d.eps_star[1];
  std::vector<double> ex;
  for (int N1 = 0; N1 <= N; ++N1) {
    double x = N1 - c;
    if (std::abs(x) > xmax) continue;
    ex.push_back(taylor_exponent(d, N, x));
  }
  double m = *std::max_element(ex.begin(), ex.end());
  double s = 0.0;
  for (double e : ex) s += std::exp(e - m);
  return m + std::log(s);
}

Fluctuations linear_stat_fluctuations(const std::function<cplx(cplx)>& phi, const CorrelatorCache& cc) {
  const OperatorSet& ops = *cc.ops;
  const EquilibriumMeasure& eq = ops.eq();
  const Grid& g = *eq.grid;
  const int M = g.size();
  CVec u(M);
  for (int j = 0; j < M; ++j) u[j] = g.w()[j] * phi(g.x()[j]);
  Fluctuations f;
  f.mean_leading = (u.transpose() * eq.W_grid)(0).real();
  f.M1 = (u.transpose() * cc.W1[0].on_grid())(0);
  f.M2 = 0.5 * (u.transpose() * cc.W20.on_grid() * u)(0);
  const int G = g.cuts();
  if (G == 2) {
    CVec eta(2);
    eta << -1.0, 1.0;
    CVec d = g.eval() * ops.mass_derivative(eta);
    f.w.push_back((u.transpose() * d)(0).real());
  }
  return f;
}

cplx clt_charfn(double s, const Fluctuations& f, int N, const FreeEnergyData* d) {
  cplx base = std::exp(kI * s * f.M1 - s * s * f.M2);
  if (!d || d->g == 0 || f.w.empty()) return base;
  ThetaParams tp;
  tp.T = RMat::Constant(1, 1, -d->deriv[0][2]);
  const double v = N * d->deriv[0][1] + d->deriv[1][1];
  double gam = -static_cast<double>(N) * d->eps_star[1];
  tp.gamma = RVec::Constant(1, gam - std::floor(gam));
  tp.v = CVec::Constant(1, v);
  cplx den = theta(tp);
  tp.v = CVec::Constant(1, cplx(v, s * f.w[0]));
  return base * theta(tp) / den;
}

}  // namespace rbody
