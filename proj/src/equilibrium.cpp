#include "rbody/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "rbody/quadrature.hpp"

namespace rbody {

namespace {

double fact(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Chebyshev first-kind points of a segment and the product-integration weights
// reproducing int p dmu for polynomials of degree < ns.
void segment_weights(const Interval& seg, int segidx, int ns, const GridMeasure& mu, std::vector<double>& xi,
                     std::vector<double>& omega) {
  double c = seg.mid(), d = 0.5 * seg.length();
  std::vector<double> t(ns);
  for (int q = 0; q < ns; ++q) {
    t[q] = std::cos((2.0 * q + 1.0) * kPi / (2.0 * ns));
    xi.push_back(c + d * t[q]);
  }
  std::vector<double> m(ns, 0.0);
  for (const auto& p : mu.pieces) {
    if (p.segment != segidx) continue;
    for (size_t j = 0; j < p.x.size(); ++j) {
      double s = (p.x[j] - c) / d;
      double t0 = 1.0, t1 = s;
      m[0] += p.w[j];
      if (ns > 1) m[1] += p.w[j] * s;
      for (int n = 2; n < ns; ++n) {
        double t2 = 2.0 * s * t1 - t0;
        m[n] += p.w[j] * t2;
        t0 = t1;
        t1 = t2;
      }
    }
  }
  for (int q = 0; q < ns; ++q) {
    double s = 0.5 * m[0];
    double t0 = 1.0, t1 = t[q];
    if (ns > 1) s += m[1] * t1;
    for (int n = 2; n < ns; ++n) {
      double t2 = 2.0 * t[q] * t1 - t0;
      s += m[n] * t2;
      t0 = t1;
      t1 = t2;
    }
    omega.push_back(2.0 * s / ns);
  }
}

double measure_average(const GridMeasure& mu, const Poly& p) {
  return mu.integrate([&](double x) { return p(x); });
}

}  // namespace

cplx OneBody::value(cplx x, int seg) const {
  cplx v = poly(x);
  for (const auto& k : kernels)
    for (size_t q = 0; q < k.xi.size(); ++q) v += k.omega[q] * k.kernel->value(x, k.xi[q], seg, k.seg[q]);
  for (const auto& f : funcs) v += f.factor * f.f->value(x, seg);
  return v;
}

cplx OneBody::deriv(cplx x, int seg) const {
  cplx v = poly.derivative()(x);
  for (const auto& k : kernels)
    for (size_t q = 0; q < k.xi.size(); ++q) v += k.omega[q] * k.kernel->d1(x, k.xi[q], seg, k.seg[q]);
  for (const auto& f : funcs) v += f.factor * f.f->deriv(x, seg);
  return v;
}

OneBody OneBody::mixed(const OneBody& o, double theta) const {
  if (o.kernels.size() != kernels.size() || o.funcs.size() != funcs.size())
    throw numerical_error("one-body mixing: incompatible representations");
  OneBody r;
  r.poly = poly * (1.0 - theta) + o.poly * theta;
  r.kernels = kernels;
  for (size_t i = 0; i < kernels.size(); ++i)
    for (size_t q = 0; q < kernels[i].omega.size(); ++q)
      r.kernels[i].omega[q] = (1.0 - theta) * kernels[i].omega[q] + theta * o.kernels[i].omega[q];
  r.funcs = funcs;
  for (size_t i = 0; i < funcs.size(); ++i) r.funcs[i].factor = (1.0 - theta) * funcs[i].factor + theta * o.funcs[i].factor;
  return r;
}

double OneBody::distance(const OneBody& o, const Domain& d) const {
  double m = 0.0;
  for (int h = 0; h < d.count(); ++h) {
    const auto& s = d.segments[h];
    for (int i = 0; i <= 64; ++i) {
      double x = s.lo + s.length() * i / 64.0;
      m = std::max(m, std::abs(deriv(x, h) - o.deriv(x, h)));
    }
  }
  return m;
}

OneBody one_body_potential(const RBodyPotential& T, const GridMeasure& mu, double beta, const Domain& d,
                           int segment_nodes) {
  OneBody V;
  for (const auto& c : T.components()) {
    const int a = c.arity;
    const double f = -(2.0 / beta) * c.weight / fact(a - 1);
    if (c.kernel) {
      OneBody::KernelTerm k;
      k.kernel = c.kernel;
      for (int h = 0; h < d.count(); ++h) {
        std::vector<double> xi, om;
        segment_weights(d.segments[h], h, segment_nodes, mu, xi, om);
        for (size_t q = 0; q < xi.size(); ++q) {
          k.xi.push_back(xi[q]);
          k.seg.push_back(h);
          k.omega.push_back(f * om[q]);
        }
      }
      V.kernels.push_back(std::move(k));
    } else if (c.func) {
      V.funcs.push_back({c.func, f});
    } else {
      for (const auto& t : c.sep) {
        double prod = t.c;
        for (int j = 1; j < a; ++j) prod *= measure_average(mu, t.f[j]);
        V.poly = V.poly + t.f[0] * (f * prod);
      }
    }
  }
  return V;
}

double interaction_average(const RBodyPotential& T, const GridMeasure& mu) {
  double total = 0.0;
  for (const auto& c : T.components()) {
    const int a = c.arity;
    double v = 0.0;
    if (c.kernel) {
      for (const auto& p : mu.pieces)
        for (const auto& q : mu.pieces)
          for (size_t i = 0; i < p.x.size(); ++i)
            for (size_t j = 0; j < q.x.size(); ++j)
              v += p.w[i] * q.w[j] * c.kernel->value(p.x[i], q.x[j], p.segment, q.segment).real();
    } else if (c.func) {
      for (const auto& p : mu.pieces)
        for (size_t i = 0; i < p.x.size(); ++i) v += p.w[i] * c.func->value(p.x[i], p.segment).real();
    } else {
      for (const auto& t : c.sep) {
        double prod = t.c;
        for (int j = 0; j < a; ++j) prod *= measure_average(mu, t.f[j]);
        v += prod;
      }
    }
    total += c.weight * v / fact(a);
  }
  return total;
}

double energy(const GridMeasure& mu, const RBodyPotential& T, double beta) {
  double m = mu.mass();
  if (std::abs(m - 1.0) > 1e-8) {
    std::ostringstream os;
    os << "energy: measure has mass " << m << ", expected 1";
    throw domain_error(os.str());
  }
  return -interaction_average(T, mu) - 0.5 * beta * log_energy(mu);
}

// ---------------------------------------------------------------------------
// Inner solve: one-body potential V fixed, unknown soft edges.

namespace {

struct Trial {
  std::vector<Cut> cuts;
  Poly pol;
  Support support;
  std::shared_ptr<ContourFamily> fam;
  std::shared_ptr<Grid> grid;
  CVec G, c, W, Vp, sq, shd;
  std::vector<CVec> inner;
};

struct InnerProblem {
  const OneBody* V;
  const Domain* domain;
  const RBodyPotential* T;
  double beta;
  bool fixed;
  std::vector<double> filling;
  const Numerics* num;
};

ContourFamily::PairCheck omega_check(const RBodyPotential& T) {
  if (!T.has_kernel()) return nullptr;
  const RBodyPotential* p = &T;
  return [p](cplx x, cplx y) {
    for (const auto& c : p->components())
      if (c.kernel && !c.kernel->in_domain(x, y)) return false;
    return true;
  };
}

bool build_trial(const InnerProblem& pb, Trial& t) {
  for (size_t h = 0; h < t.cuts.size(); ++h) {
    if (!(t.cuts[h].b > t.cuts[h].a)) return false;
    if (h > 0 && !(t.cuts[h].a > t.cuts[h - 1].b)) return false;
  }
  t.support = Support(t.cuts);
  t.fam = std::make_shared<ContourFamily>(t.support, pb.num->contour_levels, omega_check(*pb.T));
  t.grid = std::make_shared<Grid>(t.support, t.fam->level_radii(1), pb.num->nodes);
  const Grid& g = *t.grid;
  const int M = g.size();
  t.G.resize(M);
  t.Vp.resize(M);
  t.sq.resize(M);
  t.shd.resize(M);
  for (int j = 0; j < M; ++j) {
    cplx x = g.x()[j];
    int seg = t.cuts[g.cut_of_node(j)].segment;
    t.Vp[j] = pb.V->deriv(x, seg);
    t.sq[j] = t.support.sqrt_sigma(x);
    t.shd[j] = t.support.sigma_hd()(x);
    t.G[j] = t.Vp[j] * t.shd[j] / (2.0 * t.sq[j]);
  }
  t.c = g.proj() * t.G;
  CVec out = g.eval() * t.c;
  t.W.resize(M);
  for (int j = 0; j < M; ++j) t.W[j] = t.sq[j] / t.shd[j] * (out[j] + t.pol(g.x()[j]));
  t.inner.clear();
  for (int h = 0; h < g.cuts(); ++h) t.inner.push_back(g.laurent(t.G, h));
  return true;
}

// M(x)/2 near the support
cplx half_M(const Trial& t, const OneBody& V, cplx x, int seg) {
  const Grid& g = *t.grid;
  int k = g.inside_circle(x);
  cplx s = t.pol(x);
  if (k >= 0) {
    for (int h = 0; h < g.cuts(); ++h)
      if (h != k) s += g.eval_cut(t.c, h, x);
    s -= g.inner(t.inner[k], k, x);
    return s;
  }
  for (int h = 0; h < g.cuts(); ++h) s += g.eval_cut(t.c, h, x);
  cplx Gx = V.deriv(x, seg) * t.support.sigma_hd()(x) / (2.0 * t.support.sqrt_sigma(x));
  return s - Gx;
}

// (beta/2) int_{gap} (2W - V') dx between cut h and h+1 (= C_{h+1} - C_h)
double gap_integral(const InnerProblem& pb, const Trial& t, int h) {
  const Cut& L = t.cuts[h];
  const Cut& R = t.cuts[h + 1];
  double al = (R.lo == EdgeType::Hard) ? -0.5 : 0.5;  // exponent at the right end
  double be = (L.hi == EdgeType::Hard) ? -0.5 : 0.5;  // exponent at the left end
  static thread_local std::vector<std::pair<std::pair<double, double>, QuadRule>> cache;
  const QuadRule* q = nullptr;
  for (auto& e : cache)
    if (e.first.first == al && e.first.second == be) q = &e.second;
  if (!q) {
    cache.push_back({{al, be}, gauss_jacobi(48, al, be)});
    q = &cache.back().second;
  }
  double lo = L.b, hi = R.a;
  double c = 0.5 * (lo + hi), d = 0.5 * (hi - lo);
  int seg = L.segment;
  double s = 0.0;
  for (size_t i = 0; i < q->x.size(); ++i) {
    double u = q->x[i];
    double x = c + d * u;
    cplx f = 2.0 * t.support.sqrt_sigma(x) / t.support.sigma_hd()(x) * half_M(t, *pb.V, x, seg);
    double wfun = std::pow(1.0 - u, al) * std::pow(1.0 + u, be);
    s += q->w[i] * f.real() / wfun;
  }
  return 0.5 * pb.beta * d * s;
}

struct Unknowns {
  std::vector<std::pair<int, int>> edges;  // (cut, 0 = lo / 1 = hi)
  int npol = 0;                            // free lower coefficients of pol
  int D = 0;
};

Unknowns layout(const std::vector<Cut>& cuts) {
  Unknowns u;
  int hard = 0;
  for (size_t h = 0; h < cuts.size(); ++h) {
    if (cuts[h].lo == EdgeType::Soft) u.edges.push_back({static_cast<int>(h), 0});
    if (cuts[h].hi == EdgeType::Soft) u.edges.push_back({static_cast<int>(h), 1});
    hard += cuts[h].hard_count();
  }
  u.D = static_cast<int>(cuts.size()) - hard;
  u.npol = u.D < 0 ? -u.D - 1 : 0;
  return u;
}

RVec pack(const Unknowns& u, const std::vector<Cut>& cuts, const Poly& pol) {
  RVec v(u.edges.size() + u.npol);
  for (size_t i = 0; i < u.edges.size(); ++i) {
    const auto& e = u.edges[i];
    v[i] = e.second ? cuts[e.first].b : cuts[e.first].a;
  }
  for (int i = 0; i < u.npol; ++i) v[u.edges.size() + i] = pol.coeff(i);
  return v;
}

void unpack(const Unknowns& u, const RVec& v, std::vector<Cut>& cuts, Poly& pol) {
  for (size_t i = 0; i < u.edges.size(); ++i) {
    const auto& e = u.edges[i];
    (e.second ? cuts[e.first].b : cuts[e.first].a) = v[i];
  }
  if (u.D < 0) {
    std::vector<double> c(-u.D, 0.0);
    c[-u.D - 1] = 1.0;
    for (int i = 0; i < u.npol; ++i) c[i] = v[u.edges.size() + i];
    pol = Poly(c);
  } else {
    pol = Poly();
  }
}

bool residual(const InnerProblem& pb, const Unknowns& u, const RVec& v, Trial& t, RVec& r) {
  unpack(u, v, t.cuts, t.pol);
  // forbid soft edges running far outside their segment
  for (const auto& c : t.cuts) {
    const auto& s = pb.domain->segments[c.segment];
    double tol = 0.05 * s.length();
    if (c.a < s.lo - tol || c.b > s.hi + tol) return false;
  }
  if (!build_trial(pb, t)) return false;
  const Grid& g = *t.grid;
  std::vector<double> eq;
  if (u.D >= 0) {
    for (int j = 0; j <= u.D; ++j) {
      cplx mu = 0.0;
      for (int i = 0; i < g.size(); ++i) mu += g.w()[i] * std::pow(g.x()[i], j) * t.G[i];
      eq.push_back(mu.real() - (j == u.D ? 1.0 : 0.0));
    }
  }
  const int n = static_cast<int>(t.cuts.size());
  std::vector<double> mass(n);
  for (int h = 0; h < n; ++h) mass[h] = g.integrate_cut(t.W, h).real();
  if (pb.fixed) {
    std::vector<int> segs;
    for (const auto& c : t.cuts)
      if (segs.empty() || segs.back() != c.segment) segs.push_back(c.segment);
    for (size_t k = 0; k + 1 < segs.size(); ++k) {
      double m = 0.0;
      for (int h = 0; h < n; ++h)
        if (t.cuts[h].segment == segs[k]) m += mass[h];
      eq.push_back(m - pb.filling[segs[k]]);
    }
    for (int h = 0; h + 1 < n; ++h)
      if (t.cuts[h].segment == t.cuts[h + 1].segment) eq.push_back(gap_integral(pb, t, h));
  } else {
    for (int h = 0; h + 1 < n; ++h) eq.push_back(gap_integral(pb, t, h));
  }
  r = Eigen::Map<RVec>(eq.data(), eq.size());
  return r.allFinite();
}

struct NewtonResult {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

NewtonResult newton(const InnerProblem& pb, Trial& t) {
  Unknowns u = layout(t.cuts);
  RVec v = pack(u, t.cuts, t.pol);
  NewtonResult nr;
  RVec r;
  Trial work = t;
  if (!residual(pb, u, v, work, r)) throw numerical_error("equilibrium: invalid initial support guess");
  if (r.size() != v.size()) throw numerical_error("equilibrium: equation/unknown count mismatch");
  double scale = 1.0;
  for (const auto& c : t.cuts) scale = std::max(scale, std::max(std::abs(c.a), std::abs(c.b)));
  for (int it = 0; it < pb.num->max_newton; ++it) {
    nr.iterations = it;
    double rn = r.lpNorm<Eigen::Infinity>();
    nr.residual = rn;
    if (rn < 1e-13 || v.size() == 0) {
      nr.converged = true;
      break;
    }
    RMat Jm(r.size(), v.size());
    for (int k = 0; k < v.size(); ++k) {
      double hstep = 1e-7 * std::max(1.0, std::abs(v[k]));
      RVec vp = v, vm = v, rp, rm;
      vp[k] += hstep;
      vm[k] -= hstep;
      Trial tp = work, tm = work;
      bool okp = residual(pb, u, vp, tp, rp);
      bool okm = residual(pb, u, vm, tm, rm);
      if (okp && okm)
        Jm.col(k) = (rp - rm) / (2.0 * hstep);
      else if (okp)
        Jm.col(k) = (rp - r) / hstep;
      else if (okm)
        Jm.col(k) = (r - rm) / hstep;
      else
        throw numerical_error("equilibrium: cannot differentiate residual");
    }
    RVec dv = Jm.fullPivLu().solve(-r);
    double lam = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      RVec vn = v + lam * dv;
      RVec rn2;
      Trial tn = work;
      if (residual(pb, u, vn, tn, rn2) && rn2.lpNorm<Eigen::Infinity>() < (1.0 - 1e-4 * lam) * rn) {
        v = vn;
        r = rn2;
        work = tn;
        accepted = true;
        break;
      }
      lam *= 0.5;
    }
    if (!accepted) {
      nr.residual = rn;
      nr.converged = rn < 1e-10;
      break;
    }
    if ((lam * dv).lpNorm<Eigen::Infinity>() < 1e-15 * scale && r.lpNorm<Eigen::Infinity>() < 1e-10) {
      nr.converged = true;
      nr.residual = r.lpNorm<Eigen::Infinity>();
      break;
    }
  }
  if (!nr.converged && r.lpNorm<Eigen::Infinity>() < 1e-12) nr.converged = true;
  nr.residual = r.lpNorm<Eigen::Infinity>();
  t = work;
  return nr;
}

double edge_weight(const Cut& c, double x) {
  double l = x - c.a, r = c.b - x;
  double w = 1.0;
  w *= (c.lo == EdgeType::Soft) ? std::sqrt(l) : 1.0 / std::sqrt(l);
  w *= (c.hi == EdgeType::Soft) ? std::sqrt(r) : 1.0 / std::sqrt(r);
  return w;
}

double trial_density(const Trial& t, const OneBody& V, double x, int h) {
  cplx m = 2.0 * half_M(t, V, cplx(x, 0.0), t.cuts[h].segment);
  cplx rho = t.support.sqrt_sigma_minus(x) * m / (2.0 * kPi * kI * t.support.sigma_hd()(x));
  return rho.real();
}

// Regularized density on Chebyshev points of the closed cut.
std::vector<double> regularized_profile(const Trial& t, const OneBody& V, int h, int n, std::vector<double>& xs) {
  const Cut& c = t.cuts[h];
  std::vector<double> r;
  xs.clear();
  for (int i = 0; i < n; ++i) {
    double s = std::cos((2.0 * (n - 1 - i) + 1.0) * kPi / (2.0 * n));
    double x = c.center() + c.half() * s;
    xs.push_back(x);
    r.push_back(trial_density(t, V, x, h) / edge_weight(c, x));
  }
  return r;
}

std::vector<Cut> initial_cuts(const OneBody& V, const Domain& d, bool fixed, const std::vector<double>& filling) {
  std::vector<Cut> cuts;
  auto Vr = [&](double x, int h) { return V.value(x, h).real(); };
  struct Well {
    double x;
    int seg;
    double v;
  };
  std::vector<Well> wells;
  for (int h = 0; h < d.count(); ++h) {
    const auto& s = d.segments[h];
    const int n = 800;
    std::vector<double> vals(n + 1);
    for (int i = 0; i <= n; ++i) vals[i] = Vr(s.lo + s.length() * i / n, h);
    if (fixed) {
      if (filling[h] <= 0.0) continue;
      int im = static_cast<int>(std::min_element(vals.begin(), vals.end()) - vals.begin());
      wells.push_back({s.lo + s.length() * im / n, h, vals[im]});
    } else {
      for (int i = 0; i <= n; ++i) {
        bool lmin = (i == 0 || vals[i] <= vals[i - 1]) && (i == n || vals[i] < vals[i + 1]);
        if (lmin) wells.push_back({s.lo + s.length() * i / n, h, vals[i]});
      }
    }
  }
  if (!fixed) {
    double vmin = 1e300;
    for (const auto& w : wells) vmin = std::min(vmin, w.v);
    std::vector<Well> keep;
    double range = 0.0;
    for (int h = 0; h < d.count(); ++h)
      for (int i = 0; i <= 50; ++i) {
        double x = d.segments[h].lo + d.segments[h].length() * i / 50.0;
        range = std::max(range, std::abs(Vr(x, h) - vmin));
      }
    for (const auto& w : wells)
      if (w.v - vmin <= 0.05 * range + 1e-12) keep.push_back(w);
    wells = keep;
  }
  for (size_t i = 0; i < wells.size(); ++i) {
    const auto& w = wells[i];
    const auto& s = d.segments[w.seg];
    double m = fixed ? filling[w.seg] : 1.0 / wells.size();
    if (fixed) {
      int nw = 0;
      for (const auto& o : wells) nw += (o.seg == w.seg);
      m /= nw;
    }
    double hstep = 1e-3 * std::max(1.0, s.length());
    double xc = std::clamp(w.x, s.lo + hstep, s.hi - hstep);
    double v2 = (Vr(xc + hstep, w.seg) - 2.0 * Vr(xc, w.seg) + Vr(xc - hstep, w.seg)) / (hstep * hstep);
    double hw = v2 > 0.0 ? 2.0 * std::sqrt(m / v2) : 0.25 * s.length();
    hw = std::min(hw, 0.5 * s.length());
    Cut c;
    c.segment = w.seg;
    c.a = w.x - hw;
    c.b = w.x + hw;
    if (c.a <= s.lo) {
      c.a = s.lo;
      c.lo = EdgeType::Hard;
    }
    if (c.b >= s.hi) {
      c.b = s.hi;
      c.hi = EdgeType::Hard;
    }
    cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end(), [](const Cut& a, const Cut& b) { return a.a < b.a; });
  // separate overlapping guesses
  for (size_t i = 1; i < cuts.size(); ++i) {
    if (cuts[i].a <= cuts[i - 1].b) {
      double mid = 0.5 * (cuts[i].a + cuts[i - 1].b);
      double gap = 0.02 * (cuts[i].b - cuts[i - 1].a);
      cuts[i - 1].b = mid - gap;
      cuts[i - 1].hi = EdgeType::Soft;
      cuts[i].a = mid + gap;
      cuts[i].lo = EdgeType::Soft;
    }
  }
  if (cuts.empty()) throw numerical_error("equilibrium: no initial support could be placed");
  return cuts;
}

struct InnerResult {
  Trial trial;
  int newton_iterations = 0;
  std::vector<std::string> notes;
};

InnerResult solve_inner(const InnerProblem& pb, std::vector<Cut> cuts) {
  InnerResult res;
  bool split_done = false;
  for (int round = 0; round < 12; ++round) {
    Trial t;
    t.cuts = cuts;
    Unknowns u = layout(cuts);
    if (u.D < 0) {
      std::vector<double> c(-u.D, 0.0);
      c[-u.D - 1] = 1.0;
      t.pol = Poly(c);
    }
    NewtonResult nr = newton(pb, t);
    res.newton_iterations += nr.iterations;
    const auto& segs = pb.domain->segments;
    // soft edges that left their segment (or are pressed against it) become hard
    bool changed = false;
    for (auto& c : t.cuts) {
      const auto& s = segs[c.segment];
      double tol = nr.converged ? 0.0 : 0.02 * s.length();
      if (c.lo == EdgeType::Soft && c.a < s.lo + tol) {
        c.a = s.lo;
        c.lo = EdgeType::Hard;
        changed = true;
        res.notes.push_back("soft edge pinned to domain boundary " + std::to_string(s.lo));
      }
      if (c.hi == EdgeType::Soft && c.b > s.hi - tol) {
        c.b = s.hi;
        c.hi = EdgeType::Hard;
        changed = true;
        res.notes.push_back("soft edge pinned to domain boundary " + std::to_string(s.hi));
      }
    }
    if (changed) {
      cuts = t.cuts;
      continue;
    }
    if (!nr.converged) {
      std::ostringstream os;
      os << "equilibrium: edge Newton solve did not converge (residual " << nr.residual << ")";
      throw numerical_error(os.str());
    }
    // density sign checks
    bool released = false;
    int split_cut = -1;
    double split_x = 0.0;
    for (int h = 0; h < static_cast<int>(t.cuts.size()); ++h) {
      std::vector<double> xs;
      auto prof = regularized_profile(t, *pb.V, h, 200, xs);
      Cut& c = t.cuts[h];
      if (c.lo == EdgeType::Hard && prof.front() < 0.0) {
        c.lo = EdgeType::Soft;
        c.a += 1e-3 * c.half();
        released = true;
        res.notes.push_back("hard edge released at " + std::to_string(c.a));
      }
      if (c.hi == EdgeType::Hard && prof.back() < 0.0) {
        c.hi = EdgeType::Soft;
        c.b -= 1e-3 * c.half();
        released = true;
        res.notes.push_back("hard edge released at " + std::to_string(c.b));
      }
      size_t imin = std::min_element(prof.begin(), prof.end()) - prof.begin();
      if (prof[imin] < 0.0 && imin > 5 && imin + 5 < prof.size() && split_cut < 0) {
        split_cut = h;
        split_x = xs[imin];
      }
    }
    if (released) {
      cuts = t.cuts;
      continue;
    }
    if (split_cut >= 0) {
      if (split_done) throw numerical_error("equilibrium: negative density persists after cut splitting");
      split_done = true;
      Cut c = t.cuts[split_cut];
      double gap = 0.05 * c.half();
      Cut L = c, R = c;
      L.b = split_x - gap;
      L.hi = EdgeType::Soft;
      R.a = split_x + gap;
      R.lo = EdgeType::Soft;
      cuts = t.cuts;
      cuts.erase(cuts.begin() + split_cut);
      cuts.insert(cuts.begin() + split_cut, R);
      cuts.insert(cuts.begin() + split_cut, L);
      res.notes.push_back("negative density: cut split at " + std::to_string(split_x));
      continue;
    }
    res.trial = t;
    return res;
  }
  throw numerical_error("equilibrium: edge classification did not settle");
}

GridMeasure trial_measure(const Trial& t, const OneBody& V, int n) {
  std::vector<std::pair<double, double>> iv;
  std::vector<int> segs;
  for (const auto& c : t.cuts) {
    iv.push_back({c.a, c.b});
    segs.push_back(c.segment);
  }
  GridMeasure mu;
  for (size_t h = 0; h < t.cuts.size(); ++h) {
    auto m = chebyshev_measure({iv[h]}, {segs[h]}, [&](double x) { return trial_density(t, V, x, h); }, n);
    mu.pieces.push_back(m.pieces[0]);
  }
  return mu;
}

}  // namespace

int EquilibriumMeasure::segment_hint(cplx x) const { return domain.nearest_segment(x.real()); }

cplx EquilibriumMeasure::M(cplx x) const {
  const Grid& g = *grid;
  int k = g.inside_circle(x);
  cplx s = pol(x);
  if (k >= 0) {
    for (int h = 0; h < g.cuts(); ++h)
      if (h != k) s += g.eval_cut(G_coef, h, x);
    s -= g.inner(G_inner[k], k, x);
    return 2.0 * s;
  }
  for (int h = 0; h < g.cuts(); ++h) s += g.eval_cut(G_coef, h, x);
  cplx Gx = Vp(x) * support.sigma_hd()(x) / (2.0 * support.sqrt_sigma(x));
  return 2.0 * (s - Gx);
}

cplx EquilibriumMeasure::W(cplx x) const {
  const Grid& g = *grid;
  if (g.outside_circles(x)) return support.sqrt_sigma(x) / support.sigma_hd()(x) * ((g.row(x) * G_coef)(0) + pol(x));
  return 0.5 * Vp(x) + support.sqrt_sigma(x) * M(x) / (2.0 * support.sigma_hd()(x));
}

double EquilibriumMeasure::density_at(double x) const {
  int h = support.cut_of(x);
  if (h < 0) return 0.0;
  cplx rho = support.sqrt_sigma_minus(x) * M(cplx(x, 0.0)) / (2.0 * kPi * kI * support.sigma_hd()(x));
  return rho.real();
}

double EquilibriumMeasure::effective_potential(double x) const {
  int seg = domain.segment_of(x);
  if (seg < 0) return -std::numeric_limits<double>::infinity();
  double Cx = 0.0;
  int count = 0;
  for (int h = 0; h < support.count(); ++h)
    if (!fixed_filling || support.cuts()[h].segment == seg) {
      Cx += C[h];
      ++count;
    }
  if (count == 0) {
    // empty segment: use the nearest cut
    int best = 0;
    double bd = 1e300;
    for (int h = 0; h < support.count(); ++h) {
      double dd = std::abs(support.cuts()[h].center() - x);
      if (dd < bd) {
        bd = dd;
        best = h;
      }
    }
    Cx = C[best];
    count = 1;
  }
  Cx /= count;
  return beta * log_potential(x) - 0.5 * beta * V.value(x, seg).real() - Cx;
}

double effective_potential(const EquilibriumMeasure& eq, double x) { return eq.effective_potential(x); }

AnalyticFunction EquilibriumMeasure::W_function() const { return AnalyticFunction::from_grid(grid, W_grid, 1); }

double regularized_density(const EquilibriumMeasure& eq, int h, double x) {
  return eq.density_at(x) / edge_weight(eq.support.cuts()[h], x);
}

EquilibriumMeasure solve_equilibrium(const ModelConfig& cfg, const SolveOptions& opt) {
  cfg.validate();
  const Numerics& num = cfg.numerics;
  EquilibriumMeasure eq;
  eq.beta = cfg.beta;
  eq.domain = cfg.domain;
  eq.T = cfg.potential;
  std::optional<std::vector<double>> filling = opt.filling ? opt.filling : cfg.filling;
  eq.fixed_filling = filling.has_value();
  if (filling && static_cast<int>(filling->size()) != cfg.domain.count())
    throw config_error("filling must have one entry per segment");
  std::vector<double> masses =
      filling ? *filling : std::vector<double>(cfg.domain.count(), 1.0 / cfg.domain.count());

  InnerProblem pb;
  pb.domain = &eq.domain;
  pb.T = &eq.T;
  pb.beta = cfg.beta;
  pb.fixed = eq.fixed_filling;
  pb.filling = masses;
  pb.num = &num;

  bool self_consistent = cfg.potential.r() >= 2;
  GridMeasure mu0 = lebesgue_measure(cfg.domain, masses, num.cheb_degree);
  OneBody V = one_body_potential(cfg.potential, mu0, cfg.beta, cfg.domain, num.segment_nodes);
  std::vector<Cut> cuts = opt.initial_cuts ? *opt.initial_cuts : initial_cuts(V, cfg.domain, pb.fixed, masses);

  InnerResult inner;
  double theta = num.damping, prev = 1e300;
  int it = 0;
  for (;; ++it) {
    pb.V = &V;
    inner = solve_inner(pb, cuts);
    eq.newton_iterations += inner.newton_iterations;
    for (const auto& n : inner.notes) eq.notes.push_back(n);
    cuts = inner.trial.cuts;
    if (!self_consistent) break;
    GridMeasure mu = trial_measure(inner.trial, V, num.cheb_degree);
    OneBody Vn = one_body_potential(cfg.potential, mu, cfg.beta, cfg.domain, num.segment_nodes);
    double res = V.distance(Vn, cfg.domain);
    eq.fixed_point_residual = res;
    if (res < num.tol_fixed_point) break;
    if (it + 1 >= num.max_outer) {
      std::ostringstream os;
      os << "equilibrium: self-consistency did not converge in " << num.max_outer << " iterations (residual " << res
         << ")";
      throw numerical_error(os.str());
    }
    if (res > prev) theta *= 0.5;
    prev = res;
    V = V.mixed(Vn, theta);
  }
  eq.outer_iterations = it + 1;

  Trial& t = inner.trial;
  eq.V = V;
  eq.support = t.support;
  eq.pol = t.pol;
  eq.D = layout(t.cuts).D;
  eq.family = t.fam;
  eq.grid = t.grid;
  eq.G = t.G;
  eq.G_coef = t.c;
  eq.G_inner = t.inner;
  eq.W_grid = t.W;
  eq.Vp_grid = t.Vp;
  eq.sqrt_sigma_grid = t.sq;
  eq.sigma_hd_grid = t.shd;
  eq.M_grid = (2.0 * t.W - t.Vp).cwiseProduct(t.shd).cwiseQuotient(t.sq);
  eq.density = trial_measure(t, V, num.cheb_degree);
  eq.cut_mass = eq.density.masses();
  eq.logpot = std::make_shared<LogPotential>(eq.density);
  eq.filling.assign(cfg.domain.count(), 0.0);
  for (size_t h = 0; h < t.cuts.size(); ++h) eq.filling[t.cuts[h].segment] += eq.cut_mass[h];
  for (const auto& c : t.cuts) {
    double xm = c.center();
    eq.C.push_back(cfg.beta * eq.log_potential(xm) - 0.5 * cfg.beta * V.value(xm, c.segment).real());
  }
  return eq;
}

HypothesisReport check_hypotheses(const EquilibriumMeasure& eq, double margin) {
  HypothesisReport rep;
  rep.max_teff_off_support = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < eq.domain.count(); ++s) {
    const auto& seg = eq.domain.segments[s];
    for (int i = 0; i <= 1000; ++i) {
      double x = seg.lo + seg.length() * i / 1000.0;
      double te = eq.effective_potential(x);
      int h = eq.support.cut_of(x);
      if (h >= 0) {
        rep.max_abs_teff_on_support = std::max(rep.max_abs_teff_on_support, std::abs(te));
      } else {
        // distance-weighted: T_eff vanishes quadratically-ish near soft edges
        double dist = 1e300;
        for (const auto& c : eq.support.cuts()) dist = std::min({dist, std::abs(x - c.a), std::abs(x - c.b)});
        if (dist > 1e-3 * seg.length()) rep.max_teff_off_support = std::max(rep.max_teff_off_support, te);
      }
    }
  }
  rep.confinement_ok = rep.max_teff_off_support < -margin || rep.max_teff_off_support == -std::numeric_limits<double>::infinity();
  rep.off_critical = true;
  rep.min_regularized_density = 1e300;
  for (int h = 0; h < eq.support.count(); ++h) {
    const Cut& c = eq.support.cuts()[h];
    rep.edges.push_back({c.lo, c.hi});
    double mx = 0.0, mn = 1e300;
    const int n = 400;
    for (int i = 0; i < n; ++i) {
      double s = std::cos((2.0 * (n - 1 - i) + 1.0) * kPi / (2.0 * n));
      double x = c.center() + c.half() * s;
      double r = regularized_density(eq, h, x);
      mx = std::max(mx, std::abs(r));
      mn = std::min(mn, r);
    }
    rep.min_regularized_density = std::min(rep.min_regularized_density, mn / std::max(mx, 1e-300));
    if (mn <= 1e-6 * mx) {
      rep.off_critical = false;
      rep.notes.push_back("cut " + std::to_string(h) + ": regularized density nearly vanishes (critical point)");
    }
  }
  rep.notes.push_back("uniqueness of the global minimizer is assumed, not verified");
  return rep;
}

}  // namespace rbody
