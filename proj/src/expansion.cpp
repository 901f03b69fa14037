#include "rbody/expansion.hpp"

#include <cmath>
#include <sstream>

namespace rbody {

namespace {

double fact(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return fact(n) / (fact(k) * fact(n - k));
}

}  // namespace

SourceKit::SourceKit(std::shared_ptr<const OperatorSet> ops) : ops_(std::move(ops)) {
  const Grid& g = *ops_->grid();
  std::vector<cplx> xs(g.x().data(), g.x().data() + g.size());
  E1_ = g.rows(xs, 1);
  E2_ = g.rows(xs, 2);
  s_ = ops_->eq().support.sigma_hd().coeffs();
  Wg_ = ops_->eq().W_grid;
}

CVec SourceKit::derivative_grid(const CVec& coef) const { return E1_ * coef; }

CMat SourceKit::D1(const CVec& phi) const {
  const EquilibriumMeasure& eq = ops_->eq();
  const Grid& g = *eq.grid;
  const int M = g.size();
  CVec cg = g.proj() * eq.sigma_hd_grid.cwiseProduct(phi);
  CVec P0 = g.eval() * cg, P1 = E1_ * cg, P2 = E2_ * cg;
  const double f = 2.0 / eq.beta;
  CMat D(M, M);
  for (int j = 0; j < M; ++j) {
    cplx b = g.x()[j];
    for (int i = 0; i < M; ++i) {
      cplx a = g.x()[i];
      cplx v;
      if (i == j)
        v = 0.5 * P2[j];
      else {
        cplx d = a - b;
        v = (P0[i] - P0[j] - d * P1[j]) / (d * d);
      }
      D(i, j) = f * v / eq.sigma_hd_grid[i];
    }
  }
  return D;
}

CVec SourceKit::D2(const CMat& F) const {
  const EquilibriumMeasure& eq = ops_->eq();
  const Grid& g = *eq.grid;
  const int M = g.size();
  CVec out = F.diagonal();
  const int ds = static_cast<int>(s_.size()) - 1;
  if (ds >= 2) {
    const int pm = ds - 2;
    CMat mom(pm + 1, M);  // w_j x_j^p
    for (int j = 0; j < M; ++j) {
      cplx p = 1.0;
      for (int k = 0; k <= pm; ++k) {
        mom(k, j) = g.w()[j] * p;
        p *= g.x()[j];
      }
    }
    CMat m = mom * F * mom.transpose();
    std::vector<cplx> c(pm + 1, 0.0);
    for (int i = 0; i <= pm; ++i)
      for (int p = 0; p + i <= pm; ++p)
        for (int q = 0; q + p + i <= pm; ++q) c[i] += s_[i + p + q + 2] * m(p, q);
    for (int j = 0; j < M; ++j) {
      cplx v = 0.0;
      for (int i = pm; i >= 0; --i) v = v * g.x()[j] + c[i];
      out[j] -= v / eq.sigma_hd_grid[j];
    }
  }
  return g.proj() * out;
}

CVec SourceKit::diag_sigma_term(const CVec& phi) const {
  const EquilibriumMeasure& eq = ops_->eq();
  const Grid& g = *eq.grid;
  const int M = g.size();
  CVec out = CVec::Zero(M);
  const int ds = static_cast<int>(s_.size()) - 1;
  if (ds < 2) return out;
  const int pm = ds - 2;
  std::vector<cplx> mom(pm + 1, 0.0);
  for (int j = 0; j < M; ++j) {
    cplx p = 1.0;
    for (int k = 0; k <= pm; ++k) {
      mom[k] += g.w()[j] * p * phi[j];
      p *= g.x()[j];
    }
  }
  std::vector<cplx> c(pm + 1, 0.0);
  for (int i = 0; i <= pm; ++i)
    for (int p = 0; p + i <= pm; ++p)
      for (int q = 0; q + p + i <= pm; ++q) c[i] += s_[i + p + q + 2] * mom[p + q];
  for (int j = 0; j < M; ++j) {
    cplx v = 0.0;
    for (int i = pm; i >= 0; --i) v = v * g.x()[j] + c[i];
    out[j] = v / eq.sigma_hd_grid[j];
  }
  return out;
}

CVec SourceKit::pair_term(const CMat& B) const {
  const EquilibriumMeasure& eq = ops_->eq();
  const Grid& g = *eq.grid;
  const int M = g.size();
  const auto& seg = ops_->node_segments();
  CVec H = CVec::Zero(M);
  for (const auto& c : ops_->potential().components()) {
    const int a = c.arity;
    if (a < 2) continue;
    const double f = (2.0 / eq.beta) * c.weight / fact(a - 1);
    if (c.kernel) {
      for (int i = 0; i < M; ++i) {
        cplx s = 0.0;
        for (int j = 0; j < M; ++j) s += g.w()[j] * c.kernel->d1(g.x()[i], g.x()[j], seg[i], seg[j]) * B(i, j);
        H[i] += f * s;
      }
      continue;
    }
    for (const auto& t : c.sep) {
      Poly d0 = t.f[0].derivative();
      CVec u(M), v1(M), v2(M);
      for (int j = 0; j < M; ++j) {
        u[j] = d0(g.x()[j]);
        v1[j] = g.w()[j] * t.f[1](g.x()[j]);
        v2[j] = (a >= 3) ? g.w()[j] * t.f[2](g.x()[j]) : 0.0;
      }
      auto avg = [&](int k) { return eq.density.integrate([&](double x) { return t.f[k](x); }); };
      // pairs {1, j}
      double rest = t.c;
      for (int k = 2; k < a; ++k) rest *= avg(k);
      CVec Bv = B * v1;
      H += (f * (a - 1) * rest) * u.cwiseProduct(Bv);
      // pairs {i, j} away from slot 1
      if (a >= 3) {
        double rest2 = t.c;
        for (int k = 3; k < a; ++k) rest2 *= avg(k);
        cplx bb = (v1.transpose() * B * v2)(0, 0);
        H += (f * binom(a - 1, 2) * rest2 * bb) * u.cwiseProduct(Wg_);
      }
    }
  }
  CVec c1 = g.proj() * eq.sigma_hd_grid.cwiseProduct(H);
  return g.proj() * eq.sigma_hd_grid.cwiseInverse().cwiseProduct(g.eval() * c1);
}

cplx CorrelatorCache::W1_at(int k, cplx x) const {
  if (k < -1) return 0.0;
  if (k == -1) return Weq(x);
  if (k > kmax) throw numerical_error("W_1 coefficient of order " + std::to_string(k) + " was not computed");
  return W1[k](x);
}

cplx CorrelatorCache::W2_at(int k, cplx x1, cplx x2) const {
  if (k < 0) return 0.0;
  if (k > 0) throw numerical_error("W_2 coefficient of order " + std::to_string(k) + " was not computed");
  return W20(x1, x2);
}

bool CorrelatorCache::available(int n, int k) const {
  if (k < n - 2) return true;
  if (n == 1) return k <= kmax;
  if (n == 2) return k == 0;
  return false;
}

cplx CorrelatorCache::Wn_at(int n, int k, const std::vector<cplx>& x) const {
  if (static_cast<int>(x.size()) != n) throw config_error("correlator: wrong number of points");
  if (k < n - 2) return 0.0;
  if (n == 1) return W1_at(k, x[0]);
  if (n == 2) return W2_at(k, x[0], x[1]);
  throw numerical_error("correlators with n >= 3 are not computed");
}

CorrelatorCache expand_correlators(std::shared_ptr<const OperatorSet> ops, int kmax) {
  if (kmax < 0 || kmax > 1) throw config_error("expansion: kmax must be 0 or 1");
  CorrelatorCache cc;
  cc.ops = ops;
  cc.kmax = kmax;
  const EquilibriumMeasure& eq = ops->eq();
  auto gp = eq.grid;
  const Grid& g = *gp;
  SourceKit kit(ops);
  const CMat& E = g.eval();
  const CMat& Pr = g.proj();
  const double ab = 1.0 - 2.0 / eq.beta;

  cc.Weq = eq.W_function();
  const CVec& Wg = eq.W_grid;

  auto certify = [&](const CVec& c, const std::string& what) {
    CVec p = ops->Pi() * c;
    double m = p.cwiseAbs().maxCoeff();
    cc.max_period = std::max(cc.max_period, m);
    if (m > 1e-8) {
      std::ostringstream os;
      os << what << ": period " << m << " exceeds 1e-8";
      cc.notes.push_back(os.str());
    }
  };

  // W_1^{[0]}
  CVec src0;
  if (ab == 0.0) {
    src0 = CVec::Zero(g.ncoef());
  } else {
    CVec d = kit.derivative_grid(cc.Weq.coef()) + kit.diag_sigma_term(Wg);
    src0 = -ab * (Pr * d);
  }
  CVec w10 = src0.isZero(0.0) ? CVec::Zero(g.ncoef()) : ops->invert_K(src0);
  certify(w10, "W_1^[0]");
  cc.W1.push_back(AnalyticFunction(gp, w10, 2));

  // W_2^{[0]}(., x2) = K^{-1}[-D1[W_eq](., x2)]
  CMat D = kit.D1(Wg);
  CMat X = ops->invert_K(CMat(-(Pr * D)));
  CMat C = X * Pr.transpose();
  cc.symmetry_defect = (C - C.transpose()).cwiseAbs().maxCoeff() / std::max(C.cwiseAbs().maxCoeff(), 1e-300);
  C = 0.5 * (C + C.transpose());
  for (int j = 0; j < C.cols(); ++j) certify(CVec(C.col(j)), "W_2^[0]");
  cc.W20 = AnalyticFunction2(gp, C);

  if (kmax >= 1) {
    CVec u = E * w10;
    CMat B = E * C * E.transpose() + u * u.transpose();
    CVec src = -kit.D2(B) - kit.pair_term(B);
    if (ab != 0.0) src -= ab * (Pr * (kit.derivative_grid(w10) + kit.diag_sigma_term(u)));
    CVec w11 = ops->invert_K(src);
    certify(w11, "W_1^[1]");
    cc.W1.push_back(AnalyticFunction(gp, w11, 2));
  }
  return cc;
}

cplx universal_two_point(double a, double b, cplx x1, cplx x2) {
  auto s = [&](cplx x) { return std::sqrt(x - a) * std::sqrt(x - b); };
  cplx num = x1 * x2 - 0.5 * (a + b) * (x1 + x2) + a * b;
  cplx d = x1 - x2;
  return (num / (s(x1) * s(x2)) - 1.0) / (2.0 * d * d);
}

}  // namespace rbody
