#include "rbody/contour.hpp"

#include <algorithm>
#include <cmath>

namespace rbody {

ContourFamily::ContourFamily(const Support& s, int levels, const PairCheck& omega)
    : support_(s), levels_(levels) {
  if (levels < 2) throw config_error("contour family needs at least two levels");
  const auto& cuts = s.cuts();
  const int n = s.count();
  std::vector<double> cap(n, 1e300);
  for (int h = 0; h < n; ++h) {
    double d = cuts[h].half();
    double gap = 1e300;
    if (h > 0) gap = std::min(gap, cuts[h].a - cuts[h - 1].b);
    if (h + 1 < n) gap = std::min(gap, cuts[h + 1].a - cuts[h].b);
    if (gap < 1e299) {
      double t = 2.0 + 0.9 * gap / d;
      cap[h] = 0.5 * (t + std::sqrt(t * t - 4.0));
    }
  }
  const double top = 1.0 + 0.25 * levels;
  auto radii = [&](int h, int i) {
    double r = 1.0 + 0.25 * (i + 1);
    if (top > cap[h]) r = 1.0 + (r - 1.0) * (cap[h] - 1.0) / (top - 1.0);
    return r;
  };
  if (omega) {
    // shrink until the outermost ellipses sit inside the kernel domain
    for (int iter = 0; iter < 40; ++iter) {
      std::vector<cplx> probe;
      for (int h = 0; h < n; ++h) {
        double r = radii(h, levels - 1);
        for (int j = 0; j < 16; ++j) probe.push_back(joukowski(cuts[h], r * std::polar(1.0, 2.0 * kPi * j / 16)));
      }
      bool ok = true;
      for (size_t i = 0; i < probe.size() && ok; ++i)
        for (size_t j = i; j < probe.size() && ok; ++j) ok = omega(probe[i], probe[j]);
      if (ok) break;
      for (int h = 0; h < n; ++h) cap[h] = std::min(cap[h], radii(h, levels - 1));
      for (int h = 0; h < n; ++h) cap[h] = 1.0 + 0.8 * (cap[h] - 1.0);
      if (iter == 39) throw domain_error("contour family: cannot fit contours inside the analyticity domain");
    }
  }
  rho_.assign(n, std::vector<double>(levels));
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < levels; ++i) rho_[h][i] = radii(h, i);
}

std::vector<double> ContourFamily::level_radii(int level) const {
  if (level < 0 || level >= levels_) throw numerical_error("contour level exhausted");
  std::vector<double> r;
  for (const auto& v : rho_) r.push_back(v[level]);
  return r;
}

Grid::Grid(const Support& s, const std::vector<double>& rho, int nq) : support_(s), rho_(rho), nq_(nq) {
  if (nq < 8 || nq % 2) throw config_error("grid: node count must be even and >= 8");
  if (static_cast<int>(rho.size()) != s.count()) throw config_error("grid: one radius per cut required");
  kmax_ = nq / 2 - 1;
  const int G = s.count();
  const int M = G * nq;
  const int K = G * kmax_;
  x_.resize(M);
  w_.resize(M);
  J_.resize(M);
  for (int h = 0; h < G; ++h) {
    const Cut& c = s.cuts()[h];
    for (int j = 0; j < nq; ++j) {
      cplx J = rho[h] * std::polar(1.0, 2.0 * kPi * j / nq);
      int id = h * nq + j;
      J_[id] = J;
      x_[id] = joukowski(c, J);
      w_[id] = 0.5 * c.half() * (J - 1.0 / J) / static_cast<double>(nq);
    }
  }
  P_ = CMat::Zero(K, M);
  for (int h = 0; h < G; ++h) {
    for (int j = 0; j < nq; ++j) {
      cplx e = std::polar(1.0, 2.0 * kPi * j / nq);
      cplx ek = 1.0, emk = 1.0;
      double r2 = 1.0;
      for (int k = 1; k <= kmax_; ++k) {
        ek *= e;
        emk /= e;
        r2 /= rho[h] * rho[h];
        P_(h * kmax_ + k - 1, h * nq + j) = (ek - r2 * emk) / static_cast<double>(nq);
      }
    }
  }
  E_.resize(M, K);
  for (int j = 0; j < M; ++j) {
    int hj = j / nq;
    for (int h = 0; h < G; ++h) {
      cplx t = (h == hj) ? rho[h] / J_[j] : rho[h] / joukowski_inverse(s.cuts()[h], x_[j]);
      cplx p = 1.0;
      for (int k = 1; k <= kmax_; ++k) {
        p *= t;
        E_(j, h * kmax_ + k - 1) = p;
      }
    }
  }
}

Eigen::RowVectorXcd Grid::row(cplx x, int deriv) const {
  const int G = cuts();
  Eigen::RowVectorXcd r(ncoef());
  for (int h = 0; h < G; ++h) {
    const Cut& c = support_.cuts()[h];
    cplx J = joukowski_inverse(c, x);
    cplx t = rho_[h] / J;
    double d = c.half();
    cplx xp = 0.5 * d * (1.0 - 1.0 / (J * J));
    cplx xpp = d / (J * J * J);
    cplx p = 1.0;
    for (int k = 1; k <= kmax_; ++k) {
      p *= t;
      cplx v;
      if (deriv == 0)
        v = p;
      else if (deriv == 1)
        v = -static_cast<double>(k) * p / (J * xp);
      else
        v = p * (static_cast<double>(k) * (k + 1) * xp / (J * J) + static_cast<double>(k) * xpp / J) / (xp * xp * xp);
      r[h * kmax_ + k - 1] = v;
    }
  }
  return r;
}

CMat Grid::rows(const std::vector<cplx>& xs, int deriv) const {
  CMat R(xs.size(), ncoef());
  for (size_t i = 0; i < xs.size(); ++i) R.row(i) = row(xs[i], deriv);
  return R;
}

cplx Grid::eval_cut(const CVec& coef, int h, cplx x, int deriv) const {
  const Cut& c = support_.cuts()[h];
  cplx J = joukowski_inverse(c, x);
  cplx t = rho_[h] / J;
  double d = c.half();
  cplx xp = 0.5 * d * (1.0 - 1.0 / (J * J));
  cplx xpp = d / (J * J * J);
  cplx p = 1.0, s = 0.0;
  for (int k = 1; k <= kmax_; ++k) {
    p *= t;
    cplx v;
    if (deriv == 0)
      v = p;
    else if (deriv == 1)
      v = -static_cast<double>(k) * p / (J * xp);
    else
      v = p * (static_cast<double>(k) * (k + 1) * xp / (J * J) + static_cast<double>(k) * xpp / J) / (xp * xp * xp);
    s += coef[h * kmax_ + k - 1] * v;
  }
  return s;
}

bool Grid::outside_circles(cplx x, double margin) const {
  for (int h = 0; h < cuts(); ++h)
    if (std::abs(joukowski_inverse(support_.cuts()[h], x)) < rho_[h] * (1.0 + margin)) return false;
  return true;
}

int Grid::inside_circle(cplx x) const {
  for (int h = 0; h < cuts(); ++h)
    if (std::abs(joukowski_inverse(support_.cuts()[h], x)) < rho_[h]) return h;
  return -1;
}

cplx Grid::integrate_cut(const CVec& f, int h) const {
  return (w_.segment(h * nq_, nq_).array() * f.segment(h * nq_, nq_).array()).sum();
}

CVec Grid::periods(const CVec& coef) const {
  CVec p(cuts());
  for (int h = 0; h < cuts(); ++h) p[h] = 0.5 * support_.cuts()[h].half() * coef[h * kmax_] * rho_[h];
  return p;
}

CVec Grid::laurent(const CVec& G, int h) const {
  CVec A = CVec::Zero(kmax_ + 1);
  for (int j = 0; j < nq_; ++j) {
    cplx e = std::polar(1.0, -2.0 * kPi * j / nq_);
    cplx p = 1.0;
    cplx g = G[h * nq_ + j];
    for (int m = 0; m <= kmax_; ++m) {
      A[m] += g * p;
      p *= e;
    }
  }
  return A / static_cast<double>(nq_);
}

cplx Grid::inner(const CVec& A, int h, cplx x) const {
  cplx J = joukowski_inverse(support_.cuts()[h], x);
  cplx up = 1.0, dn = 1.0;
  cplx a = J / rho_[h], b = 1.0 / (J * rho_[h]);
  cplx s = A[0];
  for (int m = 1; m <= kmax_; ++m) {
    up *= a;
    dn *= b;
    s += A[m] * (up + dn);
  }
  return s;
}

std::shared_ptr<Grid> make_grid(const ContourFamily& fam, int level, int nq) {
  return std::make_shared<Grid>(fam.support(), fam.level_radii(level), nq);
}

}  // namespace rbody
