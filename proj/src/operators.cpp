#include "rbody/operators.hpp"

#include <cmath>
#include <random>

namespace rbody {

namespace {

double fact(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

std::vector<int> grid_segments(const EquilibriumMeasure& eq) {
  const Grid& g = *eq.grid;
  std::vector<int> s(g.size());
  for (int j = 0; j < g.size(); ++j) s[j] = eq.support.cuts()[g.cut_of_node(j)].segment;
  return s;
}

}  // namespace

CMat interaction_matrix(const EquilibriumMeasure& eq, const RBodyPotential& T, const std::vector<int>& seg) {
  const Grid& g = *eq.grid;
  const int M = g.size();
  const double beta = eq.beta;
  CMat O = CMat::Zero(M, M);
  for (const auto& c : T.components()) {
    const int a = c.arity;
    if (a < 2) continue;
    const double f = (2.0 / beta) * c.weight / fact(a - 2);
    if (c.kernel) {
      for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) O(i, j) += f * g.w()[j] * c.kernel->d1(g.x()[i], g.x()[j], seg[i], seg[j]);
    } else if (c.separable()) {
      for (const auto& t : c.sep) {
        double prod = t.c;
        for (int k = 2; k < a; ++k) prod *= eq.density.integrate([&](double x) { return t.f[k](x); });
        Poly d0 = t.f[0].derivative();
        CVec u(M), v(M);
        for (int i = 0; i < M; ++i) {
          u[i] = d0(g.x()[i]);
          v[i] = g.w()[i] * t.f[1](g.x()[i]);
        }
        O += (f * prod) * u * v.transpose();
      }
    } else {
      throw config_error("interaction component of arity >= 2 must be separable or a kernel");
    }
  }
  return O;
}

OperatorSet::OperatorSet(std::shared_ptr<const EquilibriumMeasure> eqp, const RBodyPotential& T)
    : eq_(std::move(eqp)), T_(T) {
  const EquilibriumMeasure& eq = *eq_;
  const Grid& g = *eq.grid;
  const int M = g.size();
  const int Kc = g.ncoef();
  const int G = g.cuts();
  seg_ = grid_segments(eq);
  const CMat& E = g.eval();
  const CMat& Pr = g.proj();
  const CVec& W = eq.W_grid;
  const CVec& shd = eq.sigma_hd_grid;
  const CVec& sq = eq.sqrt_sigma_grid;

  O_ = interaction_matrix(eq, T, seg_);
  CMat OE = O_ * E;

  // K
  CMat A = (2.0 * W - eq.Vp_grid).asDiagonal() * E + W.asDiagonal() * OE;
  CMat c1 = Pr * (shd.asDiagonal() * A);
  K_ = Pr * (shd.cwiseInverse().asDiagonal() * (E * c1));
  // L
  CMat c2 = Pr * ((0.5 * sq).asDiagonal() * OE);
  L_ = Pr * (sq.cwiseInverse().asDiagonal() * (E * c2));
  // P = id - Proj[sigma^{1/2} phi]/sigma^{1/2}
  CMat c3 = Pr * (sq.asDiagonal() * E);
  P_ = CMat::Identity(Kc, Kc) - Pr * (sq.cwiseInverse().asDiagonal() * (E * c3));
  I_ = Pr * (shd.cwiseQuotient(eq.M_grid).asDiagonal() * E);
  Iinv_ = Pr * (eq.M_grid.cwiseQuotient(shd).asDiagonal() * E);

  Pi_ = CMat::Zero(G, Kc);
  for (int h = 0; h < G; ++h) Pi_(h, h * g.kmax()) = 0.5 * eq.support.cuts()[h].half() * g.rho(h);

  // p_h of degree <= g with oint_{A_h'} p_h / sigma^{1/2} = delta
  CMat Q(G, G);
  for (int hp = 0; hp < G; ++hp)
    for (int j = 0; j < G; ++j) {
      CVec f(M);
      for (int i = 0; i < M; ++i) f[i] = std::pow(g.x()[i], j) / sq[i];
      Q(hp, j) = g.integrate_cut(f, hp);
    }
  Eigen::JacobiSVD<CMat> svd(Q);
  pcond_ = svd.singularValues()(0) / svd.singularValues()(G - 1);
  CMat Qi = Q.inverse();  // column h: monomial coefficients of p_h
  pb_.resize(Kc, G);
  for (int h = 0; h < G; ++h) {
    CVec vals(M);
    for (int i = 0; i < M; ++i) {
      cplx p = 0.0;
      for (int j = G - 1; j >= 0; --j) p = p * g.x()[i] + Qi(j, h);
      vals[i] = p / sq[i];
    }
    pb_.col(h) = Pr * vals;
  }

  // id + N as a bordered matrix
  CMat IN = CMat::Zero(G + Kc, G + Kc);
  IN.block(0, G, G, Kc) = Pi_;
  IN.block(G, 0, Kc, G) = pb_;
  IN.block(G, G, Kc, Kc) = CMat::Identity(Kc, Kc) + L_ - P_;
  N_ = IN - CMat::Identity(G + Kc, G + Kc);
  lu_.compute(IN);
  det_ = lu_.determinant();
  if (!lu_.isInvertible()) throw numerical_error("Fredholm system id + N is singular");
}

double OperatorSet::condition() const {
  if (cond_ == 0.0) {
    CMat IN = N_ + CMat::Identity(N_.rows(), N_.cols());
    Eigen::BDCSVD<CMat> s(IN);
    cond_ = s.singularValues()(0) / s.singularValues()(IN.rows() - 1);
  }
  return cond_;
}

CVec OperatorSet::over_sqrt_sigma(const CVec& coef) const {
  const Grid& g = *eq_->grid;
  return g.proj() * (eq_->sqrt_sigma_grid.cwiseInverse().asDiagonal() * (g.eval() * coef));
}

CVec OperatorSet::invert_K(const CVec& psi) const {
  const int G = eq_->grid->cuts();
  const int Kc = eq_->grid->ncoef();
  CVec rhs = CVec::Zero(G + Kc);
  rhs.tail(Kc) = over_sqrt_sigma(I_ * psi);
  CVec sol = lu_.solve(rhs);
  return sol.tail(Kc);
}

CVec OperatorSet::solve_bordered(const CVec& top, const CVec& bottom) const {
  const int G = eq_->grid->cuts();
  const int Kc = eq_->grid->ncoef();
  CVec rhs(G + Kc);
  rhs.head(G) = top;
  rhs.tail(Kc) = bottom;
  return lu_.solve(rhs);
}

CVec OperatorSet::mass_derivative(const CVec& eta) const {
  const int Kc = eq_->grid->ncoef();
  return solve_bordered(eta, CVec::Zero(Kc)).tail(Kc);
}

CMat OperatorSet::invert_K(const CMat& psi) const {
  CMat out(psi.rows(), psi.cols());
  for (int j = 0; j < psi.cols(); ++j) out.col(j) = invert_K(CVec(psi.col(j)));
  return out;
}

double OperatorSet::factorization_residual(const CVec& phi) const {
  const Grid& g = *eq_->grid;
  CVec lhs = phi + L_ * phi - P_ * phi;
  CVec rhs = over_sqrt_sigma(I_ * (K_ * phi));
  // compare on the next contour level
  auto radii = eq_->family->level_radii(2);
  double num = 0.0, den = 0.0;
  for (int h = 0; h < g.cuts(); ++h)
    for (int j = 0; j < 64; ++j) {
      cplx x = joukowski(eq_->support.cuts()[h], radii[h] * std::polar(1.0, 2.0 * kPi * j / 64));
      auto row = g.row(x);
      num = std::max(num, std::abs((row * (lhs - rhs))(0)));
      den = std::max(den, std::abs((row * phi)(0)));
    }
  return num / den;
}

CVec random_rational_coefficients(const Grid& g, unsigned seed, int poles) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int M = g.size();
  CVec vals = CVec::Zero(M);
  for (int p = 0; p < poles; ++p) {
    int h = static_cast<int>(U(rng) * g.cuts()) % g.cuts();
    const Cut& c = g.support().cuts()[h];
    double r = 1.0 + (0.8 * g.rho(h) - 1.0) * U(rng);
    cplx z = joukowski(c, r * std::polar(1.0, 2.0 * kPi * U(rng)));
    int m = 1 + static_cast<int>(U(rng) * 3.0);
    cplx a(U(rng) - 0.5, U(rng) - 0.5);
    for (int j = 0; j < M; ++j) vals[j] += a / std::pow(g.x()[j] - z, m);
  }
  return g.proj() * vals;
}

}  // namespace rbody
