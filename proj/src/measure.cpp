#include "rbody/measure.hpp"

#include <cmath>
#include <sstream>

#include "rbody/quadrature.hpp"

namespace rbody {

double MeasurePiece::mass() const {
  double m = 0.0;
  for (double v : w) m += v;
  return m;
}

double GridMeasure::mass() const {
  double m = 0.0;
  for (const auto& p : pieces) m += p.mass();
  return m;
}

std::vector<double> GridMeasure::masses() const {
  std::vector<double> m;
  for (const auto& p : pieces) m.push_back(p.mass());
  return m;
}

double GridMeasure::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (const auto& p : pieces)
    for (size_t j = 0; j < p.x.size(); ++j) s += p.w[j] * f(p.x[j]);
  return s;
}

GridMeasure GridMeasure::scaled(double s) const {
  GridMeasure m = *this;
  for (auto& p : m.pieces) {
    for (auto& v : p.w) v *= s;
    for (auto& v : p.density) v *= s;
  }
  return m;
}

GridMeasure chebyshev_measure(const std::vector<std::pair<double, double>>& intervals, const std::vector<int>& segments,
                              const std::function<double(double)>& density, int n) {
  GridMeasure mu;
  QuadRule q = gauss_chebyshev1(n);
  for (size_t i = 0; i < intervals.size(); ++i) {
    MeasurePiece p;
    p.a = intervals[i].first;
    p.b = intervals[i].second;
    p.segment = segments.empty() ? static_cast<int>(i) : segments[i];
    double c = p.center(), d = p.half();
    for (int j = 0; j < n; ++j) {
      double s = q.x[j];
      double x = c + d * s;
      double rho = density(x);
      p.s.push_back(s);
      p.x.push_back(x);
      p.density.push_back(rho);
      p.w.push_back(q.w[j] * d * std::sqrt(1.0 - s * s) * rho);
    }
    mu.pieces.push_back(std::move(p));
  }
  return mu;
}

GridMeasure lebesgue_measure(const Domain& d, const std::vector<double>& masses, int n) {
  std::vector<std::pair<double, double>> iv;
  std::vector<int> seg;
  GridMeasure all;
  for (int h = 0; h < d.count(); ++h) {
    if (masses[h] <= 0.0) continue;
    double dens = masses[h] / d.segments[h].length();
    auto m = chebyshev_measure({{d.segments[h].lo, d.segments[h].hi}}, {h}, [dens](double) { return dens; }, n);
    all.pieces.push_back(m.pieces[0]);
  }
  return all;
}

cplx stieltjes(const GridMeasure& mu, cplx x) {
  cplx s = 0.0;
  for (const auto& p : mu.pieces) {
    double spacing = p.half() * kPi / std::max<size_t>(p.x.size(), 1);
    if (x.real() >= p.a - 1e-14 && x.real() <= p.b + 1e-14 && std::abs(x.imag()) < spacing) {
      std::ostringstream os;
      os << "stieltjes: point " << x << " lies within node resolution (" << spacing << ") of the support";
      throw domain_error(os.str());
    }
    for (size_t j = 0; j < p.x.size(); ++j) s += p.w[j] / (x - p.x[j]);
  }
  return s;
}

std::vector<double> chebyshev_moments(const MeasurePiece& p, int kmax) {
  std::vector<double> a(kmax + 1, 0.0);
  for (size_t j = 0; j < p.x.size(); ++j) {
    double s = p.s[j];
    double t0 = 1.0, t1 = s;
    a[0] += p.w[j];
    if (kmax >= 1) a[1] += p.w[j] * s;
    for (int k = 2; k <= kmax; ++k) {
      double t2 = 2.0 * s * t1 - t0;
      a[k] += p.w[j] * t2;
      t0 = t1;
      t1 = t2;
    }
  }
  return a;
}

namespace {

// ln|x - xi| = ln|J/2| - 2 sum_k Re(J^-k) T_k(t) / k for u = (x-c)/d, t in [-1,1]
double piece_log_potential(const MeasurePiece& p, const std::vector<double>& a, double x) {
  double d = p.half();
  double u = (x - p.center()) / d;
  cplx J;
  if (std::abs(u) <= 1.0)
    J = cplx(u, std::sqrt(1.0 - u * u));
  else
    J = u + (u > 0 ? 1.0 : -1.0) * std::sqrt(u * u - 1.0);
  cplx z = 1.0 / J, zk = 1.0;
  double s = a[0] * (std::log(d) + std::log(std::abs(J) / 2.0));
  for (size_t k = 1; k < a.size(); ++k) {
    zk *= z;
    s -= 2.0 * a[k] * zk.real() / static_cast<double>(k);
  }
  return s;
}

int moment_count(const MeasurePiece& p) { return static_cast<int>(p.x.size()) - 1; }

}  // namespace

double log_potential(const GridMeasure& mu, double x) {
  double s = 0.0;
  for (const auto& p : mu.pieces) s += piece_log_potential(p, chebyshev_moments(p, moment_count(p)), x);
  return s;
}

LogPotential::LogPotential(const GridMeasure& mu) : mu_(mu) {
  for (const auto& p : mu.pieces) mom_.push_back(chebyshev_moments(p, moment_count(p)));
}

double LogPotential::operator()(double x) const {
  double s = 0.0;
  for (size_t i = 0; i < mom_.size(); ++i) s += piece_log_potential(mu_.pieces[i], mom_[i], x);
  return s;
}

double LogPotential::piece(int i, double x) const { return piece_log_potential(mu_.pieces[i], mom_[i], x); }

double log_energy(const GridMeasure& mu) {
  double e = 0.0;
  const size_t n = mu.pieces.size();
  std::vector<std::vector<double>> mom(n);
  for (size_t i = 0; i < n; ++i) mom[i] = chebyshev_moments(mu.pieces[i], moment_count(mu.pieces[i]));
  for (size_t i = 0; i < n; ++i) {
    const auto& p = mu.pieces[i];
    const auto& a = mom[i];
    double self = a[0] * a[0] * (std::log(p.half()) - std::log(2.0));
    for (size_t k = 1; k < a.size(); ++k) self -= 2.0 * a[k] * a[k] / static_cast<double>(k);
    e += self;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      for (size_t q = 0; q < p.x.size(); ++q) e += p.w[q] * piece_log_potential(mu.pieces[j], mom[j], p.x[q]);
    }
  }
  return e;
}

}  // namespace rbody
