#pragma once

#include <functional>
#include <vector>

#include "rbody/common.hpp"
#include "rbody/domain.hpp"

namespace rbody {

// Measure with a density on finitely many disjoint intervals, discretized on
// Chebyshev first-kind nodes of each interval: for s_j the nodes on [-1,1],
//   int f dmu = sum_j f(x_j) * (pi/n) d sqrt(1 - s_j^2) rho(x_j).
// The factor sqrt(1-s^2) rho is smooth for square-root vanishing and
// inverse-square-root diverging edges alike.
struct MeasurePiece {
  double a = 0.0, b = 0.0;
  int segment = 0;
  std::vector<double> s, x, w, density;
  double mass() const;
  double center() const { return 0.5 * (a + b); }
  double half() const { return 0.5 * (b - a); }
};

struct GridMeasure {
  std::vector<MeasurePiece> pieces;

  double mass() const;
  std::vector<double> masses() const;
  double integrate(const std::function<double(double)>& f) const;
  bool empty() const { return pieces.empty(); }
  GridMeasure scaled(double s) const;
};

GridMeasure chebyshev_measure(const std::vector<std::pair<double, double>>& intervals, const std::vector<int>& segments,
                              const std::function<double(double)>& density, int n);
// Normalized Lebesgue measure on each segment with the given masses.
GridMeasure lebesgue_measure(const Domain& d, const std::vector<double>& masses, int n);

// Stieltjes transform int dmu(xi)/(x - xi).
cplx stieltjes(const GridMeasure& mu, cplx x);

// a_k = int T_k((xi - c)/d) dmu_h(xi), k = 0..kmax
std::vector<double> chebyshev_moments(const MeasurePiece& p, int kmax);

// int ln|x - xi| dmu(xi) for real x (any position).
double log_potential(const GridMeasure& mu, double x);

// Same, with the Chebyshev moments computed once.
class LogPotential {
 public:
  explicit LogPotential(const GridMeasure& mu);
  double operator()(double x) const;
  double piece(int i, double x) const;

 private:
  GridMeasure mu_;
  std::vector<std::vector<double>> mom_;
};
// int int ln|x - y| dmu(x) dmu(y)
double log_energy(const GridMeasure& mu);

}  // namespace rbody
