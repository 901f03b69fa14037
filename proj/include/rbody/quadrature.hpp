#pragma once

#include <vector>

namespace rbody {

struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta on [-1,1] (Golub-Welsch).
QuadRule gauss_jacobi(int n, double alpha, double beta);
QuadRule gauss_legendre(int n);
// Chebyshev first-kind nodes cos((2j+1)pi/(2n)), weights pi/n (weight 1/sqrt(1-x^2)).
QuadRule gauss_chebyshev1(int n);

// Map a rule on [-1,1] to [a,b] for the plain measure dx (the Jacobi factor is not rescaled).
QuadRule map_rule(const QuadRule& r, double a, double b);

}  // namespace rbody
