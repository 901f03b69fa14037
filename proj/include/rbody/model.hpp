#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "rbody/domain.hpp"
#include "rbody/potential.hpp"

namespace rbody {

struct Numerics {
  int nodes = 256;          // trapezoid nodes per contour
  int cheb_degree = 128;    // Chebyshev nodes per cut for measures
  int segment_nodes = 96;   // product-integration nodes per segment for kernel averages
  int contour_levels = 4;
  double quad_tol = 1e-10;
  double tol_eq = 1e-7;
  double tol_fixed_point = 1e-12;
  int max_outer = 200;
  double damping = 0.5;
  int max_newton = 60;
};

struct ModelConfig {
  double beta = 2.0;
  int N = 100;
  Domain domain;
  RBodyPotential potential;
  std::optional<std::vector<double>> filling;
  Numerics numerics;

  // Particle counts per segment: floor(N eps_h) plus largest-remainder correction.
  std::vector<int> particle_counts() const {
    std::vector<int> n(domain.count(), 0);
    if (!filling) return n;
    const auto& e = *filling;
    std::vector<double> rem(e.size());
    int total = 0;
    for (size_t h = 0; h < e.size(); ++h) {
      double v = N * e[h];
      n[h] = static_cast<int>(std::floor(v));
      rem[h] = v - n[h];
      total += n[h];
    }
    std::vector<size_t> order(e.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return rem[a] > rem[b]; });
    for (size_t i = 0; total < N; ++i, ++total) ++n[order[i % order.size()]];
    return n;
  }

  void validate() const {
    if (!(beta > 0.0)) throw config_error("beta must be positive");
    if (N < 1) throw config_error("N must be positive");
    if (domain.count() == 0) throw config_error("domain has no segments");
    if (filling) {
      if (static_cast<int>(filling->size()) != domain.count())
        throw config_error("filling must have one entry per segment");
      double s = 0.0;
      for (double v : *filling) {
        if (v < 0.0) throw config_error("filling fractions must be non-negative");
        s += v;
      }
      if (std::abs(s - 1.0) > 1e-12) throw config_error("filling fractions must sum to 1");
    }
  }
};

}  // namespace rbody
