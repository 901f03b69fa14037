#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rbody/domain.hpp"
#include "rbody/equilibrium.hpp"
#include "rbody/potential.hpp"

namespace rbody {

enum class ConvexityMode { Fourier, Sampled };

struct ConvexityOptions {
  int samples = 16;     // random zero-mass densities in sampled mode
  int degree = 6;       // Legendre degree of each random density
  std::uint64_t seed = 1;
  int kpoints = 400;    // Fourier scan grid
  double kmin = 1e-3;
  double kmax = 0.0;    // 0 means 400 / diam(A)
};

struct ConvexityReport {
  ConvexityMode mode = ConvexityMode::Sampled;
  double symbol_min = 0.0;  // min_k |k| F[q](k), Fourier mode
  double k_at_min = 0.0;
  std::vector<double> q_values;  // sampled mode
  std::vector<std::string> notes;
  bool pass = false;
};

// Fourier mode: T restricted to a translation-invariant two-body kernel u(x - y)
// plus one-body terms; u is shifted by u(diam A) and truncated to |z| <= diam A.
// Sampled mode: Q[nu] = Q_C[nu] + Q_T[nu] on random smooth zero-mass densities.
// Interactions of arity >= 3 are averaged against eq (required then).
ConvexityReport check_convexity(const RBodyPotential& T, const Domain& A, double beta, ConvexityMode mode,
                                const EquilibriumMeasure* eq = nullptr, const ConvexityOptions& opt = {});

using Density = std::function<double(double)>;

// beta int_0^inf |nu^(k)|^2 / k dk  (= -beta int int ln|x - y| dnu dnu for zero mass)
double coulomb_form(const Density& nu, const Domain& A, double beta);
// -int int tau(x, y) dnu dnu with tau the two-point reduction of T
double interaction_form(const Density& nu, const Domain& A, const RBodyPotential& T,
                        const EquilibriumMeasure* eq = nullptr);
double quadratic_form(const Density& nu, const Domain& A, const RBodyPotential& T, double beta,
                      const EquilibriumMeasure* eq = nullptr);

// |k| F[q](k) = beta pi - |k| u^(k) for a translation-invariant kernel.
double fourier_symbol(const RBodyPotential& T, const Domain& A, double beta, double k);

// 2 int_0^inf (-ln x) cos(kx) e^{-eps x} dx by oscillatory quadrature, and its closed form.
double coulomb_fourier_numeric(double k, double eps);
double coulomb_fourier_abel(double k, double eps);

// Random smooth zero-mass density: (1 - t^2) sum c_n P_n(t) on each segment.
Density random_zero_mass_density(const Domain& A, int degree, std::uint64_t seed);

}  // namespace rbody
