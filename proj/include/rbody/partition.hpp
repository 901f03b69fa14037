#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rbody/equilibrium.hpp"
#include "rbody/expansion.hpp"
#include "rbody/operators.hpp"
#include "rbody/theta.hpp"

namespace rbody {

// One-body potential of the decoupled reference model:
//   hat(x) = sum_comp w/(a-1)! int T_a(x, .) dmu^{a-1} + beta sum_{h' != seg(x)} int_{S_h'} ln|x - xi| dmu(xi)
// continued analytically off the real axis. Its effective potential coincides with
// that of T on every segment.
std::shared_ptr<const Func1> hat_potential(const EquilibriumMeasure& eq);

// beta ln|x - y| between different segments, zero inside a segment. Entering with
// weight -1 it cancels the cross-segment Vandermonde.
std::shared_ptr<const Kernel2> cross_log_kernel(double beta, const Domain& d);

// t T + (1 - t)(hat - cross log); t = 1 is T, t = 0 the decoupled reference.
RBodyPotential interpolated_potential(const RBodyPotential& T, std::shared_ptr<const Func1> hat,
                                      std::shared_ptr<const Kernel2> cross, double t);

// Coefficients of N^2, N, 1 in the expectation of the arity-weighted sum of D,
//   sum_comp w N^{2-a}/a! E[sum over a-tuples of D_a].
std::array<double, 3> linear_response(const CorrelatorCache& cc, const RBodyPotential& D);

struct FreeEnergyEntry {
  std::vector<double> eps;
  double energy = 0.0;                // E[mu_eq]
  std::array<double, 3> G{};          // ln Z_T - ln Z_ref at orders N^2, N, 1
  double reference_energy = 0.0;      // E_ref
  double edge_drift = 0.0;            // max edge motion along the interpolation
  std::vector<double> C;
  std::shared_ptr<const EquilibriumMeasure> eq;
};

FreeEnergyEntry free_energy_coeffs(const ModelConfig& cfg, const std::vector<double>& eps, int t_nodes = 16,
                                   bool resolve = true);

// Fixed-filling coefficient data around eps*, one genus only (g = 1): F^{[k]}
// with k = -2, -1, 0 and their derivatives along eta = e^1 - e^0 up to order 4.
//   F^{[-2]} = -E,  F^{[-1]} = G[1],  F^{[0]} = G[2]
// The multinomial and the reference normalization are part of this data.
struct FreeEnergyData {
  int g = 0;
  double beta = 2.0;
  std::vector<double> eps_star;
  double step = 0.01;
  std::vector<double> offsets;                  // stencil offsets along eta
  std::vector<std::array<double, 3>> values;    // F^{[-2]}, F^{[-1]}, F^{[0]} per stencil point
  std::array<std::array<double, 5>, 3> deriv{}; // [k+2][l]
  std::array<double, 3> richardson{};           // |f'' from h and 2h| for each k
  double edge_drift = 0.0;
  double gamma = 0.0;
  std::vector<EdgeClass> edges;
  std::vector<double> C_star;
  std::shared_ptr<const EquilibriumMeasure> eq_star;
};

FreeEnergyData build_free_energy_data(const ModelConfig& cfg, double step = 0.01, int t_nodes = 16, int jobs = 1);

// Central differences from the degree-4 interpolant of a 5-point stencil.
std::array<double, 5> stencil_derivatives(const std::array<double, 5>& f, double h);

// Derivative of mu_eq along eta: Stieltjes transform from the bordered system and
// its density on the cuts.
struct MassDerivative {
  CVec coef;
  GridMeasure nu;
  std::vector<double> cut_mass;
};
MassDerivative mass_derivative(const OperatorSet& ops, const CVec& eta, int cheb = 128);

// Hessian of E along eta, eta' from the second variation of the energy:
//   -sum_h eta_h d_{eta'} C_h.
struct HessianRoutes {
  RMat fd;       // finite differences of E
  RMat q;        // second-variation route
  double rel_diff = 0.0;
  double constancy = 0.0;  // spread of d C_h over each cut
};
HessianRoutes energy_hessian(const ModelConfig& cfg, const FreeEnergyData& data);

struct ZTerm {
  std::string name;
  cplx value;
};

struct ZAssembly {
  int N = 0;
  double log_power = 0.0;        // ((beta/2) N + gamma) ln N
  double log_smooth = 0.0;       // sum_k N^{-k} F^{[k]}(eps*)
  cplx bracket_theta = 0.0;      // bracket applied to Theta
  double theta_only = 0.0;       // Theta alone
  double gammaN = 0.0;
  std::vector<ZTerm> terms;
  double log_Z() const;          // without the N power
};

ZAssembly assemble_Z(int N, const FreeEnergyData& data, int k0 = 2);
// ln sum_{N_1} exp(sum_k N^{-k} F^{[k]}(N_1/N)) with the Taylor surrogates of the same data.
double lattice_sum_log(int N, const FreeEnergyData& data);

struct Fluctuations {
  cplx M1 = 0.0, M2 = 0.0;
  std::vector<double> w;  // d/deta int phi dmu along each eta^h
  double mean_leading = 0.0;
};
Fluctuations linear_stat_fluctuations(const std::function<cplx(cplx)>& phi, const CorrelatorCache& cc);

// E[exp(i s (sum phi(lambda_j) - N int phi dmu))] at leading order.
cplx clt_charfn(double s, const Fluctuations& f, int N, const FreeEnergyData* data);

}  // namespace rbody
