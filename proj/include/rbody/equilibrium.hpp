#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rbody/analytic.hpp"
#include "rbody/contour.hpp"
#include "rbody/measure.hpp"
#include "rbody/model.hpp"
#include "rbody/support.hpp"

namespace rbody {

// One-body reduction V(x) = -(2/beta) sum_comp w/(a-1)! int T_a(x, .) dmu^{a-1}.
// Dense kernels are averaged with product-integration weights on fixed
// Chebyshev nodes of each segment, so that damped mixing stays finite-dimensional.
class OneBody {
 public:
  struct KernelTerm {
    std::shared_ptr<const Kernel2> kernel;
    std::vector<double> xi;
    std::vector<int> seg;
    std::vector<double> omega;
  };
  struct FuncTerm {
    std::shared_ptr<const Func1> f;
    double factor = 1.0;
  };

  Poly poly;
  std::vector<KernelTerm> kernels;
  std::vector<FuncTerm> funcs;

  cplx value(cplx x, int seg = -1) const;
  cplx deriv(cplx x, int seg = -1) const;
  // (1 - theta) * this + theta * other; both must come from the same potential and domain.
  OneBody mixed(const OneBody& other, double theta) const;
  double distance(const OneBody& other, const Domain& d) const;  // sup of |V - V'| over a grid of A
};

OneBody one_body_potential(const RBodyPotential& T, const GridMeasure& mu, double beta, const Domain& d,
                           int segment_nodes = 96);
// Pure interaction part of the energy functional: sum_comp w/a! int T_a dmu^a.
double interaction_average(const RBodyPotential& T, const GridMeasure& mu);

struct EquilibriumMeasure {
  double beta = 2.0;
  Domain domain;
  RBodyPotential T;
  Support support;
  bool fixed_filling = false;
  std::vector<double> filling;    // per segment
  std::vector<double> cut_mass;   // per cut
  std::vector<double> C;          // Lagrange constant per cut
  OneBody V;
  Poly pol;                       // polynomial part of W sigma_hd / sigma^{1/2}
  int D = 0;                      // g + 1 - #hard
  std::shared_ptr<ContourFamily> family;
  std::shared_ptr<const Grid> grid;
  CVec G;                         // V' sigma_hd / (2 sigma^{1/2}) on the grid
  CVec G_coef;                    // its Cauchy projection
  std::vector<CVec> G_inner;      // Laurent data of G per circle
  CVec W_grid, Vp_grid, M_grid, sqrt_sigma_grid, sigma_hd_grid;
  GridMeasure density;
  std::shared_ptr<LogPotential> logpot;
  int outer_iterations = 0;
  int newton_iterations = 0;
  double fixed_point_residual = 0.0;
  std::vector<std::string> notes;

  int genus() const { return support.genus(); }
  int segment_of_cut(int h) const { return support.cuts()[h].segment; }
  int segment_hint(cplx x) const;

  cplx Vp(cplx x) const { return V.deriv(x, segment_hint(x)); }
  cplx W(cplx x) const;
  cplx M(cplx x) const;
  double density_at(double x) const;
  double log_potential(double x) const { return (*logpot)(x); }
  double effective_potential(double x) const;
  AnalyticFunction W_function() const;
};

struct SolveOptions {
  std::optional<std::vector<double>> filling;
  std::optional<std::vector<Cut>> initial_cuts;
};

EquilibriumMeasure solve_equilibrium(const ModelConfig& cfg, const SolveOptions& opt = {});

// Energy functional -sum_comp w/a! int T_a dmu^a - (beta/2) int int ln|x-y|.
double energy(const GridMeasure& mu, const RBodyPotential& T, double beta);
double effective_potential(const EquilibriumMeasure& eq, double x);

struct HypothesisReport {
  double max_teff_off_support = 0.0;
  double max_abs_teff_on_support = 0.0;
  bool confinement_ok = false;
  bool off_critical = false;
  double min_regularized_density = 0.0;
  std::vector<std::pair<EdgeType, EdgeType>> edges;
  std::vector<std::string> notes;
  bool pass() const { return confinement_ok && off_critical; }
};

HypothesisReport check_hypotheses(const EquilibriumMeasure& eq, double margin = 1e-9);

// Density divided by its edge behaviour |x-a|^{+-1/2}|b-x|^{+-1/2} on cut h.
double regularized_density(const EquilibriumMeasure& eq, int h, double x);

}  // namespace rbody
