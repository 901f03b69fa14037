#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rbody/common.hpp"
#include "rbody/poly.hpp"

namespace rbody {

// c * prod_j f[j](x_j)
struct SepTerm {
  double c = 1.0;
  std::vector<Poly> f;
};

// Symmetric two-body kernel analytic near A x A. Segment indices let piecewise
// kernels (defined differently on different segment pairs) be evaluated on
// contours; -1 means "unknown, infer from position".
class Kernel2 {
 public:
  virtual ~Kernel2() = default;
  virtual cplx value(cplx x, cplx y, int sx, int sy) const = 0;
  virtual cplx d1(cplx x, cplx y, int sx, int sy) const = 0;
  virtual bool in_domain(cplx x, cplx y) const = 0;
  virtual std::string name() const = 0;
  // true when value(x, y) depends on x - y only
  virtual bool translation_invariant() const { return false; }
};

class Func1 {
 public:
  virtual ~Func1() = default;
  virtual cplx value(cplx x, int seg) const = 0;
  virtual cplx deriv(cplx x, int seg) const = 0;
  virtual std::string name() const = 0;
};

// One arity block of a concatenated interaction, entering the Gibbs weight as
// weight * N^{2-a}/a! * sum over ordered a-tuples.
struct Component {
  int arity = 1;
  double weight = 1.0;
  std::vector<SepTerm> sep;  // symmetrized separable terms
  std::shared_ptr<const Kernel2> kernel;
  std::shared_ptr<const Func1> func;

  bool separable() const { return !kernel && !func; }
  cplx value(const cplx* x, const int* seg = nullptr) const;
  cplx d1(const cplx* x, const int* seg = nullptr) const;
  bool in_domain(const cplx* x) const;
};

class RBodyPotential {
 public:
  RBodyPotential() = default;
  explicit RBodyPotential(std::vector<Component> comps);

  int r() const;
  const std::vector<Component>& components() const { return comps_; }
  void add(Component c);
  RBodyPotential scaled(double s) const;
  bool has_kernel() const;
  int max_poly_degree() const;

  // Concatenated r-body value T(x_1..x_r) = sum_comp (r-a)! sum_{|J|=a} T_a(x_J),
  // or its derivative in x_1.
  cplx eval(const std::vector<cplx>& pts, bool derivative) const;
  std::string describe() const;

 private:
  std::vector<Component> comps_;
};

// Builders
Component separable_component(int arity, const std::vector<SepTerm>& raw, double weight = 1.0);
Component one_body_polynomial(const Poly& p, double weight = 1.0);
Component kernel_component(std::shared_ptr<const Kernel2> k, double weight = 1.0);
Component func_component(std::shared_ptr<const Func1> f, double weight = 1.0);

// Presets (analytic remainders; the Coulomb part lives in the Vandermonde factor).
std::shared_ptr<const Kernel2> sinh_kernel(double beta, double strength);
std::shared_ptr<const Kernel2> onmodel_kernel(double beta, double n);
std::shared_ptr<const Kernel2> qdeformed_kernel(double beta, double q, double strength);

// log(sinh(z)/z) and d/dz of it, accurate near z = 0.
cplx log_sinhc(cplx z);
cplx dlog_sinhc(cplx z);

// Symmetrized evaluation helpers
cplx eval_potential(const RBodyPotential& T, const std::vector<cplx>& pts, bool derivative);

}  // namespace rbody
