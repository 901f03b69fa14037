#pragma once

#include <vector>

#include "rbody/common.hpp"
#include "rbody/poly.hpp"

namespace rbody {

enum class EdgeType { Soft, Hard };

struct Cut {
  double a = 0.0, b = 0.0;
  EdgeType lo = EdgeType::Soft, hi = EdgeType::Soft;
  int segment = 0;

  double center() const { return 0.5 * (a + b); }
  double half() const { return 0.5 * (b - a); }
  int hard_count() const { return (lo == EdgeType::Hard) + (hi == EdgeType::Hard); }
};

// Joukowski map of a cut: x = c + d (J + 1/J)/2 with |J| >= 1 off the cut.
cplx joukowski_inverse(const Cut& c, cplx x);
cplx joukowski(const Cut& c, cplx J);

class Support {
 public:
  Support() = default;
  explicit Support(std::vector<Cut> cuts);

  const std::vector<Cut>& cuts() const { return cuts_; }
  int count() const { return static_cast<int>(cuts_.size()); }
  int genus() const { return count() - 1; }
  int hard_count() const;
  std::vector<double> edges() const;
  std::vector<double> hard_edges() const;
  const Poly& sigma() const { return sigma_s_; }
  const Poly& sigma_hd() const { return sigma_hd_; }
  int cut_of(double x) const;  // -1 if x is in no cut

  // Principal-branch sqrt(sigma_S), ~ x^{g+1} at infinity, cut along S.
  cplx sqrt_sigma(cplx x) const;
  // Boundary value from below on the cut interior.
  cplx sqrt_sigma_minus(double x) const;

 private:
  std::vector<Cut> cuts_;
  Poly sigma_s_, sigma_hd_;
};

}  // namespace rbody
