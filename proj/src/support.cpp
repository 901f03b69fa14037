#include "rbody/support.hpp"

#include <cmath>

namespace rbody {

cplx joukowski_inverse(const Cut& c, cplx x) {
  cplx u = (x - c.center()) / c.half();
  cplx J = u + std::sqrt(u - 1.0) * std::sqrt(u + 1.0);
  return J;
}

cplx joukowski(const Cut& c, cplx J) { return c.center() + 0.5 * c.half() * (J + 1.0 / J); }

Support::Support(std::vector<Cut> cuts) : cuts_(std::move(cuts)) {
  if (cuts_.empty()) throw domain_error("support: no cuts");
  for (size_t h = 0; h < cuts_.size(); ++h) {
    if (!(cuts_[h].b > cuts_[h].a)) throw domain_error("support: degenerate cut " + std::to_string(h));
    if (h > 0 && cuts_[h].a <= cuts_[h - 1].b) throw domain_error("support: overlapping cuts");
  }
  sigma_s_ = sigma_poly(edges());
  sigma_hd_ = sigma_poly(hard_edges());
}

int Support::hard_count() const {
  int n = 0;
  for (const auto& c : cuts_) n += c.hard_count();
  return n;
}

std::vector<double> Support::edges() const {
  std::vector<double> e;
  for (const auto& c : cuts_) {
    e.push_back(c.a);
    e.push_back(c.b);
  }
  return e;
}

std::vector<double> Support::hard_edges() const {
  std::vector<double> e;
  for (const auto& c : cuts_) {
    if (c.lo == EdgeType::Hard) e.push_back(c.a);
    if (c.hi == EdgeType::Hard) e.push_back(c.b);
  }
  return e;
}

int Support::cut_of(double x) const {
  for (int h = 0; h < count(); ++h)
    if (x >= cuts_[h].a && x <= cuts_[h].b) return h;
  return -1;
}

cplx Support::sqrt_sigma(cplx x) const {
  cplx s = 1.0;
  for (const auto& c : cuts_) s *= std::sqrt(x - c.a) * std::sqrt(x - c.b);
  return s;
}

cplx Support::sqrt_sigma_minus(double x) const {
  cplx s = 1.0;
  for (const auto& c : cuts_) {
    if (x >= c.a && x <= c.b)
      s *= cplx(0.0, -std::sqrt((x - c.a) * (c.b - x)));
    else if (x > c.b)
      s *= std::sqrt((x - c.a) * (x - c.b));
    else
      s *= -std::sqrt((c.a - x) * (c.b - x));
  }
  return s;
}

}  // namespace rbody
