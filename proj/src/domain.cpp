#include "rbody/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rbody {

int Domain::segment_of(double x) const {
  for (int h = 0; h < count(); ++h)
    if (segments[h].contains(x)) return h;
  return -1;
}

int Domain::nearest_segment(double x) const {
  int best = 0;
  double bd = 1e300;
  for (int h = 0; h < count(); ++h) {
    const auto& s = segments[h];
    double d = x < s.lo ? s.lo - x : (x > s.hi ? x - s.hi : 0.0);
    if (d < bd) {
      bd = d;
      best = h;
    }
  }
  return best;
}

Domain build_domain(const std::vector<std::pair<double, double>>& intervals) {
  if (intervals.empty()) throw domain_error("build_domain: no intervals");
  std::vector<size_t> order(intervals.size());
  std::iota(order.begin(), order.end(), 0);
  for (size_t i = 0; i < intervals.size(); ++i) {
    auto [a, b] = intervals[i];
    if (!std::isfinite(a) || !std::isfinite(b))
      throw domain_error("build_domain: interval " + std::to_string(i) + " has a non-finite endpoint");
    if (!(b > a)) throw domain_error("build_domain: interval " + std::to_string(i) + " has zero length");
  }
  std::sort(order.begin(), order.end(), [&](size_t i, size_t j) { return intervals[i].first < intervals[j].first; });
  Domain d;
  for (size_t k = 0; k < order.size(); ++k) {
    auto [a, b] = intervals[order[k]];
    if (k > 0 && a <= d.segments.back().hi)
      throw domain_error("build_domain: overlap between intervals " + std::to_string(order[k - 1]) + " and " +
                         std::to_string(order[k]));
    d.segments.push_back({a, b});
    d.edge_flags.push_back({true, true});
  }
  return d;
}

}  // namespace rbody
