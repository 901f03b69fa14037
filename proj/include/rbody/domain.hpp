#pragma once

#include <utility>
#include <vector>

#include "rbody/common.hpp"

namespace rbody {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// Disjoint ordered union of closed segments. Endpoints may bind the support
// (hard-edge candidates); by default every endpoint may.
struct Domain {
  std::vector<Interval> segments;
  std::vector<std::pair<bool, bool>> edge_flags;

  int genus() const { return static_cast<int>(segments.size()) - 1; }
  int count() const { return static_cast<int>(segments.size()); }
  int segment_of(double x) const;  // -1 if outside
  int nearest_segment(double x) const;
  bool contains(double x) const { return segment_of(x) >= 0; }
  double lo() const { return segments.front().lo; }
  double hi() const { return segments.back().hi; }
};

Domain build_domain(const std::vector<std::pair<double, double>>& intervals);

}  // namespace rbody
