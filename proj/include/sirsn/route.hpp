// Route: an axis-parallel polyline with exact cost, plus the affine frame
// taking lattice coordinates to the continuum frame of the invariance
// wrapper.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "sirsn/cost.hpp"
#include "sirsn/dyadic.hpp"

namespace sirsn {

// continuum = scale * rotate(angle) * (lattice - translate)
struct AffineFrame {
  double translate_x = 0.0, translate_y = 0.0;
  double angle = 0.0;
  double scale = 1.0;

  bool is_identity() const {
    return translate_x == 0 && translate_y == 0 && angle == 0 && scale == 1.0;
  }
  std::pair<double, double> apply(double x, double y) const {
    x -= translate_x;
    y -= translate_y;
    double c = std::cos(angle), s = std::sin(angle);
    return {scale * (c * x - s * y), scale * (c * y + s * x)};
  }
};

struct RouteSegment {
  uint8_t axis;        // 0: horizontal (x varies), 1: vertical (y varies)
  DyadicScalar line;   // the fixed coordinate
  DyadicScalar a, b;   // varying coordinate, a != b, in traversal order
  HeightValue line_height() const { return line.height(); }
  DyadicScalar length() const { return (b - a).abs(); }
};

struct Route {
  DyadicPoint z1, z2;
  std::vector<DyadicPoint> turn_points;  // endpoints included; >= 2 entries
  int32_t level = 0;                     // lattice level of the computation
  DyadicScalar total_length;
  PathCost cost;
  double secondary_weight = 0.0;
  uint64_t tie_count = 1;          // distinct minimum-cost paths (saturating)
  uint32_t weight_tie_events = 0;  // double-precision weight ties hit
  AffineFrame frame;

  // diagnostics
  uint64_t settled_states = 0;
  int32_t box_generations = 0;
  int64_t box_half_side_units = 0;

  std::vector<RouteSegment> segments() const {
    std::vector<RouteSegment> out;
    for (size_t i = 0; i + 1 < turn_points.size(); ++i) {
      const auto& p = turn_points[i];
      const auto& q = turn_points[i + 1];
      if (p.y == q.y)
        out.push_back({0, p.y, p.x, q.x});
      else
        out.push_back({1, p.x, p.y, q.y});
    }
    return out;
  }

  Route reversed() const {
    Route r = *this;
    std::swap(r.z1, r.z2);
    std::reverse(r.turn_points.begin(), r.turn_points.end());
    return r;
  }

  bool same_point_set(const Route& other) const {
    if (turn_points.size() != other.turn_points.size()) return false;
    if (turn_points == other.turn_points) return true;
    auto rev = other.turn_points;
    std::reverse(rev.begin(), rev.end());
    return turn_points == rev;
  }

  // Segments lying on lines of height >= h0: the stabilized subroute used by
  // the refinement diagnostics.
  std::vector<RouteSegment> segments_at_height(int32_t h0) const {
    std::vector<RouteSegment> out;
    for (const auto& s : segments())
      if (s.line_height().v >= h0) out.push_back(s);
    return out;
  }

  // Euclidean length in the continuum frame (rotation/translation preserve
  // length; the scale multiplies it).
  double continuum_length() const { return frame.scale * total_length.to_double(); }
};

}  // namespace sirsn
