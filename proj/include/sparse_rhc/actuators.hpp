#pragma once

#include <vector>

#include "sparse_rhc/mesh.hpp"

namespace srhc {

/// Open axis-aligned rectangle (x0,x1) x (y0,y1).
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double area() const { return (x1 - x0) * (y1 - y0); }
  bool contains(Point p) const { return p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1; }
  bool operator==(const Rect&) const = default;
};

struct ActuatorLayout {
  std::vector<Rect> rectangles;

  int size() const { return static_cast<int>(rectangles.size()); }
  double total_area() const;

  /// Throws std::invalid_argument unless the layout is non-empty and every
  /// rectangle is non-degenerate, inside the unit square and disjoint from
  /// the others.
  void validate() const;

  /// Thirteen squares of side 0.1 (13% of the domain): a 3x3 array centred at
  /// {0.2, 0.5, 0.8}^2 interleaved with a 2x2 array centred at {0.35, 0.65}^2.
  static ActuatorLayout default_layout();

  /// Uniform d_x-by-d_y partition of the rectangle `omega`.
  static ActuatorLayout partition(const Rect& omega, int d_x, int d_y);

  bool operator==(const ActuatorLayout&) const = default;
};

}  // namespace srhc
