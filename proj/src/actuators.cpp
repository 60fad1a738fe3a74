#include "sparse_rhc/actuators.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace srhc {

double ActuatorLayout::total_area() const {
  double total = 0.0;
  for (const auto& r : rectangles) total += r.area();
  return total;
}

void ActuatorLayout::validate() const {
  if (rectangles.empty()) throw std::invalid_argument("actuator layout is empty");
  for (std::size_t i = 0; i < rectangles.size(); ++i) {
    const Rect& r = rectangles[i];
    const std::string tag = "actuator " + std::to_string(i + 1);
    if (!(r.x1 > r.x0) || !(r.y1 > r.y0)) throw std::invalid_argument(tag + " is degenerate");
    if (r.x0 < 0.0 || r.y0 < 0.0 || r.x1 > 1.0 || r.y1 > 1.0) {
      throw std::invalid_argument(tag + " lies outside the unit square");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const Rect& q = rectangles[j];
      const bool overlap = std::min(r.x1, q.x1) > std::max(r.x0, q.x0) &&
                           std::min(r.y1, q.y1) > std::max(r.y0, q.y0);
      if (overlap) {
        throw std::invalid_argument(tag + " overlaps actuator " + std::to_string(j + 1));
      }
    }
  }
}

ActuatorLayout ActuatorLayout::default_layout() {
  constexpr double half = 0.05;
  ActuatorLayout layout;
  auto add = [&](double cx, double cy) {
    layout.rectangles.push_back({cx - half, cy - half, cx + half, cy + half});
  };
  for (double cy : {0.2, 0.5, 0.8}) {
    for (double cx : {0.2, 0.5, 0.8}) add(cx, cy);
  }
  for (double cy : {0.35, 0.65}) {
    for (double cx : {0.35, 0.65}) add(cx, cy);
  }
  return layout;
}

ActuatorLayout ActuatorLayout::partition(const Rect& omega, int d_x, int d_y) {
  if (d_x < 1 || d_y < 1) throw std::invalid_argument("partition: counts must be positive");
  ActuatorLayout layout;
  const double wx = (omega.x1 - omega.x0) / d_x;
  const double wy = (omega.y1 - omega.y0) / d_y;
  for (int ky = 0; ky < d_y; ++ky) {
    for (int kx = 0; kx < d_x; ++kx) {
      layout.rectangles.push_back({omega.x0 + kx * wx, omega.y0 + ky * wy,
                                   omega.x0 + (kx + 1) * wx, omega.y0 + (ky + 1) * wy});
    }
  }
  return layout;
}

}  // namespace srhc
