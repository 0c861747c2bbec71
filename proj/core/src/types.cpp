#include "mcft/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcft/error.hpp"

namespace mcft {

double Box::diagonal() const { return std::hypot(w, h); }

double iou(const Box& a, const Box& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

void validate(const Detection& det) {
  if (!(det.box.w > 0.0) || !(det.box.h > 0.0)) {
    throw MalformedInput("detection " + std::to_string(det.det_id) +
                         ": box width and height must be positive");
  }
  if (det.feature.size() == 0 || std::abs(det.feature.norm() - 1.0) > 1e-9) {
    throw MalformedInput("detection " + std::to_string(det.det_id) +
                         ": feature must have unit norm");
  }
}

Feature normalized(const Feature& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw MalformedInput("cannot normalize a zero vector");
  return v / n;
}

}  // namespace mcft
