#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace mcft {

using Feature = Eigen::VectorXd;

// Axis-aligned box in pixels, top-left corner plus size (MOTChallenge layout).
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double cx() const { return x + 0.5 * w; }
  double cy() const { return y + 0.5 * h; }
  double area() const { return w * h; }
  double diagonal() const;

  static Box from_center(double cx, double cy, double w, double h) {
    return {cx - 0.5 * w, cy - 0.5 * h, w, h};
  }

  friend bool operator==(const Box&, const Box&) = default;
};

// Intersection over union. Symmetric, in [0, 1], 1 iff the boxes coincide.
double iou(const Box& a, const Box& b);

struct Detection {
  int det_id = 0;
  int frame = 0;
  Box box;
  double score = 0.0;
  Feature feature;  // unit norm
};

// Throws MalformedInput unless w > 0, h > 0 and the feature has unit norm
// within 1e-9.
void validate(const Detection& det);

// Returns the L2-normalized vector; throws MalformedInput on a zero vector.
Feature normalized(const Feature& v);

}  // namespace mcft
