#pragma once

#include <initializer_list>
#include <string>

#include "mcft/types.hpp"

namespace mcft::testing {

inline Feature vec(std::initializer_list<double> v) {
  Feature f(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) f[i++] = x;
  return f;
}

inline Detection det_at(int id, int frame, double cx, double cy, double w = 10.0, double h = 10.0,
                        Feature feature = vec({1.0, 0.0}), double score = 0.9) {
  Detection d;
  d.det_id = id;
  d.frame = frame;
  d.box = Box::from_center(cx, cy, w, h);
  d.score = score;
  d.feature = std::move(feature);
  return d;
}

inline std::string data_path(const std::string& name) { return std::string(MCFT_TEST_DATA) + "/" + name; }

}  // namespace mcft::testing
