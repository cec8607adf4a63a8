#pragma once

#include <vector>

#include "fgeo/common.hpp"

namespace fgeo::num {

// A planar path sampled on a uniform grid over [0, T].
struct PlanarPath {
  std::vector<Vec2> samples;
  double period = 0.0;
  bool periodic = true;

  void validate() const;
};

// Total angular increment phi(T) - phi(0) in full turns, via continuous
// unwrapping of arg v(t). Adjacent-sample jumps must stay below pi/2
// (unwrap guard); any |v| near zero rejects the path. For periodic paths a
// result within tolerance of an integer is rounded to it.
double winding_number(const PlanarPath& path);

}  // namespace fgeo::num
