#include "fgeo/numerics/winding.hpp"

#include <cmath>

namespace fgeo::num {

void PlanarPath::validate() const {
  require(samples.size() >= 3, "PlanarPath: need at least 3 samples");
  require(period > 0, "PlanarPath: period must be positive");
  double vmax = 0;
  for (const auto& v : samples) vmax = std::max(vmax, norm2(v));
  require(vmax > 0, "PlanarPath: all samples are zero");
  for (const auto& v : samples)
    require(norm2(v) > 1e-9 * vmax,
            "winding_number: zero-crossing of |v|, winding undefined");
  if (periodic) {
    const Vec2& a = samples.front();
    const Vec2& b = samples.back();
    require(std::hypot(a[0] - b[0], a[1] - b[1]) <= 1e-6 * vmax,
            "PlanarPath: declared periodic but endpoints differ");
  }
}

double winding_number(const PlanarPath& path) {
  path.validate();
  double total = 0;
  for (std::size_t i = 0; i + 1 < path.samples.size(); ++i) {
    const Vec2& a = path.samples[i];
    const Vec2& b = path.samples[i + 1];
    // arg of (b as complex) / (a as complex)
    double cross = a[0] * b[1] - a[1] * b[0];
    double dotp = a[0] * b[0] + a[1] * b[1];
    double jump = std::atan2(cross, dotp);
    require(std::abs(jump) < kPi / 2.0,
            "winding_number: unwrap jump exceeds pi/2 (grid too coarse)");
    total += jump;
  }
  double turns = total / kTwoPi;
  if (path.periodic) {
    double rounded = std::round(turns);
    require(std::abs(turns - rounded) < 1e-6,
            "winding_number: periodic path winding is not near an integer");
    return rounded;
  }
  return turns;
}

}  // namespace fgeo::num
