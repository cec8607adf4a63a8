#pragma once

#include <functional>

namespace fgeo::num {

// Adaptive Gauss-Kronrod (7,15) quadrature of a continuous integrand.
// Subdivides until the absolute error estimate is below abs_tol.
// Throws fgeo::error on non-finite integrand samples or depth exhaustion.
double quadrature(const std::function<double(double)>& f, double a, double b,
                  double abs_tol = 1e-10);

}  // namespace fgeo::num
