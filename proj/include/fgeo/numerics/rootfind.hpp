#pragma once

#include <functional>

namespace fgeo::num {

// Brent root bracketing: f(a), f(b) must have opposite signs.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol = 1e-13, int max_iter = 200);

// Golden-section / parabolic minimization of a unimodal function on [a,b].
double brent_minimize(const std::function<double(double)>& f, double a,
                      double b, double xtol = 1e-11, int max_iter = 200);

// Central difference with one Richardson extrapolation step.
// Matches the lift-check convention: base step h, refined with h/2.
double deriv_central(const std::function<double(double)>& f, double x,
                     double h = 1e-5);

}  // namespace fgeo::num
