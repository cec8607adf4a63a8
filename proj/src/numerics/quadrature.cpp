#include "fgeo/numerics/quadrature.hpp"

#include <cmath>

#include "fgeo/common.hpp"

namespace fgeo::num {
namespace {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1]. Even nodes (0,2,..) are the
// Kronrod extension, odd nodes carry the embedded 7-point Gauss rule.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double integral;
  double err;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fc = f(c);
  require(std::isfinite(fc), "quadrature: non-finite integrand sample");
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  for (int i = 0; i < 7; ++i) {
    double x = h * kXgk[i];
    double f1 = f(c - x), f2 = f(c + x);
    require(std::isfinite(f1) && std::isfinite(f2),
            "quadrature: non-finite integrand sample");
    double s = f1 + f2;
    res_k += kWgk[i] * s;
    if (i % 2 == 1) res_g += kWg[i / 2] * s;
  }
  return {res_k * h, std::abs((res_k - res_g) * h)};
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double tol, const Panel& whole, int depth) {
  if (whole.err <= tol || (b - a) < 1e-14 * (1.0 + std::abs(a))) {
    require(depth > 0 || whole.err <= 64 * tol,
            "quadrature: failed to reach requested tolerance");
    return whole.integral;
  }
  require(depth > 0, "quadrature: recursion depth exhausted");
  double c = 0.5 * (a + b);
  Panel left = gk15(f, a, c);
  Panel right = gk15(f, c, b);
  return adapt(f, a, c, 0.5 * tol, left, depth - 1) +
         adapt(f, c, b, 0.5 * tol, right, depth - 1);
}

}  // namespace

double quadrature(const std::function<double(double)>& f, double a, double b,
                  double abs_tol) {
  require(abs_tol > 0, "quadrature: tolerance must be positive");
  if (a == b) return 0.0;
  Panel whole = gk15(f, a, b);
  return adapt(f, a, b, abs_tol, whole, 48);
}

}  // namespace fgeo::num
