#pragma once

// S^2 inside SU(2), S^3 as unit quaternions (w1, w2), the frame map G from
// S^3 to the unit tangent bundle of the round sphere, and the contact forms
// entering the lift checks.
//
// Orientation convention: the Liouville-type forms on the unit (co)tangent
// bundle are evaluated with the co-orientation that makes the pullback of the
// unit-bundle contact form through the frame map equal +2x the ambient
// contact form on S^3; that sign is pinned by the factor-2 tests.

#include <cstdint>
#include <functional>

#include "fgeo/common.hpp"

namespace fgeo::geom {

// Point of S^2 in the (t, z) chart; ambient unit vector (t, Re z, Im z).
struct SpherePoint {
  double t = 1.0;
  Cx z{0.0, 0.0};

  Vec3 ambient() const { return {t, z.real(), z.imag()}; }
  static SpherePoint from_ambient(const Vec3& x) { return {x[0], {x[1], x[2]}}; }
  void validate(double tol = 1e-12) const;
};

struct SU2Element {
  Cx w1{1.0, 0.0}, w2{0.0, 0.0};

  C2 c2() const { return {w1, w2}; }
  SU2Element negated() const { return {-w1, -w2}; }
  void validate(double tol = 1e-12) const;
};

// Geodesic polar chart: t = cos r, z = sin r e^{i phi}. Singular at r in {0, pi}.
struct PolarChartPoint {
  double r = kPi / 2;
  double phi = 0.0;

  void validate(double pole_margin = 1e-8) const;
};

Vec3 polar_to_ambient(const PolarChartPoint& p);
PolarChartPoint ambient_to_polar(const Vec3& x, double pole_margin = 1e-8);
// Chart frame at p: unit radial vector and the coordinate field d/d(phi)
// (length sin r).
Vec3 polar_dr(const PolarChartPoint& p);
Vec3 polar_dphi(const PolarChartPoint& p);

// Element of the unit tangent bundle M0 of the round sphere.
struct UnitTangentPair {
  Vec3 x{1, 0, 0};
  Vec3 v{0, 1, 0};

  void validate(double tol = 1e-12) const;
};

// The frame map in closed form: x = (2 Im(w1 w2), conj(w1)^2 + w2^2),
// v = (-2 Re(w1 w2), i (conj(w1)^2 - w2^2)).
UnitTangentPair gmap(const SU2Element& a);
// Same map through explicit 2x2 conjugation (A^{-1} j A, A^{-1} k A);
// independent route kept for cross-checks.
UnitTangentPair gmap_by_conjugation(const SU2Element& a);
// Inverse up to the double cover; the returned representative reconstructs
// the input within tol, else throws.
SU2Element gmap_inverse(const UnitTangentPair& m, double tol = 1e-9);

// Ambient contact form on S^3 at a: lambda0(xi) = <i a, xi>.
double lambda0(const SU2Element& a, const C2& xi);
// Projection of an ambient C^2 vector onto T_a S^3.
C2 tangent_project(const SU2Element& a, const C2& xi);
// Great-circle curve a(s) with a(0)=a, a'(0)=xi (xi tangent, any length).
SU2Element s3_geodesic(const SU2Element& a, const C2& xi, double s);

// Both sides of the pullback identity at (a, xi): the pulled-back unit-bundle
// contact form (finite differences, Richardson-extrapolated) and lambda0.
struct PullbackSides {
  double pulled_back;
  double ambient2;  // 2 * lambda0(xi)
};
PullbackSides gmap_pullback_sides(const SU2Element& a, const C2& xi);
// Ratio pulled_back / (2 lambda0) * 2; throws when |lambda0(xi)| is below the
// kernel threshold.
double gmap_pullback_ratio(const SU2Element& a, const C2& xi);
// Max |ratio - 2| over n random non-kernel samples.
double gmap_pullback_check(int n_samples, std::uint64_t seed = 2024);

// True iff h(a) == h(-a) within tol on a deterministic sample set.
bool antipodal_h_check(const std::function<double(const SU2Element&)>& h,
                       int n_samples = 512, double tol = 1e-10,
                       std::uint64_t seed = 2024);

}  // namespace fgeo::geom
