#include "fgeo/geometry.hpp"

#include <cmath>

namespace fgeo::geom {
namespace {

struct Mat2c {
  Cx a, b, c, d;  // row major [[a, b], [c, d]]

  Mat2c operator*(const Mat2c& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c,
            c * o.b + d * o.d};
  }
};

Mat2c su2_matrix(const SU2Element& e) {
  return {e.w1, e.w2, -std::conj(e.w2), std::conj(e.w1)};
}
Mat2c su2_inverse(const SU2Element& e) {
  return {std::conj(e.w1), -e.w2, std::conj(e.w2), e.w1};
}

// S^2 matrices are (i t, z; -conj z, -i t).
SpherePoint sphere_from_matrix(const Mat2c& m) {
  return {m.a.imag(), m.b};
}

const Mat2c kJ{Cx(0, 0), Cx(1, 0), Cx(-1, 0), Cx(0, 0)};
const Mat2c kK{Cx(0, 0), Cx(0, 1), Cx(0, 1), Cx(0, 0)};

}  // namespace

void SpherePoint::validate(double tol) const {
  require(std::abs(t * t + std::norm(z) - 1.0) <= tol,
          "SpherePoint: t^2 + |z|^2 != 1");
}

void SU2Element::validate(double tol) const {
  require(std::abs(std::norm(w1) + std::norm(w2) - 1.0) <= tol,
          "SU2Element: |w1|^2 + |w2|^2 != 1");
}

void PolarChartPoint::validate(double pole_margin) const {
  require(r >= pole_margin && r <= kPi - pole_margin,
          "PolarChartPoint: r too close to a chart pole");
}

Vec3 polar_to_ambient(const PolarChartPoint& p) {
  return {std::cos(p.r), std::sin(p.r) * std::cos(p.phi),
          std::sin(p.r) * std::sin(p.phi)};
}

PolarChartPoint ambient_to_polar(const Vec3& x, double pole_margin) {
  double r = std::acos(std::clamp(x[0], -1.0, 1.0));
  PolarChartPoint p{r, std::atan2(x[2], x[1])};
  if (p.phi < 0) p.phi += kTwoPi;
  p.validate(pole_margin);
  return p;
}

Vec3 polar_dr(const PolarChartPoint& p) {
  return {-std::sin(p.r), std::cos(p.r) * std::cos(p.phi),
          std::cos(p.r) * std::sin(p.phi)};
}

Vec3 polar_dphi(const PolarChartPoint& p) {
  return {0.0, -std::sin(p.r) * std::sin(p.phi), std::sin(p.r) * std::cos(p.phi)};
}

void UnitTangentPair::validate(double tol) const {
  require(std::abs(norm(x) - 1.0) <= tol, "UnitTangentPair: |x| != 1");
  require(std::abs(norm(v) - 1.0) <= tol, "UnitTangentPair: |v| != 1");
  require(std::abs(dot(x, v)) <= tol, "UnitTangentPair: <x, v> != 0");
}

UnitTangentPair gmap(const SU2Element& a) {
  const Cx w1 = a.w1, w2 = a.w2;
  const Cx prod = w1 * w2;
  const Cx cw1sq = std::conj(w1) * std::conj(w1);
  const Cx w2sq = w2 * w2;
  SpherePoint x{2.0 * prod.imag(), cw1sq + w2sq};
  SpherePoint v{-2.0 * prod.real(), Cx(0, 1) * (cw1sq - w2sq)};
  return {x.ambient(), v.ambient()};
}

UnitTangentPair gmap_by_conjugation(const SU2Element& a) {
  Mat2c A = su2_matrix(a), Ainv = su2_inverse(a);
  SpherePoint x = sphere_from_matrix(Ainv * kJ * A);
  SpherePoint v = sphere_from_matrix(Ainv * kK * A);
  return {x.ambient(), v.ambient()};
}

SU2Element gmap_inverse(const UnitTangentPair& m, double tol) {
  m.validate(1e-9);
  const Cx zx{m.x[1], m.x[2]};
  const Cx zv{m.v[1], m.v[2]};
  const double tx = m.x[0], tv = m.v[0];
  const Cx cw1sq = 0.5 * (zx - Cx(0, 1) * zv);  // conj(w1)^2
  const Cx w2sq = 0.5 * (zx + Cx(0, 1) * zv);
  const Cx target = 0.5 * Cx(-tv, tx);  // w1 w2

  Cx w1 = std::conj(std::sqrt(cw1sq));
  Cx w2 = std::sqrt(w2sq);
  if (std::abs(w1 * w2 - target) > std::abs(-w1 * w2 - target)) w2 = -w2;

  SU2Element cand{w1, w2};
  double nrm = std::sqrt(std::norm(w1) + std::norm(w2));
  require(nrm > 0.5, "gmap_inverse: degenerate reconstruction");
  cand = {w1 / nrm, w2 / nrm};

  auto residual = [&](const SU2Element& c) {
    UnitTangentPair r = gmap(c);
    return norm(r.x - m.x) + norm(r.v - m.v);
  };
  if (residual(cand) > tol) {
    SU2Element flipped{cand.w1, -cand.w2};
    if (residual(flipped) <= tol) return flipped;
    throw error("gmap_inverse: reconstruction residual above tolerance");
  }
  return cand;
}

double lambda0(const SU2Element& a, const C2& xi) {
  C2 ia{Cx(0, 1) * a.w1, Cx(0, 1) * a.w2};
  return rdot(ia, xi);
}

C2 tangent_project(const SU2Element& a, const C2& xi) {
  C2 av = a.c2();
  double c = rdot(av, xi);
  return xi - c * av;
}

SU2Element s3_geodesic(const SU2Element& a, const C2& xi, double s) {
  double n = norm(xi);
  if (n == 0) return a;
  C2 dir = (1.0 / n) * xi;
  C2 p = std::cos(s * n) * a.c2() + std::sin(s * n) * dir;
  return {p.w1, p.w2};
}

PullbackSides gmap_pullback_sides(const SU2Element& a, const C2& xi_in) {
  C2 xi = tangent_project(a, xi_in);
  // d/ds of the base point of gmap along the great circle through a with
  // velocity xi; central differences with one Richardson step.
  auto base_at = [&](double s) { return gmap(s3_geodesic(a, xi, s)).x; };
  const Vec3 v0 = gmap(a).v;
  auto pulled = [&](double h) {
    Vec3 xp = base_at(h), xm = base_at(-h);
    Vec3 dx = (1.0 / (2.0 * h)) * (xp - xm);
    // pinned co-orientation of the unit-bundle contact form
    return -dot(v0, dx);
  };
  const double h = 1e-5;
  double d1 = pulled(h), d2 = pulled(0.5 * h);
  return {(4.0 * d2 - d1) / 3.0, 2.0 * lambda0(a, xi)};
}

double gmap_pullback_ratio(const SU2Element& a, const C2& xi) {
  PullbackSides s = gmap_pullback_sides(a, xi);
  require(std::abs(s.ambient2) > 2e-3,
          "gmap_pullback_ratio: lambda0(xi) below kernel threshold");
  return 2.0 * s.pulled_back / s.ambient2;
}

double gmap_pullback_check(int n_samples, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0;
  int kept = 0;
  while (kept < n_samples) {
    C2 w = rng.unit_c2();
    SU2Element a{w.w1, w.w2};
    C2 xi = tangent_project(a, rng.unit_c2());
    double nx = norm(xi);
    if (nx < 1e-3) continue;
    xi = (1.0 / nx) * xi;
    if (std::abs(lambda0(a, xi)) < 1e-2) continue;  // reject near-kernel sample
    worst = std::max(worst, std::abs(gmap_pullback_ratio(a, xi) - 2.0));
    ++kept;
  }
  return worst;
}

bool antipodal_h_check(const std::function<double(const SU2Element&)>& h,
                       int n_samples, double tol, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0;
  for (int i = 0; i < n_samples; ++i) {
    C2 w = rng.unit_c2();
    SU2Element a{w.w1, w.w2};
    worst = std::max(worst, std::abs(h(a) - h(a.negated())));
  }
  return worst < tol;
}

}  // namespace fgeo::geom
