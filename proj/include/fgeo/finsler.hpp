#pragma once

// Metric families on the two-sphere: the round metric, the Katok family
// F*(x,p) = |p| + eps * p(d/dphi), ellipsoids of revolution, and Killing-field
// perturbations of a base co-metric. Positions and (co)vectors are kept
// ambient in R^3; the polar chart is used only to evaluate chart formulas.

#include <memory>
#include <optional>
#include <string>

#include "fgeo/common.hpp"

#include "json.hpp"

namespace fgeo::fin {

// State of the co-geodesic flow: (x, p) with x on the configuration surface
// and p a tangential covector (for Riemannian families p is the velocity).
using State = std::array<double, 6>;

inline Vec3 state_x(const State& s) { return {s[0], s[1], s[2]}; }
inline Vec3 state_p(const State& s) { return {s[3], s[4], s[5]}; }
inline State make_state(const Vec3& x, const Vec3& p) {
  return {x[0], x[1], x[2], p[0], p[1], p[2]};
}

// Chart components (r, phi, p_r, p_phi) about the family's symmetry axis.
struct ChartState {
  double r, phi, p_r, p_phi;
};

class Metric {
 public:
  virtual ~Metric() = default;

  virtual std::string name() const = 0;
  virtual nlohmann::json descriptor() const = 0;

  // Co-metric F*(x, p); positively 1-homogeneous in p, > 0 for p != 0.
  virtual double costar(const Vec3& x, const Vec3& p) const = 0;
  // Fibre gradient of F* restricted to the tangent plane at x.
  virtual Vec3 costar_grad(const Vec3& x, const Vec3& p) const;
  // Drift vector W when F*(x,p) = |p| + p(W(x)) (Randers form); nullopt for
  // co-metrics without that structure.
  virtual std::optional<Vec3> randers_drift(const Vec3& x) const = 0;

  // Configuration surface.
  virtual double surface_residual(const Vec3& x) const = 0;  // 0 on the surface
  virtual Vec3 surface_project(const Vec3& x) const = 0;
  virtual Vec3 surface_normal(const Vec3& x) const = 0;
  Vec3 tangent_project(const Vec3& x, const Vec3& u) const {
    return reject(u, surface_normal(x));
  }

  // Co-geodesic vector field X_{F*} on states (x, p).
  virtual void cogeodesic_field(const State& s, State& ds) const = 0;

  // Analytic curvature data.
  virtual double gauss_curvature(const Vec3& x) const = 0;
  virtual std::optional<std::pair<double, double>> curvature_range() const = 0;
  virtual bool claims_constant_curvature_one() const = 0;

  virtual bool reversible_by_construction() const = 0;
  virtual bool rotationally_symmetric() const = 0;
  virtual Vec3 symmetry_axis() const = 0;  // meaningful when symmetric

  // Chart about the symmetry axis; r is the polar distance parameter.
  ChartState to_chart(const State& s) const;
  State from_chart(const ChartState& c) const;
  // Position-only chart frame: point, d/dr-like unit vector, d/dphi field.
  virtual Vec3 chart_point(double r, double phi) const = 0;
  virtual Vec3 chart_dr(double r, double phi) const = 0;
  virtual Vec3 chart_dphi(double r, double phi) const = 0;
  virtual double chart_r(const Vec3& x) const = 0;
  virtual double chart_phi(const Vec3& x) const = 0;
  // Chart parameter of the invariant equator.
  virtual double equator_r() const = 0;
};

using MetricPtr = std::shared_ptr<const Metric>;

MetricPtr make_round();
MetricPtr make_katok(double epsilon);               // |eps| <= 0.95 enforced
MetricPtr make_revolution_ellipsoid(double a);      // (x^2+y^2)/a^2 + z^2 = 1
// G*(x,p) = base F*(x,p) + eps * p(V(x)) for the rotational Killing field
// V(x) = scale * (axis x x). Positivity of the perturbed co-metric enforced.
MetricPtr make_killing_perturbed(MetricPtr base, double epsilon,
                                 const Vec3& axis, double scale = 1.0);
// Escape hatch for fixtures: explicit co-metric on the unit sphere.
MetricPtr make_custom_sphere_cometric(
    std::string name, std::function<double(const Vec3&, const Vec3&)> costar);

MetricPtr metric_from_json(const nlohmann::json& j);

// Katok co-metric in chart form, Eq. displayed in the chart (r, phi):
// sqrt(p_r^2 + p_phi^2 / sin^2 r) + eps p_phi. r must avoid the chart poles.
double katok_cometric(double r, double phi, double p_r, double p_phi,
                      double epsilon);

// ---- Legendre transforms ----------------------------------------------------

// p = d_v(1/2 F^2)(x, v); computed by support-point search on the unit
// co-sphere fibre (the fibre is strictly convex for every family here).
Vec3 legendre(const Metric& m, const Vec3& x, const Vec3& v);
// Inverse transform v = d_p(1/2 F*^2)(x, p) = F* grad F*.
Vec3 legendre_inverse(const Metric& m, const Vec3& x, const Vec3& p);
// Metric value F(x, v) = max { p(v) : F*(x,p) = 1 }.
double finsler_norm(const Metric& m, const Vec3& x, const Vec3& v);

// ---- Reversibility -----------------------------------------------------------

// r = max F(x, -v) over the unit sphere bundle, by deterministic grid search
// with local refinement.
double reversibility(const Metric& m, int grid_latitudes = 48,
                     int grid_directions = 96);

// Rationality test used for "irrational eps": within resonance tolerance of
// p/q with q <= 64.
bool is_resonant_ratio(double value);

}  // namespace fgeo::fin
