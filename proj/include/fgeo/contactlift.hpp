#pragma once

// The correspondence between starshaped hypersurfaces of T*S^2 and positive
// antipodally-symmetric functions h on S^3: h = 2 (f o G) with f = 1/(g o l0),
// g the degree-0 radial factor of the co-metric (F* = g |p|). Includes the
// explicit ellipsoid Reeb flow and the ellipsoid <-> Katok identity.

#include <functional>

#include "fgeo/finsler.hpp"
#include "fgeo/geometry.hpp"

#include "json.hpp"

namespace fgeo::lift {

struct EllipsoidParams {
  double p = 1.0, q = 1.0;

  void validate() const;
  bool resonant() const;  // p/q within the resonance tolerance of a rational
};

// Reeb flow of the ellipsoid contact form h lambda0 on S^3:
// (w1, w2) -> (w1 e^{ipt}, w2 e^{iqt}).
geom::SU2Element ellipsoid_reeb_flow(const EllipsoidParams& par,
                                     const geom::SU2Element& w0, double t);

// h(w1, w2) = 1 / (p |w1|^2 + q |w2|^2).
double ellipsoid_h(const EllipsoidParams& par, const geom::SU2Element& a);

// Ellipsoid parameters that lift the Katok family: p+q = 1, p-q = eps.
EllipsoidParams katok_ellipsoid_params(double epsilon);

using HFunction = std::function<double(const geom::SU2Element&)>;
// Degree-0 homogeneous factor on T*S^2 \ 0; evaluated at (x, p), p != 0.
using GFunction = std::function<double(const Vec3&, const Vec3&)>;

// g(x, p) = F*(x, p)/|p| for a metric on the round sphere.
GFunction g_from_metric(const fin::MetricPtr& metric);

// The lifted triple: h on S^3, the radial factor g on T*S^2 \ 0, and
// f = 1/(g o l0) on TS^2 \ 0. Construction validates positivity, antipodal
// symmetry of h, and degree-0 homogeneity of g (scalings 0.5, 2, 10).
struct LiftBundle {
  HFunction h;
  GFunction g;
  std::function<double(const Vec3&, const Vec3&)> f;  // on tangent vectors
};
LiftBundle make_lift_bundle(const HFunction& h);
LiftBundle make_lift_bundle(const fin::MetricPtr& metric);

// h = 2/(g o l0) through the frame map; h = 2 f o G.
HFunction g_to_h(GFunction g);
// g from an antipodally-symmetric positive h, through the inverse frame map.
// Symmetry and positivity are checked on a deterministic sample set.
GFunction h_to_g(const HFunction& h);

struct RoundTripReport {
  double h_dev = 0;  // max |h -> g -> h  -  h| over S^3 samples
  double g_dev = 0;  // max |g -> h -> g  -  g| over unit co-sphere samples
};
RoundTripReport round_trip_check(const HFunction& h, int n_samples = 512,
                                 std::uint64_t seed = 2024);

struct StarshapedReport {
  bool starshaped = false;        // positive g on the sample set
  bool fibrewise_convex = false;  // positive curvature of every sampled fibre
  double min_fibre_turn = 0;      // most negative discrete turning observed
};
StarshapedReport starshaped_convexity_check(const GFunction& g,
                                            int n_base = 32, int n_fibre = 256,
                                            std::uint64_t seed = 2024);

// Max relative discrepancy between the pulled-back Liouville form through
// r o l0 o G and h lambda0, on random tangent samples (finite differences).
double lift_conjugacy_check(const fin::MetricPtr& metric, int n_samples = 100,
                            std::uint64_t seed = 2024);

// JSON descriptors: {kind:"ellipsoid", p, q} | {kind:"from-metric", metric}
// | {kind:"table", samples:[{w:[4], value}]}. Table descriptors evaluate at
// the listed points only.
HFunction h_from_json(const nlohmann::json& j);

}  // namespace fgeo::lift
