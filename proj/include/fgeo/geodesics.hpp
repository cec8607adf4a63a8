#pragma once

// Co-geodesic flows and closed-orbit machinery: Poincare-section shooting from
// the equator for rotationally symmetric families, Gauss-Newton return-map
// polishing, geodesic-loop search, the distance-pi focusing test, and
// contractibility of orbits in the unit bundle.

#include <optional>
#include <ostream>
#include <vector>

#include "fgeo/finsler.hpp"
#include "fgeo/numerics/ode.hpp"

namespace fgeo::flow {

num::IntegratorConfig default_flow_config();
num::IntegratorConfig polish_flow_config();

// Integrates the co-geodesic field from a unit co-sphere state.
// Requires |F*(state0) - 1| <= 1e-9.
num::Trajectory cogeodesic_flow(const fin::Metric& m, const fin::State& s0,
                                double T,
                                const num::IntegratorConfig& cfg = default_flow_config());

struct ConservationReport {
  double fstar_drift = 0;     // max |F* - F*(0)|
  double clairaut_drift = 0;  // max |p_phi - p_phi(0)| (symmetric families)
  double surface_drift = 0;   // max surface residual
};
ConservationReport check_conservation(const fin::Metric& m,
                                      const num::Trajectory& traj,
                                      int n_samples = 256);

struct GeodesicOrbit {
  fin::MetricPtr metric;
  fin::State state0{};
  double period = 0;  // minimal period (arclength)
  int iterates = 1;   // orbit considered as the m-th iterate
  double closure_residual = 0;
  num::Trajectory trajectory;  // dense over one minimal period
  std::vector<double> curvature_profile;  // uniform samples over [0, period]

  double total_period() const { return period * iterates; }
  fin::State state_at(double t) const;  // wraps modulo the minimal period
  double curvature_at(double t) const;  // K(x(t)), analytic provider
  GeodesicOrbit iterate(int m) const;
};

// Follows the equator in the given direction (+1 increasing phi, -1
// decreasing) and polishes the first return; works for every rotationally
// symmetric family here (the equator is invariant).
GeodesicOrbit equator_orbit(fin::MetricPtr m, int direction, int iterates = 1);

struct SearchOptions {
  double length_cap = 10.0;
  int directions = 64;          // shooting grid on the section
  double detect_threshold = 5e-2;
  double accept_residual = 1e-9;
};
struct SearchLog {
  int candidates = 0;  // near-returns detected on the shooting grid
  int dropped = 0;     // candidates whose polishing diverged
  int duplicates = 0;  // candidates merged into an already-listed orbit
};
std::vector<GeodesicOrbit> find_closed_geodesics(const fin::MetricPtr& m,
                                                 double length_cap,
                                                 int grid_density = 64,
                                                 SearchLog* log = nullptr);
std::vector<GeodesicOrbit> find_closed_geodesics(const fin::MetricPtr& m,
                                                 const SearchOptions& opt,
                                                 SearchLog* log = nullptr);

struct LoopCandidate {
  double length = 0;
  double base_r = 0;     // chart latitude of the base point
  double theta = 0;      // fibre direction at the base point
  int base_index = 0;    // grid index (tie-break order)
  double residual = 0;   // |x(T) - x(0)| after polishing
};
struct LoopSearchReport {
  double ell = 0;  // shortest loop length found
  std::vector<LoopCandidate> candidates;
  int grid_latitudes = 0;
  int grid_directions = 0;
};
LoopSearchReport shortest_loop(const fin::MetricPtr& m, int grid_density = 32,
                               double length_cap = kTwoPi + 0.5);

// Diameter of the endpoint cloud of n unit-speed geodesics from base after
// arclength pi (the K=1 focusing property makes it collapse).
double focusing_spread(const fin::Metric& m, const Vec3& base, int n_directions);

// Class of the orbit in pi_1 of the unit bundle (Z/2): an m-fold iterate of a
// simple closed geodesic is contractible iff m is even. Throws when the base
// curve self-intersects too degenerately to classify.
bool contractibility(const GeodesicOrbit& orbit);

// CSV dump: t, r, phi, p_r, p_phi, Fstar_residual.
void write_trajectory_csv(std::ostream& os, const fin::Metric& m,
                          const num::Trajectory& traj, int n_samples = 512);

}  // namespace fgeo::flow
