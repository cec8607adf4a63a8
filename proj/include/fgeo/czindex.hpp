#pragma once

// Linearized flow along closed orbits and the spectral Conley-Zehnder index:
// the first-order operator L_A v = -J v' - A(t) v with periodic boundary
// conditions is discretized by central differences into a 2N x 2N symmetric
// eigenproblem, eigenfunctions are labeled by their winding number, and
// mu = max{ k : tau_k < 0 } over the winding-labeled spectrum.

#include <functional>
#include <optional>
#include <vector>

#include "fgeo/geodesics.hpp"

#include "json.hpp"

namespace fgeo::cz {

struct LinearizedPath {
  double period = 0;                        // total period T
  std::function<double(double)> curvature;  // K(t) on [0, T]
  std::vector<double> curvature_samples;    // uniform grid over [0, T]
  std::vector<Mat2> monodromy_samples;      // Phi(t_i), Phi(0) = I
  double max_det_drift = 0;                 // max |det Phi - 1|

  Mat2 monodromy() const;  // Phi(T)
};

// Integrates Phi' = J A Phi with A = diag(1, K(t)); K comes from the orbit's
// analytic curvature provider over the full (iterated) period.
LinearizedPath jacobi_flow(const flow::GeodesicOrbit& orbit,
                           int n_samples = 512);
// Path with constant curvature (analytic-oracle cases).
LinearizedPath constant_curvature_path(double curvature, double T,
                                       int n_samples = 512);

struct SpectrumEntry {
  int k = 0;        // label, Delta(tau_k, A) = floor(k/2)
  int winding = 0;  // floor(k/2)
  double tau = 0;
  bool negative = false;  // tau < -threshold (strict sign rule)
  bool marginal = false;  // |tau| <= threshold
  std::vector<Vec2> eigenfunction;  // samples on the uniform grid (closed)
};

struct CZSpectrum {
  double T = 0;
  int grid_size = 0;      // N
  int max_winding = 0;    // windings covered: [-1, max_winding]
  std::vector<SpectrumEntry> entries;  // k ascending from -2
  int mu = 0;
  bool mu_marginal = false;  // a marginal eigenvalue sits at the mu boundary

  const SpectrumEntry& entry(int k) const;
  double tau(int k) const;
  // strict-sign threshold used for the winding-w eigenvalues
  double threshold(int winding) const;
};

// Discretize, solve, label. k_max is the largest winding included; N the
// number of grid points. Throws when the two-per-winding rule cannot be
// established (grid too coarse) or the window misses the sign change.
CZSpectrum cz_spectrum(const LinearizedPath& path, int k_max = 4, int N = 512);

// (T/2pi)(1 + tau_3) <= 1 + slack; valid under K >= 1 along the orbit.
bool inequality_taui_check(const CZSpectrum& spectrum, double T);

nlohmann::json spectrum_json(const CZSpectrum& spectrum,
                             const std::string& orbit_id, bool contractible);

// ---- Theorem-B style certification -------------------------------------------

struct OrbitRow {
  std::string orbit_id;
  double total_period = 0;
  int iterates = 1;
  bool classified = true;   // false when the self-intersection pattern defeats
                            // the parity rule (manual iterate count needed)
  bool contractible = false;
  double tau3 = 0;
  std::optional<int> mu;  // reported for classified contractible orbits only
  bool taui_ok = true;
  bool marginal = false;
};

struct ConvexityReport {
  nlohmann::json metric;
  double delta = 0;
  double ell = 0;
  double loop_bound = 0;  // pi / sqrt(delta)
  bool verdict_by_theorem = false;
  bool verdict_by_inspection = false;  // over the classified contractible rows
  bool any_marginal = false;
  int unclassified = 0;  // rows whose contractibility needs a manual count
  std::vector<OrbitRow> orbits;

  nlohmann::json to_json() const;
};

struct CertifyOptions {
  double length_cap = 10.0;
  int search_directions = 64;
  int loop_grid = 24;
  int spectrum_grid = 1024;
  int k_max = 5;
};

// Rescales so K >= 1 (period multiplied by sqrt(delta), curvature divided by
// delta), searches closed orbits and loops, computes mu for contractible
// iterates, and reports both the loop-criterion verdict and the inspection
// verdict.
ConvexityReport certify_dynamical_convexity(const fin::MetricPtr& metric,
                                            double delta, double length_cap);
ConvexityReport certify_dynamical_convexity(const fin::MetricPtr& metric,
                                            double delta,
                                            const CertifyOptions& opt);

struct PinchReport {
  bool quarter_pinched = false;      // kmin > kmax / 4
  bool pinch_verdict = false;        // loop-criterion verdict when pinched
  bool rademacher_checked = false;   // kmax <= 1 branch
  double ell = 0;
  double rademacher_bound = 0;       // pi (1 + 1/r)
  bool rademacher_ok = false;
  double reversibility = 1;
};

// Quarter-pinch corollary plus the reversibility length bound. The pinch
// branch demands a reversible metric; set require_pinch_branch to insist on
// it (throws otherwise). The curvature range must be analytic.
PinchReport pinching_corollary_check(const fin::MetricPtr& metric,
                                     bool require_pinch_branch = false);

}  // namespace fgeo::cz
