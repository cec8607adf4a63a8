#pragma once

// Central record of the default numerical tolerances. The acceptance suite
// pins these values; change them only together with the tests.

namespace fgeo::num::defaults {

inline constexpr double ode_abs_tol = 1e-10;
inline constexpr double ode_rel_tol = 1e-10;
inline constexpr double quadrature_abs_tol = 1e-10;

inline constexpr double eigen_pair_residual = 1e-8;      // ||Av - tau v|| / ||A||
inline constexpr double winding_integer_tol = 1e-6;      // snap-to-integer
inline constexpr double fd_pullback_step = 1e-5;         // central diff + Richardson

inline constexpr double orbit_closure_residual = 1e-7;   // accepted closed orbits
inline constexpr double orbit_dedupe_distance = 1e-4;
inline constexpr double cosphere_residual = 1e-7;        // |F*-1| along samples
inline constexpr double symplectic_det_drift = 1e-7;     // |det Phi - 1|
inline constexpr double katok_epsilon_cap = 0.95;        // construction refuses beyond

inline constexpr double lift_identity_tol = 1e-9;
inline constexpr double lift_pullback_tol = 1e-5;
inline constexpr double antipodal_tol = 1e-10;

inline constexpr double taui_slack = 1e-6;               // (T/2pi)(1+tau3) <= 1 + slack

// Resonance rule: a floating-point ratio counts as rational when it is within
// this distance of p/q with q <= resonance_max_den.
inline constexpr double resonance_tol = 1e-9;
inline constexpr int resonance_max_den = 64;

inline constexpr double sector_matching_tol = 1e-12;

}  // namespace fgeo::num::defaults
