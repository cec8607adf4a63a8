#pragma once

// Constructive finite-energy cylinders from sector-holomorphic data near a
// locally recurrent orbit with irrational-rotation return map: sector
// functions F_k = alpha^k z^{-nc} f(z) on the formal sectors of a punctured
// disc, axial components t = (n/2pi) arg z and
// a = -(n/2pi) log|z| - Phi(|F|^2), plus the defining-equation residuals,
// boundary-circle charge integrals, and the cutoff-family energy.

#include <functional>
#include <ostream>
#include <vector>

#include "fgeo/common.hpp"

#include "json.hpp"

namespace fgeo::cyl {

struct SectorGerm {
  int charge = 1;                 // n
  double rotation = 0.5;          // c in (0,1); return map alpha = e^{2 pi i c}
  std::vector<Cx> coefficients;   // f(z) = sum_k coefficients[k] z^k
  double disc_radius = 1.0;

  void validate() const;  // ord_0(f) > n, c irrational per the resonance rule
  int ord0() const;
  Cx f(Cx z) const;
  Cx f_prime(Cx z) const;
  Cx alpha() const { return std::polar(1.0, kTwoPi * rotation); }
};

struct ModelTube {
  std::function<double(double)> eta_hat;  // radial profile on [0, rho_max^2]
  double rho_max = 2.0;                   // transverse fibre radius

  void validate() const;           // eta_hat(0) = 0
  double Phi(double s) const;      // integral of eta_hat over [0, s]
};

ModelTube flat_tube(double rho_max = 2.0);
ModelTube linear_tube(double rho_max = 2.0);  // eta_hat(s) = s

// Gauge correction of a raw profile Re(omega) = eta(rho) dnu + zeta(rho) drho:
// subtracts df with f(rho) the quadrature of zeta and returns the corrected
// tube with eta_hat(rho^2) = eta(rho). The report carries the numerical
// verification that df has no axial/angular components, that subtracting an
// exact form leaves d lambda unchanged, and that omega-hat = i dbar Phi.
struct GaugeReport {
  double f_at_half = 0;            // f(1/2), for direct checks
  double df_axial_component = 0;   // max |df(d/dt)| (structurally zero)
  double df_angular_component = 0; // max |df(d/dnu)| sampled
  double exactness_residual = 0;   // max loop integral of the df field
  double omega_residual = 0;       // max |dbar Phi(|w|^2) - eta_hat w|
};
ModelTube gauge_correction(const std::function<double(double)>& eta,
                           const std::function<double(double)>& zeta,
                           double rho_max, GaugeReport* report = nullptr);

struct GridSpec {
  double r_min = 1e-3;
  int rings_per_octave = 8;  // geometric radii with ratio 2^{-1/8}
  int n_angular = 256;       // rounded up to a multiple of the charge
  bool auto_shrink = true;   // shrink the outer radius until |F| fits the tube
};

struct CylinderNode {
  Cx z;
  int sector = 0;
  Cx F;
  double t = 0, a = 0;
};

class CylinderSample {
 public:
  SectorGerm germ;
  ModelTube tube;
  double r_outer = 1.0, r_min = 1e-3;
  int n_rings = 0, n_angular = 0;
  std::vector<CylinderNode> nodes;  // ring-major, angle-minor
  double boundary_residual = 0;     // max |alpha F_k - F_{k+1}| on shared rays
  double wrap_residual = 0;         // |alpha F_{n-1} - F_0| on the cut ray

  const CylinderNode& node(int ring, int angle) const;
  int sector_of_angle(int angle) const;

  // Closed-form evaluation off the grid (used by the circle integrals).
  int sector_at(Cx z) const;
  Cx F_at(Cx z) const;
  Cx F_prime_at(Cx z) const;
  double t_at(Cx z) const;
  double a_at(Cx z) const;
};

CylinderSample build_cylinder(const SectorGerm& germ, const ModelTube& tube,
                              const GridSpec& grid = {});

struct CrResiduals {
  double transverse = 0;  // max |dbar F| over interior nodes
  double axial = 0;       // max |dbar u + i dbar Phi(|F|^2)|
  double grid_h = 0;      // angular step, the refinement scale
};
CrResiduals cr_residual(const CylinderSample& sample);

// Circle integrals of the pulled-back contact form at the given radii
// (descending); each tends to the charge n as the radius shrinks.
std::vector<double> charge_integral(const CylinderSample& sample,
                                    const std::vector<double>& radii);

struct Cutoff {
  std::function<double(double)> h;  // monotone nondecreasing into [0, 1]
  double at_infinity = 1.0;
};
std::vector<Cutoff> sigmoid_cutoff_family(int count, double center_lo = -2.0,
                                          double center_hi = 2.0);
// sup over the family of the boundary-circle energy expression; throws on a
// non-monotone cutoff and asserts finiteness against the boundary integral.
double energy_estimate(const CylinderSample& sample,
                       const std::vector<Cutoff>& family);

void write_nodes_csv(std::ostream& os, const CylinderSample& sample);
nlohmann::json cylinder_diagnostics(const CylinderSample& sample,
                                    const CrResiduals& residuals,
                                    const std::vector<double>& charge_radii,
                                    const std::vector<double>& charge_values,
                                    double energy);

}  // namespace fgeo::cyl
