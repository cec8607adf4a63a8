#include "fgeo/cylinder.hpp"

#include <algorithm>
#include <cmath>

#include "fgeo/finsler.hpp"
#include "fgeo/numerics/quadrature.hpp"

namespace fgeo::cyl {
namespace {

// Per-sector branch of arg z: the value in (2 pi k / n, 2 pi (k+1) / n].
double sector_arg(Cx z, int sector, int n) {
  double theta = std::arg(z);  // (-pi, pi]
  double lo = kTwoPi * sector / n;
  while (theta < lo - 1e-12) theta += kTwoPi;
  while (theta > lo + kTwoPi / n + 1e-12) theta -= kTwoPi;
  return theta;
}

Cx sector_value(const SectorGerm& g, Cx z, int sector) {
  const int n = g.charge;
  double theta = sector_arg(z, sector, n);
  // z^{-nc} with the sector's own branch constant
  Cx log_z{std::log(std::abs(z)), theta};
  Cx power = std::exp(-g.charge * g.rotation * log_z);
  Cx prefactor = std::polar(1.0, kTwoPi * g.rotation * sector);
  return prefactor * power * g.f(z);
}

Cx sector_derivative(const SectorGerm& g, Cx z, int sector) {
  const double nc = g.charge * g.rotation;
  double theta = sector_arg(z, sector, g.charge);
  Cx log_z{std::log(std::abs(z)), theta};
  Cx power = std::exp(-nc * log_z);
  Cx prefactor = std::polar(1.0, kTwoPi * g.rotation * sector);
  return prefactor * power * (g.f_prime(z) - nc / z * g.f(z));
}

}  // namespace

void SectorGerm::validate() const {
  require(charge >= 1, "SectorGerm: charge must be a positive integer");
  require(rotation > 0.0 && rotation < 1.0,
          "SectorGerm: rotation parameter must lie in (0,1)");
  require(!fin::is_resonant_ratio(rotation),
          "SectorGerm: rotation must be irrational");
  require(disc_radius > 0, "SectorGerm: disc radius must be positive");
  require(ord0() > charge, "SectorGerm: ord_0(f) must exceed the charge");
}

int SectorGerm::ord0() const {
  for (std::size_t k = 0; k < coefficients.size(); ++k)
    if (std::abs(coefficients[k]) > 0) return static_cast<int>(k);
  return 1 << 20;  // identically zero: treated as infinite order
}

Cx SectorGerm::f(Cx z) const {
  Cx acc{0, 0};
  for (std::size_t k = coefficients.size(); k-- > 0;)
    acc = acc * z + coefficients[k];
  return acc;
}

Cx SectorGerm::f_prime(Cx z) const {
  Cx acc{0, 0};
  for (std::size_t k = coefficients.size(); k-- > 1;)
    acc = acc * z + double(k) * coefficients[k];
  return acc;
}

void ModelTube::validate() const {
  require(static_cast<bool>(eta_hat), "ModelTube: missing radial profile");
  require(rho_max > 0, "ModelTube: rho_max must be positive");
  require(std::abs(eta_hat(0.0)) < 1e-12, "ModelTube: eta(0) must vanish");
}

double ModelTube::Phi(double s) const {
  require(s >= 0, "ModelTube::Phi: negative argument");
  if (s == 0) return 0.0;
  return num::quadrature(eta_hat, 0.0, s, 1e-12);
}

ModelTube flat_tube(double rho_max) {
  return {[](double) { return 0.0; }, rho_max};
}

ModelTube linear_tube(double rho_max) {
  return {[](double s) { return s; }, rho_max};
}

ModelTube gauge_correction(const std::function<double(double)>& eta,
                           const std::function<double(double)>& zeta,
                           double rho_max, GaugeReport* report) {
  require(std::abs(eta(0.0)) < 1e-12, "gauge_correction: eta(0) must vanish");
  ModelTube tube{[eta](double s) { return eta(std::sqrt(std::max(0.0, s))); },
                 rho_max};
  tube.validate();
  if (report) {
    GaugeReport rep;
    auto f_of_rho = [&](double rho) {
      return rho <= 0 ? 0.0 : num::quadrature(zeta, 0.0, rho, 1e-12);
    };
    rep.f_at_half = f_of_rho(0.5);
    // df = f'(rho) drho carries no dt or dnu component; v_nu = (-y, x)
    const double h = 1e-6;
    for (double rho : {0.3, 0.7, 1.2}) {
      for (double nu : {0.3, 2.0, 4.4}) {
        double x = rho * std::cos(nu), y = rho * std::sin(nu);
        auto f_at = [&](double xx, double yy) {
          return f_of_rho(std::hypot(xx, yy));
        };
        double along_nu =
            (f_at(x - h * y, y + h * x) - f_at(x + h * y, y - h * x)) / (2 * h);
        rep.df_angular_component =
            std::max(rep.df_angular_component, std::abs(along_nu));
        // loop integral of the finite-difference gradient field (exactness)
        double loop = 0;
        int m = 64;
        double rad = 0.2;
        for (int i = 0; i < m; ++i) {
          double a0 = kTwoPi * i / m, a1 = kTwoPi * (i + 1) / m;
          double x0 = x + rad * std::cos(a0), y0 = y + rad * std::sin(a0);
          double x1 = x + rad * std::cos(a1), y1 = y + rad * std::sin(a1);
          double gx = (f_at(0.5 * (x0 + x1) + h, 0.5 * (y0 + y1)) -
                       f_at(0.5 * (x0 + x1) - h, 0.5 * (y0 + y1))) /
                      (2 * h);
          double gy = (f_at(0.5 * (x0 + x1), 0.5 * (y0 + y1) + h) -
                       f_at(0.5 * (x0 + x1), 0.5 * (y0 + y1) - h)) /
                      (2 * h);
          loop += gx * (x1 - x0) + gy * (y1 - y0);
        }
        rep.exactness_residual = std::max(rep.exactness_residual, std::abs(loop));
      }
    }
    // omega-hat = i dbar Phi(|w|^2): dbar Phi = eta_hat(|w|^2) w
    for (double rho : {0.2, 0.6, 1.1}) {
      for (double nu : {0.7, 2.9}) {
        Cx w = std::polar(rho, nu);
        auto phi_at = [&](double xx, double yy) {
          return tube.Phi(xx * xx + yy * yy);
        };
        double px = (phi_at(w.real() + h, w.imag()) -
                     phi_at(w.real() - h, w.imag())) /
                    (2 * h);
        double py = (phi_at(w.real(), w.imag() + h) -
                     phi_at(w.real(), w.imag() - h)) /
                    (2 * h);
        Cx dbar_phi = 0.5 * Cx(px, py);
        Cx target = tube.eta_hat(std::norm(w)) * w;
        rep.omega_residual =
            std::max(rep.omega_residual, std::abs(dbar_phi - target));
      }
    }
    *report = rep;
  }
  return tube;
}

const CylinderNode& CylinderSample::node(int ring, int angle) const {
  return nodes[static_cast<std::size_t>(ring) * n_angular + angle];
}

int CylinderSample::sector_of_angle(int angle) const {
  double theta = (angle + 0.5) * kTwoPi / n_angular;
  int k = static_cast<int>(theta / (kTwoPi / germ.charge));
  return std::min(k, germ.charge - 1);
}

int CylinderSample::sector_at(Cx z) const {
  double theta = std::arg(z);
  if (theta < 0) theta += kTwoPi;
  int k = static_cast<int>(theta / (kTwoPi / germ.charge));
  return std::min(k, germ.charge - 1);
}

Cx CylinderSample::F_at(Cx z) const { return sector_value(germ, z, sector_at(z)); }
Cx CylinderSample::F_prime_at(Cx z) const {
  return sector_derivative(germ, z, sector_at(z));
}

double CylinderSample::t_at(Cx z) const {
  return germ.charge * sector_arg(z, sector_at(z), germ.charge) / kTwoPi;
}

double CylinderSample::a_at(Cx z) const {
  return -germ.charge / kTwoPi * std::log(std::abs(z)) -
         tube.Phi(std::norm(F_at(z)));
}

CylinderSample build_cylinder(const SectorGerm& germ, const ModelTube& tube,
                              const GridSpec& grid) {
  germ.validate();
  tube.validate();
  require(grid.r_min > 0 && grid.r_min < germ.disc_radius,
          "build_cylinder: need 0 < r_min < disc radius");
  require(grid.rings_per_octave >= 2 && grid.n_angular >= 8 * germ.charge,
          "build_cylinder: grid too coarse");

  CylinderSample sample;
  sample.germ = germ;
  sample.tube = tube;
  sample.r_min = grid.r_min;
  sample.n_angular =
      ((grid.n_angular + germ.charge - 1) / germ.charge) * germ.charge;

  // shrink the outer radius until the transverse component fits the tube
  double r_outer = germ.disc_radius;
  const double ratio = std::pow(2.0, -1.0 / grid.rings_per_octave);
  auto max_F_on_ring = [&](double r) {
    double worst = 0;
    for (int j = 0; j < sample.n_angular; ++j) {
      double theta = (j + 0.5) * kTwoPi / sample.n_angular;
      Cx z = std::polar(r, theta);
      worst = std::max(worst, std::abs(sample.F_at(z)));
    }
    return worst;
  };
  {
    int guard = 0;
    while (max_F_on_ring(r_outer) > tube.rho_max) {
      require(grid.auto_shrink,
              "build_cylinder: |F| exceeds the tube radius; shrink the disc");
      r_outer *= ratio;
      require(++guard < 4000 && r_outer > grid.r_min,
              "build_cylinder: germ too large for the tube at every radius");
    }
  }
  sample.r_outer = r_outer;

  std::vector<double> radii;
  for (double r = r_outer; r >= grid.r_min * (1.0 - 1e-12); r *= ratio)
    radii.push_back(r);
  require(radii.size() >= 4, "build_cylinder: radial range too small");
  sample.n_rings = static_cast<int>(radii.size());

  sample.nodes.resize(static_cast<std::size_t>(sample.n_rings) * sample.n_angular);
  parallel_for(sample.n_rings, [&](std::size_t i) {
    for (int j = 0; j < sample.n_angular; ++j) {
      double theta = (j + 0.5) * kTwoPi / sample.n_angular;
      Cx z = std::polar(radii[i], theta);
      CylinderNode node;
      node.z = z;
      node.sector = sample.sector_of_angle(j);
      node.F = sector_value(germ, z, node.sector);
      node.t = germ.charge * sector_arg(z, node.sector, germ.charge) / kTwoPi;
      node.a = -germ.charge / kTwoPi * std::log(std::abs(z)) -
               tube.Phi(std::norm(node.F));
      sample.nodes[i * sample.n_angular + j] = node;
    }
  });

  // boundary matching across shared rays, including the wrap ray
  const Cx alpha = germ.alpha();
  for (int k = 0; k + 1 < germ.charge; ++k) {
    double ray = kTwoPi * (k + 1) / germ.charge;
    for (double r : {radii.front(), radii[radii.size() / 2], radii.back()}) {
      Cx z = std::polar(r, ray);
      Cx a_side = sector_value(germ, z, k);
      Cx b_side = sector_value(germ, z, k + 1);
      sample.boundary_residual =
          std::max(sample.boundary_residual, std::abs(alpha * a_side - b_side));
    }
  }
  for (double r : {radii.front(), radii[radii.size() / 2], radii.back()}) {
    // same point on the cut ray, evaluated with the two sector branches
    Cx z{r, 0.0};
    Cx last = sector_value(germ, z, germ.charge - 1);
    Cx first = sector_value(germ, z, 0);
    sample.wrap_residual =
        std::max(sample.wrap_residual, std::abs(alpha * last - first));
  }
  return sample;
}

CrResiduals cr_residual(const CylinderSample& sample) {
  CrResiduals res;
  const int nr = sample.n_rings, na = sample.n_angular;
  const int n = sample.germ.charge;
  const double dtheta = kTwoPi / na;
  const double dlog =
      std::log(std::abs(sample.node(0, 0).z)) - std::log(std::abs(sample.node(1, 0).z));
  res.grid_h = dtheta;

  const int per_sector = na / n;
  for (int i = 1; i + 1 < nr; ++i) {
    for (int j = 0; j < na; ++j) {
      int in_sector = j % per_sector;
      if (in_sector == 0 || in_sector == per_sector - 1) continue;  // ray-adjacent
      const CylinderNode& c = sample.node(i, j);
      const CylinderNode& up = sample.node(i - 1, j);   // larger radius
      const CylinderNode& dn = sample.node(i + 1, j);   // smaller radius
      const CylinderNode& lt = sample.node(i, j - 1);
      const CylinderNode& rt = sample.node(i, j + 1);
      double r = std::abs(c.z);
      double theta = std::arg(c.z);
      Cx phase = std::polar(1.0, theta);
      auto dbar = [&](Cx f_up, Cx f_dn, Cx f_rt, Cx f_lt) {
        Cx d_l = (f_up - f_dn) / (2.0 * dlog);
        Cx d_th = (f_rt - f_lt) / (2.0 * dtheta);
        return phase / (2.0 * r) * (d_l + Cx(0, 1) * d_th);
      };
      // transverse part: F is sector-holomorphic
      Cx dbar_F = dbar(up.F, dn.F, rt.F, lt.F);
      res.transverse = std::max(res.transverse, std::abs(dbar_F));
      // axial part: dbar u = -i dbar Phi(|F|^2)
      Cx dbar_u = dbar(Cx(up.t, up.a), Cx(dn.t, dn.a), Cx(rt.t, rt.a),
                       Cx(lt.t, lt.a));
      Cx rhs = Cx(0, 1) * sample.tube.eta_hat(std::norm(c.F)) * c.F *
               std::conj(sample.F_prime_at(c.z));
      res.axial = std::max(res.axial, std::abs(dbar_u + rhs));
    }
  }
  return res;
}

std::vector<double> charge_integral(const CylinderSample& sample,
                                    const std::vector<double>& radii) {
  std::vector<double> out;
  out.reserve(radii.size());
  const int n = sample.germ.charge;
  for (double c : radii) {
    require(c > 0, "charge_integral: radius must be positive");
    double total = n;  // the (n / 2 pi) d arg z term integrates exactly to n
    for (int k = 0; k < n; ++k) {
      double lo = kTwoPi * k / n, hi = kTwoPi * (k + 1) / n;
      total += num::quadrature(
          [&](double theta) {
            Cx z = std::polar(c, theta);
            Cx F = sector_value(sample.germ, z, k);
            Cx Fp = sector_derivative(sample.germ, z, k);
            Cx dF_dtheta = Fp * Cx(0, 1) * z;
            return sample.tube.eta_hat(std::norm(F)) *
                   std::imag(std::conj(F) * dF_dtheta);
          },
          lo + 1e-12, hi - 1e-12, 1e-11);
    }
    out.push_back(total);
  }
  return out;
}

std::vector<Cutoff> sigmoid_cutoff_family(int count, double center_lo,
                                          double center_hi) {
  require(count >= 1, "sigmoid_cutoff_family: count must be positive");
  std::vector<Cutoff> family;
  family.push_back({[](double) { return 0.0; }, 0.0});
  family.push_back({[](double) { return 1.0; }, 1.0});
  for (int i = 0; i < count; ++i) {
    double c = center_lo +
               (center_hi - center_lo) * (count == 1 ? 0.5 : double(i) / (count - 1));
    family.push_back(
        {[c](double x) { return 1.0 / (1.0 + std::exp(-(x - c) / 0.25)); }, 1.0});
  }
  return family;
}

double energy_estimate(const CylinderSample& sample,
                       const std::vector<Cutoff>& family) {
  require(!family.empty(), "energy_estimate: empty cutoff family");
  const int n = sample.germ.charge;
  const double r1 = sample.r_outer;

  // reject non-monotone cutoffs or ranges outside [0,1]
  for (const auto& cutoff : family) {
    double prev = -1e300;
    for (double x = -6; x <= 6.01; x += 0.25) {
      double v = cutoff.h(x);
      require(v >= -1e-12 && v <= 1.0 + 1e-12,
              "energy_estimate: cutoff range must lie in [0,1]");
      require(v >= prev - 1e-12, "energy_estimate: cutoff must be monotone");
      prev = v;
    }
  }

  auto boundary_integral = [&](const std::function<double(double)>& weight) {
    double total = 0;
    for (int k = 0; k < n; ++k) {
      double lo = kTwoPi * k / n, hi = kTwoPi * (k + 1) / n;
      total += num::quadrature(
          [&](double theta) {
            Cx z = std::polar(r1, theta);
            Cx F = sector_value(sample.germ, z, k);
            Cx Fp = sector_derivative(sample.germ, z, k);
            double density =
                n / kTwoPi + sample.tube.eta_hat(std::norm(F)) *
                                 std::imag(std::conj(F) * (Fp * Cx(0, 1) * z));
            double a = -n / kTwoPi * std::log(r1) - sample.tube.Phi(std::norm(F));
            return weight(a) * density;
          },
          lo + 1e-12, hi - 1e-12, 1e-11);
    }
    return total;
  };

  double plain = boundary_integral([](double) { return 1.0; });
  double sup = -1e300;
  for (const auto& cutoff : family) {
    double e = boundary_integral(cutoff.h) - n * cutoff.at_infinity;
    sup = std::max(sup, e);
  }
  require(sup <= plain + n + 1e-9,
          "energy_estimate: energy exceeds the boundary bound (not finite?)");
  return sup;
}

void write_nodes_csv(std::ostream& os, const CylinderSample& sample) {
  os << "re_z,im_z,sector,re_F,im_F,t,a\n";
  char buf[256];
  for (const auto& node : sample.nodes) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%d,%.12g,%.12g,%.12g,%.12g\n",
                  node.z.real(), node.z.imag(), node.sector, node.F.real(),
                  node.F.imag(), node.t, node.a);
    os << buf;
  }
}

nlohmann::json cylinder_diagnostics(const CylinderSample& sample,
                                    const CrResiduals& residuals,
                                    const std::vector<double>& charge_radii,
                                    const std::vector<double>& charge_values,
                                    double energy) {
  nlohmann::json j;
  j["n"] = sample.germ.charge;
  j["c"] = sample.germ.rotation;
  j["r_outer"] = sample.r_outer;
  j["r_min"] = sample.r_min;
  j["boundary_residual"] = sample.boundary_residual;
  j["wrap_residual"] = sample.wrap_residual;
  j["max_cr_residual"] =
      std::max(residuals.transverse, residuals.axial);
  j["cr_transverse"] = residuals.transverse;
  j["cr_axial"] = residuals.axial;
  j["charge_trend"] = nlohmann::json::array();
  for (std::size_t i = 0; i < charge_values.size(); ++i)
    j["charge_trend"].push_back(
        {{"radius", charge_radii[i]}, {"value", charge_values[i]}});
  j["energy"] = energy;
  return j;
}

}  // namespace fgeo::cyl
