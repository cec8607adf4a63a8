#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fgeo/cylinder.hpp"

using namespace fgeo;
using namespace fgeo::cyl;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

SectorGerm golden_germ() {
  SectorGerm g;
  g.charge = 2;
  g.rotation = kGolden;
  g.coefficients = {0, 0, 0, Cx(1, 0)};  // f(z) = z^3
  return g;
}

}  // namespace

TEST_SUITE("cylinder.germ") {
  TEST_CASE("rational rotation rejected") {
    SectorGerm g = golden_germ();
    g.rotation = 0.5;
    CHECK_THROWS_WITH_AS(g.validate(),
                         "SectorGerm: rotation must be irrational", fgeo::error);
  }
  TEST_CASE("order must exceed the charge") {
    SectorGerm g = golden_germ();
    g.coefficients = {0, 0, Cx(1, 0)};  // ord 2 == charge 2
    CHECK_THROWS(g.validate());
  }
  TEST_CASE("polynomial evaluation") {
    SectorGerm g = golden_germ();
    Cx z{0.3, 0.4};
    CHECK(std::abs(g.f(z) - z * z * z) < 1e-15);
    CHECK(std::abs(g.f_prime(z) - 3.0 * z * z) < 1e-15);
    CHECK(g.ord0() == 3);
  }
}

TEST_SUITE("cylinder.build") {
  TEST_CASE("flat tube, n=1: explicit components") {
    SectorGerm g;
    g.charge = 1;
    g.rotation = 1.0 / std::sqrt(2.0);
    g.coefficients = {0, 0, Cx(1, 0)};  // f = z^2
    auto sample = build_cylinder(g, flat_tube(), {});
    for (const auto& node : sample.nodes) {
      double r = std::abs(node.z);
      double theta = std::arg(node.z);
      if (theta < 0) theta += kTwoPi;
      // F = z^{2-c} with the sector branch
      Cx expect = std::exp((2.0 - g.rotation) * Cx(std::log(r), theta));
      CHECK(std::abs(node.F - expect) < 1e-12);
      CHECK(node.a == doctest::Approx(-std::log(r) / kTwoPi).epsilon(1e-12));
      CHECK(node.t == doctest::Approx(theta / kTwoPi).epsilon(1e-12));
    }
  }

  TEST_CASE("n=2 golden germ: sector values and exact matching") {
    auto sample = build_cylinder(golden_germ(), flat_tube(), {});
    const double c = kGolden;
    for (const auto& node : sample.nodes) {
      double r = std::abs(node.z);
      double theta = std::arg(node.z);
      if (theta < 0) theta += kTwoPi;
      // F_k = e^{2 pi i k c} z^{3-2c} with the in-sector branch of arg
      Cx phase = std::polar(1.0, kTwoPi * c * node.sector);
      Cx expect = phase * std::exp((3.0 - 2.0 * c) * Cx(std::log(r), theta));
      CHECK(std::abs(node.F - expect) < 1e-12);
    }
    CHECK(sample.boundary_residual < 1e-12);
    CHECK(sample.wrap_residual < 1e-12);
  }

  TEST_CASE("|F| is continuous across rays and vanishes at the puncture") {
    auto sample = build_cylinder(golden_germ(), linear_tube(), {});
    // modulus jump across every ray at several radii
    for (double r : {0.9, 0.31, 0.011}) {
      for (int k = 0; k < sample.germ.charge; ++k) {
        double ray = kTwoPi * (k + 1) / sample.germ.charge;
        Cx z = std::polar(r, std::min(ray, kTwoPi) - 1e-13);
        Cx z2 = std::polar(r, std::fmod(ray, kTwoPi) + 1e-13);
        CHECK(std::abs(std::abs(sample.F_at(z)) - std::abs(sample.F_at(z2))) < 1e-12);
      }
    }
    // decay toward the puncture, with the expected modulus slope
    double out_max = 0, in_max = 0;
    for (int j = 0; j < sample.n_angular; ++j) {
      out_max = std::max(out_max, std::abs(sample.node(0, j).F));
      in_max = std::max(in_max, std::abs(sample.node(sample.n_rings - 1, j).F));
    }
    CHECK(in_max < out_max);
    double r_out = std::abs(sample.node(0, 0).z);
    double r_in = std::abs(sample.node(sample.n_rings - 1, 0).z);
    double slope = std::log(out_max / in_max) / std::log(r_out / r_in);
    CHECK(slope == doctest::Approx(3.0 - 2.0 * kGolden).epsilon(1e-6));
    // a grows toward the puncture
    CHECK(sample.node(sample.n_rings - 1, 3).a > sample.node(0, 3).a);
  }

  TEST_CASE("a is invariant under the sector rotation z -> e^{2 pi i/n} z") {
    auto sample = build_cylinder(golden_germ(), linear_tube(), {});
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
      double r = rng.uniform(0.01, 0.9);
      double theta = rng.uniform(0.01, kTwoPi / 2 - 0.01);
      Cx z = std::polar(r, theta);
      Cx zr = std::polar(r, theta + kTwoPi / 2);  // n = 2
      CHECK(std::abs(sample.a_at(z) - sample.a_at(zr)) < 1e-11);
    }
  }

  TEST_CASE("tube radius guard and adaptive shrink") {
    SectorGerm g = golden_germ();
    g.coefficients = {0, 0, 0, Cx(500.0, 0)};  // f = 500 z^3
    GridSpec grid;
    grid.auto_shrink = false;
    CHECK_THROWS(build_cylinder(g, flat_tube(2.0), grid));
    grid.auto_shrink = true;
    auto sample = build_cylinder(g, flat_tube(2.0), grid);
    CHECK(sample.r_outer < 1.0);
    double worst = 0;
    for (const auto& node : sample.nodes) worst = std::max(worst, std::abs(node.F));
    CHECK(worst <= 2.0);
  }
}

TEST_SUITE("cylinder.residuals") {
  TEST_CASE("flat tube: axial residual at roundoff level") {
    GridSpec grid;
    grid.n_angular = 512;
    grid.rings_per_octave = 16;
    auto sample = build_cylinder(golden_germ(), flat_tube(), grid);
    auto res = cr_residual(sample);
    CHECK(res.axial < 1e-9);
  }

  TEST_CASE("linear tube: residual order 2 over three refinements") {
    std::vector<double> trans, axial, hs;
    for (int level = 0; level < 4; ++level) {
      GridSpec grid;
      grid.rings_per_octave = 16 << level;
      grid.n_angular = 192 << level;
      grid.r_min = 1e-2;
      auto sample = build_cylinder(golden_germ(), linear_tube(), grid);
      auto res = cr_residual(sample);
      trans.push_back(res.transverse);
      axial.push_back(res.axial);
      hs.push_back(res.grid_h);
    }
    for (int l = 0; l + 1 < 4; ++l) {
      double slope_t = std::log(trans[l] / trans[l + 1]) / std::log(hs[l] / hs[l + 1]);
      double slope_a = std::log(axial[l] / axial[l + 1]) / std::log(hs[l] / hs[l + 1]);
      CHECK(slope_t == doctest::Approx(2.0).epsilon(0.1));
      CHECK(slope_a == doctest::Approx(2.0).epsilon(0.1));
    }
  }

  TEST_CASE("corrupted a-component is caught (negative control)") {
    GridSpec grid;
    grid.n_angular = 256;
    auto sample = build_cylinder(golden_germ(), linear_tube(), grid);
    for (auto& node : sample.nodes) node.a += 0.01 * std::abs(node.z);
    auto res = cr_residual(sample);
    CHECK(res.axial > 1e-3);
  }
}

TEST_SUITE("cylinder.charge") {
  TEST_CASE("flat tube: every circle integral equals the charge") {
    auto sample = build_cylinder(golden_germ(), flat_tube(), {});
    auto values = charge_integral(sample, {1.0, 0.1, 0.01, 0.001});
    for (double v : values) CHECK(std::abs(v - 2.0) < 1e-10);
  }

  TEST_CASE("linear tube: trend to the charge, monotone in the radius") {
    GridSpec grid;
    auto sample = build_cylinder(golden_germ(), linear_tube(), grid);
    std::vector<double> radii = {1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001};
    auto values = charge_integral(sample, radii);
    for (std::size_t i = 1; i < values.size(); ++i)
      CHECK(std::abs(values[i] - 2.0) < std::abs(values[i - 1] - 2.0) + 1e-12);
    CHECK(std::abs(values.back() - 2.0) < 1e-2);
  }

  TEST_CASE("n=1, f=z^5, eta(s)=s/2: trend to 1") {
    SectorGerm g;
    g.charge = 1;
    g.rotation = kGolden;
    g.coefficients = {0, 0, 0, 0, 0, Cx(1, 0)};
    ModelTube tube{[](double s) { return 0.5 * s; }, 2.0};
    auto sample = build_cylinder(g, tube, {});
    auto values = charge_integral(sample, {1.0, 0.1, 0.01, 0.001});
    CHECK(std::abs(values.back() - 1.0) < 1e-3);
    for (std::size_t i = 1; i < values.size(); ++i)
      CHECK(std::abs(values[i] - 1.0) < std::abs(values[i - 1] - 1.0) + 1e-12);
  }
}

TEST_SUITE("cylinder.energy") {
  TEST_CASE("constant cutoffs") {
    auto sample = build_cylinder(golden_germ(), linear_tube(), {});
    std::vector<Cutoff> ones = {{[](double) { return 1.0; }, 1.0}};
    std::vector<Cutoff> zeros = {{[](double) { return 0.0; }, 0.0}};
    auto plain = charge_integral(sample, {sample.r_outer});
    double e_one = energy_estimate(sample, ones);
    CHECK(e_one == doctest::Approx(plain[0] - 2.0).epsilon(1e-9));
    CHECK(energy_estimate(sample, zeros) == doctest::Approx(0.0));
  }

  TEST_CASE("sigmoid family: finite and stable under doubling") {
    auto sample = build_cylinder(golden_germ(), linear_tube(), {});
    double e20 = energy_estimate(sample, sigmoid_cutoff_family(20));
    double e40 = energy_estimate(sample, sigmoid_cutoff_family(40));
    CHECK(std::abs(e20 - e40) < 1e-6);
    auto plain = charge_integral(sample, {sample.r_outer});
    CHECK(e20 <= plain[0] + 2.0 + 1e-9);
    CHECK(std::isfinite(e20));
  }

  TEST_CASE("non-monotone cutoff rejected") {
    auto sample = build_cylinder(golden_germ(), flat_tube(), {});
    std::vector<Cutoff> bad = {{[](double x) { return 0.5 + 0.4 * std::sin(x); }, 0.5}};
    CHECK_THROWS(energy_estimate(sample, bad));
  }
}

TEST_SUITE("cylinder.gauge") {
  TEST_CASE("zero zeta leaves the form untouched") {
    GaugeReport rep;
    auto tube = gauge_correction([](double rho) { return rho * rho; },
                                 [](double) { return 0.0; }, 2.0, &rep);
    CHECK(rep.f_at_half == doctest::Approx(0.0));
    CHECK(rep.df_angular_component < 1e-8);
    CHECK(tube.eta_hat(0.25) == doctest::Approx(0.25));  // eta_hat(s) = s
  }

  TEST_CASE("zeta = rho integrates to rho^2/2 and stays exact") {
    GaugeReport rep;
    gauge_correction([](double) { return 0.0; }, [](double rho) { return rho; },
                     2.0, &rep);
    CHECK(rep.f_at_half == doctest::Approx(0.125).epsilon(1e-10));
    CHECK(rep.exactness_residual < 1e-8);
    CHECK(rep.df_angular_component < 1e-8);
  }

  TEST_CASE("eta = rho^2 gives eta_hat(s) = s, Phi(s) = s^2/2, omega residual") {
    GaugeReport rep;
    auto tube = gauge_correction([](double rho) { return rho * rho; },
                                 [](double rho) { return std::sin(rho); }, 2.0,
                                 &rep);
    CHECK(tube.Phi(0.25) == doctest::Approx(0.25 * 0.25 / 2).epsilon(1e-10));
    CHECK(rep.omega_residual < 1e-8);
  }

  TEST_CASE("Phi is monotone where the profile keeps one sign") {
    auto tube = linear_tube();
    double prev = tube.Phi(0.0);
    CHECK(prev == 0.0);
    for (double sv : {0.1, 0.4, 0.9, 1.7, 2.9}) {
      double cur = tube.Phi(sv);
      CHECK(cur > prev);
      prev = cur;
    }
  }

  TEST_CASE("eta(0) != 0 rejected") {
    CHECK_THROWS(gauge_correction([](double) { return 1.0; },
                                  [](double) { return 0.0; }, 2.0));
  }
}

TEST_SUITE("cylinder.dumps") {
  TEST_CASE("csv header and diagnostics fields") {
    GridSpec grid;
    grid.n_angular = 32;
    grid.r_min = 0.2;
    auto sample = build_cylinder(golden_germ(), flat_tube(), grid);
    std::ostringstream os;
    write_nodes_csv(os, sample);
    CHECK(os.str().rfind("re_z,im_z,sector,re_F,im_F,t,a\n", 0) == 0);

    auto res = cr_residual(sample);
    auto values = charge_integral(sample, {1.0, 0.5});
    auto j = cylinder_diagnostics(sample, res, {1.0, 0.5}, values, 1.25);
    CHECK(j.at("n").get<int>() == 2);
    CHECK(j.at("charge_trend").size() == 2);
    CHECK(j.contains("max_cr_residual"));
    CHECK(j.contains("energy"));
  }
}
