#include <cmath>

#include "doctest.h"
#include "fgeo/czindex.hpp"
#include "fgeo/numerics/quadrature.hpp"
#include "fgeo/numerics/winding.hpp"

using namespace fgeo;
using namespace fgeo::cz;

// Analytic oracle for A = I: eigenfunctions v(t) = e^{2 pi i m t / T} w0 give
// tau = 2 pi m / T - 1, one two-dimensional eigenspace per winding m.
static double oracle_tau(int winding, double T) {
  return kTwoPi * winding / T - 1.0;
}

TEST_SUITE("czindex.jacobi") {
  TEST_CASE("K=1: the monodromy is rotation by T") {
    auto path = constant_curvature_path(1.0, kTwoPi);
    Mat2 m = path.monodromy();
    CHECK(std::abs(m.m00 - 1) < 1e-8);
    CHECK(std::abs(m.m11 - 1) < 1e-8);
    CHECK(std::abs(m.m01) < 1e-8);
    CHECK(std::abs(m.m10) < 1e-8);
    auto half = constant_curvature_path(1.0, kPi);
    Mat2 h = half.monodromy();
    CHECK(std::abs(h.m00 + 1) < 1e-8);
    CHECK(std::abs(h.m11 + 1) < 1e-8);
    CHECK(path.max_det_drift < 1e-10);
  }

  TEST_CASE("K=4: closed-form constant-coefficient oracle") {
    auto path = constant_curvature_path(4.0, kPi, 128);
    for (std::size_t i = 0; i < path.monodromy_samples.size(); ++i) {
      double t = kPi * i / (path.monodromy_samples.size() - 1);
      // columns of the exact fundamental solution for v' = JAv, A=diag(1,4)
      double c = std::cos(2 * t), s = std::sin(2 * t);
      const Mat2& phi = path.monodromy_samples[i];
      CHECK(std::abs(phi.m00 - c) < 1e-7);
      CHECK(std::abs(phi.m01 + 2 * s) < 1e-7);
      CHECK(std::abs(phi.m10 - s / 2) < 1e-7);
      CHECK(std::abs(phi.m11 - c) < 1e-7);
      CHECK(std::abs(phi.det() - 1.0) < 1e-7);
    }
  }

  TEST_CASE("jacobi_flow along the katok equator (K identically 1)") {
    auto orbit = flow::equator_orbit(fin::make_katok(0.3), +1);
    auto path = jacobi_flow(orbit);
    double T = orbit.period;
    Mat2 m = path.monodromy();
    CHECK(std::abs(m.m00 - std::cos(T)) < 1e-7);
    CHECK(std::abs(m.m10 - std::sin(T)) < 1e-7);
    CHECK(path.max_det_drift < 1e-7);
  }
}

TEST_SUITE("czindex.spectrum_oracle") {
  TEST_CASE("A=I, T=2pi: integer spectrum, mu=1, marginal tau3") {
    auto path = constant_curvature_path(1.0, kTwoPi);
    auto s = cz_spectrum(path, 3, 256);
    const double h = kTwoPi / 256;
    for (const auto& e : s.entries) {
      // central-difference truncation bound |omega|^3 h^2 / 6 per winding
      double omega = kTwoPi * e.winding / kTwoPi;
      double bound = 1.05 * std::pow(std::abs(omega), 3) * h * h / 6 + 1e-9;
      CHECK(std::abs(e.tau - oracle_tau(e.winding, kTwoPi)) < bound);
      CHECK(e.winding == (e.k >= 0 ? e.k / 2 : (e.k - 1) / 2));
    }
    CHECK(s.mu == 1);
    CHECK(s.mu_marginal);
    CHECK(std::abs(s.tau(2)) < 1.1e-4);
    CHECK(std::abs(s.tau(3)) < 1.1e-4);
  }

  TEST_CASE("winding of the eigenvalue-zero eigenfunction is 1") {
    auto s = cz_spectrum(constant_curvature_path(1.0, kTwoPi), 3, 256);
    const auto& e = s.entry(2);  // tau ~ 0, winding 1
    CHECK(std::abs(e.tau) < 1.1e-4);
    num::PlanarPath path;
    path.period = kTwoPi;
    path.periodic = true;
    for (std::size_t j = 0; j <= e.eigenfunction.size(); ++j)
      path.samples.push_back(e.eigenfunction[j % e.eigenfunction.size()]);
    CHECK(num::winding_number(path) == doctest::Approx(1.0));
  }

  TEST_CASE("A=I, T=4pi: tau3 = -1/2 and mu = 3") {
    auto path = constant_curvature_path(1.0, 2 * kTwoPi);
    auto s = cz_spectrum(path, 4, 256);
    CHECK(std::abs(s.tau(3) + 0.5) < 1e-4);
    CHECK(s.mu == 3);
    // tau_4 = tau_5 = 0 analytically: the boundary above mu is marginal
    CHECK(s.mu_marginal);
    CHECK(std::abs(s.tau(4)) < 5e-4);
  }

  TEST_CASE("A=I, T=6pi: mu = 5") {
    auto path = constant_curvature_path(1.0, 3 * kTwoPi);
    auto s = cz_spectrum(path, 5, 256);
    CHECK(s.mu == 5);
  }

  TEST_CASE("O(N^-2) convergence of the discretized spectrum") {
    auto path = constant_curvature_path(1.0, kTwoPi);
    std::vector<double> errs;
    for (int N : {128, 256, 512}) {
      auto s = cz_spectrum(path, 3, N);
      double e = 0;
      for (const auto& entry : s.entries)
        e = std::max(e, std::abs(entry.tau - oracle_tau(entry.winding, kTwoPi)));
      errs.push_back(e);
    }
    double slope1 = std::log2(errs[0] / errs[1]);
    double slope2 = std::log2(errs[1] / errs[2]);
    CHECK(slope1 == doctest::Approx(2.0).epsilon(0.1));
    CHECK(slope2 == doctest::Approx(2.0).epsilon(0.1));
  }

  TEST_CASE("two eigenvalues per winding and monotone labels") {
    auto path = constant_curvature_path(1.0, 2 * kTwoPi);
    auto s = cz_spectrum(path, 4, 192);
    REQUIRE(s.entries.size() == 2 * (4 + 2));
    for (std::size_t i = 1; i < s.entries.size(); ++i) {
      CHECK(s.entries[i].k == s.entries[i - 1].k + 1);
      CHECK(s.entries[i].tau >= s.entries[i - 1].tau - 1e-9);
    }
  }

  TEST_CASE("grid too coarse is rejected") {
    auto path = constant_curvature_path(1.0, kTwoPi);
    CHECK_THROWS(cz_spectrum(path, 2, 32));
  }
}

TEST_SUITE("czindex.variable_curvature") {
  // meridian of the oblate ellipsoid: K ranges over [1, 16] along the orbit
  static flow::GeodesicOrbit meridian_orbit() {
    auto m = fin::make_revolution_ellipsoid(0.5);
    auto orbits = flow::find_closed_geodesics(m, 5.0, 32);
    for (const auto& o : orbits)
      if (o.period > 4.0) return o;
    throw fgeo::error("meridian not found");
  }

  TEST_CASE("meridian length matches the elliptic-arc quadrature oracle") {
    double a = 0.5;
    double quarter = num::quadrature(
        [a](double u) {
          return std::sqrt(a * a * std::cos(u) * std::cos(u) +
                           std::sin(u) * std::sin(u));
        },
        0.0, kPi / 2, 1e-12);
    auto orbit = meridian_orbit();
    CHECK(std::abs(orbit.period - 4 * quarter) < 1e-7);
  }

  TEST_CASE("spectrum along the meridian: labeling, taui, angle identity") {
    auto orbit = meridian_orbit();
    auto path = jacobi_flow(orbit);
    const int N = 1024;
    auto s = cz_spectrum(path, 4, N);
    CHECK(inequality_taui_check(s, path.period));

    // 2 pi phidot = <(A + tau I) w, w> along the normalized eigenfunction;
    // the angle derivative uses a five-point stencil built from increments
    const auto& e3 = s.entry(3);
    const double h = path.period / N;
    auto unit = [&](const Vec2& v) {
      double n = std::hypot(v[0], v[1]);
      return Vec2{v[0] / n, v[1] / n};
    };
    auto inc = [&](int a, int b) {
      Vec2 wa = unit(e3.eigenfunction[((a % N) + N) % N]);
      Vec2 wb = unit(e3.eigenfunction[((b % N) + N) % N]);
      return std::atan2(wa[0] * wb[1] - wa[1] * wb[0],
                        wa[0] * wb[0] + wa[1] * wb[1]);
    };
    double worst = 0;
    for (int j = 0; j < N; ++j) {
      double im2 = inc(j - 2, j - 1), im1 = inc(j - 1, j);
      double ip1 = inc(j, j + 1), ip2 = inc(j + 1, j + 2);
      double fm2 = -(im1 + im2), fm1 = -im1, fp1 = ip1, fp2 = ip1 + ip2;
      double phidot = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h);
      Vec2 wj = unit(e3.eigenfunction[j]);
      double K = path.curvature(h * j);
      double rhs = (1.0 + e3.tau) * wj[0] * wj[0] + (K + e3.tau) * wj[1] * wj[1];
      worst = std::max(worst, std::abs(phidot - rhs));
    }
    CHECK(worst < 1e-4);
  }
}

TEST_SUITE("czindex.taui") {
  static CZSpectrum synthetic(double tau3, double T) {
    CZSpectrum s;
    s.T = T;
    s.grid_size = 256;
    s.max_winding = 2;
    SpectrumEntry e;
    e.k = 3;
    e.winding = 1;
    e.tau = tau3;
    s.entries.push_back(e);
    return s;
  }

  TEST_CASE("equality and violation cases") {
    CHECK(inequality_taui_check(synthetic(0.0, kTwoPi), kTwoPi));
    CHECK(inequality_taui_check(synthetic(-0.5, 2 * kTwoPi), 2 * kTwoPi));
    CHECK_FALSE(inequality_taui_check(synthetic(0.5, kTwoPi), kTwoPi));
  }
}

TEST_SUITE("czindex.certify") {
  TEST_CASE("katok 0.3 is certified dynamically convex") {
    CertifyOptions opt;
    opt.length_cap = 10.0;
    opt.spectrum_grid = 512;
    opt.loop_grid = 16;
    opt.search_directions = 48;
    auto rep = certify_dynamical_convexity(fin::make_katok(0.3), 1.0, opt);
    CHECK(rep.verdict_by_theorem);
    CHECK(rep.verdict_by_inspection);
    CHECK(std::abs(rep.ell - kTwoPi / 1.3) < 1e-4);
    bool saw_doubled_short = false;
    for (const auto& row : rep.orbits) {
      CHECK(row.taui_ok);
      if (row.contractible) {
        REQUIRE(row.mu.has_value());
        CHECK(*row.mu >= 3);
      } else {
        CHECK_FALSE(row.mu.has_value());
      }
      if (row.iterates == 2 && std::abs(row.total_period - 2 * kTwoPi / 1.3) < 1e-6) {
        saw_doubled_short = true;
        CHECK(*row.mu == 3);
      }
    }
    CHECK(saw_doubled_short);
  }

  TEST_CASE("sharp ellipsoid: doubled equator has mu=1, marginal flagged") {
    CertifyOptions opt;
    opt.length_cap = 4.0;
    opt.spectrum_grid = 512;
    opt.loop_grid = 16;
    opt.search_directions = 48;
    auto rep =
        certify_dynamical_convexity(fin::make_revolution_ellipsoid(0.5), 1.0, opt);
    CHECK_FALSE(rep.verdict_by_theorem);  // ell = pi is not > pi
    CHECK_FALSE(rep.verdict_by_inspection);
    CHECK(rep.any_marginal);
    bool saw = false;
    for (const auto& row : rep.orbits) {
      if (row.iterates == 2 && std::abs(row.total_period - kTwoPi) < 1e-6) {
        saw = true;
        CHECK(row.contractible);
        CHECK(std::abs(row.tau3) < 5e-3);
        CHECK(*row.mu == 1);
        CHECK(row.marginal);
      }
    }
    CHECK(saw);
  }

  TEST_CASE("round metric: doubled great circle has mu=3") {
    CertifyOptions opt;
    opt.length_cap = 7.0;
    opt.spectrum_grid = 384;
    opt.loop_grid = 12;
    opt.search_directions = 24;
    auto rep = certify_dynamical_convexity(fin::make_round(), 1.0, opt);
    CHECK(rep.verdict_by_theorem);
    CHECK(rep.verdict_by_inspection);
    for (const auto& row : rep.orbits)
      if (row.contractible) CHECK(*row.mu == 3);
  }

  TEST_CASE("missing curvature guarantee is refused") {
    auto custom = fin::make_custom_sphere_cometric(
        "fixture", [](const Vec3& x, const Vec3& p) {
          return norm(reject(p, normalized(x)));
        });
    CHECK_THROWS(certify_dynamical_convexity(custom, 1.0, 5.0));
  }
}

TEST_SUITE("czindex.pinching") {
  TEST_CASE("round metric: quarter pinched, rademacher equality") {
    auto rep = pinching_corollary_check(fin::make_round());
    CHECK(rep.quarter_pinched);
    CHECK(rep.pinch_verdict);
    CHECK(rep.rademacher_checked);
    CHECK(std::abs(rep.rademacher_bound - kTwoPi) < 1e-9);
    CHECK(rep.rademacher_ok);
    CHECK(std::abs(rep.ell - rep.rademacher_bound) < 1e-4);
  }

  TEST_CASE("oblate ellipsoid: not quarter pinched, no rademacher branch") {
    auto rep = pinching_corollary_check(fin::make_revolution_ellipsoid(0.5));
    CHECK_FALSE(rep.quarter_pinched);
    CHECK_FALSE(rep.rademacher_checked);
  }

  TEST_CASE("katok 0.2: rademacher near-equality, pinch branch rejected") {
    auto m = fin::make_katok(0.2);
    CHECK_THROWS(pinching_corollary_check(m, true));
    auto rep = pinching_corollary_check(m);
    CHECK_FALSE(rep.quarter_pinched);
    CHECK(rep.rademacher_checked);
    CHECK(std::abs(rep.reversibility - 1.5) < 1e-5);
    CHECK(rep.rademacher_ok);
    CHECK(std::abs(rep.ell - rep.rademacher_bound) < 1e-4);
  }
}

TEST_SUITE("czindex.json") {
  TEST_CASE("spectrum report fields") {
    auto s = cz_spectrum(constant_curvature_path(1.0, kTwoPi), 3, 128);
    auto j = spectrum_json(s, "great-circle", false);
    CHECK(j.at("orbit_id") == "great-circle");
    CHECK(j.at("mu").is_null());
    CHECK(j.at("tau").size() == j.at("winding").size());
    auto j2 = spectrum_json(s, "great-circle-x2", true);
    CHECK(j2.at("mu").get<int>() == 1);
    CHECK(j2.at("marginal").get<bool>());
  }
}
