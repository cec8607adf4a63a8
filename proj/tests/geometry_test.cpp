#include <cmath>

#include "doctest.h"
#include "fgeo/geometry.hpp"

using namespace fgeo;
using namespace fgeo::geom;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_SUITE("geometry.gmap") {
  TEST_CASE("identity element maps to (j, k)") {
    auto m = gmap(SU2Element{1, 0});
    CHECK(norm(m.x - Vec3{0, 1, 0}) < 1e-15);
    CHECK(norm(m.v - Vec3{0, 0, 1}) < 1e-15);
  }

  TEST_CASE("(0,1) by direct substitution") {
    auto m = gmap(SU2Element{0, 1});
    CHECK(norm(m.x - Vec3{0, 1, 0}) < 1e-15);
    CHECK(norm(m.v - Vec3{0, 0, -1}) < 1e-15);
  }

  TEST_CASE("diagonal-free element, formula vs conjugation oracle") {
    SU2Element a{kInvSqrt2, kInvSqrt2};
    auto m = gmap(a);
    auto oracle = gmap_by_conjugation(a);
    CHECK(norm(m.x - oracle.x) < 1e-14);
    CHECK(norm(m.v - oracle.v) < 1e-14);
    // both routes give x = (t=0, z=1), v = (t=-1, z=0)
    CHECK(norm(m.x - Vec3{0, 1, 0}) < 1e-14);
    CHECK(norm(m.v - Vec3{-1, 0, 0}) < 1e-14);
  }

  TEST_CASE("formula equals conjugation on random elements") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      C2 w = rng.unit_c2();
      SU2Element a{w.w1, w.w2};
      auto m = gmap(a), o = gmap_by_conjugation(a);
      CHECK(norm(m.x - o.x) < 1e-13);
      CHECK(norm(m.v - o.v) < 1e-13);
    }
  }

  TEST_CASE("double cover: gmap(-A) == gmap(A), outputs orthonormal") {
    Rng rng(5);
    for (int i = 0; i < 10000; ++i) {
      C2 w = rng.unit_c2();
      SU2Element a{w.w1, w.w2};
      auto m = gmap(a), n = gmap(a.negated());
      CHECK(norm(m.x - n.x) == 0.0);
      CHECK(norm(m.v - n.v) == 0.0);
      m.validate(1e-12);
    }
  }

  TEST_CASE("gmap_inverse reconstructs up to sign") {
    Rng rng(9);
    for (int i = 0; i < 500; ++i) {
      C2 w = rng.unit_c2();
      SU2Element a{w.w1, w.w2};
      auto m = gmap(a);
      SU2Element b = gmap_inverse(m);
      auto r = gmap(b);
      CHECK(norm(r.x - m.x) < 1e-10);
      CHECK(norm(r.v - m.v) < 1e-10);
    }
  }
}

TEST_SUITE("geometry.charts") {
  TEST_CASE("polar round trip away from poles") {
    Rng rng(13);
    for (int i = 0; i < 1000; ++i) {
      PolarChartPoint p{rng.uniform(0.05, kPi - 0.05), rng.uniform(0, kTwoPi)};
      Vec3 x = polar_to_ambient(p);
      auto q = ambient_to_polar(x);
      CHECK(std::abs(p.r - q.r) < 1e-12);
      double dphi = std::remainder(p.phi - q.phi, kTwoPi);
      CHECK(std::abs(dphi) < 1e-12);
    }
  }

  TEST_CASE("pole margin enforced") {
    CHECK_THROWS(ambient_to_polar(Vec3{1, 0, 0}));
    CHECK_THROWS(PolarChartPoint{1e-12, 0}.validate());
  }

  TEST_CASE("chart frame is orthogonal, dphi has length sin r") {
    PolarChartPoint p{0.8, 1.1};
    Vec3 x = polar_to_ambient(p);
    Vec3 er = polar_dr(p), ephi = polar_dphi(p);
    CHECK(std::abs(dot(er, x)) < 1e-14);
    CHECK(std::abs(dot(ephi, x)) < 1e-14);
    CHECK(std::abs(dot(er, ephi)) < 1e-14);
    CHECK(std::abs(norm(er) - 1.0) < 1e-14);
    CHECK(std::abs(norm(ephi) - std::sin(p.r)) < 1e-14);
  }
}

TEST_SUITE("geometry.pullback") {
  TEST_CASE("reeb direction at the identity gives ratio 2") {
    SU2Element a{1, 0};
    C2 xi{Cx(0, 1), Cx(0, 0)};  // i * w1 direction
    CHECK(std::abs(gmap_pullback_ratio(a, xi) - 2.0) < 1e-6);
  }

  TEST_CASE("100 random non-kernel samples within 1e-5") {
    CHECK(gmap_pullback_check(100) < 1e-5);
  }

  TEST_CASE("kernel directions: both sides vanish") {
    SU2Element a{1, 0};
    for (C2 xi : {C2{Cx(0, 0), Cx(1, 0)}, C2{Cx(0, 0), Cx(0, 1)}}) {
      auto s = gmap_pullback_sides(a, xi);
      CHECK(std::abs(s.ambient2) < 1e-12);
      CHECK(std::abs(s.pulled_back) < 1e-6);
      CHECK_THROWS(gmap_pullback_ratio(a, xi));
    }
  }
}

TEST_SUITE("geometry.antipodal") {
  TEST_CASE("constant function is symmetric") {
    CHECK(antipodal_h_check([](const SU2Element&) { return 1.0; }));
  }

  TEST_CASE("ellipsoid h is symmetric") {
    auto h = [](const SU2Element& a) {
      return 1.0 / (2.0 * std::norm(a.w1) + 1.0 * std::norm(a.w2));
    };
    CHECK(antipodal_h_check(h));
  }

  TEST_CASE("odd perturbation is rejected") {
    auto h = [](const SU2Element& a) { return 1.0 + a.w1.real(); };
    CHECK_FALSE(antipodal_h_check(h));
  }
}
