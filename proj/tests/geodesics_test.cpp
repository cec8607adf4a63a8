#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fgeo/geodesics.hpp"
#include "fgeo/numerics/rootfind.hpp"

using namespace fgeo;
using namespace fgeo::fin;
using namespace fgeo::flow;

namespace {

State equator_state(const Metric& m, int dir) {
  double r = m.equator_r();
  Vec3 x = m.chart_point(r, 0.0);
  Vec3 d = normalized(m.chart_dphi(r, 0.0));
  if (dir < 0) d = -1.0 * d;
  return make_state(x, (1.0 / m.costar(x, d)) * d);
}

double state_gap(const State& a, const State& b) {
  double s = 0;
  for (int i = 0; i < 6; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

State traj_end(const num::Trajectory& t) {
  const auto& y = t.final_state();
  return {y[0], y[1], y[2], y[3], y[4], y[5]};
}

}  // namespace

TEST_SUITE("geodesics.flow") {
  TEST_CASE("round equatorial great circle closes after 2 pi") {
    auto m = make_round();
    State s0 = equator_state(*m, +1);
    auto traj = cogeodesic_flow(*m, s0, kTwoPi);
    CHECK(state_gap(traj_end(traj), s0) < 1e-8);
  }

  TEST_CASE("katok equator closes at 2 pi/(1 +- eps), two independent integrators") {
    double eps = 0.3;
    auto m = make_katok(eps);
    for (int dir : {+1, -1}) {
      double T = kTwoPi / (1.0 + dir * eps);
      State s0 = equator_state(*m, dir);
      auto adaptive = cogeodesic_flow(*m, s0, T);
      CHECK(state_gap(traj_end(adaptive), s0) < 1e-7);

      num::IntegratorConfig fixed;
      fixed.method = num::IntegratorConfig::Method::fixed_rk4;
      fixed.fixed_step = 1e-4;
      auto rk4 = cogeodesic_flow(*m, s0, T, fixed);
      CHECK(state_gap(traj_end(rk4), s0) < 1e-7);
      CHECK(state_gap(traj_end(rk4), traj_end(adaptive)) < 1e-9);
    }
  }

  TEST_CASE("conservation: F*, Clairaut momentum, surface constraint") {
    for (auto m : {make_katok(0.3), MetricPtr(make_revolution_ellipsoid(0.5))}) {
      // generic (non-equatorial) initial state
      double r0 = 1.1;
      Vec3 x = m->chart_point(r0, 0.3);
      Vec3 d = normalized(m->chart_dr(r0, 0.3)) + 0.8 * normalized(m->chart_dphi(r0, 0.3));
      State s0 = make_state(x, (1.0 / m->costar(x, d)) * d);
      double T = 12.0;
      auto traj = cogeodesic_flow(*m, s0, T);
      auto rep = check_conservation(*m, traj);
      CHECK(rep.fstar_drift < 1e-8 * T);
      CHECK(rep.clairaut_drift < 1e-8 * T);
      CHECK(rep.surface_drift < 2e-8);
    }
  }

  TEST_CASE("flow rejects states off the unit co-sphere") {
    auto m = make_round();
    State s0 = equator_state(*m, +1);
    s0[5] *= 1.5;
    CHECK_THROWS(cogeodesic_flow(*m, s0, 1.0));
  }

  TEST_CASE("reversal duality for reversible metrics") {
    for (auto m : {make_round(), MetricPtr(make_revolution_ellipsoid(0.5))}) {
      double r0 = 1.0;
      Vec3 x = m->chart_point(r0, 0.0);
      Vec3 d = normalized(m->chart_dr(r0, 0.0)) + 0.4 * normalized(m->chart_dphi(r0, 0.0));
      State s0 = make_state(x, (1.0 / m->costar(x, d)) * d);
      auto fwd = cogeodesic_flow(*m, s0, 1.7);
      State s1 = traj_end(fwd);
      State rev0 = make_state(state_x(s1), -1.0 * state_p(s1));
      auto bwd = cogeodesic_flow(*m, rev0, 1.7);
      State expect = make_state(state_x(s0), -1.0 * state_p(s0));
      CHECK(state_gap(traj_end(bwd), expect) < 1e-8);
    }
  }
}

TEST_SUITE("geodesics.equator_orbit") {
  TEST_CASE("katok equator periods") {
    double eps = 0.3;
    auto east = equator_orbit(make_katok(eps), +1);
    auto west = equator_orbit(make_katok(eps), -1);
    CHECK(std::abs(east.period - kTwoPi / 1.3) < 1e-9);
    CHECK(std::abs(west.period - kTwoPi / 0.7) < 1e-9);
    CHECK(east.closure_residual < 1e-9);
    // curvature profile is identically 1
    for (double k : east.curvature_profile) CHECK(k == doctest::Approx(1.0));
  }

  TEST_CASE("ellipsoid equator has length 2 pi a and K=1 along it") {
    auto orbit = equator_orbit(make_revolution_ellipsoid(0.5), +1);
    CHECK(std::abs(orbit.period - kPi) < 1e-9);
    for (double k : orbit.curvature_profile)
      CHECK(k == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("equator length identity and the quasi-antipodal distance") {
    double eps = 0.3;
    auto m = make_katok(eps);
    auto east = equator_orbit(m, +1);
    auto west = equator_orbit(m, -1);
    double lp = east.period, lm = west.period;
    CHECK(std::abs(lp + lm - 4 * kPi / (1 - eps * eps)) < 1e-8);

    // A^2(p) from the flow: all geodesics from p land on it at arclength 2 pi
    Vec3 p = m->chart_point(m->equator_r(), 0.0);
    Vec3 a2p{0, 0, 0};
    bool first = true;
    for (double theta : {0.4, 1.9, 4.0}) {
      Vec3 u1 = normalized(m->chart_dr(m->equator_r(), 0.0));
      Vec3 u2 = normalized(m->chart_dphi(m->equator_r(), 0.0));
      Vec3 d = std::cos(theta) * u1 + std::sin(theta) * u2;
      State s0 = make_state(p, (1.0 / m->costar(p, d)) * d);
      auto traj = cogeodesic_flow(*m, s0, kTwoPi, polish_flow_config());
      Vec3 end = state_x(traj_end(traj));
      if (first) {
        a2p = end;
        first = false;
      } else {
        CHECK(norm(end - a2p) < 1e-7);
      }
    }

    // distance along the equator, east to A^2(p) and west back
    auto first_hit = [&](const GeodesicOrbit& orbit, const Vec3& target) {
      double best = 1e9, best_t = 0;
      for (double t = 1e-3; t < orbit.period; t += 1e-4) {
        double dd = norm(state_x(orbit.state_at(t)) - target);
        if (dd < best) {
          best = dd;
          best_t = t;
        }
      }
      return num::brent_minimize(
          [&](double t) { return norm(state_x(orbit.state_at(t)) - target); },
          best_t - 2e-4, best_t + 2e-4, 1e-12);
    };
    double d_east = first_hit(east, a2p);   // d(p, A^2 p)
    double d_west = first_hit(west, a2p);   // reaches A^2 p going west after l- - d(A^2 p, p)
    CHECK(std::abs((kTwoPi - lp) - d_east) < 1e-5);
    CHECK(std::abs((lm - kTwoPi) - (lm - d_west)) < 1e-5);
  }
}

TEST_SUITE("geodesics.closed_search") {
  TEST_CASE("round metric: one geodesic up to isometry, length 2 pi") {
    auto orbits = find_closed_geodesics(make_round(), 7.0, 32);
    REQUIRE(orbits.size() == 1);
    CHECK(std::abs(orbits[0].period - kTwoPi) < 1e-8);
  }

  TEST_CASE("katok golden ratio: exactly the two equator orbits") {
    double eps = 0.6180339887498949;
    // cap 17 so that the long equator (length 2 pi / (1 - eps) ~ 16.45) fits
    auto orbits = find_closed_geodesics(make_katok(eps), 17.0, 64);
    REQUIRE(orbits.size() == 2);
    CHECK(std::abs(orbits[0].period - kTwoPi / (1 + eps)) < 1e-6);
    CHECK(std::abs(orbits[1].period - kTwoPi / (1 - eps)) < 1e-6);
  }

  TEST_CASE("search log records drops and duplicate merges") {
    flow::SearchLog log;
    auto orbits = find_closed_geodesics(make_round(), 7.0, 24, &log);
    REQUIRE(orbits.size() == 1);
    CHECK(log.candidates >= 24);
    CHECK(log.duplicates >= 20);  // every direction closes, all merge
  }

  TEST_CASE("oblate ellipsoid: the short equator is detected") {
    auto orbits = find_closed_geodesics(make_revolution_ellipsoid(0.5), 4.0, 48);
    REQUIRE(!orbits.empty());
    CHECK(std::abs(orbits[0].period - kPi) < 1e-7);
    for (const auto& o : orbits) CHECK(o.period <= 4.0 + 1e-9);
  }
}

TEST_SUITE("geodesics.loops") {
  TEST_CASE("round metric loops are great circles") {
    auto rep = shortest_loop(make_round(), 16);
    CHECK(std::abs(rep.ell - kTwoPi) < 1e-4);
  }

  TEST_CASE("katok loops: short equator wins and exceeds pi") {
    auto rep = shortest_loop(make_katok(0.3), 24);
    CHECK(std::abs(rep.ell - kTwoPi / 1.3) < 1e-3);
    CHECK(rep.ell > kPi);
  }
}

TEST_SUITE("geodesics.focusing") {
  TEST_CASE("round sphere focuses at the antipode") {
    CHECK(focusing_spread(*make_round(), Vec3{0.2, -0.4, 0.8}, 64) < 1e-8);
  }
  TEST_CASE("katok 0.4 focuses at arclength pi") {
    auto m = make_katok(0.4);
    Vec3 base = m->chart_point(m->equator_r(), 0.7);
    CHECK(focusing_spread(*m, base, 64) < 1e-5);
  }
  TEST_CASE("oblate ellipsoid fails the focusing test") {
    auto m = make_revolution_ellipsoid(0.5);
    CHECK(focusing_spread(*m, Vec3{0, 0, 1}, 32) > 1e-3);
  }
}

TEST_SUITE("geodesics.contractibility") {
  TEST_CASE("great circle and its double") {
    auto orbit = equator_orbit(make_round(), +1);
    CHECK_FALSE(contractibility(orbit));
    CHECK(contractibility(orbit.iterate(2)));
  }
  TEST_CASE("katok short equator doubled is contractible") {
    auto orbit = equator_orbit(make_katok(0.3), +1);
    CHECK(contractibility(orbit.iterate(2)));
    CHECK_FALSE(contractibility(orbit.iterate(3)));
  }
}

TEST_SUITE("geodesics.csv") {
  TEST_CASE("trajectory dump has the documented columns") {
    auto m = make_katok(0.2);
    auto orbit = equator_orbit(m, +1);
    std::ostringstream os;
    write_trajectory_csv(os, *m, orbit.trajectory, 16);
    std::string s = os.str();
    CHECK(s.rfind("t,r,phi,p_r,p_phi,Fstar_residual\n", 0) == 0);
    int lines = 0;
    for (char c : s)
      if (c == '\n') ++lines;
    CHECK(lines == 18);
  }
}
