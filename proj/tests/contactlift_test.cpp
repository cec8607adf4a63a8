#include <cmath>

#include "doctest.h"
#include "fgeo/contactlift.hpp"
#include "fgeo/geodesics.hpp"

using namespace fgeo;
using namespace fgeo::lift;

TEST_SUITE("lift.reeb_flow") {
  TEST_CASE("hopf case p=q=1 has period 2 pi") {
    EllipsoidParams par{1, 1};
    geom::SU2Element w0{Cx(0.6, 0.0), Cx(0.0, 0.8)};
    auto w1 = ellipsoid_reeb_flow(par, w0, kTwoPi);
    CHECK(std::abs(w1.w1 - w0.w1) < 1e-12);
    CHECK(std::abs(w1.w2 - w0.w2) < 1e-12);
  }

  TEST_CASE("w2=0 orbit reaches the antipode at t = pi/p") {
    EllipsoidParams par{2, 1};
    geom::SU2Element w0{Cx(1.0 / std::sqrt(2.0), 0), Cx(0, 0)};
    // points on the ellipsoid E_{p,q} scale as 1/sqrt(p) on the w2=0 circle;
    // on S^3 with form h lambda0 the flow formula acts on unit vectors
    geom::SU2Element u0{Cx(1, 0), Cx(0, 0)};
    auto u1 = ellipsoid_reeb_flow(par, u0, kPi / par.p);
    CHECK(std::abs(u1.w1 + 1.0) < 1e-12);
    CHECK(std::abs(u1.w2) < 1e-15);
    (void)w0;
  }

  TEST_CASE("orbit periods 2 pi/p and 2 pi/q") {
    EllipsoidParams par{0.65, 0.35};
    geom::SU2Element a{Cx(1, 0), Cx(0, 0)}, b{Cx(0, 0), Cx(1, 0)};
    auto a1 = ellipsoid_reeb_flow(par, a, kTwoPi / par.p);
    auto b1 = ellipsoid_reeb_flow(par, b, kTwoPi / par.q);
    CHECK(std::abs(a1.w1 - a.w1) < 1e-12);
    CHECK(std::abs(b1.w2 - b.w2) < 1e-12);
  }

  TEST_CASE("rational ratio closes globally, irrational never returns") {
    EllipsoidParams rational{2, 1};
    CHECK(rational.resonant());
    Rng rng(31);
    for (int i = 0; i < 8; ++i) {
      C2 w = rng.unit_c2();
      geom::SU2Element w0{w.w1, w.w2};
      auto w1 = ellipsoid_reeb_flow(rational, w0, kTwoPi);  // 2 pi n / q, n/q=2/1
      CHECK(norm(w1.c2() - w0.c2()) < 1e-12);
    }

    double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    EllipsoidParams irr{1.0, golden};
    CHECK_FALSE(irr.resonant());
    C2 w = rng.unit_c2();
    // keep both components alive so the orbit is generic
    geom::SU2Element w0{Cx(0.6, 0.2), Cx(0.5, std::sqrt(1 - 0.36 - 0.04 - 0.25))};
    double closest = 1e9;
    for (double t = 0.05; t <= 100.0; t += 0.005) {
      auto wt = ellipsoid_reeb_flow(irr, w0, t);
      closest = std::min(closest, norm(wt.c2() - w0.c2()));
    }
    CHECK(closest > 1e-3);
    (void)w;
  }
}

TEST_SUITE("lift.correspondence") {
  TEST_CASE("constant h maps to constant g; round trip exact") {
    HFunction h = [](const geom::SU2Element&) { return 0.8; };
    GFunction g = h_to_g(h);
    Rng rng(4);
    for (int i = 0; i < 100; ++i) {
      Vec3 x = rng.unit3();
      Vec3 p = reject(rng.unit3(), x);
      if (norm(p) < 1e-6) continue;
      CHECK(g(x, p) == doctest::Approx(2.0 / 0.8).epsilon(1e-12));
      // degree-0 homogeneity
      CHECK(g(x, 3.7 * p) == doctest::Approx(g(x, p)).epsilon(1e-12));
    }
    auto rt = round_trip_check(h, 256);
    CHECK(rt.h_dev < 1e-12);
    CHECK(rt.g_dev < 1e-12);
  }

  TEST_CASE("ellipsoid h lifts to g = p + q + (p-q) p_phi on the unit cosphere") {
    double eps = 0.3;
    EllipsoidParams par = katok_ellipsoid_params(eps);
    HFunction h = [par](const geom::SU2Element& a) { return ellipsoid_h(par, a); };
    GFunction g = h_to_g(h);
    auto katok = fin::make_katok(eps);
    Rng rng(12);
    int kept = 0;
    while (kept < 1000) {
      // unit round covector in chart coordinates
      double r = rng.uniform(0.1, kPi - 0.1);
      double phi = rng.uniform(0, kTwoPi);
      double psi = rng.uniform(0, kTwoPi);
      fin::ChartState c{r, phi, std::cos(psi), std::sin(psi) * std::sin(r)};
      fin::State s = katok->from_chart(c);
      Vec3 x = fin::state_x(s), p = fin::state_p(s);
      double expected = par.p + par.q + (par.p - par.q) * c.p_phi;
      CHECK(std::abs(g(x, p) - expected) < 1e-9);
      // and F* = g |p| reproduces the chart co-metric formula
      double fstar = g(x, p) * norm(p);
      CHECK(std::abs(fstar - fin::katok_cometric(r, phi, c.p_r, c.p_phi, eps)) < 1e-9);
      ++kept;
    }
  }

  TEST_CASE("katok metric lifts to the ellipsoid h, 1e3 samples within 1e-9") {
    double eps = 0.3;
    EllipsoidParams par = katok_ellipsoid_params(eps);
    HFunction h = g_to_h(g_from_metric(fin::make_katok(eps)));
    Rng rng(13);
    for (int i = 0; i < 1000; ++i) {
      C2 w = rng.unit_c2();
      geom::SU2Element a{w.w1, w.w2};
      CHECK(std::abs(h(a) - ellipsoid_h(par, a)) < 1e-9);
    }
  }

  TEST_CASE("round trips within 1e-8 for the ellipsoid h") {
    EllipsoidParams par{2.0, 1.0};
    auto rt = round_trip_check(
        [par](const geom::SU2Element& a) { return ellipsoid_h(par, a); }, 512);
    CHECK(rt.h_dev < 1e-8);
    CHECK(rt.g_dev < 1e-8);
  }

  TEST_CASE("asymmetric or nonpositive h rejected") {
    CHECK_THROWS(h_to_g([](const geom::SU2Element& a) { return 1.0 + a.w1.real(); }));
    CHECK_THROWS(h_to_g([](const geom::SU2Element& a) {
      return std::norm(a.w1) - std::norm(a.w2);
    }));
  }
}

TEST_SUITE("lift.bundle") {
  TEST_CASE("bundle from a metric: h = 2 f o G and g homogeneous") {
    auto bundle = make_lift_bundle(fin::make_katok(0.25));
    Rng rng(61);
    for (int i = 0; i < 200; ++i) {
      C2 w = rng.unit_c2();
      geom::SU2Element a{w.w1, w.w2};
      auto m = geom::gmap(a);
      CHECK(std::abs(bundle.h(a) - 2.0 * bundle.f(m.x, m.v)) < 1e-12);
      Vec3 p = reject(rng.unit3(), m.x);
      if (norm(p) < 1e-6) continue;
      CHECK(bundle.g(m.x, 5.0 * p) ==
            doctest::Approx(bundle.g(m.x, p)).epsilon(1e-11));
    }
  }

  TEST_CASE("bundle from an asymmetric h is rejected") {
    CHECK_THROWS(make_lift_bundle(
        [](const geom::SU2Element& a) { return 1.0 + a.w2.real(); }));
  }
}

TEST_SUITE("lift.starshaped") {
  TEST_CASE("round fibre is convex") {
    auto rep = starshaped_convexity_check(g_from_metric(fin::make_round()));
    CHECK(rep.starshaped);
    CHECK(rep.fibrewise_convex);
  }

  TEST_CASE("katok 0.5 fibre is convex") {
    auto rep = starshaped_convexity_check(g_from_metric(fin::make_katok(0.5)));
    CHECK(rep.starshaped);
    CHECK(rep.fibrewise_convex);
  }

  TEST_CASE("angular dimple: starshaped but not convex") {
    GFunction dimple = [](const Vec3& x, const Vec3& p) {
      Vec3 n = normalized(x);
      Vec3 e1 = normalized(reject(std::abs(n[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0}, n));
      Vec3 e2 = cross(n, e1);
      double angle = std::atan2(dot(p, e2), dot(p, e1));
      return 1.0 + 0.9 * std::cos(4.0 * angle);
    };
    auto rep = starshaped_convexity_check(dimple);
    CHECK(rep.starshaped);
    CHECK_FALSE(rep.fibrewise_convex);
  }
}

TEST_SUITE("lift.conjugacy") {
  TEST_CASE("round metric reduces to the factor-2 identity") {
    CHECK(lift_conjugacy_check(fin::make_round(), 100) < 1e-6);
  }
  TEST_CASE("katok 0.3 satisfies the lift identity") {
    CHECK(lift_conjugacy_check(fin::make_katok(0.3), 100) < 1e-5);
  }
  TEST_CASE("ellipsoid h p=2,q=1 satisfies the lift identity") {
    // metric whose co-metric is g |p| for the ellipsoid h
    EllipsoidParams par{2.0, 1.0};
    GFunction g = h_to_g(
        [par](const geom::SU2Element& a) { return ellipsoid_h(par, a); });
    auto metric = fin::make_custom_sphere_cometric(
        "ellipsoid-lift", [g](const Vec3& x, const Vec3& p) {
          return g(x, p) * norm(p);
        });
    CHECK(lift_conjugacy_check(metric, 100) < 1e-5);
  }
}

TEST_SUITE("lift.flow_conjugacy") {
  TEST_CASE("reeb flow upstairs matches the reversed co-geodesic flow") {
    double eps = 0.3;
    EllipsoidParams par = katok_ellipsoid_params(eps);
    auto katok = fin::make_katok(eps);
    Rng rng(99);
    C2 w = rng.unit_c2();
    geom::SU2Element a0{w.w1, w.w2};

    auto project = [&](const geom::SU2Element& a) {
      geom::UnitTangentPair m = geom::gmap(a);
      double fs = katok->costar(m.x, m.v);
      return fin::make_state(m.x, (1.0 / fs) * m.v);
    };

    fin::State s0 = project(a0);
    double T = 3.0;
    auto traj = flow::cogeodesic_flow(*katok, s0, T, flow::polish_flow_config());
    double worst = 0;
    for (int i = 0; i <= 40; ++i) {
      double t = T * i / 40.0;
      // time-reversed correspondence (pinned co-orientation)
      fin::State down = project(ellipsoid_reeb_flow(par, a0, -t));
      auto y = traj.at(t);
      for (int k = 0; k < 6; ++k)
        worst = std::max(worst, std::abs(down[k] - y[k]));
    }
    CHECK(worst < 1e-7);
  }
}

TEST_SUITE("lift.descriptors") {
  TEST_CASE("ellipsoid and from-metric kinds agree for katok") {
    double eps = 0.2;
    auto par = katok_ellipsoid_params(eps);
    auto h1 = h_from_json({{"kind", "ellipsoid"}, {"p", par.p}, {"q", par.q}});
    auto h2 = h_from_json(
        {{"kind", "from-metric"},
         {"metric", {{"family", "katok"}, {"epsilon", eps}}}});
    Rng rng(55);
    for (int i = 0; i < 200; ++i) {
      C2 w = rng.unit_c2();
      geom::SU2Element a{w.w1, w.w2};
      CHECK(std::abs(h1(a) - h2(a)) < 1e-9);
    }
  }

  TEST_CASE("table descriptor: exact lookup with antipodal completion") {
    nlohmann::json j = {{"kind", "table"},
                        {"samples", {{{"w", {1.0, 0.0, 0.0, 0.0}}, {"value", 2.5}}}}};
    auto h = h_from_json(j);
    CHECK(h(geom::SU2Element{1, 0}) == doctest::Approx(2.5));
    CHECK(h(geom::SU2Element{-1, 0}) == doctest::Approx(2.5));
    CHECK_THROWS(h(geom::SU2Element{0, 1}));
  }

  TEST_CASE("unknown kinds and keys rejected") {
    CHECK_THROWS(h_from_json({{"kind", "mystery"}}));
    CHECK_THROWS(h_from_json({{"kind", "ellipsoid"}, {"p", 1.0}, {"q", 1.0}, {"x", 0}}));
  }
}
