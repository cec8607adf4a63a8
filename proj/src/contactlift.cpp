#include "fgeo/contactlift.hpp"

#include <cmath>

namespace fgeo::lift {

void EllipsoidParams::validate() const {
  require(p > 0 && q > 0, "EllipsoidParams: p, q must be positive");
}

bool EllipsoidParams::resonant() const {
  validate();
  return fin::is_resonant_ratio(p / q);
}

geom::SU2Element ellipsoid_reeb_flow(const EllipsoidParams& par,
                                     const geom::SU2Element& w0, double t) {
  par.validate();
  return {w0.w1 * std::polar(1.0, par.p * t), w0.w2 * std::polar(1.0, par.q * t)};
}

double ellipsoid_h(const EllipsoidParams& par, const geom::SU2Element& a) {
  par.validate();
  return 1.0 / (par.p * std::norm(a.w1) + par.q * std::norm(a.w2));
}

EllipsoidParams katok_ellipsoid_params(double epsilon) {
  require(std::abs(epsilon) < 1.0, "katok_ellipsoid_params: |eps| < 1");
  return {(1.0 + epsilon) / 2.0, (1.0 - epsilon) / 2.0};
}

GFunction g_from_metric(const fin::MetricPtr& metric) {
  require(metric != nullptr, "g_from_metric: null metric");
  return [metric](const Vec3& x, const Vec3& p) {
    double np = norm(p);
    require(np > 0, "g: p must be nonzero");
    return metric->costar(x, p) / np;
  };
}

HFunction g_to_h(GFunction g) {
  return [g = std::move(g)](const geom::SU2Element& a) {
    geom::UnitTangentPair m = geom::gmap(a);
    // l0 is the identity on ambient representatives; |v| = 1
    return 2.0 / g(m.x, m.v);
  };
}

GFunction h_to_g(const HFunction& h) {
  require(geom::antipodal_h_check(h),
          "h_to_g: h is not antipodally symmetric");
  {
    Rng rng(77);
    for (int i = 0; i < 256; ++i) {
      C2 w = rng.unit_c2();
      require(h(geom::SU2Element{w.w1, w.w2}) > 0, "h_to_g: h must be positive");
    }
  }
  return [h](const Vec3& x, const Vec3& p) {
    double np = norm(p);
    require(np > 0, "g: p must be nonzero");
    Vec3 v = (1.0 / np) * p;
    geom::SU2Element a = geom::gmap_inverse({normalized(x), v});
    return 2.0 / h(a);
  };
}

namespace {

LiftBundle assemble_bundle(HFunction h, GFunction g) {
  // degree-0 homogeneity of g at pinned scalings
  Rng rng(501);
  for (int i = 0; i < 64; ++i) {
    Vec3 x = rng.unit3();
    Vec3 p = reject(rng.unit3(), x);
    if (norm(p) < 1e-6) continue;
    double base = g(x, p);
    require(base > 0, "LiftBundle: g must be positive");
    for (double s : {0.5, 2.0, 10.0})
      require(std::abs(g(x, s * p) - base) <= 1e-10 * std::max(1.0, base),
              "LiftBundle: g is not homogeneous of degree zero");
  }
  auto f = [g](const Vec3& x, const Vec3& v) {
    // l0 is the identity on ambient representatives of the round metric
    return 1.0 / g(x, v);
  };
  return {std::move(h), std::move(g), std::move(f)};
}

}  // namespace

LiftBundle make_lift_bundle(const HFunction& h) {
  GFunction g = h_to_g(h);  // validates positivity and antipodal symmetry
  return assemble_bundle(h, std::move(g));
}

LiftBundle make_lift_bundle(const fin::MetricPtr& metric) {
  GFunction g = g_from_metric(metric);
  HFunction h = g_to_h(g);
  return assemble_bundle(std::move(h), std::move(g));
}

RoundTripReport round_trip_check(const HFunction& h, int n_samples,
                                 std::uint64_t seed) {
  RoundTripReport rep;
  GFunction g = h_to_g(h);
  HFunction h2 = g_to_h(g);
  GFunction g2 = h_to_g(h2);
  Rng rng(seed);
  for (int i = 0; i < n_samples; ++i) {
    C2 w = rng.unit_c2();
    geom::SU2Element a{w.w1, w.w2};
    rep.h_dev = std::max(rep.h_dev, std::abs(h2(a) - h(a)));
    Vec3 x = rng.unit3();
    Vec3 p = reject(rng.unit3(), normalized(x));
    if (norm(p) < 1e-6) continue;
    rep.g_dev = std::max(rep.g_dev, std::abs(g2(x, p) - g(x, p)));
  }
  return rep;
}

StarshapedReport starshaped_convexity_check(const GFunction& g, int n_base,
                                            int n_fibre, std::uint64_t seed) {
  StarshapedReport rep;
  rep.starshaped = true;
  rep.fibrewise_convex = true;
  rep.min_fibre_turn = 1e300;
  Rng rng(seed);
  for (int b = 0; b < n_base; ++b) {
    Vec3 x = rng.unit3();
    Vec3 e1 = normalized(reject(std::abs(x[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0}, x));
    Vec3 e2 = cross(x, e1);
    // unit co-sphere fibre curve c(psi) = d(psi) / (g |d|) and its turning
    std::vector<Vec3> c(n_fibre);
    for (int k = 0; k < n_fibre; ++k) {
      double psi = kTwoPi * k / n_fibre;
      Vec3 d = std::cos(psi) * e1 + std::sin(psi) * e2;
      double gv = g(x, d);
      if (!(gv > 0)) {
        rep.starshaped = false;
        rep.fibrewise_convex = false;
        return rep;
      }
      c[k] = (1.0 / gv) * d;
    }
    for (int k = 0; k < n_fibre; ++k) {
      const Vec3& a = c[k];
      const Vec3& m = c[(k + 1) % n_fibre];
      const Vec3& z = c[(k + 2) % n_fibre];
      double turn = dot(cross(m - a, z - m), x);
      rep.min_fibre_turn = std::min(rep.min_fibre_turn, turn);
      if (turn <= 0) rep.fibrewise_convex = false;
    }
  }
  return rep;
}

double lift_conjugacy_check(const fin::MetricPtr& metric, int n_samples,
                            std::uint64_t seed) {
  GFunction g = g_from_metric(metric);
  Rng rng(seed);
  double worst = 0;
  int kept = 0;
  while (kept < n_samples) {
    C2 w = rng.unit_c2();
    geom::SU2Element a{w.w1, w.w2};
    C2 xi = geom::tangent_project(a, rng.unit_c2());
    double nx = norm(xi);
    if (nx < 1e-3) continue;
    xi = (1.0 / nx) * xi;
    double l0 = geom::lambda0(a, xi);
    if (std::abs(l0) < 5e-2) continue;  // degenerate sample, resample

    // left side: Liouville form pulled back through r o l0 o G
    auto through = [&](double s) {
      geom::UnitTangentPair m = geom::gmap(geom::s3_geodesic(a, xi, s));
      double gv = g(m.x, m.v);
      return std::pair<Vec3, Vec3>{m.x, (1.0 / gv) * m.v};
    };
    auto value = [&](double h) {
      auto [xp, pp] = through(h);
      auto [xm, pm] = through(-h);
      Vec3 dx = (1.0 / (2.0 * h)) * (xp - xm);
      Vec3 p0 = through(0.0).second;
      // pinned co-orientation, matching the factor-2 test
      return -dot(p0, dx);
    };
    const double h = 1e-5;
    double lhs = (4.0 * value(0.5 * h) - value(h)) / 3.0;
    geom::UnitTangentPair m = geom::gmap(a);
    double rhs = 2.0 / g(m.x, m.v) * l0;  // h(A) lambda0(xi)
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1e-9, std::abs(rhs)));
    ++kept;
  }
  return worst;
}

HFunction h_from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("kind"),
          "h descriptor: object with a 'kind' key expected");
  std::string kind = j.at("kind").get<std::string>();
  auto check_keys = [&](std::initializer_list<std::string> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = false;
      for (const auto& k : allowed)
        if (it.key() == k) ok = true;
      require(ok, "h descriptor: unknown key '" + it.key() + "'");
    }
  };
  if (kind == "ellipsoid") {
    check_keys({"kind", "p", "q"});
    EllipsoidParams par{j.at("p").get<double>(), j.at("q").get<double>()};
    par.validate();
    return [par](const geom::SU2Element& a) { return ellipsoid_h(par, a); };
  }
  if (kind == "from-metric") {
    check_keys({"kind", "metric"});
    auto metric = fin::metric_from_json(j.at("metric"));
    return g_to_h(g_from_metric(metric));
  }
  if (kind == "table") {
    check_keys({"kind", "samples"});
    struct Entry {
      C2 w;
      double value;
    };
    auto samples = std::make_shared<std::vector<Entry>>();
    for (const auto& s : j.at("samples")) {
      auto wv = s.at("w");
      require(wv.is_array() && wv.size() == 4, "h table: w must be [4 reals]");
      samples->push_back({C2{Cx(wv[0].get<double>(), wv[1].get<double>()),
                             Cx(wv[2].get<double>(), wv[3].get<double>())},
                          s.at("value").get<double>()});
    }
    require(!samples->empty(), "h table: empty sample list");
    return [samples](const geom::SU2Element& a) {
      for (const auto& e : *samples) {
        if (norm(e.w - a.c2()) < 1e-9 ||
            norm(e.w - (-1.0 * a.c2())) < 1e-9)
          return e.value;
      }
      throw error("h table: point not in the sample table");
    };
  }
  throw error("h descriptor: unknown kind '" + kind + "'");
}

}  // namespace fgeo::lift
