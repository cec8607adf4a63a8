#include "fgeo/finsler.hpp"

#include <cmath>

#include "fgeo/geometry.hpp"
#include "fgeo/numerics/rootfind.hpp"

namespace fgeo::fin {
namespace {

Vec3 any_orthonormal(const Vec3& n) {
  Vec3 trial = std::abs(n[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  return normalized(reject(trial, n));
}

// ---- families ---------------------------------------------------------------

class RoundMetric : public Metric {
 public:
  std::string name() const override { return "round"; }
  nlohmann::json descriptor() const override {
    return {{"family", "round"}};
  }

  double costar(const Vec3& x, const Vec3& p) const override {
    return norm(tangent_project(x, p));
  }
  Vec3 costar_grad(const Vec3& x, const Vec3& p) const override {
    return normalized(tangent_project(x, p));
  }
  std::optional<Vec3> randers_drift(const Vec3&) const override {
    return Vec3{0, 0, 0};
  }

  double surface_residual(const Vec3& x) const override {
    return std::abs(dot(x, x) - 1.0);
  }
  Vec3 surface_project(const Vec3& x) const override { return normalized(x); }
  Vec3 surface_normal(const Vec3& x) const override { return normalized(x); }

  void cogeodesic_field(const State& s, State& ds) const override {
    Vec3 x = state_x(s), p = state_p(s);
    double nx = norm(x), np = norm(p);
    Vec3 dx = (nx / np) * p;
    Vec3 dp = (-np / nx) * x;
    ds = make_state(dx, dp);
  }

  double gauss_curvature(const Vec3&) const override { return 1.0; }
  std::optional<std::pair<double, double>> curvature_range() const override {
    return std::make_pair(1.0, 1.0);
  }
  bool claims_constant_curvature_one() const override { return true; }
  bool reversible_by_construction() const override { return true; }
  bool rotationally_symmetric() const override { return true; }
  Vec3 symmetry_axis() const override { return {1, 0, 0}; }

  Vec3 chart_point(double r, double phi) const override {
    return geom::polar_to_ambient({r, phi});
  }
  Vec3 chart_dr(double r, double phi) const override {
    return geom::polar_dr({r, phi});
  }
  Vec3 chart_dphi(double r, double phi) const override {
    return geom::polar_dphi({r, phi});
  }
  double chart_r(const Vec3& x) const override {
    return std::acos(std::clamp(x[0] / norm(x), -1.0, 1.0));
  }
  double chart_phi(const Vec3& x) const override {
    double phi = std::atan2(x[2], x[1]);
    return phi < 0 ? phi + kTwoPi : phi;
  }
  double equator_r() const override { return kPi / 2; }
};

class KatokMetric : public RoundMetric {
 public:
  explicit KatokMetric(double eps) : eps_(eps) {
    require(std::abs(eps) < 1.0, "katok: |epsilon| must be < 1");
    require(std::abs(eps) <= 0.95,
            "katok: |epsilon| > 0.95 refused (fibre convexity margin)");
  }

  std::string name() const override { return "katok"; }
  nlohmann::json descriptor() const override {
    return {{"family", "katok"}, {"epsilon", eps_}};
  }

  double costar(const Vec3& x, const Vec3& p) const override {
    Vec3 axis{1, 0, 0};
    return RoundMetric::costar(x, p) + eps_ * dot(p, cross(axis, x));
  }
  Vec3 costar_grad(const Vec3& x, const Vec3& p) const override {
    Vec3 axis{1, 0, 0};
    return RoundMetric::costar_grad(x, p) + eps_ * cross(axis, x);
  }
  std::optional<Vec3> randers_drift(const Vec3& x) const override {
    return eps_ * cross(Vec3{1, 0, 0}, x);
  }

  void cogeodesic_field(const State& s, State& ds) const override {
    RoundMetric::cogeodesic_field(s, ds);
    Vec3 x = state_x(s), p = state_p(s);
    Vec3 axis{1, 0, 0};
    Vec3 rx = cross(axis, x), rp = cross(axis, p);
    ds[0] += eps_ * rx[0];
    ds[1] += eps_ * rx[1];
    ds[2] += eps_ * rx[2];
    ds[3] += eps_ * rp[0];
    ds[4] += eps_ * rp[1];
    ds[5] += eps_ * rp[2];
  }

  bool reversible_by_construction() const override { return eps_ == 0.0; }
  double epsilon() const { return eps_; }

 private:
  double eps_;
};

class RevolutionEllipsoid : public Metric {
 public:
  explicit RevolutionEllipsoid(double a) : a_(a) {
    require(a > 0, "revolution: a must be positive");
  }

  std::string name() const override { return "revolution"; }
  nlohmann::json descriptor() const override {
    return {{"family", "revolution"}, {"a", a_}};
  }

  double costar(const Vec3& x, const Vec3& p) const override {
    return norm(tangent_project(x, p));
  }
  Vec3 costar_grad(const Vec3& x, const Vec3& p) const override {
    return normalized(tangent_project(x, p));
  }
  std::optional<Vec3> randers_drift(const Vec3&) const override {
    return Vec3{0, 0, 0};
  }

  double surface_residual(const Vec3& x) const override {
    return std::abs((x[0] * x[0] + x[1] * x[1]) / (a_ * a_) + x[2] * x[2] - 1.0);
  }
  Vec3 surface_project(const Vec3& x) const override {
    // radial rescale onto the ellipsoid
    double q = (x[0] * x[0] + x[1] * x[1]) / (a_ * a_) + x[2] * x[2];
    require(q > 0, "revolution: cannot project the origin");
    return (1.0 / std::sqrt(q)) * x;
  }
  Vec3 surface_normal(const Vec3& x) const override {
    return normalized(Vec3{2 * x[0] / (a_ * a_), 2 * x[1] / (a_ * a_), 2 * x[2]});
  }

  void cogeodesic_field(const State& s, State& ds) const override {
    Vec3 x = state_x(s), v = state_p(s);
    double nv = norm(v);
    Vec3 grad{2 * x[0] / (a_ * a_), 2 * x[1] / (a_ * a_), 2 * x[2]};
    double hvv = 2 * (v[0] * v[0] + v[1] * v[1]) / (a_ * a_) + 2 * v[2] * v[2];
    double lam = hvv / dot(grad, grad);
    Vec3 dx = (1.0 / nv) * v;
    Vec3 dv = (-lam / nv) * grad;
    ds = make_state(dx, dv);
  }

  double gauss_curvature(const Vec3& x) const override {
    double z2 = x[2] * x[2];
    double d = 1.0 + (a_ * a_ - 1.0) * z2;
    return 1.0 / (d * d);
  }
  std::optional<std::pair<double, double>> curvature_range() const override {
    double kp = 1.0 / (a_ * a_ * a_ * a_);
    return std::make_pair(std::min(1.0, kp), std::max(1.0, kp));
  }
  bool claims_constant_curvature_one() const override { return a_ == 1.0; }
  bool reversible_by_construction() const override { return true; }
  bool rotationally_symmetric() const override { return true; }
  Vec3 symmetry_axis() const override { return {0, 0, 1}; }

  Vec3 chart_point(double r, double phi) const override {
    return {a_ * std::sin(r) * std::cos(phi), a_ * std::sin(r) * std::sin(phi),
            std::cos(r)};
  }
  Vec3 chart_dr(double r, double phi) const override {
    return {a_ * std::cos(r) * std::cos(phi), a_ * std::cos(r) * std::sin(phi),
            -std::sin(r)};
  }
  Vec3 chart_dphi(double r, double phi) const override {
    return {-a_ * std::sin(r) * std::sin(phi), a_ * std::sin(r) * std::cos(phi),
            0.0};
  }
  double chart_r(const Vec3& x) const override {
    return std::acos(std::clamp(x[2], -1.0, 1.0));
  }
  double chart_phi(const Vec3& x) const override {
    double phi = std::atan2(x[1], x[0]);
    return phi < 0 ? phi + kTwoPi : phi;
  }
  double equator_r() const override { return kPi / 2; }
  double a() const { return a_; }

 private:
  double a_;
};

class KillingPerturbed : public Metric {
 public:
  KillingPerturbed(MetricPtr base, double eps, Vec3 axis, double scale)
      : base_(std::move(base)), eps_(eps), axis_(normalized(axis)), scale_(scale) {
    // fibrewise positivity on a sample grid of unit covectors
    Rng rng(101);
    for (int i = 0; i < 512; ++i) {
      Vec3 x = base_->surface_project(rng.unit3());
      Vec3 p = base_->tangent_project(x, rng.unit3());
      if (norm(p) < 1e-6) continue;
      p = normalized(p);
      require(costar(x, p) > 0,
              "killing_perturbation: positivity violated on the unit ball");
    }
  }

  std::string name() const override { return "killing-perturbed"; }
  nlohmann::json descriptor() const override {
    return {{"family", "killing"},
            {"base", base_->descriptor()},
            {"epsilon", eps_},
            {"axis", {axis_[0], axis_[1], axis_[2]}},
            {"scale", scale_}};
  }

  double costar(const Vec3& x, const Vec3& p) const override {
    return base_->costar(x, p) + eps_ * scale_ * dot(p, cross(axis_, x));
  }
  Vec3 costar_grad(const Vec3& x, const Vec3& p) const override {
    return base_->costar_grad(x, p) + (eps_ * scale_) * cross(axis_, x);
  }
  std::optional<Vec3> randers_drift(const Vec3& x) const override {
    auto base = base_->randers_drift(x);
    if (!base) return std::nullopt;
    return *base + (eps_ * scale_) * cross(axis_, x);
  }

  double surface_residual(const Vec3& x) const override {
    return base_->surface_residual(x);
  }
  Vec3 surface_project(const Vec3& x) const override {
    return base_->surface_project(x);
  }
  Vec3 surface_normal(const Vec3& x) const override {
    return base_->surface_normal(x);
  }

  void cogeodesic_field(const State& s, State& ds) const override {
    base_->cogeodesic_field(s, ds);
    Vec3 x = state_x(s), p = state_p(s);
    Vec3 rx = cross(axis_, x), rp = cross(axis_, p);
    double c = eps_ * scale_;
    for (int i = 0; i < 3; ++i) {
      ds[i] += c * rx[i];
      ds[3 + i] += c * rp[i];
    }
  }

  double gauss_curvature(const Vec3& x) const override {
    require(claims_constant_curvature_one(),
            "killing-perturbed: curvature provider only available over a K=1 base");
    return base_->gauss_curvature(x);
  }
  std::optional<std::pair<double, double>> curvature_range() const override {
    if (claims_constant_curvature_one()) return std::make_pair(1.0, 1.0);
    return std::nullopt;
  }
  bool claims_constant_curvature_one() const override {
    return base_->claims_constant_curvature_one();
  }
  bool reversible_by_construction() const override {
    return eps_ == 0.0 && base_->reversible_by_construction();
  }
  bool rotationally_symmetric() const override {
    if (!base_->rotationally_symmetric()) return false;
    return std::abs(std::abs(dot(axis_, base_->symmetry_axis())) - 1.0) < 1e-12;
  }
  Vec3 symmetry_axis() const override { return axis_; }

  Vec3 chart_point(double r, double phi) const override {
    return base_->chart_point(r, phi);
  }
  Vec3 chart_dr(double r, double phi) const override {
    return base_->chart_dr(r, phi);
  }
  Vec3 chart_dphi(double r, double phi) const override {
    return base_->chart_dphi(r, phi);
  }
  double chart_r(const Vec3& x) const override { return base_->chart_r(x); }
  double chart_phi(const Vec3& x) const override { return base_->chart_phi(x); }
  double equator_r() const override { return base_->equator_r(); }

 private:
  MetricPtr base_;
  double eps_;
  Vec3 axis_;
  double scale_;
};

class CustomSphereMetric : public RoundMetric {
 public:
  CustomSphereMetric(std::string name,
                     std::function<double(const Vec3&, const Vec3&)> costar)
      : name_(std::move(name)), costar_(std::move(costar)) {}

  std::string name() const override { return name_; }
  nlohmann::json descriptor() const override {
    return {{"family", "custom"}, {"name", name_}};
  }
  double costar(const Vec3& x, const Vec3& p) const override {
    return costar_(x, p);
  }
  Vec3 costar_grad(const Vec3& x, const Vec3& p) const override {
    return Metric::costar_grad(x, p);  // finite-difference fallback
  }
  std::optional<Vec3> randers_drift(const Vec3&) const override {
    return std::nullopt;
  }
  void cogeodesic_field(const State&, State&) const override {
    throw error("custom metric: co-geodesic flow not available");
  }
  double gauss_curvature(const Vec3&) const override {
    throw error("custom metric: no curvature provider");
  }
  std::optional<std::pair<double, double>> curvature_range() const override {
    return std::nullopt;
  }
  bool claims_constant_curvature_one() const override { return false; }
  bool reversible_by_construction() const override { return false; }
  bool rotationally_symmetric() const override { return false; }

 private:
  std::string name_;
  std::function<double(const Vec3&, const Vec3&)> costar_;
};

}  // namespace

Vec3 Metric::costar_grad(const Vec3& x, const Vec3& p) const {
  // central differences in the fibre plane, one Richardson step
  Vec3 n = surface_normal(x);
  Vec3 e1 = any_orthonormal(n);
  Vec3 e2 = cross(n, e1);
  auto along = [&](const Vec3& dir) {
    return num::deriv_central(
        [&](double s) { return costar(x, p + s * dir); }, 0.0, 1e-6);
  };
  double g1 = along(e1), g2 = along(e2);
  return g1 * e1 + g2 * e2;
}

ChartState Metric::to_chart(const State& s) const {
  Vec3 x = state_x(s), p = state_p(s);
  double r = chart_r(x), phi = chart_phi(x);
  Vec3 dr = chart_dr(r, phi), dphi = chart_dphi(r, phi);
  return {r, phi, dot(p, dr), dot(p, dphi)};
}

State Metric::from_chart(const ChartState& c) const {
  Vec3 x = chart_point(c.r, c.phi);
  Vec3 dr = chart_dr(c.r, c.phi), dphi = chart_dphi(c.r, c.phi);
  Vec3 p = (c.p_r / dot(dr, dr)) * dr + (c.p_phi / dot(dphi, dphi)) * dphi;
  return make_state(x, p);
}

MetricPtr make_round() { return std::make_shared<RoundMetric>(); }
MetricPtr make_katok(double epsilon) {
  return std::make_shared<KatokMetric>(epsilon);
}
MetricPtr make_revolution_ellipsoid(double a) {
  return std::make_shared<RevolutionEllipsoid>(a);
}
MetricPtr make_killing_perturbed(MetricPtr base, double epsilon,
                                 const Vec3& axis, double scale) {
  return std::make_shared<KillingPerturbed>(std::move(base), epsilon, axis,
                                            scale);
}
MetricPtr make_custom_sphere_cometric(
    std::string name, std::function<double(const Vec3&, const Vec3&)> costar) {
  return std::make_shared<CustomSphereMetric>(std::move(name),
                                              std::move(costar));
}

MetricPtr metric_from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("family"),
          "metric config: object with a 'family' key expected");
  std::string family = j.at("family").get<std::string>();
  auto check_keys = [&](std::initializer_list<std::string> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = false;
      for (const auto& k : allowed)
        if (it.key() == k) ok = true;
      require(ok, "metric config: unknown key '" + it.key() + "'");
    }
  };
  if (family == "round") {
    check_keys({"family"});
    return make_round();
  }
  if (family == "katok") {
    check_keys({"family", "epsilon"});
    require(j.contains("epsilon"), "metric config: katok requires 'epsilon'");
    return make_katok(j.at("epsilon").get<double>());
  }
  if (family == "revolution") {
    check_keys({"family", "a"});
    require(j.contains("a"), "metric config: revolution requires 'a'");
    return make_revolution_ellipsoid(j.at("a").get<double>());
  }
  if (family == "killing") {
    check_keys({"family", "base", "epsilon", "axis", "scale"});
    require(j.contains("base") && j.contains("epsilon"),
            "metric config: killing requires 'base' and 'epsilon'");
    Vec3 axis{1, 0, 0};
    if (j.contains("axis")) {
      auto a = j.at("axis");
      require(a.is_array() && a.size() == 3, "metric config: axis must be [x,y,z]");
      axis = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
    }
    double scale = j.value("scale", 1.0);
    return make_killing_perturbed(metric_from_json(j.at("base")),
                                  j.at("epsilon").get<double>(), axis, scale);
  }
  throw error("metric config: unknown family '" + family + "'");
}

double katok_cometric(double r, double phi, double p_r, double p_phi,
                      double epsilon) {
  (void)phi;
  require(std::abs(epsilon) < 1.0, "katok_cometric: |epsilon| must be < 1");
  require(r > 1e-9 && r < kPi - 1e-9, "katok_cometric: r at chart pole");
  double s = std::sin(r);
  return std::sqrt(p_r * p_r + p_phi * p_phi / (s * s)) + epsilon * p_phi;
}

// ---- Legendre ---------------------------------------------------------------

namespace {

struct FibreFrame {
  Vec3 e1, e2;
};

FibreFrame fibre_frame(const Metric& m, const Vec3& x) {
  Vec3 n = m.surface_normal(x);
  Vec3 e1 = any_orthonormal(n);
  return {e1, cross(n, e1)};
}

// Support point of the unit co-sphere fibre in the direction that maximizes
// p(v); returns (max value, maximizing angle).
std::pair<double, double> support_max(const Metric& m, const Vec3& x,
                                      const Vec3& v) {
  FibreFrame f = fibre_frame(m, x);
  auto value = [&](double psi) {
    Vec3 d = std::cos(psi) * f.e1 + std::sin(psi) * f.e2;
    double fs = m.costar(x, d);
    require(fs > 0, "legendre: co-metric not positive on the fibre");
    return dot(d, v) / fs;
  };
  int n = 128;
  double best = -1e300, best_psi = 0;
  for (int i = 0; i < n; ++i) {
    double psi = kTwoPi * i / n;
    double g = value(psi);
    if (g > best) {
      best = g;
      best_psi = psi;
    }
  }
  double lo = best_psi - kTwoPi / n, hi = best_psi + kTwoPi / n;
  double psi = num::brent_minimize([&](double s) { return -value(s); }, lo, hi,
                                   1e-13);
  return {value(psi), psi};
}

}  // namespace

namespace {

// Closed-form support data for Randers co-metrics F*(p) = |p| + p(W):
// the maximizer of p(v) over {F* = 1} is parallel to d = v - F(v) W with
// F(v) = |d| solving |v - F W| = F.
struct RandersSupport {
  double value;  // F(x, v)
  Vec3 p;        // maximizing unit covector scaled to l_F(x, v)
};

RandersSupport randers_support(const Vec3& v, const Vec3& w) {
  double w2 = dot(w, w);
  require(w2 < 1.0, "legendre: Randers drift exceeds the convexity bound");
  double vw = dot(v, w);
  double disc = vw * vw + (1.0 - w2) * dot(v, v);
  double f = (-vw + std::sqrt(disc)) / (1.0 - w2);
  Vec3 d = v - f * w;
  double c = 1.0 / (norm(d) + dot(d, w));
  Vec3 unit_p = c * d;
  return {f, f * unit_p};
}

}  // namespace

double finsler_norm(const Metric& m, const Vec3& x, const Vec3& v) {
  require(norm(v) > 0, "finsler_norm: v must be nonzero");
  if (auto w = m.randers_drift(x)) {
    return randers_support(m.tangent_project(x, v), *w).value;
  }
  return support_max(m, x, v).first;
}

Vec3 legendre(const Metric& m, const Vec3& x, const Vec3& v) {
  require(norm(v) > 0, "legendre: v must be nonzero");
  if (auto w = m.randers_drift(x)) {
    return randers_support(m.tangent_project(x, v), *w).p;
  }
  auto [fv, psi] = support_max(m, x, v);
  FibreFrame f = fibre_frame(m, x);
  Vec3 d = std::cos(psi) * f.e1 + std::sin(psi) * f.e2;
  Vec3 unit_p = (1.0 / m.costar(x, d)) * d;
  return fv * unit_p;
}

Vec3 legendre_inverse(const Metric& m, const Vec3& x, const Vec3& p) {
  require(norm(p) > 0, "legendre_inverse: p must be nonzero");
  return m.costar(x, p) * m.costar_grad(x, p);
}

// ---- reversibility -----------------------------------------------------------

namespace {

double reversibility_at(const Metric& m, const Vec3& x, double psi) {
  FibreFrame f = fibre_frame(m, x);
  Vec3 d = std::cos(psi) * f.e1 + std::sin(psi) * f.e2;
  // F(x, -u)/F(x, u) for the unit Finsler vector u along d
  return finsler_norm(m, x, Vec3{-d[0], -d[1], -d[2]}) / finsler_norm(m, x, d);
}

}  // namespace

double reversibility(const Metric& m, int grid_latitudes, int grid_directions) {
  require(grid_latitudes >= 4 && grid_directions >= 8,
          "reversibility: grid too small");
  const double margin = 0.05;
  double best = 1.0, best_r = kPi / 2, best_psi = 0;
  std::vector<Vec3> points;
  std::vector<double> lats;
  if (m.rotationally_symmetric()) {
    for (int i = 0; i < grid_latitudes; ++i) {
      double r = margin + (kPi - 2 * margin) * i / (grid_latitudes - 1);
      lats.push_back(r);
      points.push_back(m.chart_point(r, 0.0));
    }
  } else {
    Rng rng(404);
    for (int i = 0; i < grid_latitudes * grid_latitudes; ++i) {
      lats.push_back(0);
      points.push_back(m.surface_project(rng.unit3()));
    }
  }
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int k = 0; k < grid_directions; ++k) {
      double psi = kTwoPi * k / grid_directions;
      double val = reversibility_at(m, points[i], psi);
      if (val > best) {
        best = val;
        best_i = i;
        best_psi = psi;
      }
    }
  }
  // local refinement: alternate 1-d polish in direction angle and latitude
  if (m.rotationally_symmetric()) {
    best_r = lats[best_i];
    double dpsi = kTwoPi / grid_directions, dr = (kPi - 2 * margin) / grid_latitudes;
    for (int round = 0; round < 3; ++round) {
      double psi = num::brent_minimize(
          [&](double s) {
            return -reversibility_at(m, m.chart_point(best_r, 0.0), s);
          },
          best_psi - dpsi, best_psi + dpsi, 1e-12);
      best_psi = psi;
      double r = num::brent_minimize(
          [&](double rr) {
            double rc = std::clamp(rr, margin, kPi - margin);
            return -reversibility_at(m, m.chart_point(rc, 0.0), best_psi);
          },
          best_r - dr, best_r + dr, 1e-12);
      best_r = std::clamp(r, margin, kPi - margin);
      dpsi *= 0.25;
      dr *= 0.25;
    }
    best = std::max(best, reversibility_at(m, m.chart_point(best_r, 0.0), best_psi));
  } else {
    double dpsi = kTwoPi / grid_directions;
    double psi = num::brent_minimize(
        [&](double s) { return -reversibility_at(m, points[best_i], s); },
        best_psi - dpsi, best_psi + dpsi, 1e-12);
    best = std::max(best, reversibility_at(m, points[best_i], psi));
  }
  return best;
}

bool is_resonant_ratio(double value) {
  for (int q = 1; q <= 64; ++q) {
    double p = std::round(value * q);
    if (std::abs(value - p / q) < 1e-9) return true;
  }
  return false;
}

}  // namespace fgeo::fin
