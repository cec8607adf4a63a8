#include "fgeo/geodesics.hpp"

#include <algorithm>
#include <cmath>

#include "fgeo/numerics/defaults.hpp"
#include "fgeo/numerics/rootfind.hpp"

namespace fgeo::flow {
namespace {

using fin::State;

double dist6(const State& a, const State& b) {
  double s = 0;
  for (int i = 0; i < 6; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

State to_state(const std::vector<double>& y) {
  return {y[0], y[1], y[2], y[3], y[4], y[5]};
}
std::vector<double> to_vec(const State& s) {
  return {s[0], s[1], s[2], s[3], s[4], s[5]};
}

num::VectorField field_of(const fin::Metric& m) {
  return [&m](double, const std::vector<double>& y, std::vector<double>& dy) {
    State s = to_state(y), ds;
    m.cogeodesic_field(s, ds);
    dy.assign(ds.begin(), ds.end());
  };
}

// Unit co-sphere covector at x in the fibre direction theta, measured in the
// orthonormal frame (chart_dr-hat, chart_dphi-hat).
State section_state(const fin::Metric& m, double r, double theta) {
  Vec3 x = m.chart_point(r, 0.0);
  Vec3 u1 = normalized(m.chart_dr(r, 0.0));
  Vec3 u2 = normalized(m.chart_dphi(r, 0.0));
  Vec3 d = std::cos(theta) * u1 + std::sin(theta) * u2;
  double fs = m.costar(x, d);
  require(fs > 0, "section_state: degenerate co-metric direction");
  return fin::make_state(x, (1.0 / fs) * d);
}

double clairaut(const fin::Metric& m, const State& s) {
  Vec3 axis = m.symmetry_axis();
  return dot(fin::state_p(s), cross(axis, fin::state_x(s)));
}

}  // namespace

num::IntegratorConfig default_flow_config() {
  num::IntegratorConfig cfg;
  cfg.abs_tol = num::defaults::ode_abs_tol;
  cfg.rel_tol = num::defaults::ode_rel_tol;
  return cfg;
}

num::IntegratorConfig polish_flow_config() {
  num::IntegratorConfig cfg;
  cfg.abs_tol = 1e-12;
  cfg.rel_tol = 1e-12;
  return cfg;
}

num::Trajectory cogeodesic_flow(const fin::Metric& m, const State& s0, double T,
                                const num::IntegratorConfig& cfg) {
  require(T > 0, "cogeodesic_flow: T must be positive");
  double f0 = m.costar(fin::state_x(s0), fin::state_p(s0));
  require(std::abs(f0 - 1.0) <= 1e-9,
          "cogeodesic_flow: initial state must lie on the unit co-sphere");
  return num::integrate_ode(field_of(m), to_vec(s0), 0.0, T, cfg);
}

ConservationReport check_conservation(const fin::Metric& m,
                                      const num::Trajectory& traj,
                                      int n_samples) {
  ConservationReport rep;
  State s0 = to_state(traj.at(traj.t0()));
  double f0 = m.costar(fin::state_x(s0), fin::state_p(s0));
  double c0 = m.rotationally_symmetric() ? clairaut(m, s0) : 0.0;
  for (int i = 0; i <= n_samples; ++i) {
    double t = traj.t0() + (traj.t1() - traj.t0()) * i / n_samples;
    State s = to_state(traj.at(t));
    Vec3 x = fin::state_x(s), p = fin::state_p(s);
    rep.fstar_drift = std::max(rep.fstar_drift, std::abs(m.costar(x, p) - f0));
    rep.surface_drift = std::max(rep.surface_drift, m.surface_residual(x));
    if (m.rotationally_symmetric())
      rep.clairaut_drift =
          std::max(rep.clairaut_drift, std::abs(clairaut(m, s) - c0));
  }
  return rep;
}

State GeodesicOrbit::state_at(double t) const {
  double tm = std::fmod(t, period);
  if (tm < 0) tm += period;
  return to_state(trajectory.at(tm));
}

double GeodesicOrbit::curvature_at(double t) const {
  return metric->gauss_curvature(fin::state_x(state_at(t)));
}

GeodesicOrbit GeodesicOrbit::iterate(int m) const {
  require(m >= 1, "GeodesicOrbit::iterate: m must be >= 1");
  GeodesicOrbit out = *this;
  out.iterates = m;
  return out;
}

namespace {

void attach_profile(GeodesicOrbit& orbit, int n_samples = 512) {
  orbit.curvature_profile.resize(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    double t = orbit.period * i / n_samples;
    orbit.curvature_profile[i] = orbit.curvature_at(t);
  }
}

GeodesicOrbit finalize_orbit(fin::MetricPtr m, const State& s0, double T,
                             double residual) {
  GeodesicOrbit orbit;
  orbit.metric = std::move(m);
  orbit.state0 = s0;
  orbit.period = T;
  orbit.closure_residual = residual;
  orbit.trajectory = cogeodesic_flow(*orbit.metric, s0, T, polish_flow_config());
  attach_profile(orbit);
  return orbit;
}

// Gauss-Newton over (theta, T) for the return-map residual
// flow_T(section(theta)) - section(theta). Returns residual norm.
double polish_closed(const fin::Metric& m, double r_section, double& theta,
                     double& T, int max_iter = 30) {
  auto cfg = polish_flow_config();
  auto residual = [&](double th, double tt) {
    State s0 = section_state(m, r_section, th);
    auto traj = num::integrate_ode(field_of(m), to_vec(s0), 0.0, tt, cfg);
    State s1 = to_state(traj.final_state());
    std::array<double, 6> r;
    for (int i = 0; i < 6; ++i) r[i] = s1[i] - s0[i];
    return r;
  };
  double rn = 0;
  for (int it = 0; it < max_iter; ++it) {
    auto r0 = residual(theta, T);
    rn = 0;
    for (double v : r0) rn += v * v;
    rn = std::sqrt(rn);
    if (rn < 1e-12) break;
    const double dth = 1e-7, dT = 1e-7;
    auto rth = residual(theta + dth, T);
    auto rT = residual(theta, T + dT);
    double j11 = 0, j12 = 0, j22 = 0, g1 = 0, g2 = 0;
    for (int i = 0; i < 6; ++i) {
      double a = (rth[i] - r0[i]) / dth;
      double b = (rT[i] - r0[i]) / dT;
      j11 += a * a;
      j12 += a * b;
      j22 += b * b;
      g1 += a * r0[i];
      g2 += b * r0[i];
    }
    double det = j11 * j22 - j12 * j12;
    if (std::abs(det) < 1e-18) break;
    double step_th = (j22 * g1 - j12 * g2) / det;
    double step_T = (j11 * g2 - j12 * g1) / det;
    theta -= step_th;
    T -= step_T;
    if (T <= 0.05) return 1e9;
    if (std::abs(step_th) < 1e-14 && std::abs(step_T) < 1e-14) break;
  }
  auto rfin = residual(theta, T);
  double out = 0;
  for (double v : rfin) out += v * v;
  return std::sqrt(out);
}

}  // namespace

GeodesicOrbit equator_orbit(fin::MetricPtr m, int direction, int iterates) {
  require(direction == 1 || direction == -1, "equator_orbit: direction is +-1");
  require(m->rotationally_symmetric(),
          "equator_orbit: requires a rotationally symmetric family");
  const double r_eq = m->equator_r();
  double theta = direction > 0 ? kPi / 2 : -kPi / 2;
  State s0 = section_state(*m, r_eq, theta);
  // angular rate of phi along the flow fixes the period guess
  State ds;
  m->cogeodesic_field(s0, ds);
  Vec3 dphi = m->chart_dphi(r_eq, 0.0);
  double phidot = dot(Vec3{ds[0], ds[1], ds[2]}, dphi) / dot(dphi, dphi);
  require(std::abs(phidot) > 1e-12, "equator_orbit: no angular motion");
  double T = kTwoPi / std::abs(phidot);
  double res = polish_closed(*m, r_eq, theta, T);
  require(res < num::defaults::orbit_closure_residual,
          "equator_orbit: closure residual above tolerance");
  GeodesicOrbit orbit =
      finalize_orbit(m, section_state(*m, r_eq, theta), T, res);
  orbit.iterates = iterates;
  return orbit;
}

std::vector<GeodesicOrbit> find_closed_geodesics(const fin::MetricPtr& m,
                                                 double length_cap,
                                                 int grid_density,
                                                 SearchLog* log) {
  SearchOptions opt;
  opt.length_cap = length_cap;
  opt.directions = grid_density;
  return find_closed_geodesics(m, opt, log);
}

std::vector<GeodesicOrbit> find_closed_geodesics(const fin::MetricPtr& m,
                                                 const SearchOptions& opt,
                                                 SearchLog* log) {
  SearchLog local;
  if (!log) log = &local;
  *log = SearchLog{};
  require(opt.length_cap > 0, "find_closed_geodesics: length cap must be > 0");
  require(m->rotationally_symmetric(),
          "find_closed_geodesics: only rotationally symmetric families carry "
          "a flow here; the equator section is the search surface");
  const double r_eq = m->equator_r();
  const auto cfg = default_flow_config();

  struct Candidate {
    double theta, T;
  };
  std::vector<std::vector<Candidate>> found(opt.directions);
  parallel_for(opt.directions, [&](std::size_t i) {
    double theta = kTwoPi * static_cast<double>(i) / opt.directions;
    State s0 = section_state(*m, r_eq, theta);
    auto traj =
        num::integrate_ode(field_of(*m), to_vec(s0), 0.0, opt.length_cap, cfg);
    const double dt = 0.01;
    double prev2 = 1e9, prev = 1e9;
    for (double t = 0.25; t <= opt.length_cap + 1e-12; t += dt) {
      double d = dist6(to_state(traj.at(std::min(t, opt.length_cap))), s0);
      if (prev < prev2 && prev < d && prev < opt.detect_threshold) {
        found[i].push_back({theta, t - dt});
      }
      prev2 = prev;
      prev = d;
    }
  });

  std::vector<GeodesicOrbit> orbits;
  auto is_duplicate = [&](double T, double pphi, double rmin, double rmax) {
    for (const auto& o : orbits) {
      if (std::abs(o.period - T) > 1e-5 * std::max(1.0, T)) continue;
      if (m->name() == "round") return true;  // full isometry group
      double opphi = clairaut(*m, o.state0);
      double cmp = m->reversible_by_construction()
                       ? std::abs(std::abs(opphi) - std::abs(pphi))
                       : std::abs(opphi - pphi);
      // latitude extents of the base curve
      double ormin = 1e9, ormax = -1e9;
      for (int k = 0; k < 128; ++k) {
        double r = m->chart_r(fin::state_x(o.state_at(o.period * k / 128.0)));
        ormin = std::min(ormin, r);
        ormax = std::max(ormax, r);
      }
      if (cmp < 1e-4 && std::abs(ormin - rmin) < 1e-3 &&
          std::abs(ormax - rmax) < 1e-3)
        return true;
    }
    return false;
  };

  for (const auto& cands : found) {
    for (const auto& c : cands) {
      ++log->candidates;
      double theta = c.theta, T = c.T;
      double res = polish_closed(*m, r_eq, theta, T);
      if (!(res < opt.accept_residual) || T > opt.length_cap + 1e-6) {
        ++log->dropped;
        continue;
      }
      // minimal period reduction
      State s0 = section_state(*m, r_eq, theta);
      for (int k = 12; k >= 2; --k) {
        if (T / k < 0.2) continue;
        auto sub = num::integrate_ode(field_of(*m), to_vec(s0), 0.0, T / k,
                                      polish_flow_config());
        if (dist6(to_state(sub.final_state()), s0) < 1e-7) {
          double Tk = T / k;
          double rk = polish_closed(*m, r_eq, theta, Tk);
          if (rk < opt.accept_residual) {
            T = Tk;
            res = rk;
            break;
          }
        }
      }
      s0 = section_state(*m, r_eq, theta);
      double pphi = clairaut(*m, s0);
      auto probe = finalize_orbit(m, s0, T, res);
      double rmin = 1e9, rmax = -1e9;
      for (int k = 0; k < 128; ++k) {
        double r = m->chart_r(fin::state_x(probe.state_at(T * k / 128.0)));
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
      }
      if (is_duplicate(T, pphi, rmin, rmax)) {
        ++log->duplicates;
        continue;
      }
      orbits.push_back(std::move(probe));
    }
  }
  std::sort(orbits.begin(), orbits.end(),
            [&](const GeodesicOrbit& a, const GeodesicOrbit& b) {
              if (a.period != b.period) return a.period < b.period;
              return clairaut(*m, a.state0) > clairaut(*m, b.state0);
            });
  return orbits;
}

namespace {

// Gauss-Newton over (theta, T) for the loop residual x(T; theta) - x(0) at a
// fixed base latitude; returns the final residual norm.
double polish_loop(const fin::Metric& m, double r0, double& th, double& tt,
                   double length_cap) {
  Vec3 x0 = m.chart_point(r0, 0.0);
  auto pos_residual = [&](double a, double b) {
    State q0 = section_state(m, r0, a);
    auto tr = num::integrate_ode(field_of(m), to_vec(q0), 0.0, b,
                                 polish_flow_config());
    Vec3 x = fin::state_x(to_state(tr.final_state()));
    return x - x0;
  };
  double rn = 1e9;
  for (int it = 0; it < 25; ++it) {
    Vec3 r0v = pos_residual(th, tt);
    rn = norm(r0v);
    if (rn < 1e-11) break;
    const double da = 1e-7, db = 1e-7;
    Vec3 ra = pos_residual(th + da, tt), rb = pos_residual(th, tt + db);
    double j11 = 0, j12 = 0, j22 = 0, g1 = 0, g2 = 0;
    for (int k = 0; k < 3; ++k) {
      double A = (ra[k] - r0v[k]) / da, B = (rb[k] - r0v[k]) / db;
      j11 += A * A;
      j12 += A * B;
      j22 += B * B;
      g1 += A * r0v[k];
      g2 += B * r0v[k];
    }
    double det = j11 * j22 - j12 * j12;
    if (std::abs(det) < 1e-18) break;
    th -= (j22 * g1 - j12 * g2) / det;
    tt -= (j11 * g2 - j12 * g1) / det;
    if (tt < 0.2 || tt > length_cap + 0.5) return 1e9;
  }
  return norm(pos_residual(th, tt));
}

}  // namespace

LoopSearchReport shortest_loop(const fin::MetricPtr& m, int grid_density,
                               double length_cap) {
  require(m->rotationally_symmetric(),
          "shortest_loop: only rotationally symmetric families carry a flow");
  LoopSearchReport rep;
  rep.grid_latitudes = grid_density | 1;  // odd count puts the equator on the grid
  rep.grid_directions = 2 * grid_density;
  const double margin = 0.12;
  const auto cfg = default_flow_config();

  struct Hit {
    double length, base_r, theta, residual;
    int base_index;
  };
  std::vector<std::vector<Hit>> hits(rep.grid_latitudes);

  parallel_for(rep.grid_latitudes, [&](std::size_t i) {
    double r0 = margin + (kPi - 2 * margin) * static_cast<double>(i) /
                             (rep.grid_latitudes - 1);
    Vec3 x0 = m->chart_point(r0, 0.0);
    for (int j = 0; j < rep.grid_directions; ++j) {
      double theta = kTwoPi * j / rep.grid_directions;
      State s0 = section_state(*m, r0, theta);
      auto traj =
          num::integrate_ode(field_of(*m), to_vec(s0), 0.0, length_cap, cfg);
      const double dt = 0.01;
      double prev2 = 1e9, prev = 1e9, tprev = 0;
      for (double t = 0.3; t <= length_cap + 1e-12; t += dt) {
        State s = to_state(traj.at(std::min(t, length_cap)));
        double d = norm(fin::state_x(s) - x0);
        if (prev < prev2 && prev < d && prev < 5e-2) {
          // polish (theta, t) so the base point is hit exactly
          double th = theta, tt = tprev;
          double rn = polish_loop(*m, r0, th, tt, length_cap);
          if (rn < 1e-9) {
            hits[i].push_back({tt, r0, th, rn, static_cast<int>(i)});
          }
        }
        prev2 = prev;
        tprev = t - dt;
        prev = d;
      }
    }
  });

  for (auto& hv : hits)
    for (auto& h : hv) {
      bool dup = false;
      for (const auto& c : rep.candidates)
        if (std::abs(c.length - h.length) < 1e-6 &&
            std::abs(c.base_r - h.base_r) < 1e-6)
          dup = true;
      if (!dup)
        rep.candidates.push_back(
            {h.length, h.base_r, h.theta, h.base_index, h.residual});
    }
  require(!rep.candidates.empty(), "shortest_loop: no loop found below the cap");
  std::sort(rep.candidates.begin(), rep.candidates.end(),
            [](const LoopCandidate& a, const LoopCandidate& b) {
              if (a.length != b.length) return a.length < b.length;
              return a.base_index < b.base_index;
            });
  rep.ell = rep.candidates.front().length;
  // the loop family varies smoothly with the base latitude; refine the
  // minimum off the grid
  {
    const LoopCandidate best = rep.candidates.front();
    double h = (kPi - 2 * margin) / (rep.grid_latitudes - 1);
    auto len_at = [&](double r) {
      double th = best.theta, tt = best.length;
      double rr = polish_loop(*m, std::clamp(r, 0.02, kPi - 0.02), th, tt,
                              length_cap);
      return rr < 1e-9 ? tt : best.length + 1.0;
    };
    double r_star = num::brent_minimize(len_at, best.base_r - h,
                                        best.base_r + h, 1e-10);
    double refined = len_at(r_star);
    rep.ell = std::min(rep.ell, refined);
  }
  if (m->claims_constant_curvature_one())
    require(rep.ell <= kTwoPi + 1e-6,
            "shortest_loop: K=1 family must have a loop of length <= 2 pi");
  return rep;
}

double focusing_spread(const fin::Metric& m, const Vec3& base, int n_directions) {
  require(n_directions >= 2, "focusing_spread: need at least 2 directions");
  Vec3 x0 = m.surface_project(base);
  Vec3 n = m.surface_normal(x0);
  Vec3 e1 = normalized(reject(std::abs(n[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0}, n));
  Vec3 e2 = cross(n, e1);
  std::vector<Vec3> ends(n_directions);
  parallel_for(n_directions, [&](std::size_t k) {
    double theta = kTwoPi * static_cast<double>(k) / n_directions;
    Vec3 d = std::cos(theta) * e1 + std::sin(theta) * e2;
    State s0 = fin::make_state(x0, (1.0 / m.costar(x0, d)) * d);
    auto traj = cogeodesic_flow(m, s0, kPi, polish_flow_config());
    ends[k] = fin::state_x(to_state(traj.final_state()));
  });
  double spread = 0;
  for (int i = 0; i < n_directions; ++i)
    for (int j = i + 1; j < n_directions; ++j)
      spread = std::max(spread, norm(ends[i] - ends[j]));
  return spread;
}

bool contractibility(const GeodesicOrbit& orbit) {
  require(orbit.closure_residual < num::defaults::orbit_closure_residual,
          "contractibility: orbit is not closed");
  // the parity rule needs a simple base curve; detect strand collisions
  const int n = 1024;
  std::vector<Vec3> xs(n);
  for (int i = 0; i < n; ++i)
    xs[i] = fin::state_x(orbit.state_at(orbit.period * i / n));
  const int guard = n / 16;
  for (int i = 0; i < n; ++i)
    for (int j = i + guard; j < n && (n - (j - i)) > guard; ++j) {
      if (norm(xs[i] - xs[j]) < 5e-3)
        throw error(
            "contractibility: base curve self-intersects; iterate count must "
            "be supplied manually");
    }
  return orbit.iterates % 2 == 0;
}

void write_trajectory_csv(std::ostream& os, const fin::Metric& m,
                          const num::Trajectory& traj, int n_samples) {
  os << "t,r,phi,p_r,p_phi,Fstar_residual\n";
  char buf[256];
  for (int i = 0; i <= n_samples; ++i) {
    double t = traj.t0() + (traj.t1() - traj.t0()) * i / n_samples;
    State s = to_state(traj.at(t));
    fin::ChartState c = m.to_chart(s);
    double res = std::abs(m.costar(fin::state_x(s), fin::state_p(s)) - 1.0);
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", t,
                  c.r, c.phi, c.p_r, c.p_phi, res);
    os << buf;
  }
}

}  // namespace fgeo::flow
