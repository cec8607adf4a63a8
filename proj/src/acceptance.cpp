#include "fgeo/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "fgeo/contactlift.hpp"
#include "fgeo/cylinder.hpp"
#include "fgeo/czindex.hpp"
#include "fgeo/geodesics.hpp"
#include "fgeo/report.hpp"

namespace fgeo::accept {
namespace {

class Scope {
 public:
  Scope(int number, std::string name, CriterionResult& out)
      : out_(out), start_(std::chrono::steady_clock::now()) {
    out_.number = number;
    out_.name = std::move(name);
    out_.pass = true;
  }
  ~Scope() {
    out_.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
  }
  void check(bool ok, const std::string& what) {
    if (!ok) {
      out_.pass = false;
      if (!failures_.empty()) failures_ += "; ";
      failures_ += what;
      out_.details = failures_.empty() ? out_.details : ("FAILED: " + failures_);
    }
  }
  void budget(double limit_seconds) {
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    check(elapsed < limit_seconds,
          "runtime " + report::format_number(elapsed) + "s over budget " +
              report::format_number(limit_seconds) + "s");
  }
  void note(const std::string& s) {
    if (!out_.details.empty()) out_.details += "  ";
    out_.details += s;
  }

 private:
  CriterionResult& out_;
  std::string failures_;
  std::chrono::steady_clock::time_point start_;
};

std::string num(double v) { return report::format_number(v); }

}  // namespace

CriterionResult ellipsoid_sharpness() {
  CriterionResult res;
  Scope scope(1, "ellipsoid sharpness: doubled equator has tau3=0, mu=1", res);
  try {
    auto metric = fin::make_revolution_ellipsoid(0.5);
    auto equator = flow::equator_orbit(metric, +1).iterate(2);
    scope.check(std::abs(equator.total_period() - kTwoPi) < 1e-8,
                "doubled equator period is not 2 pi");
    auto path = cz::jacobi_flow(equator, 512);
    auto spectrum = cz::cz_spectrum(path, 4, 1024);
    scope.note("tau3=" + num(spectrum.tau(3)) + " mu=" +
               std::to_string(spectrum.mu) +
               " marginal=" + (spectrum.mu_marginal ? "yes" : "no"));
    scope.check(std::abs(spectrum.tau(3)) <= 5e-3, "|tau3| above 5e-3");
    scope.check(spectrum.mu == 1, "mu != 1");
    scope.check(spectrum.mu_marginal, "marginal flag not set");
    scope.budget(30.0);
  } catch (const std::exception& e) {
    scope.check(false, e.what());
  }
  return res;
}

CriterionResult spectral_oracle() {
  CriterionResult res;
  Scope scope(2, "constant-curvature spectral oracle, O(N^-2), mu=1,3,5", res);
  try {
    const int expected_mu[3] = {1, 3, 5};
    for (int m = 1; m <= 3; ++m) {
      double T = m * kTwoPi;
      auto path = cz::constant_curvature_path(1.0, T, 256);
      int k_max = m + 2;
      std::vector<double> errs;
      int mu_at_finest = 0;
      for (int N : {256, 512, 1024}) {
        auto s = cz::cz_spectrum(path, k_max, N);
        double err = 0;
        for (const auto& e : s.entries)
          err = std::max(err, std::abs(e.tau - (kTwoPi * e.winding / T - 1.0)));
        errs.push_back(err);
        mu_at_finest = s.mu;
        // each winding has exactly two labels by construction; assert anyway
        scope.check(static_cast<int>(s.entries.size()) == 2 * (k_max + 2),
                    "winding multiplicity wrong at T=" + num(T));
      }
      scope.check(errs[2] < 1e-3, "finest-grid error above 1e-3 at T=" + num(T));
      double s1 = std::log2(errs[0] / errs[1]);
      double s2 = std::log2(errs[1] / errs[2]);
      scope.check(std::abs(s1 - 2.0) <= 0.2 && std::abs(s2 - 2.0) <= 0.2,
                  "convergence order not 2 +- 0.2 at T=" + num(T));
      scope.check(mu_at_finest == expected_mu[m - 1],
                  "mu mismatch at T=" + num(T));
      scope.note("T=" + num(T) + ": err1024=" + num(errs[2]) + " slopes=" +
                 num(s1) + "," + num(s2) + " mu=" + std::to_string(mu_at_finest));
    }
    scope.budget(60.0);
  } catch (const std::exception& e) {
    scope.check(false, e.what());
  }
  return res;
}

CriterionResult katok_ellipsoid_identity() {
  CriterionResult res;
  Scope scope(3, "katok <-> ellipsoid lifting identity to 1e-9", res);
  try {
    const double eps = 0.3;
    auto par = lift::katok_ellipsoid_params(eps);
    auto katok = fin::make_katok(eps);

    // forward: lift the metric, pull back through the inverse frame map,
    // compare with p + q + (p - q) p_phi on the unit round co-sphere
    auto h = lift::g_to_h(lift::g_from_metric(katok));
    auto g = lift::h_to_g(h);
    Rng rng(2024);
    double worst_fwd = 0;
    for (int i = 0; i < 1000; ++i) {
      double r = rng.uniform(0.1, kPi - 0.1);
      double phi = rng.uniform(0, kTwoPi);
      double psi = rng.uniform(0, kTwoPi);
      fin::ChartState c{r, phi, std::cos(psi), std::sin(psi) * std::sin(r)};
      fin::State s = katok->from_chart(c);
      double expected = par.p + par.q + (par.p - par.q) * c.p_phi;
      worst_fwd = std::max(
          worst_fwd, std::abs(g(fin::state_x(s), fin::state_p(s)) - expected));
    }
    scope.check(worst_fwd < 1e-9, "forward identity above 1e-9");

    // converse: the ellipsoid h lifts back to the katok co-metric
    auto g_back = lift::h_to_g([par](const geom::SU2Element& a) {
      return lift::ellipsoid_h(par, a);
    });
    double worst_back = 0;
    for (int i = 0; i < 1000; ++i) {
      double r = rng.uniform(0.1, kPi - 0.1);
      double phi = rng.uniform(0, kTwoPi);
      double psi = rng.uniform(0, kTwoPi);
      fin::ChartState c{r, phi, std::cos(psi), std::sin(psi) * std::sin(r)};
      fin::State s = katok->from_chart(c);
      Vec3 x = fin::state_x(s), p = fin::state_p(s);
      double fstar = g_back(x, p) * norm(p);
      worst_back = std::max(
          worst_back,
          std::abs(fstar - fin::katok_cometric(c.r, c.phi, c.p_r, c.p_phi, eps)));
    }
    scope.check(worst_back < 1e-9, "converse identity above 1e-9");
    scope.note("forward=" + num(worst_fwd) + " converse=" + num(worst_back));
  } catch (const std::exception& e) {
    scope.check(false, e.what());
  }
  return res;
}

CriterionResult pullback_identity() {
  CriterionResult res;
  Scope scope(4, "pullback through the frame map equals 2x the contact form",
              res);
  try {
    double worst = geom::gmap_pullback_check(100);
    scope.check(worst < 1e-5, "ratio deviates from 2 by more than 1e-5");
    scope.note("max |ratio - 2| = " + num(worst));
  } catch (const std::exception& e) {
    scope.check(false, e.what());
  }
  return res;
}

CriterionResult theorem_b_positive() {
  CriterionResult res;
  Scope scope(5, "katok 0.3: two geodesics, ell > pi, contractible mu >= 3",
              res);
  try {
    const double eps = 0.3;
    auto metric = fin::make_katok(eps);
    auto orbits = flow::find_closed_geodesics(metric, 10.0, 64);
    scope.check(orbits.size() == 2, "expected exactly 2 closed geodesics, got " +
                                        std::to_string(orbits.size()));
    if (orbits.size() == 2) {
      scope.check(std::abs(orbits[0].period - kTwoPi / (1 + eps)) < 1e-5,
                  "short length off by more than 1e-5");
      scope.check(std::abs(orbits[1].period - kTwoPi / (1 - eps)) < 1e-5,
                  "long length off by more than 1e-5");
    }
    cz::CertifyOptions opt;
    opt.length_cap = 10.0;
    opt.spectrum_grid = 1024;
    auto rep = cz::certify_dynamical_convexity(metric, 1.0, opt);
    scope.check(std::abs(rep.ell - kTwoPi / 1.3) < 1e-4, "ell != 2 pi / 1.3");
    scope.check(rep.ell > kPi, "ell not above pi");
    scope.check(rep.verdict_by_theorem, "loop criterion verdict false");
    scope.check(rep.verdict_by_inspection, "some contractible orbit has mu < 3");
    int contractible_count = 0;
    for (const auto& row : rep.orbits) {
      scope.check(row.taui_ok, "tau3 inequality violated on " + row.orbit_id);
      if (row.contractible) {
        ++contractible_count;
        scope.check(row.mu.has_value() && *row.mu >= 3,
                    "contractible orbit with mu < 3: " + row.orbit_id);
      }
    }
    scope.check(contractible_count >= 2, "doubled equators not both inspected");
    scope.note("ell=" + num(rep.ell) + " orbits=" + std::to_string(orbits.size()) +
               " contractible_rows=" + std::to_string(contractible_count));
    scope.budget(300.0);
  } catch (const std::exception& e) {
    scope.check(false, e.what());
  }
  return res;
}

CriterionResult focusing_property() {
  CriterionResult res;
  Scope scope(6, "distance-pi focusing: katok 0.4 passes, oblate fails", res);
  try {
    auto katok = fin::make_katok(0.4);
    Vec3 base = katok->chart_point(katok->equator_r(), 0.35);
    double spread = flow::focusing_spread(*katok, base, 64);
    scope.check(spread < 1e-5, "katok spread above 1e-5");
    auto oblate = fin::make_revolution_ellipsoid(0.5);
    double control = flow::focusing_spread(*oblate, Vec3{0, 0, 1}, 64);
    scope.check(control > 1e-3, "negative control did not fail");
    scope.note("katok=" + num(spread) + " oblate=" + num(control));
  } catch (const std::exception& e) {
    scope.check(false, e.what());
  }
  return res;
}

CriterionResult theorem_a_cylinder() {
  CriterionResult res;
  Scope scope(7, "cylinder: matching 1e-12, CR order 2, charge trend, energy",
              res);
  try {
    cyl::SectorGerm germ;
    germ.charge = 2;
    germ.rotation = (std::sqrt(5.0) - 1.0) / 2.0;
    germ.coefficients = {0, 0, 0, Cx(1, 0)};
    auto tube = cyl::linear_tube();

    // matching residuals on the default grid
    auto sample = cyl::build_cylinder(germ, tube, {});
    scope.check(sample.boundary_residual < 1e-12, "sector matching above 1e-12");
    scope.check(sample.wrap_residual < 1e-12, "wrap matching above 1e-12");

    // order-2 convergence of the defining-equation residuals
    std::vector<double> trans, axial, hs;
    for (int level = 0; level < 4; ++level) {
      cyl::GridSpec grid;
      grid.rings_per_octave = 16 << level;
      grid.n_angular = 192 << level;
      grid.r_min = 1e-2;
      auto s = cyl::build_cylinder(germ, tube, grid);
      auto r = cyl::cr_residual(s);
      trans.push_back(r.transverse);
      axial.push_back(r.axial);
      hs.push_back(r.grid_h);
    }
    std::ostringstream slopes;
    for (int l = 0; l + 1 < 4; ++l) {
      double st = std::log(trans[l] / trans[l + 1]) / std::log(hs[l] / hs[l + 1]);
      double sa = std::log(axial[l] / axial[l + 1]) / std::log(hs[l] / hs[l + 1]);
      scope.check(std::abs(st - 2.0) <= 0.2, "transverse residual order off");
      scope.check(std::abs(sa - 2.0) <= 0.2, "axial residual order off");
      slopes << num(st) << "/" << num(sa) << " ";
    }

    // charge integrals trend to n
    std::vector<double> radii = {1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001};
    auto charge = cyl::charge_integral(sample, radii);
    for (std::size_t i = 1; i < charge.size(); ++i)
      scope.check(std::abs(charge[i] - 2.0) <=
                      std::abs(charge[i - 1] - 2.0) + 1e-12,
                  "charge trend not monotone");
    scope.check(std::abs(charge.back() - 2.0) < 1e-2,
                "charge at radius 1e-3 misses 2 by more than 1e-2");

    // energy: finite, stable under doubling the cutoff family
    double e20 = cyl::energy_estimate(sample, cyl::sigmoid_cutoff_family(20));
    double e40 = cyl::energy_estimate(sample, cyl::sigmoid_cutoff_family(40));
    scope.check(std::isfinite(e20), "energy not finite");
    scope.check(std::abs(e20 - e40) < 1e-6, "energy unstable under doubling");

    scope.note("slopes(t/a)=" + slopes.str() + "charge(1e-3)=" +
               num(charge.back()) + " energy=" + num(e20));
    scope.budget(120.0);
  } catch (const std::exception& e) {
    scope.check(false, e.what());
  }
  return res;
}

CriterionResult reversibility_rademacher() {
  CriterionResult res;
  Scope scope(8, "reversibility 1.5 and the loop length bound pi(1+1/r)", res);
  try {
    auto katok = fin::make_katok(0.2);
    double r = fin::reversibility(*katok);
    scope.check(std::abs(r - 1.5) < 1e-5, "reversibility not 1.5 within 1e-5");
    auto rep = cz::pinching_corollary_check(katok);
    scope.check(rep.rademacher_checked, "K<=1 branch not taken");
    scope.check(rep.ell >= rep.rademacher_bound - 1e-4, "bound violated");
    scope.check(std::abs(rep.ell - rep.rademacher_bound) < 1e-4,
                "near-equality gap above 1e-4");

    auto round_rep = cz::pinching_corollary_check(fin::make_round());
    scope.check(std::abs(round_rep.rademacher_bound - kTwoPi) < 1e-12,
                "round bound is not 2 pi");
    scope.check(std::abs(round_rep.ell - kTwoPi) < 1e-4,
                "round loop length is not 2 pi");
    scope.note("r=" + num(r) + " ell=" + num(rep.ell) + " bound=" +
               num(rep.rademacher_bound) + " gap=" +
               num(std::abs(rep.ell - rep.rademacher_bound)));
  } catch (const std::exception& e) {
    scope.check(false, e.what());
  }
  return res;
}

CriterionResult property_suites() {
  CriterionResult res;
  Scope scope(9, "property suites: symplecticity, conservation, labels, cover",
              res);
  try {
    // symplecticity of every linearized path used by the instance checks
    double det_drift = 0;
    {
      auto katok = fin::make_katok(0.3);
      auto oblate = fin::make_revolution_ellipsoid(0.5);
      std::vector<flow::GeodesicOrbit> orbits = {
          flow::equator_orbit(katok, +1), flow::equator_orbit(katok, -1),
          flow::equator_orbit(fin::make_round(), +1),
          flow::equator_orbit(oblate, +1)};
      auto meridians = flow::find_closed_geodesics(oblate, 5.0, 32);
      for (const auto& o : meridians)
        if (o.period > 4.0) orbits.push_back(o);
      for (const auto& orbit : orbits) {
        auto p1 = cz::jacobi_flow(orbit, 512);
        auto p2 = cz::jacobi_flow(orbit.iterate(2), 512);
        det_drift = std::max({det_drift, p1.max_det_drift, p2.max_det_drift});
      }
    }
    scope.check(det_drift < 1e-7, "det Phi drift above 1e-7");

    // conservation along generic flows
    double fstar_rel = 0, clairaut_rel = 0;
    for (auto metric : {fin::make_katok(0.3), fin::make_katok(0.7),
                        fin::MetricPtr(fin::make_revolution_ellipsoid(0.5)),
                        fin::MetricPtr(fin::make_round())}) {
      double T = 12.0;
      Vec3 x = metric->chart_point(1.1, 0.4);
      Vec3 d = normalized(metric->chart_dr(1.1, 0.4)) +
               0.7 * normalized(metric->chart_dphi(1.1, 0.4));
      fin::State s0 = fin::make_state(x, (1.0 / metric->costar(x, d)) * d);
      auto traj = flow::cogeodesic_flow(*metric, s0, T);
      auto rep = flow::check_conservation(*metric, traj);
      fstar_rel = std::max(fstar_rel, rep.fstar_drift / T);
      clairaut_rel = std::max(clairaut_rel, rep.clairaut_drift / T);
    }
    scope.check(fstar_rel < 1e-8, "F* drift above 1e-8 per unit time");
    scope.check(clairaut_rel < 1e-8, "p_phi drift above 1e-8 per unit time");

    // spectrum labeling on a fresh spectrum
    {
      auto s = cz::cz_spectrum(cz::constant_curvature_path(1.0, 2 * kTwoPi), 4,
                               512);
      int expected_k = -2;
      for (const auto& e : s.entries) {
        scope.check(e.k == expected_k++, "labels not contiguous");
        int half = e.k >= 0 ? e.k / 2 : (e.k - 1) / 2;
        scope.check(e.winding == half, "winding != floor(k/2)");
      }
    }

    // double cover identity on 1e4 samples
    {
      Rng rng(7);
      double worst = 0;
      for (int i = 0; i < 10000; ++i) {
        C2 w = rng.unit_c2();
        geom::SU2Element a{w.w1, w.w2};
        auto m1 = geom::gmap(a), m2 = geom::gmap(a.negated());
        worst = std::max({worst, norm(m1.x - m2.x), norm(m1.v - m2.v)});
      }
      scope.check(worst == 0.0, "gmap(-A) != gmap(A)");
    }
    scope.note("det_drift=" + num(det_drift) + " fstar/T=" + num(fstar_rel) +
               " pphi/T=" + num(clairaut_rel));
  } catch (const std::exception& e) {
    scope.check(false, e.what());
  }
  return res;
}

std::vector<CriterionResult> run_all() {
  return {ellipsoid_sharpness(),      spectral_oracle(),
          katok_ellipsoid_identity(), pullback_identity(),
          theorem_b_positive(),       focusing_property(),
          theorem_a_cylinder(),       reversibility_rademacher(),
          property_suites()};
}

}  // namespace fgeo::accept
