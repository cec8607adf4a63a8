#include "fgeo/czindex.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fgeo/numerics/defaults.hpp"
#include "fgeo/numerics/eigen.hpp"
#include "fgeo/numerics/winding.hpp"

namespace fgeo::cz {
namespace {

LinearizedPath integrate_jacobi(std::function<double(double)> curvature,
                                double T, int n_samples) {
  require(T > 0, "jacobi_flow: period must be positive");
  LinearizedPath path;
  path.period = T;
  path.curvature = std::move(curvature);

  // Phi' = J A Phi with J = (0,-1;1,0), A = diag(1,K): row-major state.
  num::VectorField field = [&path](double t, const std::vector<double>& y,
                                   std::vector<double>& dy) {
    double K = path.curvature(t);
    // J A = (0,-K; 1,0)
    dy[0] = -K * y[2];
    dy[1] = -K * y[3];
    dy[2] = y[0];
    dy[3] = y[1];
  };
  num::IntegratorConfig cfg;
  cfg.abs_tol = 1e-12;
  cfg.rel_tol = 1e-12;
  auto traj = num::integrate_ode(field, {1, 0, 0, 1}, 0.0, T, cfg);

  path.curvature_samples.resize(n_samples + 1);
  path.monodromy_samples.resize(n_samples + 1);
  for (int i = 0; i <= n_samples; ++i) {
    double t = T * i / n_samples;
    auto y = traj.at(t);
    Mat2 phi{y[0], y[1], y[2], y[3]};
    path.curvature_samples[i] = path.curvature(t);
    path.monodromy_samples[i] = phi;
    path.max_det_drift =
        std::max(path.max_det_drift, std::abs(phi.det() - 1.0));
  }
  require(path.max_det_drift <= 1e-6,
          "jacobi_flow: det drift above 1e-6, demand finer integration");
  return path;
}

}  // namespace

Mat2 LinearizedPath::monodromy() const {
  require(!monodromy_samples.empty(), "LinearizedPath: empty");
  return monodromy_samples.back();
}

LinearizedPath jacobi_flow(const flow::GeodesicOrbit& orbit, int n_samples) {
  require(orbit.closure_residual < num::defaults::orbit_closure_residual,
          "jacobi_flow: orbit is not closed");
  double T = orbit.total_period();
  auto curv = [orbit](double t) { return orbit.curvature_at(t); };
  return integrate_jacobi(curv, T, n_samples);
}

LinearizedPath constant_curvature_path(double curvature, double T,
                                       int n_samples) {
  return integrate_jacobi([curvature](double) { return curvature; }, T,
                          n_samples);
}

// ---- spectrum ----------------------------------------------------------------

namespace {

std::vector<double> assemble_operator(const LinearizedPath& path, int N) {
  const double T = path.period;
  const double h = T / N;
  const std::size_t n = 2 * static_cast<std::size_t>(N);
  std::vector<double> m(n * n, 0.0);
  const double c = 1.0 / (2.0 * h);
  for (int i = 0; i < N; ++i) {
    double K = path.curvature(h * i);
    m[(2 * i) * n + (2 * i)] = -1.0;
    m[(2 * i + 1) * n + (2 * i + 1)] = -K;
    int ip = (i + 1) % N;
    // -J/(2h) block from row i to column i+1; symmetric mirror below
    m[(2 * i) * n + (2 * ip + 1)] += c;
    m[(2 * i + 1) * n + (2 * ip)] += -c;
    m[(2 * ip + 1) * n + (2 * i)] += c;
    m[(2 * ip) * n + (2 * i + 1)] += -c;
  }
  return m;
}

// Quadratic form of the periodic second-difference operator, used to split
// numerically degenerate clusters into frequency classes (the central
// difference folds a low mode onto a high alias with the same eigenvalue).
double laplacian_form(const std::vector<double>& u, const std::vector<double>& v,
                      int N, double h) {
  double s = 0;
  for (int j = 0; j < N; ++j) {
    int jm = (j + N - 1) % N, jp = (j + 1) % N;
    for (int c = 0; c < 2; ++c) {
      double lap = (u[2 * jp + c] - 2 * u[2 * j + c] + u[2 * jm + c]) / (h * h);
      s += lap * v[2 * j + c];
    }
  }
  return s;
}

struct RawPair {
  double tau;
  std::vector<double> vec;
};

// Winding of a discrete eigenvector; nullopt when the unwrap guard or the
// near-zero-sample guard rejects it (alias or mixed cluster vector).
std::optional<int> vector_winding(const std::vector<double>& v, int N,
                                  double T) {
  double vmax = 0, vmin = 1e300;
  for (int j = 0; j < N; ++j) {
    double a = std::hypot(v[2 * j], v[2 * j + 1]);
    vmax = std::max(vmax, a);
    vmin = std::min(vmin, a);
  }
  if (vmax <= 0 || vmin < 0.05 * vmax) return std::nullopt;
  num::PlanarPath path;
  path.period = T;
  path.periodic = true;
  path.samples.reserve(N + 1);
  for (int j = 0; j <= N; ++j) {
    int jj = j % N;
    path.samples.push_back({v[2 * jj], v[2 * jj + 1]});
  }
  try {
    double w = num::winding_number(path);
    return static_cast<int>(std::llround(w));
  } catch (const error&) {
    return std::nullopt;
  }
}

}  // namespace

const SpectrumEntry& CZSpectrum::entry(int k) const {
  for (const auto& e : entries)
    if (e.k == k) return e;
  throw error("CZSpectrum: label k=" + std::to_string(k) + " not in window");
}

double CZSpectrum::tau(int k) const { return entry(k).tau; }

double CZSpectrum::threshold(int winding) const {
  double h = T / grid_size;
  double omega = kTwoPi * (std::abs(winding) + 1) / T;
  return 10.0 * omega * omega * omega * h * h / 6.0;
}

CZSpectrum cz_spectrum(const LinearizedPath& path, int k_max, int N) {
  require(N >= 64, "cz_spectrum: N must be at least 64");
  require(k_max >= 2, "cz_spectrum: winding window must reach at least 2");
  const double T = path.period;
  const double h = T / N;

  double kmin = 1e300, kmax = -1e300;
  for (int i = 0; i < N; ++i) {
    double K = path.curvature(h * i);
    kmin = std::min(kmin, K);
    kmax = std::max(kmax, K);
  }
  const double kmin_eff = std::min(1.0, kmin), kmax_eff = std::max(1.0, kmax);

  auto op = assemble_operator(path, N);
  const double lo = -2.0 * kTwoPi / T - kmax_eff - 0.5;
  const double hi = kTwoPi * (k_max + 1) / T - kmin_eff + 0.5;
  auto win = num::symmetric_eigen_window(op, 2 * static_cast<std::size_t>(N),
                                         lo, hi);

  std::vector<RawPair> pairs;
  pairs.reserve(win.selected.size());
  for (std::size_t s = 0; s < win.selected.size(); ++s)
    pairs.push_back({win.all_values[win.selected[s]], std::move(win.vectors[s])});

  // split numerically degenerate clusters by frequency content
  const double ctol = 1e-6 * std::max({1.0, std::abs(lo), std::abs(hi)});
  std::size_t i = 0;
  while (i < pairs.size()) {
    std::size_t j = i + 1;
    while (j < pairs.size() && std::abs(pairs[j].tau - pairs[j - 1].tau) <= ctol)
      ++j;
    std::size_t d = j - i;
    if (d >= 2) {
      std::vector<double> form(d * d);
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) {
          double v = laplacian_form(pairs[i + a].vec, pairs[i + b].vec, N, h);
          form[a * d + b] = v;
          form[b * d + a] = v;
        }
      // symmetrize roundoff before the small dense solve
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < a; ++b) {
          double v = 0.5 * (form[a * d + b] + form[b * d + a]);
          form[a * d + b] = form[b * d + a] = v;
        }
      auto sub = num::symmetric_eigen(form, d);
      std::vector<std::vector<double>> rotated(d,
                                               std::vector<double>(2 * N, 0.0));
      for (std::size_t c = 0; c < d; ++c)
        for (std::size_t a = 0; a < d; ++a) {
          double w = sub.vectors[c][a];
          for (int q = 0; q < 2 * N; ++q) rotated[c][q] += w * pairs[i + a].vec[q];
        }
      for (std::size_t c = 0; c < d; ++c) pairs[i + c].vec = std::move(rotated[c]);
    }
    i = j;
  }

  // bucket by winding
  std::map<int, std::vector<const RawPair*>> buckets;
  for (const auto& pr : pairs) {
    auto w = vector_winding(pr.vec, N, T);
    if (!w) continue;  // alias or mixed vector, rejected by the guards
    if (*w < -1 || *w > k_max) continue;
    buckets[*w].push_back(&pr);
  }

  CZSpectrum out;
  out.T = T;
  out.grid_size = N;
  out.max_winding = k_max;
  for (int w = -1; w <= k_max; ++w) {
    auto it = buckets.find(w);
    require(it != buckets.end() && it->second.size() == 2,
            "cz_spectrum: winding labeling inconsistent with the "
            "two-eigenvalues-per-winding rule (grid too coarse)");
    std::vector<const RawPair*> pairw = it->second;
    std::sort(pairw.begin(), pairw.end(),
              [](const RawPair* a, const RawPair* b) { return a->tau < b->tau; });
    for (int s = 0; s < 2; ++s) {
      SpectrumEntry e;
      e.k = 2 * w + s;
      e.winding = w;
      e.tau = pairw[s]->tau;
      double thr = out.threshold(w);
      e.negative = e.tau < -thr;
      e.marginal = std::abs(e.tau) <= thr;
      e.eigenfunction.reserve(N);
      for (int j = 0; j < N; ++j)
        e.eigenfunction.push_back({pairw[s]->vec[2 * j], pairw[s]->vec[2 * j + 1]});
      out.entries.push_back(std::move(e));
    }
  }

  // windings must be monotone in tau
  for (std::size_t q = 1; q < out.entries.size(); ++q)
    require(out.entries[q].tau >= out.entries[q - 1].tau - 1e-7,
            "cz_spectrum: labeled eigenvalues not monotone across windings");

  require(!out.entries.back().negative,
          "cz_spectrum: sign change not inside the winding window; raise k_max");
  out.mu = -3;
  for (const auto& e : out.entries)
    if (e.negative) out.mu = std::max(out.mu, e.k);
  require(out.mu > -3, "cz_spectrum: no negative eigenvalue in the window");
  for (const auto& e : out.entries)
    if (e.marginal && (e.k == out.mu + 1 || e.k == out.mu + 2))
      out.mu_marginal = true;
  return out;
}

bool inequality_taui_check(const CZSpectrum& spectrum, double T) {
  return (T / kTwoPi) * (1.0 + spectrum.tau(3)) <=
         1.0 + num::defaults::taui_slack;
}

nlohmann::json spectrum_json(const CZSpectrum& s, const std::string& orbit_id,
                             bool contractible) {
  nlohmann::json j;
  j["orbit_id"] = orbit_id;
  j["T"] = s.T;
  j["contractible"] = contractible;
  std::vector<double> tau;
  std::vector<int> winding;
  for (const auto& e : s.entries) {
    tau.push_back(e.tau);
    winding.push_back(e.winding);
  }
  j["tau"] = tau;
  j["winding"] = winding;
  if (contractible)
    j["mu"] = s.mu;
  else
    j["mu"] = nullptr;
  j["taui_ok"] = inequality_taui_check(s, s.T);
  j["marginal"] = s.mu_marginal;
  return j;
}

// ---- certification -------------------------------------------------------------

ConvexityReport certify_dynamical_convexity(const fin::MetricPtr& metric,
                                            double delta, double length_cap) {
  CertifyOptions opt;
  opt.length_cap = length_cap;
  return certify_dynamical_convexity(metric, delta, opt);
}

ConvexityReport certify_dynamical_convexity(const fin::MetricPtr& metric,
                                            double delta,
                                            const CertifyOptions& opt) {
  require(delta > 0, "certify: delta must be positive");
  auto range = metric->curvature_range();
  require(range.has_value(),
          "certify: curvature guarantee absent for this family");
  require(range->first >= delta - 1e-12,
          "certify: family does not satisfy K >= delta");

  ConvexityReport rep;
  rep.metric = metric->descriptor();
  rep.delta = delta;
  rep.loop_bound = kPi / std::sqrt(delta);

  auto loops = flow::shortest_loop(metric, opt.loop_grid);
  rep.ell = loops.ell;
  rep.verdict_by_theorem = rep.ell > rep.loop_bound;

  auto orbits = flow::find_closed_geodesics(metric, opt.length_cap,
                                            opt.search_directions);
  const double scale = std::sqrt(delta);
  rep.verdict_by_inspection = true;
  int orbit_no = 0;
  for (const auto& orbit : orbits) {
    ++orbit_no;
    std::vector<int> iterates = {1, 2};
    for (int m = 4; m * orbit.period <= opt.length_cap; m += 2)
      iterates.push_back(m);
    for (int m : iterates) {
      auto iter = orbit.iterate(m);
      bool classified = true, contractible = false;
      try {
        contractible = flow::contractibility(iter);
      } catch (const error&) {
        classified = false;  // flagged for a manual iterate count
      }
      // rescaled path: K' = K/delta over T' = sqrt(delta) T
      double Ts = scale * iter.total_period();
      auto curv = [iter, delta, scale](double t) {
        return iter.curvature_at(t / scale) / delta;
      };
      LinearizedPath path = integrate_jacobi(curv, Ts, 256);
      auto spectrum = cz_spectrum(path, opt.k_max, opt.spectrum_grid);
      OrbitRow row;
      row.orbit_id = "orbit-" + std::to_string(orbit_no) + "-x" +
                     std::to_string(m);
      row.total_period = iter.total_period();
      row.iterates = m;
      row.classified = classified;
      row.contractible = contractible;
      row.tau3 = spectrum.tau(3);
      row.taui_ok = inequality_taui_check(spectrum, Ts);
      row.marginal = spectrum.mu_marginal;
      if (!classified) ++rep.unclassified;
      if (classified && contractible) {
        row.mu = spectrum.mu;
        if (spectrum.mu < 3) rep.verdict_by_inspection = false;
      }
      if (spectrum.mu_marginal) rep.any_marginal = true;
      rep.orbits.push_back(std::move(row));
    }
  }
  return rep;
}

nlohmann::json ConvexityReport::to_json() const {
  nlohmann::json j;
  j["metric"] = metric;
  j["delta"] = delta;
  j["ell"] = ell;
  j["loop_bound"] = loop_bound;
  j["verdict_by_theorem"] = verdict_by_theorem;
  j["verdict_by_inspection"] = verdict_by_inspection;
  j["marginal"] = any_marginal;
  j["unclassified_orbits"] = unclassified;
  j["orbits"] = nlohmann::json::array();
  for (const auto& row : orbits) {
    nlohmann::json r;
    r["orbit_id"] = row.orbit_id;
    r["T"] = row.total_period;
    r["iterates"] = row.iterates;
    if (row.classified)
      r["contractible"] = row.contractible;
    else
      r["contractible"] = nullptr;
    r["tau3"] = row.tau3;
    if (row.mu)
      r["mu"] = *row.mu;
    else
      r["mu"] = nullptr;
    r["taui_ok"] = row.taui_ok;
    r["marginal"] = row.marginal;
    j["orbits"].push_back(std::move(r));
  }
  return j;
}

PinchReport pinching_corollary_check(const fin::MetricPtr& metric,
                                     bool require_pinch_branch) {
  auto range = metric->curvature_range();
  require(range.has_value(), "pinching check: curvature range unknown");
  auto [kmin, kmax] = *range;
  require(kmin > 0, "pinching check: needs positive curvature");

  PinchReport rep;
  rep.reversibility = fin::reversibility(*metric);
  bool reversible = std::abs(rep.reversibility - 1.0) < 1e-9;
  if (require_pinch_branch)
    require(reversible,
            "pinching check: non-reversible metric passed to the quarter-pinch "
            "branch");

  rep.quarter_pinched = reversible && (kmin > kmax / 4.0);
  auto loops = flow::shortest_loop(metric, 24);
  rep.ell = loops.ell;
  if (rep.quarter_pinched) {
    auto cert = certify_dynamical_convexity(metric, kmin, 10.0);
    rep.pinch_verdict = cert.verdict_by_theorem;
    require(rep.pinch_verdict,
            "pinching check: quarter-pinched metric failed the loop criterion");
  }
  if (kmax <= 1.0 + 1e-12) {
    rep.rademacher_checked = true;
    rep.rademacher_bound = kPi * (1.0 + 1.0 / rep.reversibility);
    rep.rademacher_ok = rep.ell >= rep.rademacher_bound - 1e-4;
  }
  return rep;
}

}  // namespace fgeo::cz
