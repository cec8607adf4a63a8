// Command-line front end: experiment orchestration and report emission.
// Subcommands: geodesics, loops, cz, convexity, lift, cylinder,
// reproduce-paper. Outputs are deterministic given identical config and seed.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "fgeo/acceptance.hpp"
#include "fgeo/contactlift.hpp"
#include "fgeo/cylinder.hpp"
#include "fgeo/czindex.hpp"
#include "fgeo/geodesics.hpp"
#include "fgeo/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fgeo;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- config schema ------------------------------------------------------------

const std::map<std::string, std::map<std::string, std::string>>& command_schema() {
  // key -> type tag: number | integer | string | boolean | object
  static const std::map<std::string, std::map<std::string, std::string>> schema = {
      {"common",
       {{"out", "string"}, {"seed", "integer"}, {"metric", "object"}}},
      {"geodesics",
       {{"cap", "number"}, {"grid", "integer"}, {"dump_trajectories", "boolean"}}},
      {"loops", {{"grid", "integer"}, {"cap", "number"}}},
      {"cz",
       {{"orbit", "string"},
        {"iterates", "integer"},
        {"grid", "integer"},
        {"kmax", "integer"}}},
      {"convexity",
       {{"delta", "number"},
        {"cap", "number"},
        {"grid", "integer"},
        {"sweep", "string"}}},
      {"lift",
       {{"katok_epsilon", "number"},
        {"ellipsoid_p", "number"},
        {"ellipsoid_q", "number"},
        {"samples", "integer"}}},
      {"cylinder",
       {{"n", "integer"},
        {"c", "number"},
        {"germ_coeffs", "string"},
        {"tube", "string"},
        {"r_min", "number"},
        {"rings", "integer"},
        {"angular", "integer"}}},
      {"reproduce-paper", {}}};
  return schema;
}

void check_type(const std::string& key, const json& v, const std::string& type) {
  bool ok = (type == "number" && v.is_number()) ||
            (type == "integer" && v.is_number_integer()) ||
            (type == "string" && v.is_string()) ||
            (type == "boolean" && v.is_boolean()) ||
            (type == "object" && v.is_object());
  if (!ok)
    throw ConfigError("config key '" + key + "' must have type " + type);
}

void validate_config(const json& cfg, const std::string& command) {
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  const auto& schema = command_schema();
  auto cmd = schema.find(command);
  if (cmd == schema.end()) throw ConfigError("unknown command in config");
  const auto& common = schema.at("common");
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    auto inc = common.find(it.key());
    auto ins = cmd->second.find(it.key());
    if (inc != common.end())
      check_type(it.key(), it.value(), inc->second);
    else if (ins != cmd->second.end())
      check_type(it.key(), it.value(), ins->second);
    else
      throw ConfigError("unknown config key '" + it.key() + "' for command '" +
                        command + "'");
  }
}

// ---- shared option plumbing -----------------------------------------------------

struct Common {
  std::string out = "out";
  std::uint64_t seed = 2024;
  std::string metric_name;
  double epsilon = 0.3;
  double a = 0.5;
  std::string metric_json;
  std::string config_path;

  json config;  // merged config-file contents

  fin::MetricPtr metric() const {
    if (!metric_json.empty())
      return fin::metric_from_json(json::parse(metric_json));
    if (config.contains("metric")) return fin::metric_from_json(config.at("metric"));
    if (metric_name == "round") return fin::make_round();
    if (metric_name == "katok") return fin::make_katok(epsilon);
    if (metric_name == "revolution") return fin::make_revolution_ellipsoid(a);
    throw ConfigError("no metric selected: use --metric round|katok|revolution "
                      "with --epsilon/--a, or --metric-json");
  }

  fs::path out_dir() const {
    fs::path dir = config.value("out", out);
    fs::create_directories(dir);
    return dir;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "deterministic sampling seed");
  cmd->add_option("--metric", c.metric_name, "metric family: round|katok|revolution");
  cmd->add_option("--epsilon", c.epsilon, "katok drift parameter");
  cmd->add_option("--a", c.a, "revolution ellipsoid equatorial radius");
  cmd->add_option("--metric-json", c.metric_json, "full metric descriptor (JSON)");
  cmd->add_option("--config", c.config_path, "JSON config file (flags override)");
}

void load_config(Common& c, const std::string& command) {
  if (c.config_path.empty()) {
    c.config = json::object();
    return;
  }
  std::ifstream is(c.config_path);
  if (!is.good()) throw ConfigError("cannot open config file " + c.config_path);
  json parsed;
  try {
    is >> parsed;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  validate_config(parsed, command);
  c.config = parsed;
}

template <class T>
T cfg_or(const Common& c, const std::string& key, T flag_value, bool flag_set) {
  if (flag_set) return flag_value;
  if (c.config.contains(key)) return c.config.at(key).get<T>();
  return flag_value;
}

// named orbit construction for the cz subcommand
flow::GeodesicOrbit orbit_by_name(const fin::MetricPtr& m, const std::string& name,
                                  int iterates) {
  if (name == "equator" || name == "great-circle")
    return flow::equator_orbit(m, +1, iterates);
  if (name == "short-equator" || name == "long-equator") {
    auto east = flow::equator_orbit(m, +1);
    auto west = flow::equator_orbit(m, -1);
    bool east_shorter = east.period <= west.period;
    bool want_short = name == "short-equator";
    return (east_shorter == want_short) ? east.iterate(iterates)
                                        : west.iterate(iterates);
  }
  if (name == "meridian") {
    auto orbits = flow::find_closed_geodesics(m, 8.0, 32);
    for (const auto& o : orbits) {
      double rmin = 1e9, rmax = -1e9;
      for (int k = 0; k < 64; ++k) {
        double r = m->chart_r(fin::state_x(o.state_at(o.period * k / 64.0)));
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
      }
      if (rmin < 0.2 && rmax > kPi - 0.2) return o.iterate(iterates);
    }
    throw ConfigError("no meridian orbit found below length cap 8");
  }
  throw ConfigError("unknown orbit name '" + name +
                    "' (use equator | short-equator | long-equator | "
                    "great-circle | meridian)");
}

json orbit_row_json(const fin::Metric& m, const flow::GeodesicOrbit& o) {
  json j;
  j["period"] = o.period;
  j["closure_residual"] = o.closure_residual;
  Vec3 axis = m.symmetry_axis();
  j["p_phi"] = dot(fin::state_p(o.state0), cross(axis, fin::state_x(o.state0)));
  double rmin = 1e9, rmax = -1e9;
  for (int k = 0; k < 128; ++k) {
    double r = m.chart_r(fin::state_x(o.state_at(o.period * k / 128.0)));
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  j["chart_r_min"] = rmin;
  j["chart_r_max"] = rmax;
  return j;
}

int run_geodesics(Common& c, double cap, int grid, bool dump, bool cap_set,
                  bool grid_set, bool dump_set) {
  load_config(c, "geodesics");
  cap = cfg_or(c, "cap", cap, cap_set);
  grid = cfg_or(c, "grid", grid, grid_set);
  dump = cfg_or(c, "dump_trajectories", dump, dump_set);
  auto metric = c.metric();
  flow::SearchLog log;
  auto orbits = flow::find_closed_geodesics(metric, cap, grid, &log);
  fs::path dir = c.out_dir();

  json j;
  j["metric"] = metric->descriptor();
  j["length_cap"] = cap;
  j["grid"] = grid;
  j["search_log"] = {{"candidates", log.candidates},
                     {"dropped", log.dropped},
                     {"duplicates", log.duplicates}};
  j["orbits"] = json::array();
  report::Csv table;
  table.header = {"period", "p_phi", "chart_r_min", "chart_r_max",
                  "closure_residual"};
  for (const auto& o : orbits) {
    json row = orbit_row_json(*metric, o);
    j["orbits"].push_back(row);
    table.add_row({row["period"].get<double>(), row["p_phi"].get<double>(),
                   row["chart_r_min"].get<double>(),
                   row["chart_r_max"].get<double>(),
                   row["closure_residual"].get<double>()});
  }
  report::write_json(dir / "orbits.json", j);
  report::write_csv(dir / "orbits.csv", table);
  if (dump) {
    int idx = 0;
    for (const auto& o : orbits) {
      std::ofstream os(dir / ("trajectory-" + std::to_string(idx++) + ".csv"));
      flow::write_trajectory_csv(os, *metric, o.trajectory, 512);
    }
  }
  std::printf("geodesics: %zu orbit(s) below cap %s -> %s\n", orbits.size(),
              report::format_number(cap).c_str(), dir.string().c_str());
  return 0;
}

int run_loops(Common& c, int grid, double cap, bool grid_set, bool cap_set) {
  load_config(c, "loops");
  grid = cfg_or(c, "grid", grid, grid_set);
  cap = cfg_or(c, "cap", cap, cap_set);
  auto metric = c.metric();
  auto rep = flow::shortest_loop(metric, grid, cap);
  fs::path dir = c.out_dir();

  json j;
  j["metric"] = metric->descriptor();
  j["ell"] = rep.ell;
  j["grid_latitudes"] = rep.grid_latitudes;
  j["grid_directions"] = rep.grid_directions;
  j["candidates"] = json::array();
  report::Csv table;
  table.header = {"length", "base_r", "residual"};
  for (const auto& cand : rep.candidates) {
    j["candidates"].push_back({{"length", cand.length},
                               {"base_r", cand.base_r},
                               {"residual", cand.residual}});
    table.add_row({cand.length, cand.base_r, cand.residual});
  }
  report::write_json(dir / "loops.json", j);
  report::write_csv(dir / "loops.csv", table);
  std::printf("loops: ell = %s (%zu candidates) -> %s\n",
              report::format_number(rep.ell).c_str(), rep.candidates.size(),
              dir.string().c_str());
  return 0;
}

int run_cz(Common& c, std::string orbit_name, int iterates, int grid, int kmax,
           bool o_set, bool i_set, bool g_set, bool k_set) {
  load_config(c, "cz");
  orbit_name = cfg_or(c, "orbit", orbit_name, o_set);
  iterates = cfg_or(c, "iterates", iterates, i_set);
  grid = cfg_or(c, "grid", grid, g_set);
  kmax = cfg_or(c, "kmax", kmax, k_set);
  auto metric = c.metric();
  auto orbit = orbit_by_name(metric, orbit_name, iterates);
  bool contractible = flow::contractibility(orbit);
  auto path = cz::jacobi_flow(orbit, 512);
  auto spectrum = cz::cz_spectrum(path, kmax, grid);
  json j = cz::spectrum_json(spectrum, orbit_name + "-x" + std::to_string(iterates),
                             contractible);
  j["metric"] = metric->descriptor();
  j["iterates"] = iterates;
  j["grid"] = grid;
  fs::path dir = c.out_dir();
  report::write_json(dir / "spectrum.json", j);
  std::string mu_str = contractible ? std::to_string(spectrum.mu) : "n/a";
  std::printf("cz: %s T=%s mu=%s marginal=%s -> %s\n",
              j["orbit_id"].get<std::string>().c_str(),
              report::format_number(spectrum.T).c_str(), mu_str.c_str(),
              spectrum.mu_marginal ? "yes" : "no", dir.string().c_str());
  return 0;
}

int run_convexity(Common& c, double delta, double cap, int grid,
                  std::string sweep, bool d_set, bool c_set, bool g_set,
                  bool s_set) {
  load_config(c, "convexity");
  delta = cfg_or(c, "delta", delta, d_set);
  cap = cfg_or(c, "cap", cap, c_set);
  grid = cfg_or(c, "grid", grid, g_set);
  sweep = cfg_or(c, "sweep", sweep, s_set);
  fs::path dir = c.out_dir();

  if (!sweep.empty()) {
    double lo, hi, step;
    if (std::sscanf(sweep.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 ||
        step <= 0)
      throw ConfigError("sweep must be lo:hi:step");
    report::Csv table;
    table.header = {"epsilon", "ell", "tau3", "mu", "verdict"};
    report::Series tau3_series{"tau3 (doubled short equator)", {}};
    for (double eps = lo; eps <= hi + 1e-12; eps += step) {
      auto metric = fin::make_katok(eps);
      auto loops = flow::shortest_loop(metric, 16);
      auto orbit = orbit_by_name(metric, "short-equator", 2);
      auto spectrum = cz::cz_spectrum(cz::jacobi_flow(orbit, 256), 4, grid);
      bool verdict = loops.ell > kPi && spectrum.mu >= 3;
      table.add_row({eps, loops.ell, spectrum.tau(3),
                     static_cast<double>(spectrum.mu),
                     verdict ? 1.0 : 0.0});
      tau3_series.points.push_back({eps, spectrum.tau(3)});
    }
    report::write_csv(dir / "sweep.csv", table);
    report::write_svg(dir / "tau3_vs_epsilon.svg",
                      report::svg_lineplot({tau3_series}, "epsilon", "tau3"));
    std::printf("convexity sweep -> %s\n", dir.string().c_str());
    return 0;
  }

  auto metric = c.metric();
  cz::CertifyOptions opt;
  opt.length_cap = cap;
  opt.spectrum_grid = grid;
  auto rep = cz::certify_dynamical_convexity(metric, delta, opt);
  report::write_json(dir / "convexity.json", rep.to_json());
  report::Csv table;
  table.header = {"T", "iterates", "contractible", "tau3", "mu", "taui_ok",
                  "marginal"};
  for (const auto& row : rep.orbits)
    table.add_row({row.total_period, static_cast<double>(row.iterates),
                   row.contractible ? 1.0 : 0.0, row.tau3,
                   row.mu ? static_cast<double>(*row.mu) : -1.0,
                   row.taui_ok ? 1.0 : 0.0, row.marginal ? 1.0 : 0.0});
  report::write_csv(dir / "convexity_orbits.csv", table);
  std::printf(
      "convexity: ell=%s verdict_by_theorem=%s verdict_by_inspection=%s%s -> %s\n",
      report::format_number(rep.ell).c_str(),
      rep.verdict_by_theorem ? "true" : "false",
      rep.verdict_by_inspection ? "true" : "false",
      rep.any_marginal ? " (marginal tau3 flagged)" : "",
      dir.string().c_str());
  return (rep.verdict_by_theorem == rep.verdict_by_inspection) ? 0 : 1;
}

int run_lift(Common& c, double katok_eps, double ep, double eq, int samples,
             bool ke_set, bool p_set, bool q_set, bool n_set) {
  load_config(c, "lift");
  katok_eps = cfg_or(c, "katok_epsilon", katok_eps, ke_set);
  ep = cfg_or(c, "ellipsoid_p", ep, p_set);
  eq = cfg_or(c, "ellipsoid_q", eq, q_set);
  samples = cfg_or(c, "samples", samples, n_set);
  bool have_katok = ke_set || c.config.contains("katok_epsilon");
  bool have_ellipsoid =
      (p_set && q_set) ||
      (c.config.contains("ellipsoid_p") && c.config.contains("ellipsoid_q"));

  json j;
  bool all_ok = true;
  double factor2 = geom::gmap_pullback_check(samples, c.seed);
  j["pullback_factor2_dev"] = factor2;
  all_ok = all_ok && factor2 < 1e-5;

  fin::MetricPtr metric;
  lift::EllipsoidParams par{0.5, 0.5};
  if (have_katok) {
    metric = fin::make_katok(katok_eps);
    par = lift::katok_ellipsoid_params(katok_eps);
  } else if (have_ellipsoid) {
    par = {ep, eq};
    double sum = ep + eq;
    metric = fin::make_katok((ep - eq) / sum);  // normalized to p+q=1
  } else {
    metric = c.metric();
  }
  j["metric"] = metric->descriptor();
  j["ellipsoid"] = {{"p", par.p}, {"q", par.q},
                    {"resonant", par.resonant()}};

  auto h = lift::g_to_h(lift::g_from_metric(metric));
  auto rt = lift::round_trip_check(h, 256, c.seed);
  j["round_trip_h_dev"] = rt.h_dev;
  j["round_trip_g_dev"] = rt.g_dev;
  all_ok = all_ok && rt.h_dev < 1e-8 && rt.g_dev < 1e-8;

  double conj = lift::lift_conjugacy_check(metric, samples, c.seed);
  j["conjugacy_discrepancy"] = conj;
  all_ok = all_ok && conj < 1e-5;

  if (metric->name() == "katok") {
    double eps_val = metric->descriptor().at("epsilon").get<double>();
    auto pq = lift::katok_ellipsoid_params(eps_val);
    Rng rng(c.seed);
    double worst = 0;
    for (int i = 0; i < samples; ++i) {
      C2 w = rng.unit_c2();
      geom::SU2Element a{w.w1, w.w2};
      worst = std::max(worst, std::abs(h(a) - lift::ellipsoid_h(pq, a)));
    }
    j["katok_vs_ellipsoid_h_dev"] = worst;
    all_ok = all_ok && worst < 1e-9;
  }
  auto star = lift::starshaped_convexity_check(lift::g_from_metric(metric));
  j["starshaped"] = star.starshaped;
  j["fibrewise_convex"] = star.fibrewise_convex;
  j["pass"] = all_ok;

  fs::path dir = c.out_dir();
  report::write_json(dir / "lift.json", j);
  std::printf("lift: p=%s q=%s factor2_dev=%s conjugacy=%s -> %s [%s]\n",
              report::format_number(par.p).c_str(),
              report::format_number(par.q).c_str(),
              report::format_number(factor2).c_str(),
              report::format_number(conj).c_str(), dir.string().c_str(),
              all_ok ? "ok" : "CHECK FAILED");
  return all_ok ? 0 : 1;
}

int run_cylinder(Common& c, int n, double rot, std::string coeffs,
                 std::string tube_name, double r_min, int rings, int angular,
                 const std::array<bool, 7>& set) {
  load_config(c, "cylinder");
  n = cfg_or(c, "n", n, set[0]);
  rot = cfg_or(c, "c", rot, set[1]);
  coeffs = cfg_or(c, "germ_coeffs", coeffs, set[2]);
  tube_name = cfg_or(c, "tube", tube_name, set[3]);
  r_min = cfg_or(c, "r_min", r_min, set[4]);
  rings = cfg_or(c, "rings", rings, set[5]);
  angular = cfg_or(c, "angular", angular, set[6]);

  cyl::SectorGerm germ;
  germ.charge = n;
  germ.rotation = rot;
  if (coeffs.empty()) {
    germ.coefficients.assign(n + 2, Cx(0, 0));
    germ.coefficients[n + 1] = Cx(1, 0);  // f(z) = z^{n+1}
  } else {
    std::stringstream ss(coeffs);
    std::string item;
    while (std::getline(ss, item, ','))
      germ.coefficients.push_back(Cx(std::stod(item), 0.0));
  }
  cyl::ModelTube tube;
  if (tube_name == "flat")
    tube = cyl::flat_tube();
  else if (tube_name == "linear")
    tube = cyl::linear_tube();
  else if (tube_name == "half")
    tube = cyl::ModelTube{[](double s) { return 0.5 * s; }, 2.0};
  else
    throw ConfigError("unknown tube '" + tube_name + "' (flat|linear|half)");

  cyl::GridSpec grid;
  grid.r_min = r_min;
  grid.rings_per_octave = rings;
  grid.n_angular = angular;
  auto sample = cyl::build_cylinder(germ, tube, grid);
  auto residuals = cyl::cr_residual(sample);
  std::vector<double> radii;
  for (double r = sample.r_outer; r >= r_min * (1 - 1e-12); r *= 0.5)
    radii.push_back(r);
  auto charge = cyl::charge_integral(sample, radii);
  double energy = cyl::energy_estimate(sample, cyl::sigmoid_cutoff_family(20));

  fs::path dir = c.out_dir();
  {
    std::ofstream os(dir / "cylinder_nodes.csv");
    cyl::write_nodes_csv(os, sample);
  }
  report::Csv ctab;
  ctab.header = {"radius", "charge_integral"};
  report::Series series{"circle integral", {}};
  for (std::size_t i = 0; i < radii.size(); ++i) {
    ctab.add_row({radii[i], charge[i]});
    series.points.push_back({std::log10(radii[i]), charge[i]});
  }
  report::write_csv(dir / "charge.csv", ctab);
  report::write_svg(dir / "charge_vs_logr.svg",
                    report::svg_lineplot({series}, "log10 radius",
                                         "circle integral"));
  report::write_json(dir / "cylinder.json",
                     cyl::cylinder_diagnostics(sample, residuals, radii, charge,
                                               energy));
  std::printf("cylinder: n=%d boundary=%s cr=(%s, %s) charge_min_r=%s -> %s\n",
              n, report::format_number(sample.boundary_residual).c_str(),
              report::format_number(residuals.transverse).c_str(),
              report::format_number(residuals.axial).c_str(),
              report::format_number(charge.back()).c_str(),
              dir.string().c_str());
  return 0;
}

int run_reproduce(Common& c) {
  load_config(c, "reproduce-paper");
  auto results = accept::run_all();
  bool all = true;
  json j = json::array();
  for (const auto& r : results) {
    std::printf("[%s] %d. %s  (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.number,
                r.name.c_str(), r.seconds);
    if (!r.details.empty()) std::printf("       %s\n", r.details.c_str());
    j.push_back({{"number", r.number},
                 {"name", r.name},
                 {"pass", r.pass},
                 {"seconds", r.seconds},
                 {"details", r.details}});
    all = all && r.pass;
  }
  fs::path dir = c.out_dir();
  report::write_json(dir / "reproduce.json", j);
  std::printf("%s\n", all ? "ALL CHECKS PASS" : "CHECK FAILURES PRESENT");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Finsler geodesic dynamics on the two-sphere and its contact lift: "
      "flows, Conley-Zehnder spectra, convexity certification, lifting "
      "checks, and holomorphic-cylinder construction"};
  app.require_subcommand(1);

  Common common;

  auto* geod = app.add_subcommand("geodesics", "closed-geodesic search tables");
  add_common(geod, common);
  double cap = 10.0;
  int grid = 64;
  bool dump = false;
  auto* cap_opt = geod->add_option("--cap", cap, "length cap");
  auto* grid_opt = geod->add_option("--grid", grid, "shooting directions");
  auto* dump_opt = geod->add_flag("--dump-trajectories", dump, "CSV per orbit");

  auto* loops = app.add_subcommand("loops", "shortest geodesic loop search");
  add_common(loops, common);
  int loop_grid = 32;
  double loop_cap = kTwoPi + 0.5;
  auto* lg_opt = loops->add_option("--grid", loop_grid, "latitude grid");
  auto* lc_opt = loops->add_option("--cap", loop_cap, "loop length cap");

  auto* czc = app.add_subcommand("cz", "spectrum and index of a named orbit");
  add_common(czc, common);
  std::string orbit_name = "equator";
  int iterates = 1, cz_grid = 512, kmax = 4;
  auto* on_opt = czc->add_option("--orbit", orbit_name,
                                 "equator|short-equator|long-equator|great-circle|meridian");
  auto* it_opt = czc->add_option("--iterates", iterates, "iterate count");
  auto* cg_opt = czc->add_option("--grid", cz_grid, "spectral grid N");
  auto* km_opt = czc->add_option("--kmax", kmax, "largest winding in the window");

  auto* conv = app.add_subcommand("convexity", "dynamical convexity report");
  add_common(conv, common);
  double delta = 1.0, conv_cap = 10.0;
  int conv_grid = 1024;
  std::string sweep;
  auto* de_opt = conv->add_option("--delta", delta, "curvature lower bound");
  auto* cc_opt = conv->add_option("--cap", conv_cap, "orbit length cap");
  auto* cvg_opt = conv->add_option("--grid", conv_grid, "spectral grid N");
  auto* sw_opt =
      conv->add_option("--sweep", sweep, "katok epsilon sweep lo:hi:step");

  auto* liftc = app.add_subcommand("lift", "contact-lift correspondence checks");
  add_common(liftc, common);
  double katok_eps = 0.0, ep = 0.5, eq = 0.5;
  int samples = 100;
  auto* ke_opt = liftc->add_option("--katok-epsilon", katok_eps, "lift this katok metric");
  auto* p_opt = liftc->add_option("--ellipsoid-p", ep, "ellipsoid p");
  auto* q_opt = liftc->add_option("--ellipsoid-q", eq, "ellipsoid q");
  auto* ns_opt = liftc->add_option("--samples", samples, "sample count");

  auto* cylc = app.add_subcommand("cylinder", "holomorphic cylinder build");
  add_common(cylc, common);
  int cyl_n = 2;
  double cyl_c = (std::sqrt(5.0) - 1.0) / 2.0;
  std::string coeffs, tube_name = "linear";
  double r_min = 1e-3;
  int rings = 8, angular = 256;
  auto* n_o = cylc->add_option("--n", cyl_n, "charge");
  auto* c_o = cylc->add_option("--c", cyl_c, "rotation parameter in (0,1)");
  auto* gc_o = cylc->add_option("--germ-coeffs", coeffs,
                                "comma-separated real coefficients of f");
  auto* tb_o = cylc->add_option("--tube", tube_name, "flat|linear|half");
  auto* rm_o = cylc->add_option("--r-min", r_min, "innermost radius");
  auto* rg_o = cylc->add_option("--rings", rings, "rings per octave");
  auto* an_o = cylc->add_option("--angular", angular, "angular nodes");

  auto* repro = app.add_subcommand("reproduce-paper",
                                   "run every reproduction check, table out");
  add_common(repro, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (geod->parsed())
      return run_geodesics(common, cap, grid, dump, static_cast<bool>(*cap_opt),
                           static_cast<bool>(*grid_opt),
                           static_cast<bool>(*dump_opt));
    if (loops->parsed())
      return run_loops(common, loop_grid, loop_cap, static_cast<bool>(*lg_opt),
                       static_cast<bool>(*lc_opt));
    if (czc->parsed())
      return run_cz(common, orbit_name, iterates, cz_grid, kmax,
                    static_cast<bool>(*on_opt), static_cast<bool>(*it_opt),
                    static_cast<bool>(*cg_opt), static_cast<bool>(*km_opt));
    if (conv->parsed())
      return run_convexity(common, delta, conv_cap, conv_grid, sweep,
                           static_cast<bool>(*de_opt), static_cast<bool>(*cc_opt),
                           static_cast<bool>(*cvg_opt),
                           static_cast<bool>(*sw_opt));
    if (liftc->parsed())
      return run_lift(common, katok_eps, ep, eq, samples,
                      static_cast<bool>(*ke_opt), static_cast<bool>(*p_opt),
                      static_cast<bool>(*q_opt), static_cast<bool>(*ns_opt));
    if (cylc->parsed())
      return run_cylinder(
          common, cyl_n, cyl_c, coeffs, tube_name, r_min, rings, angular,
          {static_cast<bool>(*n_o), static_cast<bool>(*c_o),
           static_cast<bool>(*gc_o), static_cast<bool>(*tb_o),
           static_cast<bool>(*rm_o), static_cast<bool>(*rg_o),
           static_cast<bool>(*an_o)});
    if (repro->parsed()) return run_reproduce(common);
  } catch (const ConfigError& e) {
    json err = {{"error", e.what()}, {"code", 2}};
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    json err = {{"error", e.what()}, {"code", 1}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 2;
}
