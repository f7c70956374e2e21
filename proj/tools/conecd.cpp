// conecd: command-line front end.
//
// Exit codes: 0 pass, 1 check failure, 2 usage or input error.
// Every command prints one JSON document {command, config, result} to stdout
// (or --out) with the fully resolved configuration.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "conecd/conecd.hpp"

using namespace conecd;

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct UsageError : Error {
  using Error::Error;
};

/// Flag values fall back to the --config file, then to defaults.
class Settings {
 public:
  explicit Settings(CLI::App* app) : app_(app) {}

  std::string config_path;
  json config = json::object();
  json resolved = json::object();

  void load_config() {
    if (!config_path.empty()) {
      config = parse_json_file(config_path);
      if (!config.is_object()) throw UsageError("--config: expected a JSON object");
    }
  }

  template <class T>
  void resolve(const std::string& key, T& value) {
    const auto* opt = app_->get_option_no_throw("--" + key);
    if ((!opt || opt->count() == 0) && config.contains(key)) {
      try {
        value = config.at(key).get<T>();
      } catch (const json::exception& e) {
        throw UsageError("config key '" + key + "': " + e.what());
      }
    }
    resolved[key] = value;
  }

  template <class T>
  void resolve(const std::string& key, std::optional<T>& value) {
    const auto* opt = app_->get_option_no_throw("--" + key);
    if ((!opt || opt->count() == 0) && config.contains(key)) {
      try {
        value = config.at(key).get<T>();
      } catch (const json::exception& e) {
        throw UsageError("config key '" + key + "': " + e.what());
      }
    }
    resolved[key] = value ? json(*value) : json(nullptr);
  }

  template <class T>
  T require(const std::string& key, std::optional<T>& value) {
    resolve(key, value);
    if (!value) throw UsageError("missing required option --" + key);
    return *value;
  }

 private:
  CLI::App* app_;
};

FiniteMetricMeasureSpace base_from_ref(const std::string& ref) {
  const std::string prefix = "circle:";
  if (ref.rfind(prefix, 0) == 0) {
    const auto count = std::stoll(ref.substr(prefix.size()));
    if (count < 2) throw UsageError("--base circle:<count> needs count >= 2");
    return circle_space(count);
  }
  return load_space(ref);
}

struct GridArgs {
  std::string grid;
  std::string kind = "euclidean";
  std::string base = "circle:64";
  std::int64_t cells = 32;
  double rmax = 2.0;
  double cone_N = 1.0;

  void add(CLI::App* cmd, const char* n_flag = "--cone-N") {
    cmd->add_option("--grid", grid, "cone grid file (from build-cone)");
    cmd->add_option("--kind", kind, "euclidean | spherical");
    cmd->add_option("--base", base, "circle:<count> or a metric measure space JSON file");
    cmd->add_option("--cells", cells, "radial cells");
    cmd->add_option("--rmax", rmax, "outer radius (euclidean)");
    cmd->add_option(n_flag, cone_N, "measure exponent of the cone");
  }

  void resolve(Settings& s, const std::string& n_key = "cone-N") {
    s.resolve("grid", grid);
    s.resolve("kind", kind);
    s.resolve("base", base);
    s.resolve("cells", cells);
    s.resolve("rmax", rmax);
    s.resolve(n_key, cone_N);
  }

  ConeGrid build() const {
    if (!grid.empty()) return cone_grid_from_json(parse_json_file(grid));
    if (cells < 0) throw UsageError("--cells must be >= 0");
    const auto k = parse_cone_kind(kind);
    const auto b = base_from_ref(base);
    return k == ConeKind::euclidean ? build_eucl_cone(b, uniform_radial_grid(cells, rmax), cone_N, base)
                                    : build_sph_cone(b, spherical_radial_grid(cells), cone_N, base);
  }
};

ProbabilityVector load_measure(const std::string& path, const FiniteMetricMeasureSpace& space) {
  const json j = parse_json_file(path);
  const json& arr = j.is_object() ? detail::field(j, "mass") : j;
  if (!arr.is_array()) throw ParseError(path, "expected an array of masses or {\"mass\": [...]}");
  std::vector<double> m;
  for (std::size_t k = 0; k < arr.size(); ++k) m.push_back(detail::number_at(arr[k], "mass[" + std::to_string(k) + "]"));
  if (static_cast<Index>(m.size()) != space.size())
    throw ValidationError(path + ": measure has " + std::to_string(m.size()) + " entries, space has " +
                          std::to_string(space.size()));
  return make_probability(space, std::move(m));
}

void emit(const std::string& out, const std::string& command, const Settings& s, json result) {
  json doc = {{"command", command}, {"config", s.resolved}, {"result", std::move(result)}};
  const std::string text = doc.dump(1) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_text_file(out, text);
}

json grid_summary(const ConeGrid& g) {
  return {{"kind", to_string(g.kind)},
          {"N", g.N},
          {"base_ref", g.base_ref},
          {"points", g.space.size()},
          {"radial_cells", g.radial_grid.size()},
          {"total_mass", g.space.total_mass()},
          {"max_spacing", g.max_spacing()},
          {"base_distance_clamped", g.base_distance_clamped}};
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(what + ": cannot parse '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature-dimension checks on discretized cones"};
  app.require_subcommand(1);
  std::string out;
  std::uint64_t seed = 0;
  int jobs = 1;

  std::vector<std::unique_ptr<Settings>> settings;
  auto make = [&](const char* name, const char* help) {
    auto* c = app.add_subcommand(name, help);
    auto* s = settings.emplace_back(std::make_unique<Settings>(c)).get();
    c->add_option("--config", s->config_path, "JSON file with option values");
    c->add_option("--out", out, "write the JSON report here instead of stdout");
    c->add_option("--seed", seed, "random seed");
    c->add_option("--jobs", jobs, "worker threads");
    return std::make_pair(c, s);
  };

  // build-cone
  auto [build_cmd, build_s] = make("build-cone", "build a cone grid and write it as JSON");
  GridArgs build_grid;
  std::optional<double> build_N;
  std::string build_file;
  build_cmd->add_option("--kind", build_grid.kind, "euclidean | spherical");
  build_cmd->add_option("--base", build_grid.base, "circle:<count> or a space JSON file");
  build_cmd->add_option("--cells", build_grid.cells, "radial cells");
  build_cmd->add_option("--rmax", build_grid.rmax, "outer radius (euclidean)");
  build_cmd->add_option("--N", build_N, "measure exponent");
  build_cmd->add_option("--grid-out", build_file, "grid file to write");

  // validate
  auto [val_cmd, val_s] = make("validate", "check metric measure space axioms");
  std::string val_space, val_csv;
  bool val_no_triangle = false;
  val_cmd->add_option("--space", val_space, "space JSON file");
  val_cmd->add_option("--csv", val_csv, "distance matrix CSV file");
  val_cmd->add_flag("--no-triangle", val_no_triangle, "skip the triangle inequality");

  // wasserstein
  auto [w_cmd, w_s] = make("wasserstein", "optimal coupling and W2 distance");
  GridArgs w_grid;
  w_grid.add(w_cmd);
  std::string w_space, w_mu0, w_mu1, w_preset = "generic-blobs";
  std::int64_t w_trial = 0;
  w_cmd->add_option("--space", w_space, "space JSON file (instead of a grid)");
  w_cmd->add_option("--mu0", w_mu0, "source measure file");
  w_cmd->add_option("--mu1", w_mu1, "target measure file");
  w_cmd->add_option("--preset", w_preset, "generic-blobs | antipodal-dirac | near-antipodal");
  w_cmd->add_option("--trial", w_trial, "trial index for generic-blobs");

  // cd-check
  auto [cd_cmd, cd_s] = make("cd-check", "check the CD(K,N) inequality along geodesic plans");
  GridArgs cd_grid;
  cd_grid.add(cd_cmd);
  std::optional<double> cd_K, cd_N, cd_eps, cd_plan_tol;
  std::int64_t cd_trials = 20;
  std::string cd_t = "0.25,0.5,0.75", cd_nprime, cd_preset = "generic-blobs", cd_csv;
  cd_cmd->add_option("--K", cd_K, "lower Ricci bound");
  cd_cmd->add_option("--N", cd_N, "dimension bound");
  cd_cmd->add_option("--trials", cd_trials, "random measure pairs");
  cd_cmd->add_option("--t", cd_t, "comma-separated fractions in (0,1)");
  cd_cmd->add_option("--nprime", cd_nprime, "comma-separated N' values (default N,N+1,2N)");
  cd_cmd->add_option("--eps", cd_eps, "deficit tolerance (default 5 x max grid spacing)");
  cd_cmd->add_option("--plan-tol", cd_plan_tol, "midpoint slack tolerance (default 2 x max grid spacing)");
  cd_cmd->add_option("--preset", cd_preset, "generic-blobs | near-antipodal");
  cd_cmd->add_option("--csv", cd_csv, "CSV summary file");

  // apex-scan
  auto [ap_cmd, ap_s] = make("apex-scan", "mass of geodesic plans routed through apexes or poles");
  GridArgs ap_grid;
  ap_grid.add(ap_cmd);
  std::string ap_preset = "generic-blobs", ap_mu0, ap_mu1;
  double ap_s_frac = 0.5, ap_eps = 1e-9;
  std::int64_t ap_trials = 1;
  std::optional<double> ap_plan_tol;
  ap_cmd->add_option("--preset", ap_preset, "generic-blobs | antipodal-dirac");
  ap_cmd->add_option("--mu0", ap_mu0, "source measure file (overrides the preset)");
  ap_cmd->add_option("--mu1", ap_mu1, "target measure file");
  ap_cmd->add_option("--s", ap_s_frac, "fraction of the intermediate point");
  ap_cmd->add_option("--eps", ap_eps, "radius of the apex ball");
  ap_cmd->add_option("--trials", ap_trials, "generic pairs to scan");
  ap_cmd->add_option("--plan-tol", ap_plan_tol, "midpoint slack tolerance (default 2 x max grid spacing)");

  // spectral
  auto [sp_cmd, sp_s] = make("spectral", "Lichnerowicz spectral gap check on a spherical cone");
  GridArgs sp_grid;
  sp_grid.kind = "spherical";
  sp_grid.add(sp_cmd);
  std::optional<int> sp_n;
  std::optional<double> sp_bandwidth;
  double sp_tol = 0.15;
  bool sp_uncalibrated = false;
  sp_cmd->add_option("--n", sp_n, "claimed base dimension (bound n+1)");
  sp_cmd->add_option("--bandwidth", sp_bandwidth, "kernel bandwidth (default 4 x max grid spacing)");
  sp_cmd->add_option("--tol", sp_tol, "relative tolerance");
  sp_cmd->add_flag("--uncalibrated", sp_uncalibrated, "skip the circle calibration of the Laplacian");

  // coeffs
  auto [co_cmd, co_s] = make("coeffs", "table of the distortion coefficients");
  std::optional<double> co_K, co_N;
  double co_t = 0.5, co_theta_max = 3.0;
  std::int64_t co_steps = 10;
  co_cmd->add_option("--K", co_K, "curvature parameter");
  co_cmd->add_option("--N", co_N, "dimension parameter");
  co_cmd->add_option("--t", co_t, "fraction");
  co_cmd->add_option("--theta-max", co_theta_max, "largest theta");
  co_cmd->add_option("--steps", co_steps, "theta steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  auto common = [&](Settings& s) {
    s.load_config();
    s.resolve("out", out);
    s.resolved.erase("out");
    s.resolve("seed", seed);
    s.resolve("jobs", jobs);
    if (jobs < 1) throw UsageError("--jobs must be >= 1");
  };

  try {
    if (*build_cmd) {
      auto& s = *build_s;
      common(s);
      s.resolve("kind", build_grid.kind);
      s.resolve("base", build_grid.base);
      s.resolve("cells", build_grid.cells);
      s.resolve("rmax", build_grid.rmax);
      build_grid.cone_N = s.require("N", build_N);
      s.resolve("grid-out", build_file);
      const auto g = build_grid.build();
      const auto report = validate(g.space, {.check_triangle = false});
      if (!build_file.empty()) write_text_file(build_file, to_json(g).dump() + "\n");
      json res = grid_summary(g);
      res["validation"] = report.ok() ? "ok" : report.summary();
      emit(out, "build-cone", s, res);
      return report.ok() ? kPass : kCheckFailed;
    }

    if (*val_cmd) {
      auto& s = *val_s;
      common(s);
      s.resolve("space", val_space);
      s.resolve("csv", val_csv);
      s.resolve("no-triangle", val_no_triangle);
      if (val_space.empty() == val_csv.empty()) throw UsageError("give exactly one of --space and --csv");
      FiniteMetricMeasureSpace space;
      if (!val_space.empty()) {
        space = space_from_json(parse_json_file(val_space), false);
      } else {
        space = load_space_csv(val_csv);
      }
      const auto report = validate(space, {.check_triangle = !val_no_triangle});
      json viol = json::array();
      for (const auto& v : report.violations)
        viol.push_back({{"kind", to_string(v.kind)}, {"i", v.i}, {"j", v.j}, {"k", v.k}, {"amount", v.amount}});
      emit(out, "validate", s, {{"points", space.size()}, {"valid", report.ok()}, {"violations", viol}});
      return report.ok() ? kPass : kCheckFailed;
    }

    if (*w_cmd) {
      auto& s = *w_s;
      common(s);
      w_grid.resolve(s);
      s.resolve("space", w_space);
      s.resolve("mu0", w_mu0);
      s.resolve("mu1", w_mu1);
      s.resolve("preset", w_preset);
      s.resolve("trial", w_trial);
      std::optional<ConeGrid> grid;
      FiniteMetricMeasureSpace space;
      if (!w_space.empty()) {
        space = load_space(w_space);
      } else {
        grid = w_grid.build();
        space = grid->space;
      }
      ProbabilityVector mu0, mu1;
      if (!w_mu0.empty() || !w_mu1.empty()) {
        if (w_mu0.empty() || w_mu1.empty()) throw UsageError("--mu0 and --mu1 go together");
        mu0 = load_measure(w_mu0, space);
        mu1 = load_measure(w_mu1, space);
      } else {
        if (!grid) throw UsageError("presets need a cone grid");
        if (w_preset == "generic-blobs") {
          std::tie(mu0, mu1) = generic_pair(*grid, seed, static_cast<std::uint64_t>(w_trial));
        } else if (w_preset == "antipodal-dirac") {
          auto d = antipodal_dirac(*grid);
          mu0 = d.mu0;
          mu1 = d.mu1;
        } else if (w_preset == "near-antipodal") {
          std::tie(mu0, mu1) = near_antipodal(*grid);
        } else {
          throw UsageError("unknown preset '" + w_preset + "'");
        }
      }
      const auto q = solve_ot(space, mu0, mu1);
      emit(out, "wasserstein", s, to_json(q));
      return kPass;
    }

    if (*cd_cmd) {
      auto& s = *cd_s;
      common(s);
      cd_grid.resolve(s);
      const double K = s.require("K", cd_K);
      const double N = s.require("N", cd_N);
      s.resolve("trials", cd_trials);
      s.resolve("t", cd_t);
      s.resolve("nprime", cd_nprime);
      s.resolve("eps", cd_eps);
      s.resolve("plan-tol", cd_plan_tol);
      s.resolve("preset", cd_preset);
      s.resolve("csv", cd_csv);
      if (cd_trials < 0) throw UsageError("--trials must be >= 0");
      if (!(N >= 1.0)) throw UsageError("--N must be >= 1");
      CdVerifyOptions opt;
      opt.t_list = parse_list(cd_t, "--t");
      for (double t : opt.t_list)
        if (!(t > 0.0 && t < 1.0)) throw UsageError("--t values must lie in (0,1)");
      if (!cd_nprime.empty()) opt.nprimes = parse_list(cd_nprime, "--nprime");
      for (double np : opt.nprimes)
        if (np < N) throw UsageError("--nprime values must be >= N");
      opt.eps = cd_eps.value_or(0.0);
      opt.plan_tol = cd_plan_tol.value_or(0.0);
      opt.seed = seed;
      opt.jobs = jobs;
      const auto grid = cd_grid.build();
      CdVerifySummary summary;
      if (cd_preset == "generic-blobs") {
        summary = cd_verify(grid, K, N, cd_trials, opt);
      } else if (cd_preset == "near-antipodal") {
        summary = make_summary(grid, K, N, cd_trials, opt);
        if (cd_trials > 0) {
          auto [mu0, mu1] = near_antipodal(grid);
          add_reports(summary, cd_check_pair(grid.space, mu0, mu1, K, summary.nprimes, summary.t_list, summary.eps,
                                             summary.plan_tol, 0));
          summary.trials = 1;
        }
      } else {
        throw UsageError("unknown preset '" + cd_preset + "' (cd-check needs absolutely continuous measures)");
      }
      json res = to_json(summary);
      res["grid"] = grid_summary(grid);
      res["bonnet_myers"] = bonnet_myers_check(grid.space, K, N);
      emit(out, "cd-check", s, res);
      if (!cd_csv.empty()) write_text_file(cd_csv, to_csv(summary));
      std::cerr << "cd-check: " << summary.passed << " pass, " << summary.failed << " fail, " << summary.infinite
                << " infinite-rhs; min deficit " << summary.min_deficit << ", max slack " << summary.max_slack
                << ", eps " << summary.eps << "\n";
      if (summary.first_failure >= 0) {
        const auto& r = summary.reports[static_cast<std::size_t>(summary.first_failure)];
        std::cerr << "cd-check: first violation in trial " << r.trial << " at t=" << r.t << ", N'=" << r.Nprime
                  << (r.reduced ? " (reduced)" : "") << ", deficit " << r.deficit << "\n";
      }
      return summary.all_pass() ? kPass : kCheckFailed;
    }

    if (*ap_cmd) {
      auto& s = *ap_s;
      common(s);
      ap_grid.resolve(s);
      s.resolve("preset", ap_preset);
      s.resolve("mu0", ap_mu0);
      s.resolve("mu1", ap_mu1);
      s.resolve("s", ap_s_frac);
      s.resolve("eps", ap_eps);
      s.resolve("trials", ap_trials);
      s.resolve("plan-tol", ap_plan_tol);
      if (!(ap_s_frac > 0.0 && ap_s_frac < 1.0)) throw UsageError("--s must lie in (0,1)");
      const auto grid = ap_grid.build();
      const double tol = ap_plan_tol.value_or(2.0 * grid.max_spacing());
      json scans = json::array();
      bool ok = true;
      double apex_mass = 0.0;
      auto scan = [&](const ProbabilityVector& mu0, const ProbabilityVector& mu1, bool expect_zero) {
        const auto q = solve_ot(grid.space, mu0, mu1);
        const auto plan = build_geodesic_plan(grid.space, q, ap_s_frac, tol);
        const auto rep = apex_scan(plan, grid, ap_eps);
        apex_mass = std::max(apex_mass, rep.apex_mass);
        if (!rep.pattern_ok() || (expect_zero && rep.apex_mass != 0.0)) ok = false;
        json j = to_json(rep);
        j["max_slack"] = plan.max_slack;
        scans.push_back(std::move(j));
      };
      if (!ap_mu0.empty() || !ap_mu1.empty()) {
        if (ap_mu0.empty() || ap_mu1.empty()) throw UsageError("--mu0 and --mu1 go together");
        scan(load_measure(ap_mu0, grid.space), load_measure(ap_mu1, grid.space), false);
      } else if (ap_preset == "generic-blobs") {
        if (ap_trials < 0) throw UsageError("--trials must be >= 0");
        for (std::int64_t k = 0; k < ap_trials; ++k) {
          auto [mu0, mu1] = generic_pair(grid, seed, static_cast<std::uint64_t>(k));
          scan(mu0, mu1, true);
        }
      } else if (ap_preset == "antipodal-dirac") {
        const auto d = antipodal_dirac(grid, ap_s_frac);
        scan(d.mu0, d.mu1, false);
      } else {
        throw UsageError("unknown preset '" + ap_preset + "'");
      }
      emit(out, "apex-scan", s,
           {{"grid", grid_summary(grid)}, {"max_apex_mass", apex_mass}, {"verdict", ok ? "PASS" : "FAIL"},
            {"scans", scans}});
      std::cerr << "apex-scan: max apex mass " << apex_mass << ", " << (ok ? "PASS" : "FAIL") << "\n";
      return ok ? kPass : kCheckFailed;
    }

    if (*sp_cmd) {
      auto& s = *sp_s;
      common(s);
      sp_grid.resolve(s);
      s.resolve("n", sp_n);
      s.resolve("bandwidth", sp_bandwidth);
      s.resolve("tol", sp_tol);
      s.resolve("uncalibrated", sp_uncalibrated);
      const auto grid = sp_grid.build();
      const int n = sp_n.value_or(static_cast<int>(std::lround(grid.N)));
      const double h = sp_bandwidth.value_or(default_bandwidth(grid));
      s.resolved["n"] = n;
      s.resolved["bandwidth"] = h;
      GapReport rep;
      try {
        rep = lichnerowicz_check(grid, n, h, sp_tol, !sp_uncalibrated);
      } catch (const ValidationError& e) {
        std::cerr << "spectral: " << e.what() << "\n";
        return kUsage;
      }
      emit(out, "spectral", s, to_json(rep));
      std::cerr << "spectral: gap " << rep.gap << ", bound " << rep.bound << ", " << (rep.pass ? "PASS" : "FAIL")
                << "\n";
      return rep.pass ? kPass : kCheckFailed;
    }

    if (*co_cmd) {
      auto& s = *co_s;
      common(s);
      const double K = s.require("K", co_K);
      const double N = s.require("N", co_N);
      s.resolve("t", co_t);
      s.resolve("theta-max", co_theta_max);
      s.resolve("steps", co_steps);
      if (co_steps < 1) throw UsageError("--steps must be >= 1");
      json rows = json::array();
      for (std::int64_t k = 0; k <= co_steps; ++k) {
        const double theta = co_theta_max * static_cast<double>(k) / static_cast<double>(co_steps);
        const DistortionParams p{K, N, co_t, theta};
        auto ext = [](const ExtendedReal& x) { return x.is_infinite() ? json("inf") : json(x.value()); };
        rows.push_back({{"theta", theta},
                        {"S", N > 0 ? json(s_fun(K / N, theta)) : json(nullptr)},
                        {"sigma", ext(sigma(p))},
                        {"tau", N >= 1 ? ext(tau(p)) : json(nullptr)}});
      }
      emit(out, "coeffs", s, rows);
      return kPass;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
