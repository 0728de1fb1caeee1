#pragma once

// Command-line front end: flag parsing, dispatch, report/plot emission, batch mode.
// Exit codes: 0 success, 2 no normalized solution, 3 solver non-convergence,
// 4 invalid parameters or usage. Filesystem trouble exits 1.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "annulus_nls/asymptotics.hpp"
#include "annulus_nls/dynamics.hpp"
#include "annulus_nls/errors.hpp"
#include "annulus_nls/io.hpp"
#include "annulus_nls/mass_curve.hpp"
#include "annulus_nls/problem.hpp"
#include "annulus_nls/radial_bvp.hpp"
#include "annulus_nls/soliton.hpp"
#include "annulus_nls/svg.hpp"

namespace annulus_nls::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNoSolution = 2;
inline constexpr int kExitSolverFailure = 3;
inline constexpr int kExitBadParams = 4;

struct RunConfig {
  std::string command;
  int N = 2;
  double p = 4.0;
  std::optional<double> lambda;
  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
  int points = 0;  // 0 picks the per-command default
  std::optional<double> mass;
  double eps = 0.0;
  double T = 50.0;
  std::optional<double> dt;
  unsigned seed = 1;
  std::string mode = "peak-bump";
  std::optional<double> tol;
  std::string out;  // output directory; empty means stdout only
  bool svg = false;
};

namespace detail {

inline std::string fixed7(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.7f", x);
  return buf;
}

inline io::Json solver_tolerances() {
  io::Json t;
  t["ivp_tol"] = 1e-12;
  t["eigenvalue_tol"] = 1e-10;
  t["shooting_root_tol"] = 1e-10;
  t["newton_tol_scale"] = 1e-12;
  t["profile_residual_scale"] = 1e-8;
  return t;
}

inline void maybe_write_report(const RunConfig& cfg, const std::string& command,
                               const io::Json& echo, const io::Json& results) {
  if (cfg.out.empty()) return;
  const std::filesystem::path dir(cfg.out);
  io::write_json(dir / "report.json",
                 io::report_document(command, echo, solver_tolerances(), results));
}

inline double require_above_bifurcation(int N, double lambda, const char* command) {
  const double lam1 = bvp::first_dirichlet_eigenvalue(N);
  if (!(lambda > -lam1))
    throw InvalidParameterError(std::string(command) + ": lambda must exceed -lambda_1 = " +
                                io::fmt17(-lam1));
  return lam1;
}

}  // namespace detail

// ---- per-command executors ----

inline int run_eigen(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.N < 2) throw InvalidParameterError("eigen: N must be >= 2");
  const double lam1 = bvp::first_dirichlet_eigenvalue(cfg.N);
  out << detail::fixed7(lam1) << "\n";
  io::Json echo;
  echo["command"] = "eigen";
  echo["N"] = cfg.N;
  echo["out"] = cfg.out;
  io::Json res;
  res["N"] = cfg.N;
  res["lambda1"] = lam1;
  detail::maybe_write_report(cfg, "eigen", echo, res);
  return kExitOk;
}

inline int run_ground(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (!cfg.lambda) throw InvalidParameterError("ground: --lambda is required");
  const ProblemSpec spec{cfg.N, cfg.p, *cfg.lambda};
  spec.validate();
  detail::require_above_bifurcation(cfg.N, spec.lambda, "ground");
  const bvp::Profile prof = bvp::ground_state(spec);
  const double d = masscurve::mass(prof);
  out << "lambda=" << io::fmt17(spec.lambda) << " mass=" << io::fmt17(d)
      << " u_max=" << io::fmt17(prof.u_max) << " residual=" << io::fmt17(prof.residual_inf)
      << "\n";
  if (!cfg.out.empty()) {
    const std::filesystem::path dir(cfg.out);
    io::write_profile_csv(dir / "profile.csv", prof);
    io::Json echo;
    echo["command"] = "ground";
    echo["N"] = cfg.N;
    echo["p"] = cfg.p;
    echo["lambda"] = spec.lambda;
    echo["out"] = cfg.out;
    io::Json res = io::profile_summary(prof);
    res["profile_csv"] = "profile.csv";
    detail::maybe_write_report(cfg, "ground", echo, res);
  }
  return kExitOk;
}

namespace detail {

struct CurveRange {
  double lo = 0.0, hi = 0.0;
  int points = 0;
};

inline CurveRange resolve_curve_range(const RunConfig& cfg, const char* command) {
  const double lam1 = bvp::first_dirichlet_eigenvalue(cfg.N);
  CurveRange r;
  r.lo = cfg.lambda_min.value_or(-lam1 + 1e-3);
  r.hi = cfg.lambda_max.value_or(1e3);
  r.points = cfg.points > 0 ? cfg.points : 60;
  if (!(r.lo > -lam1))
    throw InvalidParameterError(std::string(command) + ": lambda-min must exceed -lambda_1 = " +
                                io::fmt17(-lam1));
  if (!(r.hi > r.lo))
    throw InvalidParameterError(std::string(command) + ": lambda-max must exceed lambda-min");
  return r;
}

}  // namespace detail

inline int run_curve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  ProblemSpec{cfg.N, cfg.p, 0.0}.validate();
  const auto range = detail::resolve_curve_range(cfg, "curve");
  const auto curve = masscurve::trace_curve(cfg.N, cfg.p, range.lo, range.hi, range.points);
  if (curve.points.empty()) {
    err << "curve: no point on the branch could be solved\n";
    return kExitSolverFailure;
  }
  out << "points=" << curve.points.size() << " gaps=" << curve.gaps.size()
      << " mass_max=" << io::fmt17([&] {
           double m = 0.0;
           for (const auto& pt : curve.points) m = std::max(m, pt.mass);
           return m;
         }())
      << "\n";
  if (!cfg.out.empty()) {
    const std::filesystem::path dir(cfg.out);
    io::write_curve_csv(dir / "curve.csv", curve);
    io::Json echo;
    echo["command"] = "curve";
    echo["N"] = cfg.N;
    echo["p"] = cfg.p;
    echo["lambda_min"] = range.lo;
    echo["lambda_max"] = range.hi;
    echo["points"] = range.points;
    echo["out"] = cfg.out;
    echo["svg"] = cfg.svg;
    io::Json res = io::curve_summary(curve);
    res["curve_csv"] = "curve.csv";
    detail::maybe_write_report(cfg, "curve", echo, res);
    if (cfg.svg) io::write_text_atomic(dir / "mass_curve.svg", svg::mass_curve_plot(curve));
  }
  return kExitOk;
}

inline int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (!cfg.mass) throw InvalidParameterError("solve: --mass is required");
  const double c = *cfg.mass;
  if (!(c > 0.0)) throw InvalidParameterError("solve: mass must be > 0");
  ProblemSpec{cfg.N, cfg.p, 0.0}.validate();
  const auto range = detail::resolve_curve_range(cfg, "solve");
  const auto curve = masscurve::trace_curve(cfg.N, cfg.p, range.lo, range.hi, range.points);

  masscurve::ExistenceReport rep;
  bool classified = true;
  try {
    rep = masscurve::classify(curve);
  } catch (const InvalidParameterError&) {
    classified = false;  // user narrowed the window below what classification needs
  }
  rep.solutions = masscurve::solve_mass(curve, c, cfg.tol.value_or(1e-8));

  out << "mass=" << io::fmt17(c) << " roots=" << rep.solutions.size();
  for (const auto& root : rep.solutions)
    out << " lambda=" << io::fmt17(root.lambda) << "(" << masscurve::to_string(root.stability)
        << ")";
  out << "\n";

  if (!cfg.out.empty()) {
    const std::filesystem::path dir(cfg.out);
    io::write_curve_csv(dir / "curve.csv", curve);
    io::Json echo;
    echo["command"] = "solve";
    echo["N"] = cfg.N;
    echo["p"] = cfg.p;
    echo["mass"] = c;
    echo["lambda_min"] = range.lo;
    echo["lambda_max"] = range.hi;
    echo["points"] = range.points;
    echo["tol"] = cfg.tol.value_or(1e-8);
    echo["out"] = cfg.out;
    echo["svg"] = cfg.svg;
    io::Json res = io::existence_summary(rep);
    if (!classified) res["regime"] = "unclassified";
    res["curve_csv"] = "curve.csv";
    for (std::size_t i = 0; i < rep.solutions.size(); ++i) {
      const std::string name = "solution_" + std::to_string(i) + ".csv";
      io::write_profile_csv(dir / name, rep.solutions[i].profile);
      res["solutions"][i]["profile_csv"] = name;
      res["solutions"][i]["residual_inf"] = rep.solutions[i].profile.residual_inf;
    }
    detail::maybe_write_report(cfg, "solve", echo, res);
    if (cfg.svg) io::write_text_atomic(dir / "mass_curve.svg", svg::mass_curve_plot(curve));
  }
  return rep.solutions.empty() ? kExitNoSolution : kExitOk;
}

inline int run_asymptotics(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  ProblemSpec{cfg.N, cfg.p, 0.0}.validate();
  const double lam_max = cfg.lambda_max.value_or(4000.0);
  const int rungs = cfg.points > 0 ? cfg.points : 4;
  if (rungs < 3) throw InvalidParameterError("asymptotics: need at least 3 ladder rungs");
  if (!(lam_max >= 1e3))
    throw InvalidParameterError("asymptotics: lambda-max must be at least 1e3");

  std::vector<double> ladder(rungs);
  for (int k = 0; k < rungs; ++k) ladder[k] = lam_max / std::pow(4.0, rungs - 1 - k);

  std::vector<bvp::Profile> profiles;
  profiles.push_back(bvp::ground_state(ProblemSpec{cfg.N, cfg.p, ladder[0]}));
  for (int k = 1; k < rungs; ++k)
    profiles.push_back(bvp::continue_in_lambda(profiles.back(), ladder[k]));

  const auto rep = asymptotics::limit_diagnostics(profiles);
  out << "fitted_mass_exponent=" << io::fmt17(rep.fitted_mass_exponent)
      << " sup_error_at_" << io::fmt17(ladder.back()) << "="
      << io::fmt17(rep.sup_errors.back()) << "\n";

  if (!cfg.out.empty()) {
    const std::filesystem::path dir(cfg.out);
    io::Json echo;
    echo["command"] = "asymptotics";
    echo["N"] = cfg.N;
    echo["p"] = cfg.p;
    echo["lambda_max"] = lam_max;
    echo["points"] = rungs;
    echo["out"] = cfg.out;
    echo["svg"] = cfg.svg;
    detail::maybe_write_report(cfg, "asymptotics", echo, io::rescale_summary(rep));
    if (cfg.svg)
      io::write_text_atomic(dir / "omega_vs_soliton.svg",
                            svg::soliton_overlay_plot(asymptotics::rescale(profiles.back()),
                                                      cfg.p));
  }
  return kExitOk;
}

inline int run_evolve(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (!cfg.lambda) throw InvalidParameterError("evolve: --lambda is required");
  const ProblemSpec spec{cfg.N, cfg.p, *cfg.lambda};
  spec.validate();
  detail::require_above_bifurcation(cfg.N, spec.lambda, "evolve");
  const bvp::Profile prof = bvp::ground_state(spec);

  dynamics::ExperimentSpec ex;
  ex.base = spec;
  ex.epsilon = cfg.eps;
  ex.mode = dynamics::parse_mode(cfg.mode);
  ex.T_final = cfg.T;
  ex.dt = cfg.dt ? *cfg.dt : dynamics::default_dt(spec, prof.u_max);
  ex.seed = cfg.seed;
  ex.validate();

  dynamics::EvolutionTrace trace;
  std::optional<dynamics::ExperimentResult> experiment;
  if (cfg.eps > 0.0) {
    experiment = dynamics::stability_experiment(ex, prof);
    trace = experiment->trace;
    out << "verdict=" << dynamics::to_string(experiment->verdict);
  } else {
    dynamics::FieldState init;
    init.mesh = prof.mesh;
    init.phi = dynamics::to_complex(prof.u);
    trace = dynamics::evolve(init, ex, prof);
    out << "steps=" << trace.steps_completed;
  }
  if (!trace.times.empty())
    out << " final_orbital_distance=" << io::fmt17(trace.orbital_distance_series.back());
  out << "\n";

  if (!cfg.out.empty()) {
    const std::filesystem::path dir(cfg.out);
    io::write_trace_csv(dir / "trace.csv", trace);
    io::Json echo;
    echo["command"] = "evolve";
    echo["N"] = cfg.N;
    echo["p"] = cfg.p;
    echo["lambda"] = spec.lambda;
    echo["eps"] = cfg.eps;
    echo["T"] = cfg.T;
    echo["dt"] = ex.dt;
    echo["seed"] = cfg.seed;
    echo["mode"] = cfg.mode;
    echo["out"] = cfg.out;
    echo["svg"] = cfg.svg;
    io::Json res = io::trace_summary(trace);
    res["trace_csv"] = "trace.csv";
    if (experiment) {
      res["verdict"] = dynamics::to_string(experiment->verdict);
      res["delta0"] = experiment->delta0;
      res["reference_norm"] = experiment->reference_norm;
    } else {
      res["verdict"] = nullptr;
    }
    detail::maybe_write_report(cfg, "evolve", echo, res);
    if (cfg.svg) {
      const double threshold =
          experiment ? 0.1 * experiment->reference_norm : 0.0;
      io::write_text_atomic(dir / "orbital_distance.svg",
                            svg::orbital_trace_plot(trace, threshold));
    }
  }
  return kExitOk;
}

// ---- dispatch ----

inline int run_config(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "eigen") return run_eigen(cfg, out, err);
    if (cfg.command == "ground") return run_ground(cfg, out, err);
    if (cfg.command == "curve") return run_curve(cfg, out, err);
    if (cfg.command == "solve") return run_solve(cfg, out, err);
    if (cfg.command == "asymptotics") return run_asymptotics(cfg, out, err);
    if (cfg.command == "evolve") return run_evolve(cfg, out, err);
    err << "unknown command: " << cfg.command << "\n";
    return kExitBadParams;
  } catch (const InvalidParameterError& e) {
    err << "invalid parameters: " << e.what() << "\n";
    return kExitBadParams;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

// ---- batch mode ----

namespace detail {

inline RunConfig config_from_json(const io::Json& j, std::size_t index) {
  if (!j.is_object())
    throw InvalidParameterError("batch entry " + std::to_string(index) + " is not an object");
  RunConfig cfg;
  bool have_command = false;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "command") {
        cfg.command = value.get<std::string>();
        have_command = true;
      } else if (key == "N")
        cfg.N = value.get<int>();
      else if (key == "p")
        cfg.p = value.get<double>();
      else if (key == "lambda")
        cfg.lambda = value.get<double>();
      else if (key == "lambda_min")
        cfg.lambda_min = value.get<double>();
      else if (key == "lambda_max")
        cfg.lambda_max = value.get<double>();
      else if (key == "points")
        cfg.points = value.get<int>();
      else if (key == "mass")
        cfg.mass = value.get<double>();
      else if (key == "eps")
        cfg.eps = value.get<double>();
      else if (key == "T")
        cfg.T = value.get<double>();
      else if (key == "dt")
        cfg.dt = value.get<double>();
      else if (key == "seed")
        cfg.seed = value.get<unsigned>();
      else if (key == "mode")
        cfg.mode = value.get<std::string>();
      else if (key == "tol")
        cfg.tol = value.get<double>();
      else if (key == "out")
        cfg.out = value.get<std::string>();
      else if (key == "svg")
        cfg.svg = value.get<bool>();
      else
        throw InvalidParameterError("batch entry " + std::to_string(index) +
                                    ": unknown key '" + key + "'");
    } catch (const nlohmann::json::exception&) {
      throw InvalidParameterError("batch entry " + std::to_string(index) + ": key '" + key +
                                  "' has the wrong type");
    }
  }
  if (!have_command)
    throw InvalidParameterError("batch entry " + std::to_string(index) + " lacks 'command'");
  if (cfg.command == "batch")
    throw InvalidParameterError("batch entry " + std::to_string(index) +
                                ": nested batch is not supported");
  return cfg;
}

}  // namespace detail

inline int run_batch(const std::string& file, std::ostream& out, std::ostream& err) {
  std::vector<RunConfig> configs;
  try {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      err << "batch: cannot open " << file << "\n";
      return kExitBadParams;
    }
    io::Json doc = io::Json::parse(in);
    if (!doc.is_array()) {
      err << "batch: " << file << " must hold one JSON array of configs\n";
      return kExitBadParams;
    }
    for (std::size_t i = 0; i < doc.size(); ++i)
      configs.push_back(detail::config_from_json(doc[i], i));
  } catch (const InvalidParameterError& e) {
    err << "batch: " << e.what() << "\n";
    return kExitBadParams;
  } catch (const nlohmann::json::exception& e) {
    err << "batch: cannot parse " << file << ": " << e.what() << "\n";
    return kExitBadParams;
  }
  if (configs.empty()) {
    err << "batch: no configs in " << file << "\n";
    return kExitBadParams;
  }

  std::size_t n_threads = std::thread::hardware_concurrency();
  if (n_threads == 0) n_threads = 1;
  if (const char* env = std::getenv("ANNULUS_NLS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
      err << "batch: ANNULUS_NLS_THREADS must be a positive integer\n";
      return kExitBadParams;
    }
    n_threads = static_cast<std::size_t>(v);
  }
  n_threads = std::min(n_threads, configs.size());

  struct Slot {
    int code = 0;
    std::string out_text, err_text;
  };
  std::vector<Slot> slots(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      std::ostringstream o, e;
      slots[i].code = run_config(configs[i], o, e);
      slots[i].out_text = o.str();
      slots[i].err_text = e.str();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int exit_code = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    out << slots[i].out_text;
    err << slots[i].err_text;
    out << "config " << i << ": exit " << slots[i].code << "\n";
    if (slots[i].code != 0 && slots[i].code != kExitNoSolution)
      exit_code = std::max(exit_code, slots[i].code);
  }
  return exit_code;
}

// ---- argv front end ----

inline int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out,
                              std::ostream& err) {
  CLI::App app{"ground states, mass curves, and standing-wave dynamics on the annulus 1<|x|<2"};
  app.require_subcommand(0, 1);
  RunConfig cfg;
  std::string batch_file;

  auto add_dimension = [&](CLI::App* sub, bool required_n) {
    auto* opt = sub->add_option("--N", cfg.N, "space dimension (>= 2)");
    if (required_n) opt->required();
    sub->add_option("--out", cfg.out, "output directory for CSV/JSON");
  };
  auto add_exponent = [&](CLI::App* sub) {
    sub->add_option("--p", cfg.p, "nonlinearity exponent (subcritical)");
  };

  auto* eigen = app.add_subcommand("eigen", "first Dirichlet eigenvalue of the radial Laplacian");
  add_dimension(eigen, true);

  auto* ground = app.add_subcommand("ground", "positive radial ground state at fixed lambda");
  add_dimension(ground, false);
  add_exponent(ground);
  ground->add_option("--lambda", cfg.lambda, "frequency (> -lambda_1)")->required();

  auto* curve = app.add_subcommand("curve", "mass along the ground-state branch");
  add_dimension(curve, false);
  add_exponent(curve);
  curve->add_option("--lambda-min", cfg.lambda_min, "lower end (default just above -lambda_1)");
  curve->add_option("--lambda-max", cfg.lambda_max, "upper end (default 1e3)");
  curve->add_option("--points", cfg.points, "number of curve points (default 60)");
  curve->add_flag("--svg", cfg.svg, "emit a mass-curve plot");

  auto* solve = app.add_subcommand("solve", "normalized solutions at a prescribed mass");
  add_dimension(solve, false);
  add_exponent(solve);
  solve->add_option("--mass", cfg.mass, "target mass c")->required();
  solve->add_option("--lambda-min", cfg.lambda_min, "lower end of the search window");
  solve->add_option("--lambda-max", cfg.lambda_max, "upper end of the search window");
  solve->add_option("--points", cfg.points, "curve resolution (default 60)");
  solve->add_option("--tol", cfg.tol, "relative mass tolerance (default 1e-8)");
  solve->add_flag("--svg", cfg.svg, "emit a mass-curve plot");

  auto* asym = app.add_subcommand("asymptotics", "blow-up rescaling against the limit soliton");
  add_dimension(asym, false);
  add_exponent(asym);
  asym->add_option("--lambda-max", cfg.lambda_max, "top of the lambda ladder (default 4000)");
  asym->add_option("--points", cfg.points, "ladder rungs, ratio 4 apart (default 4)");
  asym->add_flag("--svg", cfg.svg, "emit a profile-vs-soliton overlay");

  auto* evolve = app.add_subcommand("evolve", "conservative time integration of the NLSE");
  add_dimension(evolve, false);
  add_exponent(evolve);
  evolve->add_option("--lambda", cfg.lambda, "standing-wave frequency")->required();
  evolve->add_option("--eps", cfg.eps, "perturbation size (0 evolves the wave itself)");
  evolve->add_option("--T", cfg.T, "final time (default 50)");
  evolve->add_option("--dt", cfg.dt, "time step (default picked from lambda and amplitude)");
  evolve->add_option("--seed", cfg.seed, "perturbation seed");
  evolve->add_option("--mode", cfg.mode,
                     "peak-bump | random-smooth | mass-preserving-rescale");
  evolve->add_flag("--svg", cfg.svg, "emit an orbital-distance plot");

  auto* batch = app.add_subcommand("batch", "run a JSON array of configs, possibly in parallel");
  batch->add_option("file", batch_file, "path to the JSON config array")->required();

  std::vector<const char*> argv;
  argv.push_back("annulus-nls");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitBadParams;
  }

  for (auto* sub : {eigen, ground, curve, solve, asym, evolve})
    if (sub->parsed()) {
      cfg.command = sub->get_name();
      return run_config(cfg, out, err);
    }
  if (batch->parsed()) return run_batch(batch_file, out, err);

  err << "usage: annulus-nls {eigen|ground|curve|solve|asymptotics|evolve|batch} [flags]\n";
  return kExitBadParams;
}

}  // namespace annulus_nls::cli
