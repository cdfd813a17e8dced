#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "foodchain/bifurcation.hpp"
#include "foodchain/errors.hpp"
#include "foodchain/presets.hpp"
#include "foodchain/serialization.hpp"
#include "svg.hpp"

namespace foodchain::cli {

namespace {

struct Globals {
  std::string config_path;
  std::string preset;
  std::string out_path;
  std::string format;
  int threads = 0;
  std::optional<double> d2;
  std::vector<double> ic;
};

struct FitFlags {
  std::string target;
  std::string family;
  std::string domain;
  int samples = 0;
  bool multistart = false;
};

ExperimentConfig resolve_config(const Globals& g) {
  ExperimentConfig cfg;
  if (!g.config_path.empty()) {
    if (!g.preset.empty()) throw DomainError("--config and --preset are mutually exclusive");
    cfg = load_config(g.config_path);
  } else if (g.preset == "holling" || g.preset == "ivlev") {
    const ModelParams p = g.preset == "holling" ? holling_reference(0.1) : ivlev_reference(0.1);
    Json m = to_json(p);
    m.erase("d2");
    cfg = config_from_json(Json{{"model", m}});
  } else if (!g.preset.empty()) {
    throw DomainError("unknown preset '" + g.preset + "' (expected holling or ivlev)");
  } else {
    throw DomainError("no model: give --config FILE or --preset NAME");
  }
  if (g.d2) cfg.d2 = *g.d2;
  if (!g.ic.empty()) {
    if (g.ic.size() != 3) throw DomainError("--ic takes three values");
    cfg.ic = state_from_json(Json::array({g.ic[0], g.ic[1], g.ic[2]}));
  }
  return cfg;
}

bool has_model(const Globals& g) { return !g.config_path.empty() || !g.preset.empty(); }

int thread_count(const Globals& g) {
  if (g.threads > 0) return g.threads;
  if (const char* env = std::getenv("FOODCHAIN_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw DomainError("FOODCHAIN_THREADS must be a positive integer");
    return static_cast<int>(v);
  }
  return 1;
}

std::string format_or(const Globals& g, const char* fallback) {
  const std::string f = g.format.empty() ? fallback : g.format;
  if (f != "json" && f != "csv") throw DomainError("--format must be json or csv");
  return f;
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw DomainError("cannot open output file '" + path + "'");
    }
    stream_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& operator()() { return *stream_; }
  void json(const Json& j) { *stream_ << j.dump(2) << '\n'; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

int cmd_validate(const Globals& g, Output& out) {
  const ExperimentConfig cfg = resolve_config(g);
  const ModelParams p = cfg.model_at(cfg.d2.value_or(1e-3));
  Json report{{"pass", true}, {"violations", Json::array()}};
  for (const auto& [name, spec] : {std::pair{"f1", p.f1()}, std::pair{"f2", p.f2()}}) {
    for (const auto& v : check_response_axioms(spec)) {
      report["pass"] = false;
      report["violations"].push_back(Json{{"response", name}, {"axiom", v.axiom}, {"u", v.u}, {"value", v.value}});
    }
  }
  if (format_or(g, "json") == "csv") {
    out() << "response,axiom,u,value\n";
    for (const auto& v : report["violations"]) {
      out() << v["response"].get<std::string>() << ',' << v["axiom"].get<std::string>() << ','
            << num(v["u"].get<double>()) << ',' << num(v["value"].get<double>()) << '\n';
    }
  } else {
    out.json(report);
  }
  return report["pass"].get<bool>() ? 0 : 1;
}

int cmd_equilibria(const Globals& g, Output& out) {
  const ModelParams p = resolve_config(g).model();
  const auto eqs = all_equilibria(p);
  if (format_or(g, "json") == "csv") {
    out() << "kind,x,y,z,stability,stable_dim,unstable_dim\n";
    for (const auto& e : eqs) {
      out() << to_string(e.kind) << ',' << num(e.coords.x()) << ',' << num(e.coords.y()) << ','
            << num(e.coords.z()) << ',' << to_string(e.stability) << ',' << e.stable_dim << ','
            << e.unstable_dim << '\n';
    }
    return 0;
  }
  Json list = Json::array();
  for (const auto& e : eqs) list.push_back(to_json(e));
  out.json(Json{{"model", to_json(p)}, {"equilibria", list}});
  return 0;
}

int cmd_thresholds(const Globals& g, Output& out) {
  const ExperimentConfig cfg = resolve_config(g);
  const ThresholdReport r = compute_thresholds(cfg.model_at(cfg.d2.value_or(1e-3)), cfg.classify_hopf, cfg.integrator);
  if (format_or(g, "json") == "csv") {
    out() << "threshold,d2,criticality\n";
    if (r.d2_sn) out() << "SN," << num(*r.d2_sn) << ",\n";
    for (std::size_t i = 0; i < r.d2_hopf.size(); ++i) {
      out() << 'H' << i + 1 << ',' << num(r.d2_hopf[i].d2) << ',' << to_string(r.d2_hopf[i].criticality) << '\n';
    }
    if (r.d2_tc) out() << "TC," << num(*r.d2_tc) << ",\n";
    return 0;
  }
  out.json(to_json(r));
  return 0;
}

int cmd_simulate(const Globals& g, Output& out) {
  const ExperimentConfig cfg = resolve_config(g);
  const State ic = cfg.ic.value_or(State(0.45, 0.5, 0.8));
  const Trajectory traj = integrate(cfg.model(), ic, cfg.simulate.t_end, cfg.integrator);
  const auto rows = traj.resample(cfg.simulate.dt);
  if (format_or(g, "csv") == "json") {
    Json j = Json::array();
    for (const auto& [t, s] : rows) j.push_back(Json::array({t, s.x(), s.y(), s.z()}));
    out.json(Json{{"columns", {"t", "x", "y", "z"}}, {"rows", j}});
    return 0;
  }
  out() << "t,x,y,z\n";
  for (const auto& [t, s] : rows) out() << num(t) << ',' << num(s.x()) << ',' << num(s.y()) << ',' << num(s.z()) << '\n';
  return 0;
}

int cmd_sweep(const Globals& g, Output& out, const std::string& svg_path) {
  const ExperimentConfig cfg = resolve_config(g);
  if (!cfg.sweep) throw DomainError("sweep: the config needs a 'sweep' block");
  SweepOptions opts = cfg.sweep->options;
  opts.threads = g.threads > 0 || std::getenv("FOODCHAIN_THREADS") ? thread_count(g) : opts.threads;
  if (cfg.ic) opts.seed = *cfg.ic;
  const ModelParams base = cfg.model_at(cfg.sweep->lo);
  const auto grid = make_grid(cfg.sweep->lo, cfg.sweep->hi, cfg.sweep->step);
  const auto points = sweep(base, grid, opts, cfg.integrator);

  if (format_or(g, "csv") == "json") {
    Json j = Json::array();
    for (const auto& pt : points) {
      if (pt.summary) {
        j.push_back(to_json(*pt.summary));
      } else {
        j.push_back(Json{{"d2", pt.d2}, {"error", pt.error}});
      }
    }
    out.json(j);
  } else {
    out() << "d2,kind,k,lyap_max,variable,value\n";
    for (const auto& pt : points) {
      if (!pt.summary) {
        out() << num(pt.d2) << ",Error,0,nan,,\n";
        continue;
      }
      const auto& s = *pt.summary;
      const std::string head = num(s.d2) + ',' + std::string(to_string(s.kind)) + ',' + std::to_string(s.k) + ',' +
                               num(s.lyap_max) + ',';
      const std::array<std::pair<const char*, const std::vector<double>*>, 3> series{
          {{"x", &s.x_maxima}, {"y", &s.y_maxima}, {"z", &s.z_maxima}}};
      for (int i = 0; i < 3; ++i) {
        const auto& [name, values] = series[i];
        if (values->empty()) {
          out() << head << name << ',' << num(s.final_state[i]) << '\n';
        }
        for (double v : *values) out() << head << name << ',' << num(v) << '\n';
      }
    }
  }
  if (!svg_path.empty()) {
    std::ofstream svg(svg_path);
    if (!svg) throw DomainError("cannot open svg file '" + svg_path + "'");
    write_sweep_svg(svg, base, points);
  }
  return 0;
}

int cmd_cycle(const Globals& g, Output& out) {
  const ExperimentConfig cfg = resolve_config(g);
  const ModelParams p = cfg.model();
  Json report;
  if (cfg.cycle.boundary) {
    const BoundaryCycle bc = boundary_cycle(p, cfg.integrator);
    report = Json{{"cycle", to_json(bc.cycle, true)},
                  {"transverse_exponent", bc.transverse_exponent},
                  {"critical_d2", bc.critical_d2}};
    out.json(report);
    return 0;
  }
  const Section section = interior_section(p);
  std::optional<LimitCycle> cyc;
  if (cfg.cycle.guess) {
    cyc = find_cycle(p, *cfg.cycle.guess, section, cfg.integrator);
  } else if (cfg.ic) {
    const State settled = integrate_final(p, *cfg.ic, cfg.integrator.t_transient, cfg.integrator);
    cyc = find_cycle(p, poincare_return(p, section, settled - section.value(settled) * section.normal(), +1,
                                        cfg.integrator)
                            .state,
                     section, cfg.integrator);
  } else {
    cyc = hopf_cycle(p, cfg.integrator);
    if (!cyc) throw NoCycleError("cycle: no cycle found near the interior equilibrium; give cycle.guess or ic");
  }
  report["cycle"] = to_json(*cyc, true);
  if (cfg.cycle.continue_to) {
    const ContinuationResult cont = continue_cycle(p, *cyc, *cfg.cycle.continue_to, cfg.cycle.step, cfg.integrator);
    Json branch = Json::array();
    for (const auto& m : cont.branch) branch.push_back(to_json(m));
    report["continuation"] = Json{{"terminated", cont.terminated},
                                  {"failed_d2", cont.terminated ? Json(cont.failed_d2) : Json(nullptr)},
                                  {"branch", branch}};
  }
  out.json(report);
  return 0;
}

int cmd_lyapunov(const Globals& g, Output& out) {
  const ExperimentConfig cfg = resolve_config(g);
  const ModelParams p = cfg.model();
  const double l = lyapunov_max(p, cfg.ic.value_or(State(0.45, 0.5, 0.8)), cfg.integrator);
  if (format_or(g, "json") == "csv") {
    out() << "d2,lyap_max\n" << num(p.d2()) << ',' << num(l) << '\n';
  } else {
    out.json(Json{{"d2", p.d2()}, {"lyap_max", l}});
  }
  return 0;
}

int cmd_fit(const Globals& g, const FitFlags& f, Output& out) {
  FitProblem problem;
  bool have = false;
  if (has_model(g)) {
    const ExperimentConfig cfg = resolve_config(g);
    if (cfg.fit) {
      problem = *cfg.fit;
      have = true;
    }
  }
  if (!f.target.empty()) {
    Json t;
    try {
      t = Json::parse(f.target);
    } catch (const nlohmann::json::parse_error&) {
      throw DomainError("--target must be a JSON response object");
    }
    problem.target = response_from_json(t);
    have = true;
  }
  if (!have) throw DomainError("fit: give --target or a config with a 'fit' block");
  if (!f.family.empty()) problem.family = response_kind_from_string(f.family);
  if (!f.domain.empty()) {
    const auto colon = f.domain.find(':');
    if (colon == std::string::npos) throw DomainError("--domain must be lo:hi");
    try {
      problem.u_lo = std::stod(f.domain.substr(0, colon));
      problem.u_hi = std::stod(f.domain.substr(colon + 1));
    } catch (const std::exception&) {
      throw DomainError("--domain must be lo:hi");
    }
  }
  if (f.samples > 0) problem.n_samples = f.samples;
  if (f.multistart) problem.multistart = true;
  const FitResult r = fit(problem);
  Json j = to_json(r);
  j["domain"] = Json::array({problem.u_lo, problem.u_hi});
  j["samples"] = problem.n_samples;
  if (format_or(g, "json") == "csv") {
    out() << "kind,p1,p2,sse,sup_err,iterations\n"
          << to_string(r.fitted.kind()) << ',' << num(r.fitted.p1()) << ',' << num(r.fitted.p2()) << ','
          << num(r.sse) << ',' << num(r.sup_err) << ',' << r.iterations << '\n';
  } else {
    out.json(j);
  }
  return 0;
}

int cmd_extinction(const Globals& g, Output& out) {
  const ExperimentConfig cfg = resolve_config(g);
  const ModelParams p = cfg.model();
  const ExtinctionVerdict v = extinction(p, cfg.ic.value_or(State(0.45, 0.5, 0.8)), cfg.integrator, cfg.extinction_t_max);
  if (format_or(g, "json") == "csv") {
    out() << "verdict,time,min_z_final_window,t_end\n"
          << (v.extinct ? "Extinct" : "Coexistent") << ',' << (v.extinct ? num(v.time) : "") << ','
          << (v.extinct ? "" : num(v.min_z_final_window)) << ',' << num(v.t_end) << '\n';
  } else {
    out.json(to_json(v));
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tri-trophic food-chain toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  FitFlags fit_flags;
  std::string svg_path;

  app.add_option("--config", g.config_path, "JSON experiment config");
  app.add_option("--preset", g.preset, "Built-in model instead of --config (holling | ivlev)");
  app.add_option("--out", g.out_path, "Write output to FILE");
  app.add_option("--format", g.format, "json | csv");
  app.add_option("--threads", g.threads, "Worker threads (fallback: FOODCHAIN_THREADS)")->check(CLI::PositiveNumber);
  app.add_option("--d2", g.d2, "Override the top-predator mortality d2");
  app.add_option("--ic", g.ic, "Initial condition x y z")->expected(3);

  auto* validate = app.add_subcommand("validate", "Check response axioms");
  auto* equilibria = app.add_subcommand("equilibria", "Equilibria and their stability");
  auto* thresholds = app.add_subcommand("thresholds", "Saddle-node, Hopf and transcritical thresholds");
  auto* simulate = app.add_subcommand("simulate", "Integrate a trajectory (CSV)");
  auto* sweep_cmd = app.add_subcommand("sweep", "Attractor sweep over d2 (CSV)");
  sweep_cmd->add_option("--svg", svg_path, "Also write a static bifurcation diagram");
  auto* cycle = app.add_subcommand("cycle", "Limit cycle by Newton shooting");
  auto* lyapunov = app.add_subcommand("lyapunov", "Largest Lyapunov exponent");
  auto* fit_cmd = app.add_subcommand("fit", "Least-squares response transfer");
  fit_cmd->add_option("--target", fit_flags.target, "Target response as JSON");
  fit_cmd->add_option("--family", fit_flags.family, "holling2 | ivlev");
  fit_cmd->add_option("--domain", fit_flags.domain, "Sample interval lo:hi");
  fit_cmd->add_option("--samples", fit_flags.samples, "Number of samples")->check(CLI::PositiveNumber);
  fit_cmd->add_flag("--multistart", fit_flags.multistart, "Try 16 extra starts");
  auto* extinction_cmd = app.add_subcommand("extinction", "Extinction or coexistence verdict");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  try {
    Output o(g.out_path, out);
    if (*validate) return cmd_validate(g, o);
    if (*equilibria) return cmd_equilibria(g, o);
    if (*thresholds) return cmd_thresholds(g, o);
    if (*simulate) return cmd_simulate(g, o);
    if (*sweep_cmd) return cmd_sweep(g, o, svg_path);
    if (*cycle) return cmd_cycle(g, o);
    if (*lyapunov) return cmd_lyapunov(g, o);
    if (*fit_cmd) return cmd_fit(g, fit_flags, o);
    if (*extinction_cmd) return cmd_extinction(g, o);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace foodchain::cli
