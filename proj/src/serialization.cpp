#include "foodchain/serialization.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

#include "foodchain/errors.hpp"

namespace foodchain {

namespace {

void require_object(const Json& j, const char* what) {
  if (!j.is_object()) throw DomainError(std::string(what) + ": expected a JSON object");
}

void reject_unknown(const Json& j, const char* what, std::initializer_list<const char*> allowed) {
  require_object(j, what);
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!keys.contains(k)) throw DomainError(std::string(what) + ": unknown key '" + k + "'");
  }
}

const Json& required(const Json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) throw DomainError(std::string(what) + ": missing key '" + key + "'");
  return *it;
}

double number(const Json& j, const char* key) {
  if (!j.is_number()) throw DomainError(std::string("'") + key + "' must be a number");
  return j.get<double>();
}

int integer(const Json& j, const char* key) {
  if (!j.is_number_integer()) throw DomainError(std::string("'") + key + "' must be an integer");
  return j.get<int>();
}

bool boolean(const Json& j, const char* key) {
  if (!j.is_boolean()) throw DomainError(std::string("'") + key + "' must be a boolean");
  return j.get<bool>();
}

std::string text(const Json& j, const char* key) {
  if (!j.is_string()) throw DomainError(std::string("'") + key + "' must be a string");
  return j.get<std::string>();
}

template <typename Fn>
void optional_key(const Json& j, const char* key, Fn&& fn) {
  if (auto it = j.find(key); it != j.end()) fn(*it);
}

Json complex_pair(const std::complex<double>& c) { return Json::array({c.real(), c.imag()}); }

Json eigen_list(const Eigenvalues& ev) {
  Json out = Json::array();
  for (const auto& c : ev) out.push_back(complex_pair(c));
  return out;
}

SweepBlock sweep_from_json(const Json& j) {
  reject_unknown(j, "sweep", {"lo", "hi", "step", "policy", "seed", "threads"});
  SweepBlock b;
  b.lo = number(required(j, "lo", "sweep"), "lo");
  b.hi = number(required(j, "hi", "sweep"), "hi");
  b.step = number(required(j, "step", "sweep"), "step");
  if (!(b.step > 0.0)) throw DomainError("sweep: step must be positive");
  optional_key(j, "policy", [&](const Json& v) { b.options.policy = ic_policy_from_string(text(v, "policy")); });
  optional_key(j, "seed", [&](const Json& v) { b.options.seed = state_from_json(v); });
  optional_key(j, "threads", [&](const Json& v) {
    b.options.threads = integer(v, "threads");
    if (b.options.threads < 1) throw DomainError("sweep: threads must be >= 1");
  });
  return b;
}

}  // namespace

ResponseSpec response_from_json(const Json& j) {
  reject_unknown(j, "response", {"kind", "p1", "p2"});
  const auto kind = response_kind_from_string(text(required(j, "kind", "response"), "kind"));
  return {kind, number(required(j, "p1", "response"), "p1"), number(required(j, "p2", "response"), "p2")};
}

Json to_json(const ResponseSpec& spec) {
  return Json{{"kind", std::string(to_string(spec.kind()))}, {"p1", spec.p1()}, {"p2", spec.p2()}};
}

ModelParams model_from_json(const Json& j, std::optional<double> d2_fallback) {
  reject_unknown(j, "model", {"f1", "f2", "d1", "d2"});
  auto f1 = response_from_json(required(j, "f1", "model"));
  auto f2 = response_from_json(required(j, "f2", "model"));
  const double d1 = number(required(j, "d1", "model"), "d1");
  std::optional<double> d2 = d2_fallback;
  if (!d2) optional_key(j, "d2", [&](const Json& v) { d2 = number(v, "d2"); });
  if (!d2) throw DomainError("model: d2 is required for this command");
  return {f1, f2, d1, *d2};
}

Json to_json(const ModelParams& params) {
  return Json{{"f1", to_json(params.f1())}, {"f2", to_json(params.f2())}, {"d1", params.d1()}, {"d2", params.d2()}};
}

IntegratorConfig integrator_from_json(const Json& j) {
  reject_unknown(j, "integrator", {"rtol", "atol", "max_step", "t_transient", "t_window"});
  IntegratorConfig cfg;
  optional_key(j, "rtol", [&](const Json& v) { cfg.rtol = number(v, "rtol"); });
  optional_key(j, "atol", [&](const Json& v) { cfg.atol = number(v, "atol"); });
  optional_key(j, "max_step", [&](const Json& v) { cfg.max_step = number(v, "max_step"); });
  optional_key(j, "t_transient", [&](const Json& v) { cfg.t_transient = number(v, "t_transient"); });
  optional_key(j, "t_window", [&](const Json& v) { cfg.t_window = number(v, "t_window"); });
  cfg.validate();
  return cfg;
}

Json to_json(const IntegratorConfig& cfg) {
  return Json{{"rtol", cfg.rtol},
              {"atol", cfg.atol},
              {"max_step", cfg.max_step},
              {"t_transient", cfg.t_transient},
              {"t_window", cfg.t_window}};
}

State state_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw DomainError("state: expected [x, y, z]");
  State s(number(j[0], "x"), number(j[1], "y"), number(j[2], "z"));
  if (!(s.minCoeff() >= 0.0) || !s.allFinite()) throw DomainError("state: components must be finite and non-negative");
  return s;
}

Json to_json(const State& s) { return Json::array({s.x(), s.y(), s.z()}); }

Json to_json(const EquilibriumPoint& e) {
  Json out{{"kind", std::string(to_string(e.kind))},
           {"coords", to_json(e.coords)},
           {"eigenvalues", eigen_list(e.eigenvalues)},
           {"stability", std::string(to_string(e.stability))},
           {"stable_dim", e.stable_dim},
           {"unstable_dim", e.unstable_dim},
           {"degenerate", e.degenerate}};
  if (e.routh_hurwitz) {
    const auto& c = e.routh_hurwitz->coeffs;
    out["routh_hurwitz"] = Json{{"p2", c.p2}, {"p1", c.p1}, {"p0", c.p0}, {"delta", c.hurwitz_delta()},
                                {"stable", e.routh_hurwitz->stable}};
  }
  return out;
}

Json to_json(const ThresholdReport& report) {
  Json out;
  out["d2_sn"] = report.d2_sn ? Json(*report.d2_sn) : Json(nullptr);
  out["d2_tc"] = report.d2_tc ? Json(*report.d2_tc) : Json(nullptr);
  Json hopf = Json::array();
  for (const auto& h : report.d2_hopf) {
    hopf.push_back(Json{{"d2", h.d2}, {"criticality", std::string(to_string(h.criticality))}});
  }
  out["d2_hopf"] = hopf;
  out["sn_point"] = report.sn_point ? to_json(*report.sn_point) : Json(nullptr);
  Json tr = Json::object();
  for (const auto& [k, v] : report.transversality) tr[k] = v;
  out["transversality"] = tr;
  return out;
}

Json to_json(const LimitCycle& cycle, bool with_samples) {
  Json out{{"d2", cycle.d2},
           {"anchor", to_json(cycle.anchor)},
           {"period", cycle.period},
           {"floquet", eigen_list(cycle.floquet)},
           {"stability", std::string(to_string(cycle.stability))},
           {"residual", cycle.residual},
           {"newton_iterations", cycle.newton_iterations},
           {"amplitude", Json::array({cycle.amplitude(0), cycle.amplitude(1), cycle.amplitude(2)})}};
  if (with_samples) {
    Json s = Json::array();
    for (const auto& p : cycle.samples) s.push_back(to_json(p));
    out["samples"] = s;
  }
  return out;
}

Json to_json(const AttractorSummary& summary) {
  return Json{{"d2", summary.d2},
              {"kind", std::string(to_string(summary.kind))},
              {"k", summary.k},
              {"x_maxima", summary.x_maxima},
              {"y_maxima", summary.y_maxima},
              {"z_maxima", summary.z_maxima},
              {"lyap_max", summary.lyap_max},
              {"min_z", summary.min_z},
              {"final_state", to_json(summary.final_state)}};
}

Json to_json(const FitResult& result) {
  return Json{{"fitted", to_json(result.fitted)},
              {"sse", result.sse},
              {"sup_err", result.sup_err},
              {"iterations", result.iterations}};
}

Json to_json(const ExtinctionVerdict& verdict) {
  Json out{{"verdict", verdict.extinct ? "Extinct" : "Coexistent"}, {"t_end", verdict.t_end}};
  if (verdict.extinct) {
    out["time"] = verdict.time;
  } else {
    out["min_z_final_window"] = verdict.min_z_final_window;
  }
  return out;
}

FitProblem fit_problem_from_json(const Json& j) {
  reject_unknown(j, "fit", {"target", "family", "domain", "samples", "init", "multistart"});
  FitProblem p;
  p.target = response_from_json(required(j, "target", "fit"));
  optional_key(j, "family", [&](const Json& v) { p.family = response_kind_from_string(text(v, "family")); });
  optional_key(j, "domain", [&](const Json& v) {
    if (!v.is_array() || v.size() != 2) throw DomainError("fit: domain must be [lo, hi]");
    p.u_lo = number(v[0], "domain");
    p.u_hi = number(v[1], "domain");
  });
  optional_key(j, "samples", [&](const Json& v) { p.n_samples = integer(v, "samples"); });
  optional_key(j, "init", [&](const Json& v) {
    if (!v.is_array() || v.size() != 2) throw DomainError("fit: init must be [p1, p2]");
    p.init = std::make_pair(number(v[0], "init"), number(v[1], "init"));
  });
  optional_key(j, "multistart", [&](const Json& v) { p.multistart = boolean(v, "multistart"); });
  p.validate();
  return p;
}

ModelParams ExperimentConfig::model() const {
  if (!d2) throw DomainError("model: d2 is required for this command");
  return model_from_json(model_json, *d2);
}

ModelParams ExperimentConfig::model_at(double value) const { return model_from_json(model_json, value); }

ExperimentConfig config_from_json(const Json& j) {
  reject_unknown(j, "config",
                 {"model", "integrator", "ic", "sweep", "simulate", "cycle", "extinction", "thresholds", "fit"});
  ExperimentConfig c;
  c.model_json = required(j, "model", "config");
  // Validate the model block now, with a placeholder d2 when it is omitted.
  require_object(c.model_json, "model");
  optional_key(c.model_json, "d2", [&](const Json& v) { c.d2 = number(v, "d2"); });
  {
    const ModelParams probe = model_from_json(c.model_json, c.d2 ? c.d2 : std::optional<double>(1e-3));
    (void)probe;
  }
  optional_key(j, "integrator", [&](const Json& v) { c.integrator = integrator_from_json(v); });
  optional_key(j, "ic", [&](const Json& v) { c.ic = state_from_json(v); });
  optional_key(j, "sweep", [&](const Json& v) { c.sweep = sweep_from_json(v); });
  optional_key(j, "simulate", [&](const Json& v) {
    reject_unknown(v, "simulate", {"t_end", "dt"});
    optional_key(v, "t_end", [&](const Json& x) { c.simulate.t_end = number(x, "t_end"); });
    optional_key(v, "dt", [&](const Json& x) { c.simulate.dt = number(x, "dt"); });
    if (!(c.simulate.t_end > 0.0) || !(c.simulate.dt > 0.0)) throw DomainError("simulate: t_end and dt must be positive");
  });
  optional_key(j, "cycle", [&](const Json& v) {
    reject_unknown(v, "cycle", {"guess", "continue_to", "step", "boundary"});
    optional_key(v, "guess", [&](const Json& x) { c.cycle.guess = state_from_json(x); });
    optional_key(v, "continue_to", [&](const Json& x) { c.cycle.continue_to = number(x, "continue_to"); });
    optional_key(v, "step", [&](const Json& x) { c.cycle.step = number(x, "step"); });
    optional_key(v, "boundary", [&](const Json& x) { c.cycle.boundary = boolean(x, "boundary"); });
    if (!(c.cycle.step > 0.0)) throw DomainError("cycle: step must be positive");
  });
  optional_key(j, "extinction", [&](const Json& v) {
    reject_unknown(v, "extinction", {"t_max"});
    optional_key(v, "t_max", [&](const Json& x) { c.extinction_t_max = number(x, "t_max"); });
    if (!(c.extinction_t_max > 0.0)) throw DomainError("extinction: t_max must be positive");
  });
  optional_key(j, "thresholds", [&](const Json& v) {
    reject_unknown(v, "thresholds", {"classify_hopf"});
    optional_key(v, "classify_hopf", [&](const Json& x) { c.classify_hopf = boolean(x, "classify_hopf"); });
  });
  optional_key(j, "fit", [&](const Json& v) { c.fit = fit_problem_from_json(v); });
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace foodchain
