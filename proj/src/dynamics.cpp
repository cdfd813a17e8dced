#include "foodchain/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "foodchain/errors.hpp"

namespace foodchain {

namespace {

using Vector6 = Eigen::Matrix<double, 6, 1>;

auto model_field(const ModelParams& params) {
  return [&params](const State& s) -> State { return vector_field(params, s); };
}

// Derivative with respect to the normalised step coordinate of component i of
// the dense-output polynomial.
double segment_slope(const DenseSegment<3>& seg, int i, double s) {
  const double s1 = 1.0 - s;
  const double c = seg.r4[i] + s1 * seg.r5[i];
  const double b = seg.r3[i] + s * c;
  const double a = seg.r2[i] + s1 * b;
  const double dc = -seg.r5[i];
  const double db = c + s * dc;
  const double da = -b + s1 * db;
  return a + s * da;
}

struct WindowScan {
  std::array<std::vector<double>, 3> maxima;
  double min_z = std::numeric_limits<double>::infinity();
  double max_z = 0.0;
  // Peak-to-peak spread of each component over the first and last thirds.
  double spread_first = 0.0;
  double spread_last = 0.0;
  State final_state = State::Zero();
  std::vector<State> samples;
};

WindowScan scan_window(const ModelParams& params, const State& start, double duration,
                       const IntegratorConfig& cfg, bool keep_samples) {
  WindowScan out;
  auto stepper = make_stepper<3>(model_field(params), cfg.step_control(), 0.0, start);
  std::array<double, 3> lo_first, hi_first, lo_last, hi_last;
  lo_first.fill(std::numeric_limits<double>::infinity());
  lo_last = lo_first;
  hi_first.fill(-std::numeric_limits<double>::infinity());
  hi_last = hi_first;

  auto track = [&](double t, const State& s) {
    out.min_z = std::min(out.min_z, s.z());
    out.max_z = std::max(out.max_z, s.z());
    for (int i = 0; i < 3; ++i) {
      if (t <= duration / 3.0) {
        lo_first[i] = std::min(lo_first[i], s[i]);
        hi_first[i] = std::max(hi_first[i], s[i]);
      }
      if (t >= 2.0 * duration / 3.0) {
        lo_last[i] = std::min(lo_last[i], s[i]);
        hi_last[i] = std::max(hi_last[i], s[i]);
      }
    }
  };
  track(0.0, start);

  const double sample_dt = 0.05;
  double next_sample = 0.0;
  if (keep_samples) out.samples.reserve(static_cast<std::size_t>(duration / sample_dt) + 2);

  while (stepper.time() < duration) {
    stepper.step(duration);
    const auto& seg = stepper.segment();
    for (int i = 0; i < 3; ++i) {
      double left = segment_slope(seg, i, 0.0);
      double right = segment_slope(seg, i, 1.0);
      if (left > 0.0 && right <= 0.0) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
          double mid = 0.5 * (lo + hi);
          if (segment_slope(seg, i, mid) > 0.0) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        double t = seg.t0 + 0.5 * (lo + hi) * seg.h;
        double value = seg.component(i, t);
        out.maxima[i].push_back(value);
        track(t, seg.at(t));
      }
    }
    if (keep_samples) {
      while (next_sample <= stepper.time()) {
        out.samples.push_back(seg.at(next_sample).cwiseMax(0.0));
        next_sample += sample_dt;
      }
    }
    track(stepper.time(), stepper.state());
  }
  for (int i = 0; i < 3; ++i) {
    out.spread_first = std::max(out.spread_first, hi_first[i] - lo_first[i]);
    out.spread_last = std::max(out.spread_last, hi_last[i] - lo_last[i]);
  }
  out.final_state = stepper.state();
  return out;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw DomainError("integrator tolerances must be positive");
  if (!(max_step > 0.0)) throw DomainError("max_step must be positive");
  if (!(t_transient > 0.0) || !(t_window > 0.0)) {
    throw DomainError("t_transient and t_window must be positive");
  }
}

StepControl IntegratorConfig::step_control(int clamp_count) const {
  StepControl c;
  c.rtol = rtol;
  c.atol = atol;
  c.max_step = max_step;
  c.clamp_count = clamp_count;
  return c;
}

State Trajectory::at(double t) const {
  if (times_.empty()) throw DomainError("Trajectory::at on empty trajectory");
  if (t <= times_.front()) return states_.front();
  if (t >= times_.back()) return states_.back();
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t seg = static_cast<std::size_t>(it - times_.begin()) - 1;
  return segments_[seg].at(t).cwiseMax(0.0);
}

std::vector<std::pair<double, State>> Trajectory::resample(double dt) const {
  if (!(dt > 0.0)) throw DomainError("resample: dt must be positive");
  std::vector<std::pair<double, State>> out;
  if (times_.empty()) return out;
  const double t0 = times_.front();
  const double t1 = times_.back();
  auto n = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9));
  out.reserve(n + 2);
  for (std::size_t i = 0; i <= n; ++i) {
    double t = t0 + static_cast<double>(i) * dt;
    out.emplace_back(t, at(t));
  }
  if (out.back().first < t1 - 1e-12) out.emplace_back(t1, states_.back());
  return out;
}

void Trajectory::append(double t, const State& s) {
  times_.push_back(t);
  states_.push_back(s);
}

void Trajectory::append_segment(const DenseSegment<3>& seg, const State& end) {
  segments_.push_back(seg);
  times_.push_back(seg.t1());
  states_.push_back(end);
}

Trajectory integrate(const ModelParams& params, const State& ic, double t_end,
                     const IntegratorConfig& cfg) {
  if (!(ic.minCoeff() >= 0.0)) throw DomainError("integrate: initial condition must be >= 0");
  if (!(t_end > 0.0)) throw DomainError("integrate: t_end must be positive");
  cfg.validate();
  Trajectory traj;
  auto stepper = make_stepper<3>(model_field(params), cfg.step_control(), 0.0, ic);
  traj.append(0.0, stepper.state());
  while (stepper.time() < t_end) {
    stepper.step(t_end);
    DenseSegment<3> seg = stepper.segment();
    traj.append_segment(seg, stepper.state());
  }
  return traj;
}

State integrate_final(const ModelParams& params, const State& ic, double t_end,
                      const IntegratorConfig& cfg) {
  if (!(ic.minCoeff() >= 0.0)) throw DomainError("integrate: initial condition must be >= 0");
  auto stepper = make_stepper<3>(model_field(params), cfg.step_control(), 0.0, ic);
  stepper.advance_to(t_end);
  return stepper.state();
}

double lyapunov_from(const ModelParams& params, const State& start, int renormalizations,
                     const IntegratorConfig& cfg, double tau) {
  if (renormalizations <= 0 || !(tau > 0.0)) throw DomainError("lyapunov: bad averaging settings");
  auto field = [&params](const Vector6& u) -> Vector6 {
    const State s = u.head<3>();
    Vector6 out;
    out.head<3>() = vector_field(params, s);
    out.tail<3>() = jacobian_unchecked(params, s) * u.tail<3>();
    return out;
  };
  Vector6 u;
  u.head<3>() = start;
  u.tail<3>() = Eigen::Vector3d(1.0, 1.0, 1.0).normalized();
  auto stepper = make_stepper<6>(field, cfg.step_control(3), 0.0, u);
  double sum = 0.0;
  for (int k = 1; k <= renormalizations; ++k) {
    stepper.advance_to(k * tau);
    Vector6 v = stepper.state();
    double norm = v.tail<3>().norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("lyapunov: tangent vector degenerated");
    sum += std::log(norm);
    v.tail<3>() /= norm;
    stepper.reset(stepper.time(), v);
  }
  return sum / (renormalizations * tau);
}

double lyapunov_max(const ModelParams& params, const State& ic, const IntegratorConfig& cfg) {
  cfg.validate();
  State start = integrate_final(params, ic, cfg.t_transient, cfg);
  int n = std::max(2000, static_cast<int>(std::lround(cfg.t_window)));
  return lyapunov_from(params, start, n, cfg);
}

std::string_view to_string(AttractorKind kind) {
  switch (kind) {
    case AttractorKind::Equilibrium:
      return "equilibrium";
    case AttractorKind::Periodic:
      return "periodic";
    case AttractorKind::Chaotic:
      return "chaotic";
    case AttractorKind::BoundaryExtinction:
      return "boundary_extinction";
  }
  return "unknown";
}

std::vector<double> cluster_values(std::vector<double> values, double tol) {
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  double sum = 0.0;
  int count = 0;
  double last = 0.0;
  for (double v : values) {
    if (count > 0 && v - last > tol) {
      out.push_back(sum / count);
      sum = 0.0;
      count = 0;
    }
    sum += v;
    ++count;
    last = v;
  }
  if (count > 0) out.push_back(sum / count);
  return out;
}

AttractorSummary attractor_summary(const ModelParams& params, const State& ic,
                                   const IntegratorConfig& cfg, bool keep_samples) {
  if (!(ic.minCoeff() >= 0.0)) throw DomainError("attractor_summary: initial condition must be >= 0");
  cfg.validate();
  AttractorSummary out;
  out.d2 = params.d2();

  State start = integrate_final(params, ic, cfg.t_transient, cfg);
  WindowScan scan = scan_window(params, start, cfg.t_window, cfg, keep_samples);
  bool extinct = false;
  if (scan.min_z < kExtinctionThreshold) {
    // Confirmation run: a long transient may still recover.
    WindowScan confirm = scan_window(params, scan.final_state, cfg.t_window, cfg, keep_samples);
    extinct = confirm.max_z < kExtinctionThreshold;
    scan = std::move(confirm);
  }

  out.x_maxima = cluster_values(scan.maxima[0]);
  out.y_maxima = cluster_values(scan.maxima[1]);
  out.z_maxima = cluster_values(scan.maxima[2]);
  out.min_z = scan.min_z;
  out.final_state = scan.final_state;
  out.window_samples = std::move(scan.samples);

  int n = std::max(2000, static_cast<int>(std::lround(cfg.t_window)));
  out.lyap_max = lyapunov_from(params, scan.final_state, n, cfg);

  if (extinct) {
    out.kind = AttractorKind::BoundaryExtinction;
    out.z_maxima.clear();
  } else if (out.lyap_max > kChaosThreshold) {
    out.kind = AttractorKind::Chaotic;
  } else if (scan.spread_last < 1e-6 || scan.spread_last < 0.5 * scan.spread_first) {
    // Settled or still spiralling into a focus.
    out.kind = AttractorKind::Equilibrium;
    out.x_maxima.clear();
    out.y_maxima.clear();
    out.z_maxima.clear();
  } else {
    out.kind = AttractorKind::Periodic;
    out.k = static_cast<int>(out.z_maxima.size());
  }
  return out;
}

ExtinctionVerdict extinction(const ModelParams& params, const State& ic, const IntegratorConfig& cfg,
                             double t_max) {
  if (!(ic.minCoeff() >= 0.0)) throw DomainError("extinction: initial condition must be >= 0");
  cfg.validate();
  if (!(t_max > cfg.t_window)) throw DomainError("extinction: t_max must exceed the window");
  auto stepper = make_stepper<3>(model_field(params), cfg.step_control(), 0.0, ic);
  ExtinctionVerdict out;
  double below_since = ic.z() < kExtinctionThreshold ? 0.0 : -1.0;
  double min_final = std::numeric_limits<double>::infinity();
  const double final_start = t_max - cfg.t_window;
  while (stepper.time() < t_max) {
    stepper.step(t_max);
    const double t = stepper.time();
    const double z = stepper.state().z();
    if (z < kExtinctionThreshold) {
      if (below_since < 0.0) below_since = t;
      if (t - below_since >= cfg.t_window) {
        out.extinct = true;
        out.time = below_since;
        out.t_end = t;
        return out;
      }
    } else {
      below_since = -1.0;
    }
    if (t >= final_start) min_final = std::min(min_final, z);
  }
  out.extinct = false;
  out.min_z_final_window = min_final;
  out.t_end = stepper.time();
  return out;
}

}  // namespace foodchain
