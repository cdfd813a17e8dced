#include "foodchain/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "foodchain/errors.hpp"

namespace foodchain {

namespace {

using Vector12 = Eigen::Matrix<double, 12, 1>;

constexpr double kArmDistance = 1e-6;
constexpr double kInteriorFloor = 1e-4;

IntegratorConfig tightened(const IntegratorConfig& cfg, const CycleOptions& opts) {
  IntegratorConfig out = cfg;
  out.rtol = std::min(cfg.rtol, opts.rtol);
  out.atol = std::min(cfg.atol, opts.atol);
  return out;
}

// Crossing time of the section inside one dense segment (value changes sign
// between the ends).
double locate_crossing(const DenseSegment<3>& seg, const Section& section) {
  double lo = seg.t0;
  double hi = seg.t1();
  double glo = section.value(seg.at(lo));
  for (int it = 0; it < 100 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
    double mid = 0.5 * (lo + hi);
    double gm = section.value(seg.at(mid));
    if ((gm > 0.0) == (glo > 0.0) && gm != 0.0) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double point_segment_distance(const State& p, const State& a, const State& b) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - p).norm();
}

}  // namespace

Section::Section(const Eigen::Vector3d& normal, double offset) {
  const double n = normal.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("Section: normal must be nonzero");
  normal_ = normal / n;
  offset_ = offset / n;
  origin_ = normal_ * offset_;
  // Complete the normal to an orthonormal frame, starting from the axis least
  // aligned with it.
  Eigen::Index axis = 0;
  normal_.cwiseAbs().minCoeff(&axis);
  Eigen::Vector3d seed = Eigen::Vector3d::Zero();
  seed[axis] = 1.0;
  e1_ = (seed - seed.dot(normal_) * normal_).normalized();
  e2_ = normal_.cross(e1_);
}

Eigen::Vector2d Section::to_local(const State& s) const {
  const Eigen::Vector3d d = s - origin_;
  return {e1_.dot(d), e2_.dot(d)};
}

State Section::from_local(const Eigen::Vector2d& u) const { return origin_ + u[0] * e1_ + u[1] * e2_; }

Section interior_section(const ModelParams& params) {
  auto y = interior_prey_level(params);
  if (!y) throw NotFoundError("interior_section: d2 exceeds the asymptote of f2");
  return Section::y_level(*y);
}

std::string_view to_string(CycleStability s) {
  return s == CycleStability::Stable ? "stable" : "unstable";
}

std::string_view to_string(Criticality c) {
  switch (c) {
    case Criticality::Sub:
      return "sub";
    case Criticality::Super:
      return "super";
    case Criticality::Undetermined:
      return "undetermined";
  }
  return "undetermined";
}

PoincareHit poincare_return(const ModelParams& params, const Section& section, const State& s,
                            int direction, const IntegratorConfig& cfg) {
  if (!(s.minCoeff() >= 0.0)) throw DomainError("poincare_return: state must be >= 0");
  if (!(std::abs(section.value(s)) < 1e-9)) {
    throw PreconditionError("poincare_return: state does not lie on the section");
  }
  if (direction != 1 && direction != -1) throw DomainError("poincare_return: direction must be +1 or -1");
  cfg.validate();
  auto field = [&params](const State& u) -> State { return vector_field(params, u); };
  auto stepper = make_stepper<3>(field, cfg.step_control(), 0.0, s);
  const double t_limit = 10.0 * cfg.t_window;
  bool armed = false;
  while (stepper.time() < t_limit) {
    stepper.step(t_limit);
    const auto& seg = stepper.segment();
    const double g0 = direction * section.value(seg.r1);
    const double g1 = direction * section.value(stepper.state());
    if (armed && g0 < 0.0 && g1 >= 0.0) {
      const double t = locate_crossing(seg, section);
      return {seg.at(t).cwiseMax(0.0), t};
    }
    if (std::abs(g1) > kArmDistance) armed = true;
  }
  throw RecurrenceError("poincare_return: no section crossing within the time limit");
}

int LimitCycle::trivial_index() const {
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(floquet[i] - 1.0) < std::abs(floquet[best] - 1.0)) best = i;
  }
  return best;
}

double LimitCycle::amplitude(int i) const {
  if (samples.empty()) return 0.0;
  double lo = samples.front()[i], hi = lo;
  for (const auto& s : samples) {
    lo = std::min(lo, s[i]);
    hi = std::max(hi, s[i]);
  }
  return hi - lo;
}

double LimitCycle::min_component(int i) const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) lo = std::min(lo, s[i]);
  return lo;
}

Eigen::Matrix3d monodromy(const ModelParams& params, const State& anchor, double period,
                          const CycleOptions& opts) {
  auto field = [&params](const Vector12& u) -> Vector12 {
    const State s = u.head<3>();
    Vector12 out;
    out.head<3>() = vector_field(params, s);
    Eigen::Map<const Eigen::Matrix3d> phi(u.data() + 3);
    Eigen::Map<Eigen::Matrix3d> dphi(out.data() + 3);
    dphi = jacobian_unchecked(params, s) * phi;
    return out;
  };
  Vector12 u;
  u.head<3>() = anchor;
  Eigen::Map<Eigen::Matrix3d>(u.data() + 3) = Eigen::Matrix3d::Identity();
  StepControl control;
  control.rtol = opts.rtol;
  control.atol = opts.atol;
  control.clamp_count = 3;
  auto stepper = make_stepper<12>(field, control, 0.0, u);
  stepper.advance_to(period);
  return Eigen::Map<const Eigen::Matrix3d>(stepper.state().data() + 3);
}

// Samples, monodromy and stability of a converged cycle.
static LimitCycle finish_cycle(const ModelParams& params, const State& anchor, double period, double residual,
                               int iterations, const IntegratorConfig& tight, const CycleOptions& opts) {
  LimitCycle cycle;
  cycle.d2 = params.d2();
  cycle.anchor = anchor;
  cycle.period = period;
  cycle.residual = residual;
  cycle.newton_iterations = iterations;

  auto field = [&params](const State& s) -> State { return vector_field(params, s); };
  auto stepper = make_stepper<3>(field, tight.step_control(), 0.0, cycle.anchor);
  const int n = std::max(8, opts.samples);
  cycle.samples.reserve(static_cast<std::size_t>(n));
  cycle.samples.push_back(cycle.anchor);
  int next = 1;
  while (stepper.time() < cycle.period) {
    stepper.step(cycle.period);
    const auto& seg = stepper.segment();
    while (next < n && next * cycle.period / n <= stepper.time()) {
      cycle.samples.push_back(seg.at(next * cycle.period / n).cwiseMax(0.0));
      ++next;
    }
  }

  const Eigen::Matrix3d m = monodromy(params, cycle.anchor, cycle.period, opts);
  cycle.floquet = eigenvalues(m);
  const int trivial = cycle.trivial_index();
  cycle.stability = CycleStability::Stable;
  for (int i = 0; i < 3; ++i) {
    if (i != trivial && std::abs(cycle.floquet[i]) > 1.0 + 1e-6) cycle.stability = CycleStability::Unstable;
  }
  return cycle;
}

LimitCycle find_cycle(const ModelParams& params, const State& guess, const Section& section,
                      const IntegratorConfig& cfg, const CycleOptions& opts) {
  const IntegratorConfig tight = tightened(cfg, opts);

  auto displacement = [&](const Eigen::Vector2d& u, PoincareHit* hit_out) -> Eigen::Vector2d {
    State s = section.from_local(u);
    if (!(s.minCoeff() > 0.0)) throw NoCycleError("find_cycle: iterate left the positive octant");
    PoincareHit hit = poincare_return(params, section, s, opts.direction, tight);
    if (hit_out) *hit_out = hit;
    return section.to_local(hit.state) - u;
  };

  Eigen::Vector2d u = section.to_local(guess);
  PoincareHit hit{};
  Eigen::Vector2d residual;
  try {
    residual = displacement(u, &hit);
  } catch (const NumericalError& e) {
    throw NoCycleError(std::string("find_cycle: initial return failed: ") + e.what());
  }

  // Attracting cycles: plain return-map steps while they contract quickly
  // bring a rough guess into Newton's basin.
  for (int k = 0; k < 20 && residual.norm() >= opts.tolerance; ++k) {
    const Eigen::Vector2d next = u + residual;
    PoincareHit next_hit{};
    Eigen::Vector2d next_res;
    try {
      next_res = displacement(next, &next_hit);
    } catch (const NumericalError&) {
      break;
    }
    if (!(next_res.norm() < 0.5 * residual.norm())) break;
    u = next;
    residual = next_res;
    hit = next_hit;
  }

  int iter = 0;
  for (; residual.norm() >= opts.tolerance; ++iter) {
    if (iter >= opts.max_iterations) throw NoCycleError("find_cycle: Newton did not converge");
    Eigen::Matrix2d jac;
    try {
      for (int j = 0; j < 2; ++j) {
        Eigen::Vector2d du = Eigen::Vector2d::Zero();
        du[j] = opts.fd_step;
        jac.col(j) = (displacement(u + du, nullptr) - displacement(u - du, nullptr)) / (2.0 * opts.fd_step);
      }
    } catch (const NumericalError& e) {
      throw NoCycleError(std::string("find_cycle: Jacobian evaluation failed: ") + e.what());
    }
    const Eigen::Vector2d delta = jac.fullPivLu().solve(-residual);
    if (!delta.allFinite()) throw NoCycleError("find_cycle: singular return-map Jacobian");

    // Backtrack while the displacement does not decrease.
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 6; ++k, lambda *= 0.5) {
      Eigen::Vector2d trial = u + lambda * delta;
      PoincareHit trial_hit{};
      Eigen::Vector2d trial_res;
      try {
        trial_res = displacement(trial, &trial_hit);
      } catch (const NumericalError&) {
        continue;
      }
      if (trial_res.norm() < residual.norm() || k == 5) {
        u = trial;
        residual = trial_res;
        hit = trial_hit;
        accepted = true;
        break;
      }
    }
    if (!accepted) throw NoCycleError("find_cycle: line search failed");
  }

  return finish_cycle(params, section.from_local(u), hit.flight_time, residual.norm(), iter, tight, opts);
}

ContinuationResult continue_cycle(const ModelParams& params, const LimitCycle& start, double d2_end,
                                  double step, const IntegratorConfig& cfg, const CycleOptions& opts) {
  if (!(step > 0.0)) throw DomainError("continue_cycle: step must be positive");
  ContinuationResult out;
  out.branch.push_back(start);
  const double sign = d2_end >= start.d2 ? 1.0 : -1.0;
  double h = step;
  bool first = true;
  while (sign * (d2_end - out.branch.back().d2) > 1e-15) {
    const LimitCycle& current = out.branch.back();
    double next = current.d2 + sign * h;
    if (sign * (next - d2_end) > 0.0) next = d2_end;
    try {
      const ModelParams p = params.with_d2(next);
      LimitCycle c = find_cycle(p, current.anchor, interior_section(p), cfg, opts);
      // Near the boundary cycle the z-part of the return displacement is
      // about (mu_z - 1) z with |mu_z - 1| ~ 1e-3, so below this floor the
      // shooting tolerance can no longer tell a branch member from the
      // boundary cycle itself.
      if (!(c.min_component(2) > kInteriorFloor)) throw NoCycleError("continue_cycle: cycle left the interior");
      if (c.period > 2.0 * current.period || c.period < 0.5 * current.period) {
        throw NoCycleError("continue_cycle: jumped to another branch");
      }
      out.branch.push_back(std::move(c));
      first = false;
      h = std::min(step, 2.0 * h);
    } catch (const NumericalError&) {
      h *= 0.5;
      if (h < 1e-6) {
        if (first) throw NoCycleError("continue_cycle: no continuation from the starting cycle");
        out.terminated = true;
        out.failed_d2 = next;
        break;
      }
    }
  }
  return out;
}

std::optional<LimitCycle> hopf_cycle(const ModelParams& params, const IntegratorConfig& cfg,
                                     const CycleOptions& opts) {
  const auto interior = interior_equilibria(params);
  auto upper = std::find_if(interior.begin(), interior.end(),
                            [](const auto& e) { return e.kind == EquilibriumKind::InteriorUpper; });
  if (upper == interior.end()) return std::nullopt;
  const State eq = upper->coords;
  const Eigen::Matrix3d jac = jacobian(params, eq);
  Eigen::EigenSolver<Eigen::Matrix3d> solver(jac, true);
  Eigen::Index pair = 0;
  solver.eigenvalues().imag().cwiseAbs().maxCoeff(&pair);
  if (!(std::abs(solver.eigenvalues()[pair].imag()) > 0.0)) return std::nullopt;
  const Eigen::Vector3cd v = solver.eigenvectors().col(pair);
  const Eigen::Vector3d vr = v.real();
  const Eigen::Vector3d vi = v.imag();
  const double theta = std::atan2(vr.y(), vi.y());
  Eigen::Vector3d w = (vr * std::cos(theta) - vi * std::sin(theta)).normalized();
  if ((jac * w).y() < 0.0) w = -w;

  const Section section = Section::y_level(eq.y());
  for (double radius : {0.002, 0.005, 0.01, 0.02, 0.05, 0.1}) {
    State guess = eq + radius * w;
    if (!(guess.minCoeff() > 0.0)) continue;
    try {
      LimitCycle c = find_cycle(params, guess, section, cfg, opts);
      if (c.amplitude(0) > 1e-5 && c.min_component(2) > 0.0) return c;
    } catch (const NumericalError&) {
    }
  }
  return std::nullopt;
}

Criticality classify_hopf(const ModelParams& params, double d2_hopf, double offset,
                          const IntegratorConfig& cfg) {
  for (double side : {-1.0, 1.0}) {
    const ModelParams p = params.with_d2(d2_hopf + side * offset);
    const auto interior = interior_equilibria(p);
    auto upper = std::find_if(interior.begin(), interior.end(),
                              [](const auto& e) { return e.kind == EquilibriumKind::InteriorUpper; });
    if (upper == interior.end()) continue;
    const bool eq_stable = upper->stability == Stability::Stable;
    auto cycle = hopf_cycle(p, cfg);
    if (!cycle) continue;
    if (eq_stable && cycle->stability == CycleStability::Unstable) return Criticality::Sub;
    if (!eq_stable && cycle->stability == CycleStability::Stable) return Criticality::Super;
  }
  return Criticality::Undetermined;
}

BoundaryCycle boundary_cycle(const ModelParams& params, const IntegratorConfig& cfg,
                             const CycleOptions& opts) {
  const auto eb = boundary_equilibrium(params);
  if (!eb) throw NoCycleError("boundary_cycle: boundary equilibrium absent");
  const State e = eb->coords;
  const double trace = 1.0 - 2.0 * e.x() - e.y() * params.f1().deriv(e.x());
  if (!(trace > 0.0)) throw NoCycleError("boundary_cycle: boundary equilibrium attracts in the plane");

  State start(e.x() * 1.05, e.y(), 0.0);
  State settled = integrate_final(params, start, 2000.0, cfg);
  if ((settled - e).norm() < 1e-6) throw NoCycleError("boundary_cycle: planar flow converged to E_b");

  // The plane z = 0 is invariant and the cycle attracts within it, so plain
  // return-map iteration converges without leaving the plane.
  const Section section = Section::y_level(e.y());
  const IntegratorConfig tight = tightened(cfg, opts);
  PoincareHit hit = poincare_return(params, section, State(settled.x(), e.y(), 0.0), +1, tight);
  double residual = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < 500 && residual >= opts.tolerance; ++iter) {
    const PoincareHit again = poincare_return(params, section, hit.state, +1, tight);
    residual = (again.state - hit.state).norm();
    hit = again;
  }
  if (residual >= opts.tolerance) throw NoCycleError("boundary_cycle: return map did not settle");
  BoundaryCycle out;
  out.cycle = finish_cycle(params, hit.state, hit.flight_time, residual, iter, tight, opts);
  double mean = 0.0;
  for (const auto& s : out.cycle.samples) mean += params.f2().eval(s.y());
  mean /= static_cast<double>(out.cycle.samples.size());
  out.critical_d2 = mean;
  out.transverse_exponent = mean - params.d2();
  return out;
}

double crisis_check(const LimitCycle& cycle, const std::vector<State>& attractor_samples) {
  if (cycle.samples.size() < 2) throw DomainError("crisis_check: cycle has no samples");
  double best = std::numeric_limits<double>::infinity();
  const auto& c = cycle.samples;
  for (const auto& p : attractor_samples) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      const State& a = c[i];
      const State& b = c[(i + 1) % c.size()];
      best = std::min(best, point_segment_distance(p, a, b));
    }
  }
  return best;
}

double crisis_check(const LimitCycle& cycle, const AttractorSummary& summary) {
  if (summary.window_samples.empty()) {
    throw PreconditionError("crisis_check: summary carries no trajectory samples");
  }
  return crisis_check(cycle, summary.window_samples);
}

}  // namespace foodchain
