#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "foodchain/dynamics.hpp"
#include "foodchain/equilibria.hpp"
#include "foodchain/model.hpp"

namespace foodchain {

/// Plane {s : normal . s = offset}, with an orthonormal in-plane basis used as
/// section coordinates.
class Section {
 public:
  Section(const Eigen::Vector3d& normal, double offset);

  /// Plane y = level.
  static Section y_level(double level) { return {Eigen::Vector3d(0.0, 1.0, 0.0), level}; }

  const Eigen::Vector3d& normal() const { return normal_; }
  double offset() const { return offset_; }

  /// Signed distance (normal is unit length).
  double value(const State& s) const { return normal_.dot(s) - offset_; }
  Eigen::Vector2d to_local(const State& s) const;
  State from_local(const Eigen::Vector2d& u) const;

 private:
  Eigen::Vector3d normal_;
  double offset_;
  Eigen::Vector3d origin_;
  Eigen::Vector3d e1_;
  Eigen::Vector3d e2_;
};

/// Default section for interior cycles: y = y*(d2). Throws NotFoundError when
/// d2 >= f2_inf.
Section interior_section(const ModelParams& params);

struct PoincareHit {
  State state;
  double flight_time;
};

/// Next crossing of the section in the given direction (+1: value goes from
/// negative to positive). `s` must lie within 1e-9 of the plane. Throws
/// RecurrenceError if no crossing happens within 10 * cfg.t_window.
PoincareHit poincare_return(const ModelParams& params, const Section& section, const State& s,
                            int direction = +1, const IntegratorConfig& cfg = {});

enum class CycleStability { Stable, Unstable };
enum class Criticality { Sub, Super, Undetermined };

std::string_view to_string(CycleStability s);
std::string_view to_string(Criticality c);

struct LimitCycle {
  double d2 = 0.0;
  State anchor = State::Zero();
  double period = 0.0;
  Eigenvalues floquet{};
  CycleStability stability = CycleStability::Stable;
  /// Uniform-in-time samples over one period, first sample = anchor.
  std::vector<State> samples;
  /// Return-map displacement at convergence.
  double residual = 0.0;
  int newton_iterations = 0;

  /// Index of the multiplier closest to 1 (the flow direction).
  int trivial_index() const;
  /// Peak-to-peak range of component i over the samples.
  double amplitude(int i) const;
  double min_component(int i) const;
};

struct CycleOptions {
  double rtol = 1e-11;
  double atol = 1e-13;
  double fd_step = 1e-7;
  double tolerance = 1e-8;
  int max_iterations = 50;
  int samples = 512;
  int direction = +1;
};

/// Newton shooting on the section return map from `guess` (projected onto the
/// section). Floquet multipliers come from the monodromy matrix. Throws
/// NoCycleError on divergence.
LimitCycle find_cycle(const ModelParams& params, const State& guess, const Section& section,
                      const IntegratorConfig& cfg = {}, const CycleOptions& opts = {});

/// Integrates the variational equation over one period from the anchor.
Eigen::Matrix3d monodromy(const ModelParams& params, const State& anchor, double period,
                          const CycleOptions& opts = {});

struct ContinuationResult {
  std::vector<LimitCycle> branch;
  /// True when the step size underflowed before reaching d2_end.
  bool terminated = false;
  /// Last d2 attempted when terminated.
  double failed_d2 = 0.0;
};

/// Natural-parameter continuation in d2 with step halving. Each member is
/// computed on the section y = y*(d2) and must stay in the open octant.
ContinuationResult continue_cycle(const ModelParams& params, const LimitCycle& start, double d2_end,
                                  double step = 2e-4, const IntegratorConfig& cfg = {},
                                  const CycleOptions& opts = {});

/// Small cycle near a Hopf point: Newton from the upper interior equilibrium
/// displaced along the critical eigenplane, scanning displacement radii.
std::optional<LimitCycle> hopf_cycle(const ModelParams& params, const IntegratorConfig& cfg = {},
                                     const CycleOptions& opts = {});

/// Criticality of the Hopf point at d2_hopf: Sub if an unstable cycle
/// coexists with the stable equilibrium, Super if a stable cycle surrounds
/// the unstable one, both probed at d2_hopf -/+ offset.
Criticality classify_hopf(const ModelParams& params, double d2_hopf, double offset = 5e-4,
                          const IntegratorConfig& cfg = {});

struct BoundaryCycle {
  LimitCycle cycle;
  /// Time average of f2(y) - d2 over the period; negative means the cycle
  /// attracts transversally (top predator dies out near it).
  double transverse_exponent = 0.0;
  /// d2 at which the transverse exponent vanishes (mean of f2(y)).
  double critical_d2 = 0.0;
};

/// Attracting cycle of the predator-prey subsystem in the z = 0 plane.
BoundaryCycle boundary_cycle(const ModelParams& params, const IntegratorConfig& cfg = {},
                             const CycleOptions& opts = {});

inline constexpr double kCollisionDistance = 1e-2;

/// Minimum Euclidean distance between attractor samples and cycle samples.
double crisis_check(const LimitCycle& cycle, const std::vector<State>& attractor_samples);
double crisis_check(const LimitCycle& cycle, const AttractorSummary& summary);

}  // namespace foodchain
