#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "foodchain/model.hpp"
#include "foodchain/ode.hpp"

namespace foodchain {

struct IntegratorConfig {
  double rtol = 1e-9;
  double atol = 1e-11;
  double max_step = 0.5;
  double t_transient = 5000.0;
  double t_window = 3000.0;

  /// Throws DomainError on non-positive tolerances or durations.
  void validate() const;
  StepControl step_control(int clamp_count = 3) const;
};

/// Accepted steps of one integration with their dense-output segments.
class Trajectory {
 public:
  const std::vector<double>& times() const { return times_; }
  const std::vector<State>& states() const { return states_; }
  std::size_t size() const { return times_.size(); }

  /// Dense interpolation at any t in [times().front(), times().back()].
  State at(double t) const;

  /// Uniformly resampled copy with spacing dt (last point included).
  std::vector<std::pair<double, State>> resample(double dt) const;

  void append(double t, const State& s);
  void append_segment(const DenseSegment<3>& seg, const State& end);

 private:
  std::vector<double> times_;
  std::vector<State> states_;
  std::vector<DenseSegment<3>> segments_;
};

/// Integrates the model from `ic` over [0, t_end]. Components are clamped at
/// zero from below. Throws StiffnessError on step-size underflow.
Trajectory integrate(const ModelParams& params, const State& ic, double t_end,
                     const IntegratorConfig& cfg = {});

/// Final state after integrating over [0, t_end] without storing the path.
State integrate_final(const ModelParams& params, const State& ic, double t_end,
                      const IntegratorConfig& cfg = {});

/// Largest Lyapunov exponent from `start` (no transient discard) by
/// renormalising a tangent vector every `tau` time units.
double lyapunov_from(const ModelParams& params, const State& start, int renormalizations,
                     const IntegratorConfig& cfg = {}, double tau = 1.0);

/// Largest Lyapunov exponent after discarding cfg.t_transient, averaged over
/// max(2000, t_window) unit-time renormalisations.
double lyapunov_max(const ModelParams& params, const State& ic, const IntegratorConfig& cfg = {});

enum class AttractorKind { Equilibrium, Periodic, Chaotic, BoundaryExtinction };
std::string_view to_string(AttractorKind kind);

inline constexpr double kChaosThreshold = 0.005;
inline constexpr double kExtinctionThreshold = 1e-6;
inline constexpr double kMaximaMergeTol = 1e-4;

struct AttractorSummary {
  double d2 = 0.0;
  AttractorKind kind = AttractorKind::Equilibrium;
  /// Number of distinct z-maxima clusters for Periodic attractors.
  int k = 0;
  std::vector<double> x_maxima;
  std::vector<double> y_maxima;
  std::vector<double> z_maxima;
  double lyap_max = 0.0;
  double min_z = 0.0;
  State final_state = State::Zero();
  /// Post-transient samples (every 0.05 time units), only when requested.
  std::vector<State> window_samples;
};

/// Distinct values of `values`, merging neighbours closer than `tol`.
std::vector<double> cluster_values(std::vector<double> values, double tol = kMaximaMergeTol);

/// Integrates through the transient, collects local maxima over the window
/// and classifies the attractor.
AttractorSummary attractor_summary(const ModelParams& params, const State& ic,
                                   const IntegratorConfig& cfg = {}, bool keep_samples = false);

struct ExtinctionVerdict {
  bool extinct = false;
  /// Time at which z fell below the threshold for good (extinct only).
  double time = 0.0;
  /// Minimum z over the final window (coexistent only).
  double min_z_final_window = 0.0;
  double t_end = 0.0;
};

/// Integrates from `ic` up to `t_max` (or until z has stayed below 1e-6 for
/// cfg.t_window time units).
ExtinctionVerdict extinction(const ModelParams& params, const State& ic,
                             const IntegratorConfig& cfg = {}, double t_max = 20000.0);

}  // namespace foodchain
