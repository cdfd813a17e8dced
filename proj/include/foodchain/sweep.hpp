#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "foodchain/dynamics.hpp"

namespace foodchain {

enum class IcPolicy { Continuation, Fixed };

std::string_view to_string(IcPolicy policy);
IcPolicy ic_policy_from_string(std::string_view name);

struct SweepOptions {
  IcPolicy policy = IcPolicy::Continuation;
  /// Initial condition of the first point (continuation) or of every point
  /// (fixed).
  State seed = State(0.45, 0.5, 0.8);
  /// Worker threads for the fixed policy; continuation always runs serially.
  int threads = 1;
};

struct SweepPoint {
  double d2 = 0.0;
  std::optional<AttractorSummary> summary;
  std::string error;
};

/// Evenly spaced grid from `lo` to `hi` inclusive.
std::vector<double> make_grid(double lo, double hi, double step);

/// Attractor summaries along a d2 grid, in grid order. Per-point failures are
/// recorded in SweepPoint::error and the sweep carries on (a continuation
/// sweep then reseeds from the last good state).
std::vector<SweepPoint> sweep(const ModelParams& params, const std::vector<double>& grid,
                              const SweepOptions& options = {}, const IntegratorConfig& cfg = {});

/// First adjacent pair of grid points where the z-maxima count of periodic
/// attractors goes from 1 to 2 (in either grid direction).
std::optional<std::pair<double, double>> period_doubling_onset(const std::vector<SweepPoint>& points);

}  // namespace foodchain
