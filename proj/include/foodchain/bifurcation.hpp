#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "foodchain/cycles.hpp"
#include "foodchain/equilibria.hpp"
#include "foodchain/model.hpp"

namespace foodchain {

struct SaddleNode {
  double d2;
  State point;
};

/// d2 at which the interior branches coalesce: root in d2 of the residual
/// 1 - x_c - y*(d2) tilde1(x_c) at the tangency abscissa x_c. The d2 field of
/// `params` is ignored. Throws NotFoundError without a sign change on
/// [lo, hi].
SaddleNode find_saddle_node(const ModelParams& params, double lo, double hi);

/// Same, searching (0, f2_inf).
SaddleNode find_saddle_node(const ModelParams& params);

/// Saddle-node nondegeneracy quantities (W^T F_d2, W^T D^2F(V,V)).
std::pair<double, double> sn_transversality(const ModelParams& params_at_sn, const State& point);

/// d2 at which the lower interior branch passes through E_b: f2(y_b).
/// Throws NotFoundError when E_b does not exist.
double find_transcritical(const ModelParams& params);

struct TranscriticalTransversality {
  double wt_f_d2;
  double wt_df_v;
  double wt_d2f_vv;
};

TranscriticalTransversality tc_transversality(const ModelParams& params_at_tc);

/// Routh-Hurwitz coefficients along an interior branch as a function of d2.
/// Empty when the branch does not exist at d2.
std::optional<CharCoeffs> branch_coeffs(const ModelParams& params, double d2,
                                        EquilibriumKind branch = EquilibriumKind::InteriorUpper);

struct HopfPoint {
  double d2;
  Criticality criticality = Criticality::Undetermined;
  double delta_slope = 0.0;
};

struct HopfSearch {
  int grid = 200;
  EquilibriumKind branch = EquilibriumKind::InteriorUpper;
  /// Run the cycle-based criticality probe for each root.
  bool classify = true;
  IntegratorConfig cfg{};
};

/// Sign changes of Delta = P1 P2 - P0 along the branch on [lo, hi], refined
/// by bisection and filtered by P0 > 0, P2 > 0, dDelta/dd2 != 0. Sorted by
/// descending d2.
std::vector<HopfPoint> find_hopf(const ModelParams& params, double lo, double hi,
                                 const HopfSearch& search = {});

struct ThresholdReport {
  std::optional<double> d2_sn;
  std::optional<State> sn_point;
  std::optional<double> d2_tc;
  std::vector<HopfPoint> d2_hopf;
  std::map<std::string, double> transversality;
};

/// All thresholds of a parameter set (d2 ignored). Hopf roots are searched on
/// (d2_tc, d2_sn).
ThresholdReport compute_thresholds(const ModelParams& params, bool classify_hopf_points = true,
                                   const IntegratorConfig& cfg = {});

}  // namespace foodchain
