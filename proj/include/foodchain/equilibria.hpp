#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "foodchain/model.hpp"

namespace foodchain {

enum class EquilibriumKind { Trivial, Axial, Boundary, InteriorLower, InteriorUpper };
enum class Stability { Stable, Saddle, Unstable, NonHyperbolic };

std::string_view to_string(EquilibriumKind kind);
std::string_view to_string(Stability stability);

/// Eigenvalues with |Re| below this are treated as neutral.
inline constexpr double kHyperbolicityTol = 1e-8;

/// Routh-Hurwitz verdict for an interior point: stable iff p2 > 0, p0 > 0 and
/// p1 p2 > p0.
struct RouthHurwitz {
  CharCoeffs coeffs;
  bool stable;
};

struct EquilibriumPoint {
  State coords = State::Zero();
  EquilibriumKind kind = EquilibriumKind::Trivial;
  Eigenvalues eigenvalues{};
  Stability stability = Stability::NonHyperbolic;
  int stable_dim = 0;
  int unstable_dim = 0;
  std::optional<RouthHurwitz> routh_hurwitz;
  /// Set when the point is a fold (tangency) of the interior branch.
  bool degenerate = false;
};

/// E0 = (0,0,0) and E1 = (1,0,0), classified.
std::vector<EquilibriumPoint> trivial_axial(const ModelParams& params);

/// E_b = (x_b, y_b, 0), present iff d1 < min(f1(1), f1_inf).
std::optional<EquilibriumPoint> boundary_equilibrium(const ModelParams& params);

/// Interior equilibria ordered by x: InteriorLower (the "star" branch, with
/// y* tilde1'(x) < -1) before InteriorUpper.
std::vector<EquilibriumPoint> interior_equilibria(const ModelParams& params);

/// Every equilibrium of the model.
std::vector<EquilibriumPoint> all_equilibria(const ModelParams& params);

/// Fills eigenvalues, stability and manifold dimensions (plus the
/// Routh-Hurwitz verdict for interior kinds). Throws PreconditionError when
/// the rhs residual at the point is >= 1e-9.
EquilibriumPoint classify(const ModelParams& params, EquilibriumPoint point);

/// y* solving f2(y) = d2, absent when d2 >= f2_inf.
std::optional<double> interior_prey_level(const ModelParams& params);

/// Critical point of g(x) = 1 - x - y tilde1(x) on [0, 1], i.e. the solution
/// of y tilde1'(x) = -1, clamped to the interval ends when g is monotone.
double tangency_abscissa(const ResponseSpec& f1, double y);

}  // namespace foodchain
