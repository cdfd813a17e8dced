#include "foodchain/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "foodchain/errors.hpp"

namespace foodchain {

namespace {

constexpr double kRootTol = 1e-12;
constexpr double kFeasibilityMargin = 1e-12;
constexpr double kTangencyTol = 1e-10;
constexpr int kGuardGrid = 200;

// Bisection with a safeguarded secant step. Requires f(lo) and f(hi) of
// opposite sign (or one of them zero).
double bracketed_root(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw NumericalError("bracketed_root: no sign change");
  for (int iter = 0; iter < 200 && hi - lo > kRootTol; ++iter) {
    double mid = 0.5 * (lo + hi);
    double secant = hi - fhi * (hi - lo) / (fhi - flo);
    // Take the secant point only when it sits well inside the bracket.
    double trial = (secant > lo + 0.1 * (hi - lo) && secant < hi - 0.1 * (hi - lo)) ? secant : mid;
    double ft = f(trial);
    if (ft == 0.0) return trial;
    if ((ft > 0.0) == (flo > 0.0)) {
      lo = trial;
      flo = ft;
    } else {
      hi = trial;
      fhi = ft;
    }
    // Force a bisection if the secant only nudged one end.
    if (trial == secant) {
      double fm = f(mid);
      if (mid > lo && mid < hi) {
        if ((fm > 0.0) == (flo > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
          fhi = fm;
        }
      }
    }
  }
  return std::abs(flo) < std::abs(fhi) ? lo : hi;
}

int count_dims(const Eigenvalues& ev, int sign) {
  int n = 0;
  for (const auto& l : ev) {
    if (sign < 0 && l.real() <= -kHyperbolicityTol) ++n;
    if (sign > 0 && l.real() >= kHyperbolicityTol) ++n;
  }
  return n;
}

}  // namespace

std::string_view to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::Trivial:
      return "trivial";
    case EquilibriumKind::Axial:
      return "axial";
    case EquilibriumKind::Boundary:
      return "boundary";
    case EquilibriumKind::InteriorLower:
      return "interior_lower";
    case EquilibriumKind::InteriorUpper:
      return "interior_upper";
  }
  return "unknown";
}

std::string_view to_string(Stability stability) {
  switch (stability) {
    case Stability::Stable:
      return "stable";
    case Stability::Saddle:
      return "saddle";
    case Stability::Unstable:
      return "unstable";
    case Stability::NonHyperbolic:
      return "nonhyperbolic";
  }
  return "unknown";
}

EquilibriumPoint classify(const ModelParams& params, EquilibriumPoint point) {
  if (!(residual(params, point.coords) < 1e-9)) {
    throw PreconditionError("classify: point is not an equilibrium");
  }
  point.eigenvalues = eigenvalues(jacobian(params, point.coords));
  point.stable_dim = count_dims(point.eigenvalues, -1);
  point.unstable_dim = count_dims(point.eigenvalues, +1);
  if (point.stable_dim + point.unstable_dim < 3 || point.degenerate) {
    point.stability = Stability::NonHyperbolic;
  } else if (point.unstable_dim == 0) {
    point.stability = Stability::Stable;
  } else if (point.stable_dim == 0) {
    point.stability = Stability::Unstable;
  } else {
    point.stability = Stability::Saddle;
  }

  if (point.kind == EquilibriumKind::InteriorLower || point.kind == EquilibriumKind::InteriorUpper) {
    CharCoeffs c = char_coeffs(params, point.coords);
    bool rh_stable = c.p2 > 0.0 && c.p0 > 0.0 && c.hurwitz_delta() > 0.0;
    point.routh_hurwitz = RouthHurwitz{c, rh_stable};
    bool clearly_hyperbolic = std::all_of(point.eigenvalues.begin(), point.eigenvalues.end(),
                                          [](const auto& l) { return std::abs(l.real()) > 1e-8; });
    if (clearly_hyperbolic && rh_stable != (point.stability == Stability::Stable)) {
      throw NumericalError("classify: Routh-Hurwitz and eigenvalue verdicts disagree");
    }
  }
  return point;
}

std::vector<EquilibriumPoint> trivial_axial(const ModelParams& params) {
  EquilibriumPoint e0;
  e0.coords = State(0.0, 0.0, 0.0);
  e0.kind = EquilibriumKind::Trivial;
  EquilibriumPoint e1;
  e1.coords = State(1.0, 0.0, 0.0);
  e1.kind = EquilibriumKind::Axial;
  return {classify(params, e0), classify(params, e1)};
}

std::optional<EquilibriumPoint> boundary_equilibrium(const ModelParams& params) {
  const auto& f1 = params.f1();
  const double d1 = params.d1();
  if (!(d1 < std::min(f1.eval(1.0), f1.asymptote()))) return std::nullopt;
  const double xb = f1.inverse(d1);
  const double yb = xb * (1.0 - xb) / d1;
  EquilibriumPoint eb;
  eb.coords = State(xb, yb, 0.0);
  eb.kind = EquilibriumKind::Boundary;
  return classify(params, eb);
}

std::optional<double> interior_prey_level(const ModelParams& params) {
  if (!(params.d2() < params.f2().asymptote())) return std::nullopt;
  return params.f2().inverse(params.d2());
}

double tangency_abscissa(const ResponseSpec& f1, double y) {
  // h(x) = y tilde'(x) + 1 is increasing because tilde is convex.
  auto h = [&](double x) { return y * f1.tilde_deriv(x) + 1.0; };
  if (h(0.0) >= 0.0) return 0.0;
  if (h(1.0) <= 0.0) return 1.0;
  return bracketed_root(h, 0.0, 1.0);
}

std::vector<EquilibriumPoint> interior_equilibria(const ModelParams& params) {
  std::vector<EquilibriumPoint> out;
  const auto y_star = interior_prey_level(params);
  if (!y_star) return out;
  const double y = *y_star;
  const auto& f1 = params.f1();
  const auto& f2 = params.f2();
  auto g = [&](double x) { return 1.0 - x - y * f1.tilde(x); };

  const double xc = tangency_abscissa(f1, y);
  const double gc = g(xc);

  std::vector<double> roots;
  bool tangent = false;
  if (xc > 0.0 && xc < 1.0 && std::abs(gc) < kTangencyTol) {
    roots.push_back(xc);
    tangent = true;
  } else if (gc > 0.0) {
    if (xc > 0.0 && g(0.0) < 0.0) roots.push_back(bracketed_root(g, 0.0, xc));
    if (xc < 1.0) roots.push_back(bracketed_root(g, xc, 1.0));
  }

  // Guard scan for responses whose tilde is not convex: pick up any sign
  // change the critical-point bracketing did not account for.
  if (!tangent) {
    double prev_x = 0.0;
    double prev_g = g(0.0);
    for (int i = 1; i <= kGuardGrid; ++i) {
      double x = static_cast<double>(i) / kGuardGrid;
      double gx = g(x);
      if ((prev_g > 0.0) != (gx > 0.0) && prev_g != 0.0) {
        bool known = std::any_of(roots.begin(), roots.end(),
                                 [&](double r) { return r >= prev_x - 1e-9 && r <= x + 1e-9; });
        if (!known) roots.push_back(bracketed_root(g, prev_x, x));
      }
      prev_x = x;
      prev_g = gx;
    }
  }
  std::sort(roots.begin(), roots.end());

  for (double x : roots) {
    if (!(x > 0.0 && x < 1.0)) continue;
    const double surplus = f1.eval(x) - params.d1();
    if (!(surplus > kFeasibilityMargin)) continue;
    EquilibriumPoint p;
    p.coords = State(x, y, surplus / f2.tilde(y));
    p.kind = (y * f1.tilde_deriv(x) < -1.0) ? EquilibriumKind::InteriorLower
                                             : EquilibriumKind::InteriorUpper;
    p.degenerate = tangent;
    out.push_back(classify(params, p));
  }
  return out;
}

std::vector<EquilibriumPoint> all_equilibria(const ModelParams& params) {
  auto out = trivial_axial(params);
  if (auto eb = boundary_equilibrium(params)) out.push_back(*eb);
  auto interior = interior_equilibria(params);
  out.insert(out.end(), interior.begin(), interior.end());
  return out;
}

}  // namespace foodchain
