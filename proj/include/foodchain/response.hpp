#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace foodchain {

enum class ResponseKind { Holling2, Ivlev };

std::string_view to_string(ResponseKind kind);
ResponseKind response_kind_from_string(std::string_view name);

/// A prey-dependent functional response.
///
///   Holling2:  p1 * u / (1 + p2 * u)
///   Ivlev:     p1 * (1 - exp(-p2 * u))
///
/// Both families are zero at zero, strictly increasing, bounded and concave.
/// The "tilde" form is the per-prey intensity f(u)/u, continuously extended
/// to u = 0 by the initial slope.
class ResponseSpec {
 public:
  ResponseSpec(ResponseKind kind, double p1, double p2);

  static ResponseSpec holling2(double a, double b) { return {ResponseKind::Holling2, a, b}; }
  static ResponseSpec ivlev(double a, double b) { return {ResponseKind::Ivlev, a, b}; }

  ResponseKind kind() const { return kind_; }
  double p1() const { return p1_; }
  double p2() const { return p2_; }

  // All evaluators throw DomainError for u < 0.
  double eval(double u) const;
  double deriv(double u) const;
  double deriv2(double u) const;
  double tilde(double u) const;
  double tilde_deriv(double u) const;

  double asymptote() const;
  double initial_slope() const;

  /// Unique u > 0 with eval(u) == v. Throws NoSolutionError unless
  /// 0 < v < asymptote().
  double inverse(double v) const;

  // Unchecked variants for hot loops (integrator stages may probe tiny
  // negative arguments).
  double value_unchecked(double u) const;
  double slope_unchecked(double u) const;

  friend bool operator==(const ResponseSpec&, const ResponseSpec&) = default;

 private:
  ResponseKind kind_;
  double p1_;
  double p2_;
};

/// Bracketed bisection inverse of a strictly increasing function on (0, inf),
/// to absolute tolerance `tol` in u. Used as the generic fallback and as a
/// cross-check of the closed forms.
double invert_increasing(const std::function<double(double)>& f, double v, double sup,
                         double tol = 1e-12);

struct AxiomViolation {
  std::string axiom;
  double u;
  double value;
};

/// Grid used by the response axiom checks.
const std::vector<double>& axiom_grid();

/// Checks zero-at-zero, monotonicity, finite asymptote, concavity and the
/// tilde assumptions (positive, decreasing, convex, vanishing at infinity)
/// on axiom_grid(). Empty result means all pass.
std::vector<AxiomViolation> check_response_axioms(const ResponseSpec& spec);

}  // namespace foodchain
