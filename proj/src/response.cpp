#include "foodchain/response.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "foodchain/errors.hpp"

namespace foodchain {

namespace {

void require_nonnegative(double u, const char* what) {
  if (!(u >= 0.0)) {
    std::ostringstream msg;
    msg << what << ": argument must be >= 0, got " << u;
    throw DomainError(msg.str());
  }
}

// (1 - e^{-w}(1 + w)) / w^2, the Ivlev tilde slope kernel. The direct form
// cancels catastrophically near w = 0, where the alternating series is used.
double ivlev_tilde_kernel(double w) {
  if (w < 0.1) {
    double sum = 0.0;
    double power = 1.0;  // w^{k-2}
    double factorial = 2.0;  // k!
    for (int k = 2; k <= 14; ++k) {
      double sign = (k % 2 == 0) ? 1.0 : -1.0;
      sum += sign * (k - 1) * power / factorial;
      power *= w;
      factorial *= (k + 1);
    }
    return sum;
  }
  return (-std::expm1(-w) - w * std::exp(-w)) / (w * w);
}

}  // namespace

std::string_view to_string(ResponseKind kind) {
  switch (kind) {
    case ResponseKind::Holling2:
      return "holling2";
    case ResponseKind::Ivlev:
      return "ivlev";
  }
  return "unknown";
}

ResponseKind response_kind_from_string(std::string_view name) {
  if (name == "holling2") return ResponseKind::Holling2;
  if (name == "ivlev") return ResponseKind::Ivlev;
  throw DomainError("unknown response kind '" + std::string(name) + "'");
}

ResponseSpec::ResponseSpec(ResponseKind kind, double p1, double p2)
    : kind_(kind), p1_(p1), p2_(p2) {
  if (!(p1 > 0.0) || !(p2 > 0.0) || !std::isfinite(p1) || !std::isfinite(p2)) {
    std::ostringstream msg;
    msg << "response parameters must be positive and finite, got p1=" << p1 << " p2=" << p2;
    throw DomainError(msg.str());
  }
}

double ResponseSpec::value_unchecked(double u) const {
  switch (kind_) {
    case ResponseKind::Holling2:
      return p1_ * u / (1.0 + p2_ * u);
    case ResponseKind::Ivlev:
      return -p1_ * std::expm1(-p2_ * u);
  }
  return 0.0;
}

double ResponseSpec::slope_unchecked(double u) const {
  switch (kind_) {
    case ResponseKind::Holling2: {
      double q = 1.0 + p2_ * u;
      return p1_ / (q * q);
    }
    case ResponseKind::Ivlev:
      return p1_ * p2_ * std::exp(-p2_ * u);
  }
  return 0.0;
}

double ResponseSpec::eval(double u) const {
  require_nonnegative(u, "eval");
  return value_unchecked(u);
}

double ResponseSpec::deriv(double u) const {
  require_nonnegative(u, "deriv");
  return slope_unchecked(u);
}

double ResponseSpec::deriv2(double u) const {
  require_nonnegative(u, "deriv2");
  switch (kind_) {
    case ResponseKind::Holling2: {
      double q = 1.0 + p2_ * u;
      return -2.0 * p1_ * p2_ / (q * q * q);
    }
    case ResponseKind::Ivlev:
      return -p1_ * p2_ * p2_ * std::exp(-p2_ * u);
  }
  return 0.0;
}

double ResponseSpec::tilde(double u) const {
  require_nonnegative(u, "tilde");
  if (u == 0.0) return initial_slope();
  switch (kind_) {
    case ResponseKind::Holling2:
      return p1_ / (1.0 + p2_ * u);
    case ResponseKind::Ivlev:
      return -p1_ * std::expm1(-p2_ * u) / u;
  }
  return 0.0;
}

double ResponseSpec::tilde_deriv(double u) const {
  require_nonnegative(u, "tilde_deriv");
  switch (kind_) {
    case ResponseKind::Holling2: {
      double q = 1.0 + p2_ * u;
      return -p1_ * p2_ / (q * q);
    }
    case ResponseKind::Ivlev:
      return -p1_ * p2_ * p2_ * ivlev_tilde_kernel(p2_ * u);
  }
  return 0.0;
}

double ResponseSpec::asymptote() const {
  switch (kind_) {
    case ResponseKind::Holling2:
      return p1_ / p2_;
    case ResponseKind::Ivlev:
      return p1_;
  }
  return 0.0;
}

double ResponseSpec::initial_slope() const {
  switch (kind_) {
    case ResponseKind::Holling2:
      return p1_;
    case ResponseKind::Ivlev:
      return p1_ * p2_;
  }
  return 0.0;
}

double ResponseSpec::inverse(double v) const {
  if (!(v > 0.0) || !(v < asymptote())) {
    std::ostringstream msg;
    msg << "inverse: value " << v << " outside (0, " << asymptote() << ")";
    throw NoSolutionError(msg.str());
  }
  switch (kind_) {
    case ResponseKind::Holling2:
      return v / (p1_ - p2_ * v);
    case ResponseKind::Ivlev:
      return -std::log1p(-v / p1_) / p2_;
  }
  return invert_increasing([this](double u) { return value_unchecked(u); }, v, asymptote());
}

double invert_increasing(const std::function<double(double)>& f, double v, double sup, double tol) {
  if (!(v > f(0.0)) || !(v < sup)) throw NoSolutionError("invert_increasing: value out of range");
  double lo = 0.0;
  double hi = 1.0;
  while (f(hi) < v) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NoSolutionError("invert_increasing: bracket overflow");
  }
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < v) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

const std::vector<double>& axiom_grid() {
  static const std::vector<double> grid{0.0, 1e-4, 1e-2, 0.1, 0.5, 1.0, 5.0, 50.0};
  return grid;
}

std::vector<AxiomViolation> check_response_axioms(const ResponseSpec& spec) {
  std::vector<AxiomViolation> out;
  auto flag = [&](bool ok, const char* axiom, double u, double value) {
    if (!ok) out.push_back({axiom, u, value});
  };

  flag(spec.eval(0.0) == 0.0, "I: f(0) = 0", 0.0, spec.eval(0.0));
  double asym = spec.asymptote();
  flag(std::isfinite(asym) && asym > 0.0, "III: finite asymptote", std::numeric_limits<double>::infinity(),
       asym);

  double u_max = axiom_grid().back();
  for (double u : axiom_grid()) {
    double d1 = spec.deriv(u);
    double d2 = spec.deriv2(u);
    // Once f has reached its asymptote in double precision the derivatives
    // underflow to zero and carry no sign information.
    const bool saturated = !(spec.eval(u) < asym);
    flag(d1 > 0.0 || (saturated && d1 == 0.0), "II: f'(u) > 0", u, d1);
    flag(d2 < 0.0 || (saturated && d2 == 0.0), "IV: f''(u) < 0", u, d2);

    double t = spec.tilde(u);
    double td = spec.tilde_deriv(u);
    flag(t > 0.0, "(a): tilde(u) > 0", u, t);
    flag(td < 0.0, "(b): tilde'(u) < 0", u, td);

    double second = 0.0;
    if (u == 0.0) {
      const double h = 1e-3;
      second = spec.tilde(0.0) - 2.0 * spec.tilde(h) + spec.tilde(2.0 * h);
    } else {
      double h = 0.5 * u;
      second = spec.tilde(u - h) - 2.0 * spec.tilde(u) + spec.tilde(u + h);
    }
    flag(second > 0.0, "(c): tilde convex", u, second);
  }
  double tail = spec.tilde(u_max);
  flag(tail < 0.05 * spec.initial_slope(), "(d): tilde(u) -> 0", u_max, tail);
  return out;
}

}  // namespace foodchain
