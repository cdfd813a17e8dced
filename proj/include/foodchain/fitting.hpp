#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "foodchain/errors.hpp"
#include "foodchain/response.hpp"

namespace foodchain {

struct FitProblem {
  ResponseSpec target = ResponseSpec::holling2(4.98, 6.2);
  ResponseKind family = ResponseKind::Ivlev;
  double u_lo = 0.0;
  double u_hi = 1.0;
  int n_samples = 101;
  std::optional<std::pair<double, double>> init;
  /// Also try 16 deterministic log-spread starts and keep the best.
  bool multistart = false;

  /// Throws DomainError on u_lo < 0, u_lo >= u_hi or n_samples < 10.
  void validate() const;
  /// Uniform samples u_lo .. u_hi inclusive.
  std::vector<double> samples() const;
};

struct FitResult {
  ResponseSpec fitted = ResponseSpec::ivlev(1.0, 1.0);
  double sse = 0.0;
  double sup_err = 0.0;
  int iterations = 0;
  /// sse after each accepted step, starting with the initial guess.
  std::vector<double> sse_history;
};

/// Raised when the iteration cap is hit; carries the best point found.
class FitNotConvergedError : public NumericalError {
 public:
  FitNotConvergedError(const std::string& what, FitResult best)
      : NumericalError(what), best_(std::move(best)) {}
  const FitResult& best() const { return best_; }

 private:
  FitResult best_;
};

/// Sum of squared differences between `candidate` and `target` on `u`.
double fit_sse(const ResponseSpec& candidate, const ResponseSpec& target, const std::vector<double>& u);

/// Residual Jacobian d r_i / d log(p_j) of `family` at (p1, p2).
Eigen::MatrixX2d residual_jacobian(ResponseKind family, double p1, double p2, const std::vector<double>& u);

/// Asymptote- and initial-slope-matching starting point.
std::pair<double, double> default_init(const ResponseSpec& target, ResponseKind family);

/// Levenberg-damped Gauss-Newton in log-parameter space.
FitResult fit(const FitProblem& problem);

}  // namespace foodchain
