#include "foodchain/fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace foodchain {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kStepTol = 1e-10;
constexpr double kRelImprovementTol = 1e-12;
constexpr double kMaxDamping = 1e16;

Eigen::VectorXd residuals(const ResponseSpec& candidate, const ResponseSpec& target, const std::vector<double>& u) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(u.size()));
  for (std::size_t i = 0; i < u.size(); ++i) {
    r[static_cast<Eigen::Index>(i)] = candidate.eval(u[i]) - target.eval(u[i]);
  }
  return r;
}

FitResult finish(const ResponseSpec& spec, const ResponseSpec& target, const std::vector<double>& u, int iterations,
                 std::vector<double> history) {
  FitResult res;
  res.fitted = spec;
  const Eigen::VectorXd r = residuals(spec, target, u);
  res.sse = r.squaredNorm();
  res.sup_err = r.cwiseAbs().maxCoeff();
  res.iterations = iterations;
  res.sse_history = std::move(history);
  return res;
}

FitResult run_from(const FitProblem& problem, const std::vector<double>& u, std::pair<double, double> start) {
  const auto& target = problem.target;
  Eigen::Vector2d theta(std::log(start.first), std::log(start.second));
  auto spec_of = [&](const Eigen::Vector2d& t) { return ResponseSpec(problem.family, std::exp(t[0]), std::exp(t[1])); };

  ResponseSpec current = spec_of(theta);
  Eigen::VectorXd r = residuals(current, target, u);
  double sse = r.squaredNorm();
  std::vector<double> history{sse};
  double lambda = 1e-3;

  for (int it = 1; it <= kMaxIterations; ++it) {
    if (sse == 0.0) return finish(current, target, u, it - 1, history);
    const Eigen::MatrixX2d J = residual_jacobian(problem.family, current.p1(), current.p2(), u);
    const Eigen::Matrix2d JtJ = J.transpose() * J;
    const Eigen::Vector2d g = J.transpose() * r;

    bool accepted = false;
    while (lambda < kMaxDamping) {
      Eigen::Matrix2d A = JtJ;
      A.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-300);
      const Eigen::Vector2d step = A.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::Vector2d trial_theta = theta + step;
      if (!trial_theta.allFinite() || trial_theta.cwiseAbs().maxCoeff() > 700.0) {
        lambda *= 10.0;
        continue;
      }
      const ResponseSpec trial = spec_of(trial_theta);
      const Eigen::VectorXd trial_r = residuals(trial, target, u);
      const double trial_sse = trial_r.squaredNorm();
      if (trial_sse <= sse) {
        const double improvement = sse > 0.0 ? (sse - trial_sse) / sse : 0.0;
        theta = trial_theta;
        current = trial;
        r = trial_r;
        sse = trial_sse;
        history.push_back(sse);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (step.norm() < kStepTol || improvement < kRelImprovementTol) {
          return finish(current, target, u, it, history);
        }
        break;
      }
      lambda *= 10.0;
    }
    // No descent direction left at any damping: stationary to working precision.
    if (!accepted) return finish(current, target, u, it, history);
  }
  throw FitNotConvergedError("fit: no convergence after 500 iterations", finish(current, target, u, kMaxIterations, history));
}

// Deterministic low-discrepancy offsets (Halton bases 2 and 3) in [-1, 1]^2.
std::array<std::pair<double, double>, 16> multistart_offsets() {
  auto halton = [](int i, int base) {
    double f = 1.0, r = 0.0;
    for (; i > 0; i /= base) {
      f /= base;
      r += f * (i % base);
    }
    return r;
  };
  std::array<std::pair<double, double>, 16> out{};
  for (int i = 0; i < 16; ++i) out[i] = {2.0 * halton(i + 1, 2) - 1.0, 2.0 * halton(i + 1, 3) - 1.0};
  return out;
}

}  // namespace

void FitProblem::validate() const {
  if (!(u_lo >= 0.0) || !(u_lo < u_hi) || !std::isfinite(u_hi)) throw DomainError("fit: domain must satisfy 0 <= lo < hi");
  if (n_samples < 10) throw DomainError("fit: need at least 10 samples");
  if (init && !(init->first > 0.0 && init->second > 0.0)) throw DomainError("fit: initial parameters must be positive");
}

std::vector<double> FitProblem::samples() const {
  std::vector<double> u(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) u[i] = u_lo + (u_hi - u_lo) * i / (n_samples - 1);
  return u;
}

double fit_sse(const ResponseSpec& candidate, const ResponseSpec& target, const std::vector<double>& u) {
  double s = 0.0;
  for (double ui : u) {
    const double d = candidate.eval(ui) - target.eval(ui);
    s += d * d;
  }
  return s;
}

Eigen::MatrixX2d residual_jacobian(ResponseKind family, double p1, double p2, const std::vector<double>& u) {
  Eigen::MatrixX2d J(static_cast<Eigen::Index>(u.size()), 2);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = u[i];
    const auto row = static_cast<Eigen::Index>(i);
    if (family == ResponseKind::Holling2) {
      const double den = 1.0 + p2 * x;
      J(row, 0) = p1 * x / den;
      J(row, 1) = -p1 * p2 * x * x / (den * den);
    } else {
      const double e = std::exp(-p2 * x);
      J(row, 0) = p1 * (1.0 - e);
      J(row, 1) = p1 * p2 * x * e;
    }
  }
  return J;
}

std::pair<double, double> default_init(const ResponseSpec& target, ResponseKind family) {
  const double a = target.asymptote();
  const double s = target.initial_slope();
  if (family == ResponseKind::Ivlev) return {a, s / a};
  // Holling: asymptote p1/p2, slope p1.
  return {s, s / a};
}

FitResult fit(const FitProblem& problem) {
  problem.validate();
  const std::vector<double> u = problem.samples();
  const auto start = problem.init ? *problem.init : default_init(problem.target, problem.family);
  FitResult best = run_from(problem, u, start);
  if (!problem.multistart) return best;
  for (const auto& [o1, o2] : multistart_offsets()) {
    try {
      FitResult cand = run_from(problem, u, {start.first * std::pow(10.0, o1), start.second * std::pow(10.0, o2)});
      // Strict improvement only, so the default start wins ties.
      if (cand.sse < best.sse * (1.0 - 1e-12)) best = std::move(cand);
    } catch (const FitNotConvergedError&) {
    }
  }
  return best;
}

}  // namespace foodchain
