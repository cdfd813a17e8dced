#include "foodchain/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "foodchain/errors.hpp"

namespace foodchain {

namespace {

void require_state(const State& s, const char* what) {
  for (int i = 0; i < 3; ++i) {
    if (!(s[i] >= 0.0)) {
      std::ostringstream msg;
      msg << what << ": state components must be >= 0, got (" << s.x() << ", " << s.y() << ", "
          << s.z() << ")";
      throw DomainError(msg.str());
    }
  }
}

}  // namespace

ModelParams::ModelParams(ResponseSpec f1, ResponseSpec f2, double d1, double d2)
    : f1_(f1), f2_(f2), d1_(d1), d2_(d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0) || !std::isfinite(d1) || !std::isfinite(d2)) {
    std::ostringstream msg;
    msg << "mortality rates must be positive, got d1=" << d1 << " d2=" << d2;
    throw DomainError(msg.str());
  }
}

State rhs(const ModelParams& params, const State& s) {
  require_state(s, "rhs");
  return vector_field(params, s);
}

Matrix3 jacobian(const ModelParams& params, const State& s) {
  require_state(s, "jacobian");
  return jacobian_unchecked(params, s);
}

double residual(const ModelParams& params, const State& s) {
  return vector_field(params, s).cwiseAbs().maxCoeff();
}

CharCoeffs char_coeffs(const ModelParams& params, const State& e) {
  require_state(e, "char_coeffs");
  if (!(e.minCoeff() > 0.0) || residual(params, e) >= 1e-9) {
    throw PreconditionError("char_coeffs: point is not an interior equilibrium");
  }
  const auto& f1 = params.f1();
  const auto& f2 = params.f2();
  const double x = e.x();
  const double y = e.y();
  const double z = e.z();
  const double a = 1.0 - 2.0 * x - y * f1.deriv(x);
  const double b = f1.eval(x) - params.d1() - z * f2.deriv(y);
  const double c = params.d2() * z * f2.deriv(y);
  return {-(a + b), a * b + y * f1.eval(x) * f1.deriv(x) + c, -c * a};
}

Eigenvalues eigenvalues(const Matrix3& m) {
  Eigen::EigenSolver<Matrix3> solver(m, false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue iteration failed");
  Eigenvalues out;
  for (int i = 0; i < 3; ++i) out[i] = solver.eigenvalues()[i];
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    if (l.real() != r.real()) return l.real() > r.real();
    return l.imag() > r.imag();
  });
  return out;
}

}  // namespace foodchain
