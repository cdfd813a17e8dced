#pragma once

#include <array>
#include <complex>

#include <Eigen/Core>

#include "foodchain/response.hpp"

namespace foodchain {

/// (x, y, z) = (prey, intermediate predator, top predator) densities.
using State = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Eigenvalues = std::array<std::complex<double>, 3>;

/// Food-chain model with logistic prey and linear predator mortalities.
class ModelParams {
 public:
  ModelParams(ResponseSpec f1, ResponseSpec f2, double d1, double d2);

  const ResponseSpec& f1() const { return f1_; }
  const ResponseSpec& f2() const { return f2_; }
  double d1() const { return d1_; }
  double d2() const { return d2_; }

  ModelParams with_d2(double d2) const { return {f1_, f2_, d1_, d2}; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  ResponseSpec f1_;
  ResponseSpec f2_;
  double d1_;
  double d2_;
};

/// Coefficients of lambda^3 + p2 lambda^2 + p1 lambda + p0 at an interior
/// equilibrium.
struct CharCoeffs {
  double p2;
  double p1;
  double p0;

  double hurwitz_delta() const { return p1 * p2 - p0; }
};

/// Vector field; throws DomainError if any component of s is negative.
State rhs(const ModelParams& params, const State& s);

/// Same as rhs without the domain check. Used inside the integrator where
/// intermediate stages may dip below zero by rounding.
inline State vector_field(const ModelParams& params, const State& s) {
  const double fx = params.f1().value_unchecked(s.x());
  const double fy = params.f2().value_unchecked(s.y());
  return {s.x() - s.x() * s.x() - fx * s.y(),
          fx * s.y() - params.d1() * s.y() - fy * s.z(),
          fy * s.z() - params.d2() * s.z()};
}

/// Analytic Jacobian of the vector field (unchecked variant).
inline Matrix3 jacobian_unchecked(const ModelParams& params, const State& s) {
  const double fx = params.f1().value_unchecked(s.x());
  const double dfx = params.f1().slope_unchecked(s.x());
  const double fy = params.f2().value_unchecked(s.y());
  const double dfy = params.f2().slope_unchecked(s.y());
  Matrix3 j;
  j << 1.0 - 2.0 * s.x() - dfx * s.y(), -fx, 0.0,
       dfx * s.y(), fx - params.d1() - dfy * s.z(), -fy,
       0.0, dfy * s.z(), fy - params.d2();
  return j;
}

Matrix3 jacobian(const ModelParams& params, const State& s);

/// Characteristic-polynomial coefficients at an interior equilibrium, using
/// the equilibrium identities (f2(y*) = d2). Throws PreconditionError when
/// `e` is not an interior equilibrium to 1e-9.
CharCoeffs char_coeffs(const ModelParams& params, const State& e);

/// Eigenvalues of a real 3x3 matrix sorted by descending real part, then by
/// imaginary part.
Eigenvalues eigenvalues(const Matrix3& m);

/// Infinity norm of rhs at s.
double residual(const ModelParams& params, const State& s);

}  // namespace foodchain
