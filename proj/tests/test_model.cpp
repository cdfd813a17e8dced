#include <doctest.h>

#include "foodchain/equilibria.hpp"
#include "foodchain/errors.hpp"
#include "foodchain/model.hpp"
#include "foodchain/presets.hpp"
#include "oracles.hpp"

using namespace foodchain;

namespace {

const std::vector<State> kPoints{State(0.1, 0.2, 0.3), State(0.5, 0.4, 0.8), State(0.9, 0.05, 1.5),
                                 State(0.02, 0.7, 0.01), State(0.3, 0.3, 0.0)};

}  // namespace

TEST_CASE("vector field matches a direct transcription") {
  for (double d2 : {0.06, 0.09, 0.1}) {
    const auto p = holling_reference(d2);
    const auto q = ivlev_reference(d2);
    const auto ph = oracle::holling_chain(d2);
    const auto qh = oracle::ivlev_chain(d2);
    for (const auto& s : kPoints) {
      CHECK((rhs(p, s) - ph.field(s)).norm() < 1e-14);
      CHECK((rhs(q, s) - qh.field(s)).norm() < 1e-14);
    }
  }
}

TEST_CASE("analytic Jacobian agrees with finite differences to 1e-5 relative") {
  for (double d2 : {0.06, 0.08, 0.1}) {
    for (const auto& [p, o] : {std::pair{holling_reference(d2), oracle::holling_chain(d2)},
                               std::pair{ivlev_reference(d2), oracle::ivlev_chain(d2)}}) {
      for (const auto& s : kPoints) {
        const Matrix3 a = jacobian(p, s);
        const Matrix3 fd = o.fd_jacobian(s);
        CHECK((a - fd).norm() <= 1e-5 * std::max(1.0, fd.norm()));
      }
    }
  }
}

TEST_CASE("characteristic coefficients equal trace, minors and determinant of the Jacobian") {
  for (double d2 : {0.095, 0.1, 0.104}) {
    const auto p = holling_reference(d2);
    for (const auto& e : interior_equilibria(p)) {
      const CharCoeffs c = char_coeffs(p, e.coords);
      const auto ref = oracle::char_poly(oracle::holling_chain(d2).fd_jacobian(e.coords, 1e-7));
      CHECK(c.p2 == doctest::Approx(ref.p2).epsilon(1e-6));
      CHECK(c.p1 == doctest::Approx(ref.p1).epsilon(1e-6));
      CHECK(c.p0 == doctest::Approx(ref.p0).epsilon(1e-5));
    }
  }
}

TEST_CASE("char_coeffs refuses points that are not interior equilibria") {
  const auto p = holling_reference(0.1);
  CHECK_THROWS_AS(char_coeffs(p, State(0.3, 0.3, 0.3)), PreconditionError);
  CHECK_THROWS_AS(char_coeffs(p, State(1.0, 0.0, 0.0)), PreconditionError);
}

TEST_CASE("eigenvalues are sorted and reproduce the matrix invariants") {
  Matrix3 m;
  m << -1.0, 2.0, 0.0, -2.0, -1.0, 0.5, 0.0, 0.3, 0.4;
  const auto ev = eigenvalues(m);
  CHECK(ev[0].real() >= ev[1].real());
  CHECK(ev[1].real() >= ev[2].real());
  const auto sum = ev[0] + ev[1] + ev[2];
  const auto prod = ev[0] * ev[1] * ev[2];
  CHECK(sum.real() == doctest::Approx(m.trace()).epsilon(1e-12));
  CHECK(std::abs(sum.imag()) < 1e-12);
  CHECK(prod.real() == doctest::Approx(m.determinant()).epsilon(1e-12));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(ModelParams(ResponseSpec::holling2(1, 1), ResponseSpec::holling2(1, 1), 0.4, 0.0), DomainError);
  CHECK_THROWS_AS(ModelParams(ResponseSpec::holling2(1, 1), ResponseSpec::holling2(1, 1), -0.4, 0.1), DomainError);
  CHECK_THROWS_AS(rhs(holling_reference(0.1), State(-0.1, 0.2, 0.2)), DomainError);
  CHECK(residual(holling_reference(0.1), State::Zero()) == 0.0);
}
