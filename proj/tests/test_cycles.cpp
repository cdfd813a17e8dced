#include <doctest.h>

#include <cmath>

#include "foodchain/bifurcation.hpp"
#include "foodchain/cycles.hpp"
#include "foodchain/errors.hpp"
#include "foodchain/presets.hpp"
#include "oracles.hpp"

using namespace foodchain;

namespace {

// Liouville: the product of the Floquet multipliers is exp of the integral of
// the divergence along the orbit. Trapezoid rule over the uniform samples.
double liouville_log_product(const oracle::Chain& c, const LimitCycle& cyc) {
  double acc = 0.0;
  const auto& s = cyc.samples;
  for (const auto& p : s) acc += c.fd_jacobian(p, 1e-7).trace();
  return acc * cyc.period / static_cast<double>(s.size());
}

double log_multiplier_product(const LimitCycle& cyc) {
  double acc = 0.0;
  for (const auto& m : cyc.floquet) acc += std::log(std::abs(m));
  return acc;
}

}  // namespace

TEST_CASE("section coordinates round-trip") {
  const Section s(Eigen::Vector3d(1.0, 2.0, -0.5), 0.7);
  const State p(0.3, 0.1, 0.9);
  const State onplane = p - s.value(p) * s.normal();
  CHECK(std::abs(s.value(onplane)) < 1e-14);
  CHECK((s.from_local(s.to_local(onplane)) - onplane).norm() < 1e-14);
  CHECK(s.normal().norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(Section(Eigen::Vector3d::Zero(), 1.0), DomainError);
}

TEST_CASE("stable cycle: Newton shooting, Floquet multipliers and Liouville's formula") {
  const auto p = holling_reference(0.092);
  const State settled = integrate_final(p, State(0.45, 0.5, 0.8), 3000.0);
  const Section sec = interior_section(p);
  const auto hit = poincare_return(p, sec, settled - sec.value(settled) * sec.normal());
  const LimitCycle c = find_cycle(p, hit.state, sec);
  CHECK(c.residual < 1e-8);
  CHECK(c.stability == CycleStability::Stable);
  CHECK(std::abs(c.floquet[c.trivial_index()] - 1.0) < 1e-5);
  CHECK(log_multiplier_product(c) == doctest::Approx(liouville_log_product(oracle::holling_chain(0.092), c)).epsilon(2e-3));
  // The return time of the converged anchor is the period.
  const auto back = poincare_return(p, sec, c.anchor);
  CHECK(back.flight_time == doctest::Approx(c.period).epsilon(1e-8));
  CHECK((back.state - c.anchor).norm() < 1e-7);
}

TEST_CASE("poincare_return preconditions") {
  const auto p = holling_reference(0.092);
  const Section sec = interior_section(p);
  CHECK_THROWS_AS(poincare_return(p, sec, State(0.3, 0.9, 0.5)), PreconditionError);
  // A point on the section near the stable focus never returns at 0.10.
  const auto q = holling_reference(0.10);
  const auto eqs = interior_equilibria(q);
  IntegratorConfig short_cfg;
  short_cfg.t_window = 50.0;
  CHECK_THROWS_AS(poincare_return(q, interior_section(q), eqs.back().coords, +1, short_cfg), RecurrenceError);
}

TEST_CASE("Hopf criticality by Floquet verification") {
  for (const auto& base : {holling_reference(0.1), ivlev_reference(0.1)}) {
    const auto r = compute_thresholds(base, true);
    REQUIRE(r.d2_hopf.size() == 2);
    CHECK(r.d2_hopf[0].criticality == Criticality::Sub);
    CHECK(r.d2_hopf[1].criticality == Criticality::Super);
    const auto unstable = hopf_cycle(base.with_d2(r.d2_hopf[0].d2 - 5e-4));
    REQUIRE(unstable);
    CHECK(unstable->stability == CycleStability::Unstable);
    const auto stable = hopf_cycle(base.with_d2(r.d2_hopf[1].d2 - 5e-4));
    REQUIRE(stable);
    CHECK(stable->stability == CycleStability::Stable);
  }
}

TEST_CASE("Hopf cycle amplitude grows like the square root of the distance") {
  for (const auto& base : {holling_reference(0.1), ivlev_reference(0.1)}) {
    const double h2 = compute_thresholds(base, false).d2_hopf[1].d2;
    std::vector<double> lx, ly;
    for (double delta : {1e-4, 2e-4, 4e-4, 8e-4}) {
      const auto c = hopf_cycle(base.with_d2(h2 - delta));
      REQUIRE(c);
      lx.push_back(std::log(delta));
      ly.push_back(std::log(c->amplitude(0)));
    }
    const double mx = (lx[0] + lx[1] + lx[2] + lx[3]) / 4, my = (ly[0] + ly[1] + ly[2] + ly[3]) / 4;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < 4; ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxy / sxx;
    CHECK(slope > 0.4);
    CHECK(slope < 0.6);
  }
}

TEST_CASE("continuation follows the unstable branch and stops where it leaves the interior") {
  const auto base = ivlev_reference(0.1);
  const double h1 = compute_thresholds(base, false).d2_hopf[0].d2;
  const auto start = hopf_cycle(base.with_d2(h1 - 5e-4));
  REQUIRE(start);
  const auto cont = continue_cycle(base, *start, 0.065);
  CHECK(cont.terminated);
  for (std::size_t i = 1; i < cont.branch.size(); ++i) {
    CHECK(cont.branch[i].d2 < cont.branch[i - 1].d2);
    CHECK(cont.branch[i].min_component(2) > 0.0);
  }
  // Termination coincides with the boundary cycle losing transverse stability.
  const auto bc = boundary_cycle(base.with_d2(cont.failed_d2));
  CHECK(std::abs(bc.critical_d2 - cont.failed_d2) < 1e-4);
  CHECK_THROWS_AS(continue_cycle(base, *start, 0.09, -1.0), DomainError);
}

TEST_CASE("boundary cycle lies in the invariant plane") {
  const auto bc = boundary_cycle(holling_reference(0.07));
  for (const auto& s : bc.cycle.samples) CHECK(s.z() == 0.0);
  CHECK(bc.cycle.period > 0.0);
  // Mean of f2(y) over the cycle recomputed from the samples.
  const auto f2 = oracle::holling(0.46, 2.0);
  double mean = 0.0;
  for (const auto& s : bc.cycle.samples) mean += f2(s.y());
  mean /= static_cast<double>(bc.cycle.samples.size());
  CHECK(bc.critical_d2 == doctest::Approx(mean).epsilon(1e-12));
  CHECK(bc.transverse_exponent == doctest::Approx(mean - 0.07).epsilon(1e-12));
}

TEST_CASE("crisis distance on synthetic geometry") {
  LimitCycle circle;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const double a = 2 * M_PI * i / n;
    circle.samples.emplace_back(0.5 + 0.2 * std::cos(a), 0.5 + 0.2 * std::sin(a), 0.3);
  }
  const std::vector<State> pts{State(0.5, 0.5, 0.3), State(0.5, 0.5, 0.35), State(0.75, 0.5, 0.3)};
  CHECK(crisis_check(circle, pts) == doctest::Approx(0.05).epsilon(1e-4));
  AttractorSummary empty;
  CHECK_THROWS_AS(crisis_check(circle, empty), PreconditionError);
}
