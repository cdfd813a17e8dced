#include <doctest.h>

#include "foodchain/errors.hpp"
#include "foodchain/presets.hpp"
#include "foodchain/sweep.hpp"

using namespace foodchain;

TEST_CASE("grids are inclusive and tolerate rounding at the end point") {
  const auto g = make_grid(0.085, 0.092, 5e-4);
  REQUIRE(g.size() == 15);
  CHECK(g.front() == 0.085);
  CHECK(g.back() == doctest::Approx(0.092).epsilon(1e-12));
  const auto down = make_grid(0.078, 0.065, 5e-4);
  CHECK(down.size() == 27);
  CHECK(down.back() == doctest::Approx(0.065));
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 0.0), DomainError);
}

TEST_CASE("ic policy names") {
  CHECK(ic_policy_from_string("fixed") == IcPolicy::Fixed);
  CHECK(ic_policy_from_string(to_string(IcPolicy::Continuation)) == IcPolicy::Continuation);
  CHECK_THROWS_AS(ic_policy_from_string("random"), DomainError);
}

TEST_CASE("fixed-ic sweeps give identical results for any thread count") {
  const auto grid = make_grid(0.09, 0.1, 2.5e-3);
  SweepOptions one;
  one.policy = IcPolicy::Fixed;
  SweepOptions many = one;
  many.threads = 4;
  IntegratorConfig cfg;
  cfg.t_transient = 2000.0;
  cfg.t_window = 1000.0;
  const auto a = sweep(holling_reference(0.1), grid, one, cfg);
  const auto b = sweep(holling_reference(0.1), grid, many, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].summary);
    REQUIRE(b[i].summary);
    CHECK(a[i].d2 == b[i].d2);
    CHECK(a[i].summary->kind == b[i].summary->kind);
    CHECK(a[i].summary->z_maxima == b[i].summary->z_maxima);
    CHECK(a[i].summary->lyap_max == b[i].summary->lyap_max);
  }
}

TEST_CASE("sweep rejects grid points outside the feasible range") {
  CHECK_THROWS_AS(sweep(holling_reference(0.1), {0.1, 0.5}), DomainError);
}

TEST_CASE("period-doubling onset detection on synthetic points") {
  auto point = [](double d2, AttractorKind kind, int k) {
    SweepPoint p;
    p.d2 = d2;
    AttractorSummary s;
    s.kind = kind;
    s.k = k;
    p.summary = s;
    return p;
  };
  std::vector<SweepPoint> pts{point(0.085, AttractorKind::Periodic, 2), point(0.086, AttractorKind::Periodic, 2),
                              point(0.087, AttractorKind::Periodic, 1), point(0.088, AttractorKind::Periodic, 1)};
  const auto onset = period_doubling_onset(pts);
  REQUIRE(onset);
  CHECK(onset->first == 0.086);
  CHECK(onset->second == 0.087);
  pts[2] = point(0.087, AttractorKind::Chaotic, 0);
  CHECK_FALSE(period_doubling_onset(pts));
}
