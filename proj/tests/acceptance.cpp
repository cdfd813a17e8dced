// End-to-end acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "foodchain/bifurcation.hpp"
#include "foodchain/fitting.hpp"
#include "foodchain/presets.hpp"
#include "foodchain/sweep.hpp"
#include "oracles.hpp"

using namespace foodchain;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "FAILED(" << what << ") ";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void thresholds(Outcome& o, const ModelParams& base, double sn, double h1, double h2, double tc) {
  const auto t0 = Clock::now();
  const auto r = compute_thresholds(base, false);
  const double dt = seconds_since(t0);
  o.require(r.d2_sn && std::abs(*r.d2_sn - sn) < 1e-6, "SN");
  o.require(r.d2_hopf.size() == 2, "two Hopf roots");
  if (r.d2_hopf.size() == 2) {
    o.require(std::abs(r.d2_hopf[0].d2 - h1) < 1e-6, "H1");
    o.require(std::abs(r.d2_hopf[1].d2 - h2) < 1e-6, "H2");
    o.detail << "H1=" << r.d2_hopf[0].d2 << " H2=" << r.d2_hopf[1].d2 << ' ';
  }
  o.require(r.d2_tc && std::abs(*r.d2_tc - tc) < 1e-6, "TC");
  o.require(dt < 5.0, "runtime");
  o.detail << "SN=" << r.d2_sn.value_or(NAN) << " TC=" << r.d2_tc.value_or(NAN) << " t=" << dt << "s";
}

void c1(Outcome& o) { thresholds(o, holling_reference(0.1), 0.1049651383, 0.10406993, 0.09453397, 0.09244019); }
void c2(Outcome& o) { thresholds(o, ivlev_reference(0.1), 0.10405163, 0.10275556, 0.09840295, 0.09544625); }

void c3(Outcome& o) {
  for (const auto& [p, c] : {std::pair{holling_reference(0.1), oracle::holling_chain(0.1)},
                             std::pair{ivlev_reference(0.1), oracle::ivlev_chain(0.1)}}) {
    const double expected = c.f2(c.boundary()[1]);
    const double got = find_transcritical(p);
    o.require(std::abs(got - expected) < 1e-10, to_string(p.f1().kind()).data());
    o.detail << to_string(p.f1().kind()) << " |diff|=" << std::abs(got - expected) << ' ';
  }
}

void c4(Outcome& o) {
  const auto t0 = Clock::now();
  for (const auto& base : {holling_reference(0.1), ivlev_reference(0.1)}) {
    const std::string name(to_string(base.f1().kind()));
    const auto r = compute_thresholds(base, true);
    o.require(r.d2_hopf.size() == 2, name + " Hopf count");
    if (r.d2_hopf.size() != 2) continue;
    o.require(r.d2_hopf[0].criticality == Criticality::Sub, name + " H1 sub");
    o.require(r.d2_hopf[1].criticality == Criticality::Super, name + " H2 super");
    const auto u = hopf_cycle(base.with_d2(r.d2_hopf[0].d2 - 5e-4));
    const auto s = hopf_cycle(base.with_d2(r.d2_hopf[1].d2 - 5e-4));
    o.require(u && u->stability == CycleStability::Unstable, name + " unstable cycle below H1");
    o.require(s && s->stability == CycleStability::Stable, name + " stable cycle below H2");
    if (u && s) {
      o.detail << name << ": |mu|max below H1=" << std::abs(u->floquet[0]) << " below H2=" << std::abs(s->floquet[0])
               << ' ';
    }
  }
  const double dt = seconds_since(t0);
  o.require(dt < 120.0, "runtime");
  o.detail << "t=" << dt << "s";
}

void c5(Outcome& o) {
  auto t0 = Clock::now();
  const auto h = extinction(holling_reference(0.08), State(0.5, 0.4, 0.8));
  const double th = seconds_since(t0);
  t0 = Clock::now();
  const auto i = extinction(ivlev_reference(0.08), State(0.45, 0.5, 0.8));
  const double ti = seconds_since(t0);
  o.require(h.extinct && h.time > 500.0, "Holling extinct after T > 500");
  o.require(!i.extinct && i.min_z_final_window > 1e-3, "Ivlev coexistent");
  o.require(th < 60.0 && ti < 60.0, "runtime");
  o.detail << "Holling T=" << h.time << " Ivlev min z=" << i.min_z_final_window << " t=" << th << "s," << ti << "s";
}

void c6(Outcome& o) {
  const auto t0 = Clock::now();
  IntegratorConfig cfg;
  cfg.t_window = 3000.0;
  const State ic(0.45, 0.5, 0.8);
  const double a = lyapunov_max(holling_reference(0.060), ic, cfg);
  const double b = lyapunov_max(holling_reference(0.081), ic, cfg);
  const double c = lyapunov_max(ivlev_reference(0.071), ic, cfg);
  // 0.10 is bistable (focus and extinction); probe the focus basin.
  const State focus = interior_equilibria(holling_reference(0.10)).back().coords;
  const double d = lyapunov_max(holling_reference(0.10), focus + State(0.01, 0.01, 0.01), cfg);
  o.require(a > kChaosThreshold, "Holling 0.060");
  o.require(b > kChaosThreshold, "Holling 0.081");
  o.require(c > kChaosThreshold, "Ivlev 0.071");
  o.require(d < kChaosThreshold, "Holling 0.10");
  const double dt = seconds_since(t0);
  o.require(dt < 180.0, "runtime");
  o.detail << "lyap H.060=" << a << " H.081=" << b << " I.071=" << c << " H.10=" << d << " t=" << dt << "s";
}

void c7(Outcome& o) {
  const auto t0 = Clock::now();
  const auto pts = sweep(holling_reference(0.09), make_grid(0.085, 0.092, 5e-4));
  const auto onset = period_doubling_onset(pts);
  const double dt = seconds_since(t0);
  o.require(onset.has_value(), "transition found");
  if (onset) {
    const double mid = 0.5 * (onset->first + onset->second);
    o.require(mid >= 0.087 && mid <= 0.091, "onset window");
    o.detail << "onset in [" << std::min(onset->first, onset->second) << ", "
             << std::max(onset->first, onset->second) << "] ";
  }
  o.require(dt < 300.0, "runtime");
  o.detail << "t=" << dt << "s";
}

void c8(Outcome& o) {
  const auto pts = sweep(holling_reference(0.07), make_grid(0.065, 0.078, 5e-4));
  int extinct = 0;
  for (const auto& p : pts) {
    const bool ok = p.summary && p.summary->kind == AttractorKind::BoundaryExtinction;
    extinct += ok;
    if (!ok) o.require(false, "d2=" + std::to_string(p.d2));
  }
  o.detail << extinct << "/" << pts.size() << " points BoundaryExtinction";
}

std::optional<LimitCycle> first_ulc(const ModelParams& base) {
  const auto r = compute_thresholds(base, false);
  if (r.d2_hopf.empty()) return std::nullopt;
  return hopf_cycle(base.with_d2(r.d2_hopf[0].d2 - 5e-4));
}

void c9(Outcome& o) {
  const auto hs = first_ulc(holling_reference(0.1));
  o.require(hs.has_value(), "Holling ULC start");
  if (hs) {
    const auto cont = continue_cycle(holling_reference(0.1), *hs, 0.075);
    o.require(!cont.terminated && std::abs(cont.branch.back().d2 - 0.075) < 1e-12, "Holling reaches 0.075");
    o.detail << "Holling last d2=" << cont.branch.back().d2 << ' ';
  }
  const auto is = first_ulc(ivlev_reference(0.1));
  o.require(is.has_value(), "Ivlev ULC start");
  if (is) {
    const auto cont = continue_cycle(ivlev_reference(0.1), *is, 0.06);
    o.require(cont.terminated && std::abs(cont.failed_d2 - 0.073) <= 0.003, "Ivlev terminates near 0.073");
    o.detail << "Ivlev terminated=" << cont.terminated << " at d2=" << cont.failed_d2;
  }
}

void c10(Outcome& o) {
  const State ic(0.45, 0.5, 0.8);
  const auto hs = first_ulc(holling_reference(0.1));
  o.require(hs.has_value(), "Holling ULC start");
  if (hs) {
    const auto to085 = continue_cycle(holling_reference(0.1), *hs, 0.085);
    const auto to0805 = continue_cycle(holling_reference(0.1), to085.branch.back(), 0.0805);
    o.require(!to085.terminated && !to0805.terminated, "ULC reaches 0.0805");
    const double far = crisis_check(to085.branch.back(), attractor_summary(holling_reference(0.085), ic, {}, true));
    const double near = crisis_check(to0805.branch.back(), attractor_summary(holling_reference(0.0805), ic, {}, true));
    o.require(near < 5.0 * far, "Holling approach");
    o.detail << "Holling dist(0.0805)=" << near << " dist(0.085)=" << far << ' ';
  }
  // The Ivlev ULC has merged into the boundary cycle above 0.071; that cycle
  // is the saddle cycle whose collision would matter there.
  const auto bc = boundary_cycle(ivlev_reference(0.071));
  const double ivd = crisis_check(bc.cycle, attractor_summary(ivlev_reference(0.071), ic, {}, true));
  o.require(ivd > kCollisionDistance, "Ivlev distance above flag");
  o.detail << "Ivlev dist(0.071, boundary cycle)=" << ivd;
}

void c11(Outcome& o) {
  const std::vector<std::tuple<ResponseSpec, oracle::Response, double, double>> cases{
      {ResponseSpec::holling2(4.98, 6.2), oracle::holling(4.98, 6.2), 0.67, 5.349},
      {ResponseSpec::holling2(0.46, 2.0), oracle::holling(0.46, 2.0), 0.1647, 2.457}};
  for (const auto& [spec, ref, a, b] : cases) {
    FitProblem prob;
    prob.target = spec;
    const FitResult r = fit(prob);
    const auto opt = oracle::grid_search_fit(ref, true, prob.u_lo, prob.u_hi, prob.n_samples);
    o.require(oracle::rel_err(r.sse, opt.sse) < 1e-6, "oracle sse");
    o.require(std::abs(r.fitted.p1() / a - 1) < 0.2 && std::abs(r.fitted.p2() / b - 1) < 0.2, "within 20%");
    o.detail << "(" << r.fitted.p1() << ", " << r.fitted.p2() << ") dev " << 100 * (r.fitted.p1() / a - 1) << "%/"
             << 100 * (r.fitted.p2() / b - 1) << "% ";
  }
  FitProblem same;
  same.target = ResponseSpec::ivlev(0.67, 5.349);
  same.init = std::make_pair(0.9, 3.0);
  const FitResult r = fit(same);
  o.require(std::abs(r.fitted.p1() - 0.67) < 1e-8 && std::abs(r.fitted.p2() - 5.349) < 1e-8, "idempotence");
  o.detail << "domain [0, 1], 101 samples";
}

void c12(Outcome& o) {
  int checks = 0;
  for (const auto& spec : {ResponseSpec::holling2(4.98, 6.2), ResponseSpec::holling2(0.46, 2.0),
                           ResponseSpec::ivlev(0.67, 5.349), ResponseSpec::ivlev(0.1647, 2.457)}) {
    o.require(check_response_axioms(spec).empty(), "axioms");
  }
  double worst_jac = 0.0, worst_res = 0.0;
  int rh_compared = 0;
  for (const auto& [base, chain] : {std::pair{holling_reference(0.1), +[](double d) { return oracle::holling_chain(d); }},
                                    std::pair{ivlev_reference(0.1), +[](double d) { return oracle::ivlev_chain(d); }}}) {
    for (int i = 0; i < 50; ++i) {
      const double d2 = 0.06 + 0.046 * i / 49.0;
      const auto p = base.with_d2(d2);
      for (const auto& e : all_equilibria(p)) {
        worst_res = std::max(worst_res, residual(p, e.coords));
        const Matrix3 fd = chain(d2).fd_jacobian(e.coords);
        worst_jac = std::max(worst_jac, (jacobian(p, e.coords) - fd).norm() / std::max(1.0, fd.norm()));
        if (e.routh_hurwitz && !e.degenerate) {
          o.require(e.routh_hurwitz->stable == (e.eigenvalues[0].real() < 0.0), "RH vs eigenvalues");
          ++rh_compared;
        }
        ++checks;
      }
    }
    const double h2 = compute_thresholds(base, false).d2_hopf.at(1).d2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double deltas[] = {1e-4, 2e-4, 4e-4, 8e-4};
    for (double dl : deltas) {
      const auto c = hopf_cycle(base.with_d2(h2 - dl));
      if (!c) {
        o.require(false, "Hopf cycle");
        return;
      }
      const double x = std::log(dl), y = std::log(c->amplitude(0));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
    o.require(std::abs(slope - 0.5) <= 0.1, "sqrt scaling");
    o.detail << to_string(base.f1().kind()) << " slope=" << slope << ' ';
  }
  o.require(worst_jac < 1e-5, "Jacobian");
  o.require(worst_res < 1e-9, "residuals");
  o.detail << "jac=" << worst_jac << " res=" << worst_res << " rh=" << rh_compared << " eq=" << checks;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"Holling thresholds", c1},
      {"Ivlev thresholds", c2},
      {"transcritical closed form", c3},
      {"Hopf criticality (Floquet)", c4},
      {"extinction vs coexistence at d2=0.08", c5},
      {"chaos windows (Lyapunov)", c6},
      {"period-doubling onset", c7},
      {"extinction window sweep", c8},
      {"ULC continuation", c9},
      {"crisis proximity", c10},
      {"response fitting", c11},
      {"property suites", c12},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failed += !o.pass;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
