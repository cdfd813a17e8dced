#include "foodchain/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "foodchain/errors.hpp"

namespace foodchain {

namespace {

constexpr double kThresholdTol = 1e-13;

// Bisection on a continuous function with f(lo), f(hi) of opposite signs.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > kThresholdTol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double tangency_residual(const ModelParams& params, double d2) {
  const double y = params.f2().inverse(d2);
  const double xc = tangency_abscissa(params.f1(), y);
  return 1.0 - xc - y * params.f1().tilde(xc);
}

}  // namespace

SaddleNode find_saddle_node(const ModelParams& params, double lo, double hi) {
  const double sup = params.f2().asymptote();
  if (!(lo > 0.0) || !(hi < sup) || !(lo < hi)) {
    throw DomainError("find_saddle_node: search interval must lie inside (0, f2_inf)");
  }
  auto r = [&](double d2) { return tangency_residual(params, d2); };
  if ((r(lo) > 0.0) == (r(hi) > 0.0)) throw NotFoundError("find_saddle_node: no sign change on interval");
  const double d2 = bisect(r, lo, hi);
  const ModelParams p = params.with_d2(d2);
  const double y = p.f2().inverse(d2);
  const double x = tangency_abscissa(p.f1(), y);
  const double z = (p.f1().eval(x) - p.d1()) / p.f2().tilde(y);
  return {d2, State(x, y, z)};
}

SaddleNode find_saddle_node(const ModelParams& params) {
  const double sup = params.f2().asymptote();
  // The residual is positive for small d2 and negative near the asymptote;
  // scan for the last sign change.
  const int n = 400;
  double prev_d2 = sup * 1e-6;
  double prev = tangency_residual(params, prev_d2);
  double lo = -1.0, hi = -1.0;
  for (int i = 1; i <= n; ++i) {
    double d2 = sup * (1e-6 + (1.0 - 2e-6) * i / n);
    double r = tangency_residual(params, d2);
    if ((r > 0.0) != (prev > 0.0)) {
      lo = prev_d2;
      hi = d2;
    }
    prev = r;
    prev_d2 = d2;
  }
  if (lo < 0.0) throw NotFoundError("find_saddle_node: interior branch never folds");
  return find_saddle_node(params, lo, hi);
}

std::pair<double, double> sn_transversality(const ModelParams& params_at_sn, const State& point) {
  const auto& f1 = params_at_sn.f1();
  const auto& f2 = params_at_sn.f2();
  return {-f1.eval(point.x()) / f2.deriv(point.y()), -2.0 - f1.deriv2(point.x()) * point.y()};
}

double find_transcritical(const ModelParams& params) {
  const auto& f1 = params.f1();
  const double d1 = params.d1();
  if (!(d1 < std::min(f1.eval(1.0), f1.asymptote()))) {
    throw NotFoundError("find_transcritical: boundary equilibrium absent");
  }
  const double xb = f1.inverse(d1);
  const double yb = xb * (1.0 - xb) / d1;
  return params.f2().eval(yb);
}

TranscriticalTransversality tc_transversality(const ModelParams& params_at_tc) {
  const auto eb = boundary_equilibrium(params_at_tc);
  if (!eb) throw NotFoundError("tc_transversality: boundary equilibrium absent");
  const auto& f1 = params_at_tc.f1();
  const auto& f2 = params_at_tc.f2();
  const double xb = eb->coords.x();
  const double yb = eb->coords.y();
  const double trace_term = 1.0 - 2.0 * xb - yb * f1.deriv(xb);
  TranscriticalTransversality out{};
  // Third component of dF/dd2 is -z, which vanishes on the boundary plane.
  out.wt_f_d2 = 0.0 - eb->coords.z();
  out.wt_df_v = -yb * f1.deriv(xb) / params_at_tc.d2();
  out.wt_d2f_vv = 2.0 * f2.deriv(yb) * (trace_term / f1.deriv(xb)) * (yb * f1.deriv(xb) / f2.eval(yb));
  return out;
}

std::optional<CharCoeffs> branch_coeffs(const ModelParams& params, double d2, EquilibriumKind branch) {
  const ModelParams p = params.with_d2(d2);
  for (const auto& e : interior_equilibria(p)) {
    if (e.kind == branch && e.routh_hurwitz) return e.routh_hurwitz->coeffs;
  }
  return std::nullopt;
}

std::vector<HopfPoint> find_hopf(const ModelParams& params, double lo, double hi, const HopfSearch& search) {
  if (!(lo < hi) || search.grid < 2) throw DomainError("find_hopf: bad search interval");
  auto delta = [&](double d2) -> std::optional<double> {
    auto c = branch_coeffs(params, d2, search.branch);
    if (!c) return std::nullopt;
    return c->hurwitz_delta();
  };

  std::vector<double> grid;
  std::vector<double> values;
  for (int i = 0; i <= search.grid; ++i) {
    double d2 = lo + (hi - lo) * i / search.grid;
    if (auto v = delta(d2)) {
      grid.push_back(d2);
      values.push_back(*v);
    }
  }

  std::vector<HopfPoint> out;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if ((values[i - 1] > 0.0) == (values[i] > 0.0)) continue;
    auto f = [&](double d2) {
      auto v = delta(d2);
      if (!v) throw NumericalError("find_hopf: branch vanished inside a bracket");
      return *v;
    };
    const double root = bisect(f, grid[i - 1], grid[i]);
    auto c = branch_coeffs(params, root, search.branch);
    if (!c || !(c->p0 > 0.0) || !(c->p2 > 0.0)) continue;
    const double h = 1e-6;
    auto up = delta(root + h);
    auto down = delta(root - h);
    if (!up || !down) continue;
    const double slope = (*up - *down) / (2.0 * h);
    if (!(std::abs(slope) > 1e-6)) continue;
    out.push_back({root, Criticality::Undetermined, slope});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.d2 > b.d2; });
  if (search.classify) {
    for (auto& hp : out) hp.criticality = classify_hopf(params, hp.d2, 5e-4, search.cfg);
  }
  return out;
}

ThresholdReport compute_thresholds(const ModelParams& params, bool classify_hopf_points,
                                   const IntegratorConfig& cfg) {
  ThresholdReport report;
  try {
    const SaddleNode sn = find_saddle_node(params);
    report.d2_sn = sn.d2;
    report.sn_point = sn.point;
    auto [q1, q2] = sn_transversality(params.with_d2(sn.d2), sn.point);
    report.transversality["sn_wt_f_d2"] = q1;
    report.transversality["sn_wt_d2f_vv"] = q2;
  } catch (const NotFoundError&) {
  }
  try {
    const double tc = find_transcritical(params);
    report.d2_tc = tc;
    const auto t = tc_transversality(params.with_d2(tc));
    report.transversality["tc_wt_f_d2"] = t.wt_f_d2;
    report.transversality["tc_wt_df_v"] = t.wt_df_v;
    report.transversality["tc_wt_d2f_vv"] = t.wt_d2f_vv;
  } catch (const NotFoundError&) {
  }
  if (report.d2_sn) {
    const double hi = *report.d2_sn * (1.0 - 1e-9);
    const double lo = report.d2_tc ? *report.d2_tc : *report.d2_sn * 1e-3;
    if (lo < hi) {
      HopfSearch search;
      search.classify = classify_hopf_points;
      search.cfg = cfg;
      report.d2_hopf = find_hopf(params, lo, hi, search);
      for (std::size_t i = 0; i < report.d2_hopf.size(); ++i) {
        report.transversality["hopf" + std::to_string(i + 1) + "_ddelta_dd2"] = report.d2_hopf[i].delta_slope;
      }
    }
  }
  return report;
}

}  // namespace foodchain
