#include "foodchain/sweep.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "foodchain/errors.hpp"

namespace foodchain {

std::string_view to_string(IcPolicy policy) {
  return policy == IcPolicy::Continuation ? "continuation" : "fixed";
}

IcPolicy ic_policy_from_string(std::string_view name) {
  if (name == "continuation") return IcPolicy::Continuation;
  if (name == "fixed") return IcPolicy::Fixed;
  throw DomainError("unknown ic policy '" + std::string(name) + "'");
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("make_grid: bad range");
  const double span = hi - lo;
  const auto n = static_cast<long>(std::floor(std::abs(span) / step + 1e-9));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n) + 1);
  const double sign = span >= 0.0 ? 1.0 : -1.0;
  for (long i = 0; i <= n; ++i) grid.push_back(lo + sign * static_cast<double>(i) * step);
  return grid;
}

std::vector<SweepPoint> sweep(const ModelParams& params, const std::vector<double>& grid,
                              const SweepOptions& options, const IntegratorConfig& cfg) {
  cfg.validate();
  const double sup = params.f2().asymptote();
  for (double d2 : grid) {
    if (!(d2 > 0.0) || !(d2 < sup)) throw DomainError("sweep: grid point outside (0, f2_inf)");
  }
  std::vector<SweepPoint> out(grid.size());
  auto run_point = [&](std::size_t i, const State& ic) {
    out[i].d2 = grid[i];
    try {
      out[i].summary = attractor_summary(params.with_d2(grid[i]), ic, cfg);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  };

  if (options.policy == IcPolicy::Continuation) {
    State ic = options.seed;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      run_point(i, ic);
      if (out[i].summary) ic = out[i].summary->final_state;
    }
    return out;
  }

  const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(grid.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) run_point(i, options.seed);
  };
  std::vector<std::jthread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  return out;
}

std::optional<std::pair<double, double>> period_doubling_onset(const std::vector<SweepPoint>& points) {
  auto count = [](const SweepPoint& p) -> int {
    if (!p.summary || p.summary->kind != AttractorKind::Periodic) return -1;
    return p.summary->k;
  };
  for (std::size_t i = 1; i < points.size(); ++i) {
    int a = count(points[i - 1]);
    int b = count(points[i]);
    if ((a == 1 && b == 2) || (a == 2 && b == 1)) return std::make_pair(points[i - 1].d2, points[i].d2);
  }
  return std::nullopt;
}

}  // namespace foodchain
