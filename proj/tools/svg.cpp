#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "foodchain/equilibria.hpp"

namespace foodchain::cli {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kMargin = 50.0;

struct Dot {
  double d2;
  double z;
  const char* color;
  double radius;
};

}  // namespace

void write_sweep_svg(std::ostream& os, const ModelParams& base, const std::vector<SweepPoint>& points) {
  if (points.empty()) return;
  double lo = points.front().d2, hi = points.front().d2;
  for (const auto& p : points) {
    lo = std::min(lo, p.d2);
    hi = std::max(hi, p.d2);
  }
  if (hi == lo) hi = lo + 1e-3;

  std::vector<Dot> dots;
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    const double d2 = lo + (hi - lo) * i / n;
    try {
      for (const auto& e : interior_equilibria(base.with_d2(d2))) {
        const bool stable = e.stability == Stability::Stable;
        dots.push_back({d2, e.coords.z(), stable ? "#1f4fd1" : "#d12a1f", 1.0});
      }
    } catch (const std::exception&) {
    }
  }
  for (const auto& p : points) {
    if (!p.summary) continue;
    if (p.summary->kind == AttractorKind::BoundaryExtinction || p.summary->kind == AttractorKind::Equilibrium) {
      dots.push_back({p.d2, p.summary->final_state.z(), "#000000", 1.6});
    }
    for (double z : p.summary->z_maxima) dots.push_back({p.d2, z, "#000000", 1.2});
  }
  double zmax = 1e-6;
  for (const auto& d : dots) zmax = std::max(zmax, d.z);
  zmax *= 1.05;

  auto px = [&](double d2) { return kMargin + (d2 - lo) / (hi - lo) * (kWidth - 2 * kMargin); };
  auto py = [&](double z) { return kHeight - kMargin - z / zmax * (kHeight - 2 * kMargin); };

  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
     << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\"" << kHeight - kMargin
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 15 << "\" font-size=\"14\">d2</text>\n";
  os << "<text x=\"10\" y=\"" << kHeight / 2 << "\" font-size=\"14\">z</text>\n";
  os << "<text x=\"" << kMargin << "\" y=\"" << kHeight - 30 << "\" font-size=\"11\">" << lo << "</text>\n";
  os << "<text x=\"" << kWidth - kMargin - 40 << "\" y=\"" << kHeight - 30 << "\" font-size=\"11\">" << hi << "</text>\n";
  os << "<text x=\"" << 5 << "\" y=\"" << kMargin << "\" font-size=\"11\">" << zmax << "</text>\n";
  for (const auto& d : dots) {
    os << "<circle cx=\"" << px(d.d2) << "\" cy=\"" << py(d.z) << "\" r=\"" << d.radius << "\" fill=\"" << d.color
       << "\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace foodchain::cli
