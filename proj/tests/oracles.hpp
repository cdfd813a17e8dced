#pragma once

// Reference computations written independently of the library: closed
// forms, finite differences and brute-force scans.

#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

struct Response {
  bool ivlev;
  double p1;
  double p2;
  double operator()(double u) const { return ivlev ? p1 * -std::expm1(-p2 * u) : p1 * u / (1.0 + p2 * u); }
  // Unique u with f(u) = v, by closed form.
  double inverse(double v) const { return ivlev ? -std::log1p(-v / p1) / p2 : v / (p1 - p2 * v); }
};

inline Response holling(double a, double b) { return {false, a, b}; }
inline Response ivlev(double a, double b) { return {true, a, b}; }

struct Chain {
  Response f1;
  Response f2;
  double d1;
  double d2;

  Eigen::Vector3d field(const Eigen::Vector3d& s) const {
    const double x = s[0], y = s[1], z = s[2];
    return {x * (1.0 - x) - f1(x) * y, f1(x) * y - d1 * y - f2(y) * z, f2(y) * z - d2 * z};
  }

  Eigen::Matrix3d fd_jacobian(const Eigen::Vector3d& s, double h = 1e-6) const {
    Eigen::Matrix3d j;
    for (int c = 0; c < 3; ++c) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      const double step = h * std::max(1.0, std::abs(s[c]));
      e[c] = step;
      j.col(c) = (field(s + e) - field(s - e)) / (2.0 * step);
    }
    return j;
  }

  // Boundary equilibrium from the closed-form inverse.
  Eigen::Vector3d boundary() const {
    const double xb = f1.inverse(d1);
    return {xb, xb * (1.0 - xb) / d1, 0.0};
  }
};

inline Chain holling_chain(double d2) { return {holling(4.98, 6.2), holling(0.46, 2.0), 0.4, d2}; }
inline Chain ivlev_chain(double d2) { return {ivlev(0.67, 5.349), ivlev(0.1647, 2.457), 0.4, d2}; }

// Interior equilibria as roots of 1 - x - y* f1(x)/x on (0, 1), located by a
// dense sign scan plus bisection.
inline std::vector<Eigen::Vector3d> interior_points(const Chain& c, int scan = 20000) {
  std::vector<Eigen::Vector3d> out;
  const double ys = c.f2.inverse(c.d2);
  if (!(ys > 0.0) || !std::isfinite(ys)) return out;
  auto g = [&](double x) { return 1.0 - x - ys * c.f1(x) / x; };
  double prev_x = 1e-9, prev = g(prev_x);
  for (int i = 1; i <= scan; ++i) {
    const double x = static_cast<double>(i) / scan;
    const double v = g(x);
    if ((v > 0.0) != (prev > 0.0)) {
      double lo = prev_x, hi = x, flo = prev;
      for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double fm = g(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      const double xs = 0.5 * (lo + hi);
      const double zs = (c.f1(xs) - c.d1) * ys / c.f2(ys);
      if (zs > 0.0) out.emplace_back(xs, ys, zs);
    }
    prev = v;
    prev_x = x;
  }
  return out;
}

// Characteristic polynomial coefficients of a 3x3 matrix:
// l^3 + p2 l^2 + p1 l + p0.
struct Poly {
  double p2, p1, p0;
};
inline Poly char_poly(const Eigen::Matrix3d& m) {
  const double minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                        m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  return {-m.trace(), minors, -m.determinant()};
}

struct Optimum {
  double p1, p2, sse;
};

// 200 x 200 log-spaced grid over (p1, p2) followed by compass-search
// refinement in log coordinates.
inline Optimum grid_search_fit(const Response& target, bool ivlev_family, double lo, double hi, int n) {
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = lo + (hi - lo) * i / (n - 1);
  auto sse = [&](double a, double b) {
    const Response cand{ivlev_family, a, b};
    double s = 0.0;
    for (double x : u) s += (cand(x) - target(x)) * (cand(x) - target(x));
    return s;
  };
  Optimum best{0, 0, std::numeric_limits<double>::infinity()};
  const int g = 200;
  for (int i = 0; i < g; ++i) {
    const double a = std::pow(10.0, -3.0 + 4.0 * i / (g - 1));
    for (int j = 0; j < g; ++j) {
      const double b = std::pow(10.0, -2.0 + 4.0 * j / (g - 1));
      const double s = sse(a, b);
      if (s < best.sse) best = {a, b, s};
    }
  }
  double la = std::log(best.p1), lb = std::log(best.p2);
  double step = 0.05;
  while (step > 1e-13) {
    bool moved = false;
    static constexpr std::pair<double, double> kDirs[] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0},  {0.0, -1.0},
                                                          {1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0}, {-1.0, 1.0}};
    for (auto [da, db] : kDirs) {
      const double na = la + step * da, nb = lb + step * db;
      const double s = sse(std::exp(na), std::exp(nb));
      if (s < best.sse) {
        best = {std::exp(na), std::exp(nb), s};
        la = na;
        lb = nb;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}


inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace oracle
