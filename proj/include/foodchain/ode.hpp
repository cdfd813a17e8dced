#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include <Eigen/Core>

#include "foodchain/errors.hpp"

namespace foodchain {

struct StepControl {
  double rtol = 1e-9;
  double atol = 1e-11;
  double max_step = 0.5;
  double min_step = 1e-12;
  /// The first `clamp_count` components are population densities and are
  /// clamped at zero from below after every accepted step.
  int clamp_count = 0;
};

/// Continuous extension over one accepted Dormand-Prince step (Hairer's
/// fourth-order dense output).
template <int N>
struct DenseSegment {
  using Vector = Eigen::Matrix<double, N, 1>;

  double t0 = 0.0;
  double h = 0.0;
  Vector r1, r2, r3, r4, r5;

  double t1() const { return t0 + h; }

  Vector at(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    return r1 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5)));
  }

  double component(int i, double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    return r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
  }
};

/// Adaptive Dormand-Prince 5(4) stepper for autonomous systems with
/// proportional-integral step-size control.
///
/// `Field` is any callable Vector(const Vector&).
template <int N, typename Field>
class DormandPrince5 {
 public:
  using Vector = Eigen::Matrix<double, N, 1>;

  DormandPrince5(Field field, StepControl control, double t0, const Vector& y0)
      : field_(std::move(field)), control_(control) {
    reset(t0, y0);
  }

  double time() const { return t_; }
  const Vector& state() const { return y_; }
  const DenseSegment<N>& segment() const { return segment_; }
  long accepted_steps() const { return accepted_; }

  /// Restarts from a new point (e.g. after renormalising part of the state).
  void reset(double t, const Vector& y) {
    t_ = t;
    y_ = y;
    clamp(y_);
    k1_ = field_(y_);
    if (h_ <= 0.0) h_ = initial_step();
    facold_ = 1e-4;
    reject_ = false;
  }

  /// Takes one accepted step, never passing t_stop. Returns the step size.
  double step(double t_stop) {
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                     a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                     a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                     e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                     d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                     d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
    constexpr double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    constexpr double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;

    if (!(t_stop > t_)) throw DomainError("DormandPrince5::step: t_stop must exceed current time");

    for (;;) {
      if (h_ < control_.min_step) {
        std::ostringstream msg;
        msg << "step size underflow (h = " << h_ << ") at t = " << t_;
        throw StiffnessError(msg.str());
      }
      double h = std::min({h_, control_.max_step, t_stop - t_});
      const bool last = (h == t_stop - t_);

      Vector y1 = y_ + h * a21 * k1_;
      Vector k2 = field_(y1);
      y1 = y_ + h * (a31 * k1_ + a32 * k2);
      Vector k3 = field_(y1);
      y1 = y_ + h * (a41 * k1_ + a42 * k2 + a43 * k3);
      Vector k4 = field_(y1);
      y1 = y_ + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4);
      Vector k5 = field_(y1);
      Vector ysti = y_ + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      Vector k6 = field_(ysti);
      Vector ynew = y_ + h * (a71 * k1_ + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      Vector k7 = field_(ynew);

      Vector errv = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      Vector scale = control_.atol + control_.rtol * y_.cwiseAbs().cwiseMax(ynew.cwiseAbs()).array();
      double err = std::sqrt((errv.array() / scale.array()).square().sum() / N);
      if (!std::isfinite(err)) err = 1e10;

      double fac11 = std::pow(err, expo1);
      double fac = fac11 / std::pow(facold_, beta);
      fac = std::max(facc2, std::min(facc1, fac / safe));
      double hnew = h / fac;

      if (err <= 1.0) {
        facold_ = std::max(err, 1e-4);
        segment_.t0 = t_;
        segment_.h = h;
        segment_.r1 = y_;
        Vector ydiff = ynew - y_;
        Vector bspl = h * k1_ - ydiff;
        segment_.r2 = ydiff;
        segment_.r3 = bspl;
        segment_.r4 = ydiff - h * k7 - bspl;
        segment_.r5 = h * (d1 * k1_ + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

        t_ = last ? t_stop : t_ + h;
        y_ = ynew;
        if (clamp(y_)) {
          k1_ = field_(y_);
        } else {
          k1_ = k7;
        }
        if (reject_) hnew = std::min(hnew, h);
        reject_ = false;
        // Keep the controller's proposal when the step was shortened to hit
        // t_stop.
        if (!last || hnew < h_) h_ = hnew;
        ++accepted_;
        return h;
      }
      h_ = h / std::min(facc1, fac11 / safe);
      reject_ = true;
    }
  }

  /// Advances exactly to t_end.
  void advance_to(double t_end) {
    while (t_ < t_end) step(t_end);
  }

 private:
  bool clamp(Vector& y) const {
    bool changed = false;
    for (int i = 0; i < control_.clamp_count; ++i) {
      if (y[i] < 0.0) {
        y[i] = 0.0;
        changed = true;
      }
    }
    return changed;
  }

  double initial_step() const {
    Vector scale = control_.atol + control_.rtol * y_.cwiseAbs().array();
    double dnf = std::sqrt((k1_.array() / scale.array()).square().sum() / N);
    double dny = std::sqrt((y_.array() / scale.array()).square().sum() / N);
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
    h = std::min(h, control_.max_step);
    Vector y1 = y_ + h * k1_;
    Vector k2 = field_(y1);
    double der2 = std::sqrt((((k2 - k1_).array() / scale.array()).square().sum()) / N) / h;
    double der12 = std::max(std::abs(der2), dnf);
    double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::max(std::min({100.0 * h, h1, control_.max_step}), 10.0 * control_.min_step);
  }

  Field field_;
  StepControl control_;
  double t_ = 0.0;
  Vector y_;
  Vector k1_;
  double h_ = 0.0;
  double facold_ = 1e-4;
  bool reject_ = false;
  long accepted_ = 0;
  DenseSegment<N> segment_;
};

template <int N, typename Field>
DormandPrince5<N, Field> make_stepper(Field field, StepControl control, double t0,
                                      const Eigen::Matrix<double, N, 1>& y0) {
  return DormandPrince5<N, Field>(std::move(field), control, t0, y0);
}

}  // namespace foodchain
