#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "gaussdyn/types.hpp"

// Minimal explicit integrators over flat state vectors. The flows in this
// library are smooth and mildly sized, so classic RK4 (bit-reproducible for
// golden files) plus an embedded Dormand-Prince 5(4) cover everything.

namespace gaussdyn::ode {

template <class Rhs>
Vector rk4_step(Rhs&& rhs, double t, const Vector& y, double dt) {
  const Vector k1 = rhs(t, y);
  const Vector k2 = rhs(t + 0.5 * dt, Vector(y + 0.5 * dt * k1));
  const Vector k3 = rhs(t + 0.5 * dt, Vector(y + 0.5 * dt * k2));
  const Vector k4 = rhs(t + dt, Vector(y + dt * k3));
  return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Fixed-step RK4 from t0 to t1 in exactly n_steps; calls
/// `sampler(step_index, t, y)` after every step (and once at t0).
template <class Rhs, class Sampler>
void integrate_fixed(Rhs&& rhs, Vector y, double t0, double t1,
                     long long n_steps, Sampler&& sampler) {
  sampler(0, t0, y);
  const double dt = (t1 - t0) / static_cast<double>(n_steps);
  for (long long i = 0; i < n_steps; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    y = rk4_step(rhs, t, y, dt);
    sampler(i + 1, t0 + static_cast<double>(i + 1) * dt, y);
  }
}

// Dormand-Prince 5(4) coefficients.
namespace dp {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dp

/// Adaptive Dormand-Prince integration from t0 to t1. `y` is advanced in
/// place; throws StepSizeUnderflow when error control forces the step below
/// ~1e2 ulps of the current time.
template <class Rhs>
void integrate_adaptive(Rhs&& rhs, Vector& y, double t0, double t1,
                        double rel_tol, double abs_tol) {
  using namespace dp;
  double t = t0;
  double h = std::min(1e-2, t1 - t0);
  Vector k1 = rhs(t, y);
  while (t < t1) {
    h = std::min(h, t1 - t);
    const double h_min = 1e2 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, std::abs(t));
    if (h < h_min)
      throw StepSizeUnderflow("adaptive step collapsed at t = " +
                              std::to_string(t));
    const Vector k2 = rhs(t + c2 * h, Vector(y + h * (a21 * k1)));
    const Vector k3 = rhs(t + c3 * h, Vector(y + h * (a31 * k1 + a32 * k2)));
    const Vector k4 =
        rhs(t + c4 * h, Vector(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const Vector k5 = rhs(
        t + c5 * h, Vector(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const Vector k6 =
        rhs(t + h, Vector(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 +
                                   a65 * k5)));
    const Vector y5 =
        y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vector k7 = rhs(t + h, y5);
    const Vector err_v =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double scale =
          abs_tol + rel_tol * std::max(std::abs(y(i)), std::abs(y5(i)));
      err = std::max(err, std::abs(err_v(i)) / scale);
    }
    if (err <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;  // FSAL
    }
    const double factor =
        (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
  }
}

}  // namespace gaussdyn::ode
