#include "reram/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "reram/error.hpp"

namespace reram {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b*, the embedded fourth-order difference.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

IntegrationResult integrate_dopri5(const std::function<double(double)>& f, double y0,
                                   double duration, const IntegratorOptions& opts) {
  IntegrationResult res;
  res.value = y0;
  if (duration <= 0.0) return res;

  double y = y0;
  double t = 0.0;
  double k1 = f(y);
  // Initial step from the local rate scale.
  const double scale0 = opts.abs_tol + opts.rel_tol * std::abs(y);
  double h = std::abs(k1) > 0.0 ? 0.01 * scale0 / std::abs(k1) : duration;
  h = std::clamp(h, duration * 1e-12, duration);

  std::size_t attempts = 0;
  while (t < duration) {
    if (++attempts > opts.max_steps)
      throw Error(ErrorCode::stiff_segment,
                  "more than " + std::to_string(opts.max_steps) + " integration steps");
    const bool last = t + h >= duration;
    if (last) h = duration - t;

    const double k2 = f(y + h * a21 * k1);
    const double k3 = f(y + h * (a31 * k1 + a32 * k2));
    const double k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const double k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const double k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const double y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double k7 = f(y_new);
    const double err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double tol = opts.abs_tol + opts.rel_tol * std::max(std::abs(y), std::abs(y_new));
    const double ratio = std::abs(err) / tol;
    if (!std::isfinite(y_new) || !std::isfinite(ratio)) {
      ++res.rejected_steps;
      h *= 0.2;
      continue;
    }
    const double factor =
        ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
    if (ratio <= 1.0) {
      t = last ? duration : t + h;
      y = y_new;
      k1 = k7;  // first-same-as-last
      ++res.accepted_steps;
      h *= factor;
    } else {
      ++res.rejected_steps;
      h *= std::max(factor, 0.2);
    }
  }
  res.value = y;
  return res;
}

}  // namespace reram
