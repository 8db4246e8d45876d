#pragma once

#include <cstddef>
#include <functional>

namespace reram {

struct IntegratorOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-3;
  std::size_t max_steps = 1'000'000;
};

struct IntegrationResult {
  double value = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Integrates the scalar autonomous ODE y' = f(y) over [0, duration] with the
/// Dormand-Prince 5(4) pair and local error control
///   |err| <= abs_tol + rel_tol * max(|y_n|, |y_{n+1}|).
/// Throws Error(stiff_segment) when more than max_steps steps are attempted.
IntegrationResult integrate_dopri5(const std::function<double(double)>& rhs, double y0,
                                   double duration, const IntegratorOptions& opts = {});

}  // namespace reram
