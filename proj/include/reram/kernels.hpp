#pragma once

// Data-parallel inner loops. Every kernel exists twice: `serial::` is the
// plain reference loop kept for testing, `parallel::` is the OpenMP version
// used by the library. Both produce bit-identical results.

#include <span>
#include <vector>

#include "reram/model.hpp"

namespace reram {

enum class RateVariant { exact, smooth };

struct Trajectory {
  double r0 = 0.0;  // Ohm
  double v = 0.0;   // V
  double dt = 0.0;  // s
};

namespace serial {

/// Row-major grid: element (i, j) = rate(resistances[i], voltages[j]).
std::vector<double> rate_surface(const ModelParams& params, const SmoothingParams& smoothing,
                                 std::span<const double> resistances,
                                 std::span<const double> voltages, RateVariant variant);

std::vector<double> pulse_responses(const ModelParams& params, std::span<const Trajectory> jobs);

/// Least-squares slope of `values` against `times` over a centered window of
/// at most `window` samples, shrunk near the ends; NaN where fewer than
/// `min_window` samples fit.
std::vector<double> window_slopes(std::span<const double> times, std::span<const double> values,
                                  int window, int min_window);

}  // namespace serial

namespace parallel {

std::vector<double> rate_surface(const ModelParams& params, const SmoothingParams& smoothing,
                                 std::span<const double> resistances,
                                 std::span<const double> voltages, RateVariant variant);

std::vector<double> pulse_responses(const ModelParams& params, std::span<const Trajectory> jobs);

std::vector<double> window_slopes(std::span<const double> times, std::span<const double> values,
                                  int window, int min_window);

}  // namespace parallel

/// Slope of the least-squares line through samples [first, first + count).
double window_slope(std::span<const double> times, std::span<const double> values,
                    std::size_t first, std::size_t count) noexcept;

}  // namespace reram
