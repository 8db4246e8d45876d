#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "reram/model.hpp"
#include "reram/protocols.hpp"

namespace reram {

struct RefinementConfig {
  double band = 0.05;  // half-width, fraction of the band center
};

struct RatePoint {
  double resistance = 0.0;  // Ohm
  double voltage = 0.0;     // V
  double rate = 0.0;        // Ohm / s

  bool operator==(const RatePoint&) const = default;
};

/// One optimizer train: state before it, its amplitude, and the change it made.
struct TrainDelta {
  double r_pre = 0.0;
  double voltage = 0.0;
  double delta = 0.0;
};

struct RefinedSet {
  Polarity polarity = Polarity::positive;
  double center = 0.0;  // Ohm
  std::vector<RatePoint> points;
};

/// Per-train (R_pre, v, dR) from an optimizer log. R_pre is the latest read
/// before the train's first write, R_post the first read after its last
/// write; trains lacking either are skipped. Throws Error(log_integrity) for
/// a train with mixed amplitudes or interleaved train indices.
std::vector<TrainDelta> optimizer_train_deltas(const MeasurementLog& log);

/// Center among the candidate values maximizing the number of values within
/// [c (1 - band), c (1 + band)]. Ties go to the candidate nearest the median,
/// then to the smallest.
double densest_band_center(std::span<const double> values, double band);

/// rate = dR / (N t_w), attributed to the pre-train state.
std::vector<RatePoint> optimizer_rates(std::span<const TrainDelta> trains, int pulses_per_train,
                                       double pulse_width);

/// Throws Error(no_data, stage "refinement") when a polarity has no trains.
std::pair<RefinedSet, RefinedSet> refine_optimizer_log(const MeasurementLog& log,
                                                       const RefinementConfig& cfg);

struct TrainSeries {
  int train = 0;
  double voltage = 0.0;
  std::vector<double> time;        // s since train start
  std::vector<double> resistance;  // Ohm
};

/// Read k of a train (the read following write k) sits at t = (k + 1) t_w.
std::vector<TrainSeries> sweeper_timeseries(const MeasurementLog& log);

inline constexpr int kDefaultDerivativeWindow = 11;
inline constexpr int kMinDerivativeWindow = 5;

/// Moving least-squares slope (first-order Savitzky-Golay derivative) over a
/// centered window, shrinking to no less than 5 samples at the ends.
std::vector<RatePoint> smoothing_derivative(const TrainSeries& series,
                                            int window = kDefaultDerivativeWindow);

// RatePoint file: `resistance_ohm,voltage_V,rate_ohm_per_s`.
inline constexpr std::string_view kRatePointHeader = "resistance_ohm,voltage_V,rate_ohm_per_s";
std::string write_rate_points_csv(std::span<const RatePoint> points);
std::vector<RatePoint> read_rate_points_csv(std::string_view text);

}  // namespace reram
