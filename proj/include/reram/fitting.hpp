#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reram/analysis.hpp"
#include "reram/io.hpp"
#include "reram/model.hpp"
#include "reram/protocols.hpp"

namespace reram {

/// Quadratic window at one bias voltage: rate ~ s_hat (r_hat - R)^2.
struct WindowFit {
  int train = -1;  // source sweeper train, -1 when fitted from loose points
  double voltage = 0.0;
  double s_hat = 0.0;  // Ohm^-1 s^-1
  double r_hat = 0.0;  // Ohm, vertex of the fitted parabola
  double rmse = 0.0;   // Ohm / s, against the perfect-square model
  int n_points = 0;
  std::vector<std::string> warnings;
};

/// Linear least squares rate = c2 R^2 + c1 R + c0, then s_hat = c2 and
/// r_hat = -c1 / (2 c2). The constant left over by the perfect-square form
/// shows up in rmse.
WindowFit fit_window_quadratic(std::span<const RatePoint> points);

struct ThresholdLine {
  Polarity polarity = Polarity::positive;
  double intercept = 0.0;  // Ohm
  double slope = 0.0;      // Ohm / V
  double r_squared = 0.0;
  int n_points = 0;

  double at(double v) const noexcept { return intercept + slope * v; }
};

struct Boundary {
  double voltage = 0.0;
  double resistance = 0.0;
};

/// Ordinary least squares r = intercept + slope v over >= 2 distinct voltages.
ThresholdLine fit_threshold_line(std::span<const Boundary> boundaries, Polarity pol);

struct SensitivityFit {
  Polarity polarity = Polarity::positive;
  double amplitude = 0.0;      // Ohm^-1 s^-1
  double voltage_scale = 0.0;  // V
  double rmse = 0.0;           // Ohm / s
  double reference = 0.0;      // Ohm
  int n_points = 0;
  std::vector<std::string> warnings;
};

inline constexpr double kScaleLow = 0.01;
inline constexpr double kScaleHigh = 1.0;

/// Minimizes sum (rate_i - A (exp(|v_i| / t) - 1) w_i)^2 with
/// w_i = (r(v_i) - R_ref)^2 from the supplied threshold line. A is solved
/// exactly for each t; t comes from a log-spaced scan over [0.01, 1] V refined
/// by golden-section search.
SensitivityFit fit_sensitivity_exp(std::span<const RatePoint> points, double reference,
                                   const ThresholdLine& line);

struct PolarityConsistency {
  double median = 0.0;
  double worst = 0.0;
  std::size_t informative = 0;  // points with a nonzero measured rate
  bool uninformative = true;
};

struct ConsistencyMetric {
  PolarityConsistency positive;
  PolarityConsistency negative;
  double worst = 0.0;
};

/// Relative discrepancy between each refined rate and the model evaluated at
/// the band center. Zero measured rates carry no information and are skipped.
ConsistencyMetric cross_consistency(const ModelParams& params,
                                    const std::pair<RefinedSet, RefinedSet>& refined);

struct StageIssue {
  std::string stage;
  std::string detail;
};

struct FitReport {
  std::vector<WindowFit> windows;  // ordered by voltage, then polarity
  std::optional<ThresholdLine> positive_line;
  std::optional<ThresholdLine> negative_line;
  std::optional<SensitivityFit> positive_sensitivity;
  std::optional<SensitivityFit> negative_sensitivity;
  std::optional<double> positive_reference;  // RS_0p
  std::optional<double> negative_reference;  // RS_0n
  std::optional<ConsistencyMetric> consistency;
  std::vector<StageIssue> errors;
  std::vector<std::string> warnings;
};

struct ExtractionConfig {
  RefinementConfig refinement;
  int window = kDefaultDerivativeWindow;
  double min_rate = 1e2;  // Ohm / s; window fits ignore the saturated tail
  double read_voltage = kDefaultReadVoltage;
  SmoothingParams smoothing;
  std::vector<double> exclude_voltages;  // sweeper amplitudes left out of window fits
};

struct ExtractionResult {
  std::optional<ModelParams> params;
  FitReport report;
};

/// Full chain: sweeper time series -> smoothing derivative -> per-train
/// window fits -> threshold lines; optimizer refinement -> rates ->
/// sensitivity fits; then the cross-consistency check. Stage failures are
/// collected in the report and independent stages keep running; `params` is
/// set only when every parameter was recovered.
ExtractionResult extract_model(const MeasurementLog& sweeper_log,
                               const MeasurementLog& optimizer_log,
                               const ExtractionConfig& cfg = {});

/// Parameter keys followed by dotted diagnostic keys.
io::KeyValueDoc report_to_doc(const ExtractionResult& result, const SmoothingParams& smoothing);

}  // namespace reram
