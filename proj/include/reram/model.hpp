#pragma once

// Switching-rate surface of a bipolar ReRAM cell.
//
//   dR/dt = s(v) * f(R, r(v))
//
// s(v) is the voltage-only switching sensitivity, r(v) the linear absolute
// threshold line in the R-v plane, and f the quadratic window that vanishes
// on (and beyond) the threshold line. Positive and negative bias use the same
// functional forms with independent constants.

namespace reram {

inline constexpr double kDefaultReadVoltage = 0.2;
inline constexpr double kDefaultLimexpKnee = 80.0;
// Beyond this bias magnitude the stationary-surface assumption is not backed
// by characterization data.
inline constexpr double kValidityVoltage = 1.0;

enum class Polarity { positive, negative };

/// Branch selected by a bias voltage. v = 0 maps to the positive branch.
constexpr Polarity polarity_of(double v) noexcept {
  return v >= 0.0 ? Polarity::positive : Polarity::negative;
}

constexpr Polarity opposite(Polarity p) noexcept {
  return p == Polarity::positive ? Polarity::negative : Polarity::positive;
}

constexpr const char* to_string(Polarity p) noexcept {
  return p == Polarity::positive ? "positive" : "negative";
}

/// Constants of one bias polarity.
struct BranchParams {
  double amplitude = 0.0;            // Ohm^-1 s^-1, signed
  double voltage_scale = 1.0;        // V, > 0
  double threshold_intercept = 0.0;  // Ohm
  double threshold_slope = 0.0;      // Ohm / V, >= 0

  bool operator==(const BranchParams&) const = default;
};

struct ModelParams {
  BranchParams positive;
  BranchParams negative;
  double read_voltage = kDefaultReadVoltage;

  const BranchParams& branch(Polarity p) const noexcept {
    return p == Polarity::positive ? positive : negative;
  }
  BranchParams& branch(Polarity p) noexcept {
    return p == Polarity::positive ? positive : negative;
  }

  bool operator==(const ModelParams&) const = default;
};

/// Sigmoid slopes replacing the hard gates, and the limexp knee.
struct SmoothingParams {
  double resistance_slope = 1.0;  // Ohm
  double voltage_slope = 1e-3;    // V
  double limexp_knee = kDefaultLimexpKnee;

  bool operator==(const SmoothingParams&) const = default;
};

/// Voltage magnitudes the model is expected to be driven with.
struct OperatingBox {
  double min_magnitude = 0.0;
  double max_magnitude = kValidityVoltage;
};

/// Throws Error(domain) unless the voltage scales are positive and the
/// threshold slopes nonnegative. Amplitude signs are not constrained.
void validate(const ModelParams& params);
void validate(const SmoothingParams& smoothing);

/// True when r_p(v) > r_n(w) for every v in the positive and w in the
/// negative half of `box`. With nonnegative slopes the binding pair is
/// v = +min_magnitude, w = -min_magnitude.
bool operating_box_consistent(const ModelParams& params, const OperatingBox& box);

/// Fitted constants of the characterized TiOx cell, with the sensitivity
/// amplitudes sign-normalized so that positive bias raises R towards r_p and
/// negative bias lowers it towards r_n.
ModelParams preset_params();

double limexp(double x, double knee = kDefaultLimexpKnee) noexcept;

/// Logistic step approximation 1 / (1 + exp(-x / slope)).
double sigmoid(double x, double slope, double knee = kDefaultLimexpKnee) noexcept;

double threshold_resistance(const ModelParams& params, double v) noexcept;

/// Inverse of the threshold line of `pol`. Throws Error(threshold_undefined)
/// for a zero slope.
double threshold_voltage(const ModelParams& params, double resistance, Polarity pol);

double switching_sensitivity(const ModelParams& params, double v,
                             double knee = kDefaultLimexpKnee) noexcept;

/// Piecewise rate with hard gates. Throws Error(domain) for R <= 0.
double switching_rate_exact(const ModelParams& params, double resistance, double v);

/// One polarity term of the smoothed rate. Exactly zero on its own gate line;
/// the other term leaks through its voltage sigmoid, which limexp keeps above 0.
double switching_rate_smooth_term(const ModelParams& params, const SmoothingParams& smoothing,
                                  double resistance, double v, Polarity branch);

/// Rate with every gate replaced by a sigmoid; both polarity terms summed.
/// Throws Error(domain) for R <= 0.
double switching_rate_smooth(const ModelParams& params, const SmoothingParams& smoothing,
                             double resistance, double v);

/// Closed-form state after holding bias v for dt seconds, exact model.
///
/// Positive branch, R0 < r:  R = r - 1 / (1/(r - R0) + s dt)
/// Negative branch, R0 > r:  R = r + 1 / (1/(R0 - r) - s dt)
/// Otherwise the gate is closed and R0 is returned. With normalized signs the
/// result stays between R0 and r; with reversed signs the trajectory can
/// diverge in finite time, which throws Error(domain).
double pulse_response(const ModelParams& params, double r0, double v, double dt);

/// Emits one process-wide warning the first time a bias outside
/// |v| <= kValidityVoltage is evaluated.
void note_bias(double v) noexcept;
void reset_validity_warning() noexcept;

}  // namespace reram
