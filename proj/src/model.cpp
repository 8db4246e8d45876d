#include "reram/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>

#include "reram/error.hpp"

namespace reram {

namespace {

std::atomic<bool> g_validity_warned{false};

void require_positive_resistance(double r) {
  if (!(r > 0.0)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "resistance must be positive, got %g", r);
    throw Error(ErrorCode::domain, buf);
  }
}

}  // namespace

void note_bias(double v) noexcept {
  if (std::abs(v) <= kValidityVoltage) return;
  if (g_validity_warned.exchange(true, std::memory_order_relaxed)) return;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "bias %.4g V outside the characterized range |v| <= %.4g V; "
                "stationary switching surface not validated there",
                v, kValidityVoltage);
  warn(buf);
}

void reset_validity_warning() noexcept { g_validity_warned.store(false); }

void validate(const ModelParams& p) {
  for (auto pol : {Polarity::positive, Polarity::negative}) {
    const auto& b = p.branch(pol);
    if (!(b.voltage_scale > 0.0) || !std::isfinite(b.voltage_scale))
      throw Error(ErrorCode::domain, std::string(to_string(pol)) + " voltage scale must be > 0");
    if (!(b.threshold_slope >= 0.0) || !std::isfinite(b.threshold_slope))
      throw Error(ErrorCode::domain, std::string(to_string(pol)) + " threshold slope must be >= 0");
    if (!std::isfinite(b.amplitude) || !std::isfinite(b.threshold_intercept))
      throw Error(ErrorCode::domain, std::string(to_string(pol)) + " branch has non-finite constants");
  }
  if (!std::isfinite(p.read_voltage)) throw Error(ErrorCode::domain, "read voltage must be finite");
}

void validate(const SmoothingParams& s) {
  if (!(s.resistance_slope > 0.0) || !(s.voltage_slope > 0.0) || !(s.limexp_knee > 0.0))
    throw Error(ErrorCode::domain, "smoothing slopes and limexp knee must be > 0");
}

bool operating_box_consistent(const ModelParams& p, const OperatingBox& box) {
  const double v = box.min_magnitude;
  const double rp = p.positive.threshold_intercept + p.positive.threshold_slope * v;
  const double rn = p.negative.threshold_intercept - p.negative.threshold_slope * v;
  return rp > rn;
}

ModelParams preset_params() {
  ModelParams p;
  p.positive = {4.86e-5, 0.12, 17160.0, 150.0};
  p.negative = {-1.09e-3, 0.18, 24810.0, 17910.0};
  p.read_voltage = kDefaultReadVoltage;
  return p;
}

double limexp(double x, double knee) noexcept {
  if (x <= knee) return std::exp(x);
  return std::exp(knee) * (1.0 + (x - knee));
}

double sigmoid(double x, double slope, double knee) noexcept {
  return 1.0 / (1.0 + limexp(-x / slope, knee));
}

double threshold_resistance(const ModelParams& p, double v) noexcept {
  const auto& b = p.branch(polarity_of(v));
  return b.threshold_intercept + b.threshold_slope * v;
}

double threshold_voltage(const ModelParams& p, double resistance, Polarity pol) {
  const auto& b = p.branch(pol);
  if (b.threshold_slope == 0.0)
    throw Error(ErrorCode::threshold_undefined,
                std::string("zero threshold slope on the ") + to_string(pol) + " branch");
  return (resistance - b.threshold_intercept) / b.threshold_slope;
}

double switching_sensitivity(const ModelParams& p, double v, double knee) noexcept {
  if (v == 0.0) return 0.0;
  note_bias(v);
  const auto& b = p.branch(polarity_of(v));
  return b.amplitude * (limexp(std::abs(v) / b.voltage_scale, knee) - 1.0);
}

double switching_rate_exact(const ModelParams& p, double resistance, double v) {
  require_positive_resistance(resistance);
  if (v == 0.0) return 0.0;
  const double r = threshold_resistance(p, v);
  const double s = switching_sensitivity(p, v);
  if (v > 0.0) {
    const double d = r - resistance;
    return d > 0.0 ? s * d * d : 0.0;
  }
  const double d = resistance - r;
  return d > 0.0 ? s * d * d : 0.0;
}

double switching_rate_smooth_term(const ModelParams& p, const SmoothingParams& sm, double resistance,
                                  double v, Polarity branch) {
  require_positive_resistance(resistance);
  note_bias(v);
  const double knee = sm.limexp_knee;
  const auto& b = p.branch(branch);
  const double s = b.amplitude * (limexp(std::abs(v) / b.voltage_scale, knee) - 1.0);
  const double gate = b.threshold_intercept + b.threshold_slope * v;
  if (branch == Polarity::positive) {
    const double d = gate - resistance;
    return s * d * d * sigmoid(d, sm.resistance_slope, knee) * sigmoid(v, sm.voltage_slope, knee);
  }
  const double d = resistance - gate;
  return s * d * d * sigmoid(d, sm.resistance_slope, knee) * sigmoid(-v, sm.voltage_slope, knee);
}

double switching_rate_smooth(const ModelParams& p, const SmoothingParams& sm, double resistance,
                             double v) {
  return switching_rate_smooth_term(p, sm, resistance, v, Polarity::positive) +
         switching_rate_smooth_term(p, sm, resistance, v, Polarity::negative);
}

double pulse_response(const ModelParams& p, double r0, double v, double dt) {
  require_positive_resistance(r0);
  if (!(dt >= 0.0)) throw Error(ErrorCode::domain, "pulse duration must be >= 0");
  if (dt == 0.0 || v == 0.0) return r0;

  const double r = threshold_resistance(p, v);
  const double s = switching_sensitivity(p, v);
  double out = r0;
  if (v > 0.0) {
    if (!(r0 < r)) return r0;
    const double denom = 1.0 / (r - r0) + s * dt;
    if (!(denom > 0.0)) throw Error(ErrorCode::domain, "trajectory diverges within the pulse");
    out = r - 1.0 / denom;
    if (s > 0.0) out = std::clamp(out, r0, r);
  } else {
    if (!(r0 > r)) return r0;
    const double denom = 1.0 / (r0 - r) - s * dt;
    if (!(denom > 0.0)) throw Error(ErrorCode::domain, "trajectory diverges within the pulse");
    out = r + 1.0 / denom;
    if (s < 0.0) out = std::clamp(out, r, r0);
  }
  if (!(out > 0.0)) throw Error(ErrorCode::domain, "trajectory leaves R > 0");
  return out;
}

}  // namespace reram
