#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reram/integrator.hpp"
#include "reram/model.hpp"

namespace reram {

struct PulseSegment {
  double amplitude = 0.0;  // V
  double width = 0.0;      // s, >= 0
};

using Waveform = std::vector<PulseSegment>;

double total_duration(std::span<const PulseSegment> waveform);

enum class IntegrationMethod { closed_form, numeric };

struct TracePoint {
  double time = 0.0;        // s
  double voltage = 0.0;     // V applied over the interval ending at `time`
  double resistance = 0.0;  // Ohm
};

using Trace = std::vector<TracePoint>;

/// Seeded 64-bit Mersenne Twister (std::mt19937_64) with Box-Muller normals.
/// Identical seeds reproduce identical draws bit-exactly.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed = 0);
  double next();
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Device under test: model constants plus the current resistive state.
/// Single owner; not thread-safe.
class VirtualDevice {
 public:
  VirtualDevice(ModelParams params, double resistance, SmoothingParams smoothing = {},
                double read_noise_sigma = 0.0, std::uint64_t seed = 0);

  const ModelParams& params() const noexcept { return params_; }
  const SmoothingParams& smoothing() const noexcept { return smoothing_; }
  double resistance() const noexcept { return resistance_; }
  double read_noise_sigma() const noexcept { return read_noise_sigma_; }
  std::uint64_t seed() const noexcept { return rng_.seed(); }

  /// Advances the state under one constant-voltage segment.
  void apply(const PulseSegment& segment, IntegrationMethod method = IntegrationMethod::closed_form,
             const IntegratorOptions& opts = {});

  /// R * (1 + eta), eta ~ N(0, sigma^2). Consumes one normal from the RNG when
  /// sigma > 0; never changes R.
  double read();

  /// Ohmic conduction, no state change.
  double current(double v) const noexcept { return v / resistance_; }

 private:
  ModelParams params_;
  SmoothingParams smoothing_;
  double resistance_;
  double read_noise_sigma_;
  NormalSource rng_;
};

/// Applies `segment` to a copy-free device (in place).
void apply_segment(VirtualDevice& device, const PulseSegment& segment, IntegrationMethod method,
                   const IntegratorOptions& opts = {});
double read_resistance(VirtualDevice& device);
double device_current(const VirtualDevice& device, double v);

/// Initial point at t = 0 followed by one point per segment boundary.
/// Zero-width segments leave the state untouched and add no point, keeping
/// trace times strictly increasing.
Trace run_waveform(VirtualDevice& device, std::span<const PulseSegment> waveform,
                   IntegrationMethod method, const IntegratorOptions& opts = {});

// CSV: `amplitude_V,width_s` and `time_s,voltage_V,resistance_ohm`.
inline constexpr std::string_view kWaveformHeader = "amplitude_V,width_s";
inline constexpr std::string_view kTraceHeader = "time_s,voltage_V,resistance_ohm";

std::string write_waveform_csv(std::span<const PulseSegment> waveform);
Waveform read_waveform_csv(std::string_view text);
std::string write_trace_csv(std::span<const TracePoint> trace);
Trace read_trace_csv(std::string_view text);

}  // namespace reram
