#include "reram/simulation.hpp"

#include <cmath>
#include <numbers>

#include "reram/error.hpp"
#include "reram/io.hpp"

namespace reram {

double total_duration(std::span<const PulseSegment> waveform) {
  double t = 0.0;
  for (const auto& seg : waveform) t += seg.width;
  return t;
}

NormalSource::NormalSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

double NormalSource::next() {
  // 53-bit uniforms in (0, 1]; the cosine branch of Box-Muller.
  constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * scale;
  const double u2 = static_cast<double>(engine_() >> 11) * scale;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

VirtualDevice::VirtualDevice(ModelParams params, double resistance, SmoothingParams smoothing,
                             double read_noise_sigma, std::uint64_t seed)
    : params_(params),
      smoothing_(smoothing),
      resistance_(resistance),
      read_noise_sigma_(read_noise_sigma),
      rng_(seed) {
  validate(params_);
  validate(smoothing_);
  if (!(resistance_ > 0.0)) throw Error(ErrorCode::domain, "initial resistance must be positive");
  if (!(read_noise_sigma_ >= 0.0)) throw Error(ErrorCode::domain, "read noise sigma must be >= 0");
}

void VirtualDevice::apply(const PulseSegment& seg, IntegrationMethod method,
                          const IntegratorOptions& opts) {
  if (!(seg.width >= 0.0)) throw Error(ErrorCode::domain, "segment width must be >= 0");
  if (seg.width == 0.0 || seg.amplitude == 0.0) return;

  if (method == IntegrationMethod::closed_form) {
    resistance_ = pulse_response(params_, resistance_, seg.amplitude, seg.width);
    return;
  }
  const double v = seg.amplitude;
  auto rhs = [&](double r) {
    // Trial stages may overshoot below zero on a rejected step; the rate is
    // evaluated at a clamped state and the step is then refined.
    return switching_rate_smooth(params_, smoothing_, std::max(r, 1e-12), v);
  };
  const auto res = integrate_dopri5(rhs, resistance_, seg.width, opts);
  if (!(res.value > 0.0)) throw Error(ErrorCode::domain, "numeric trajectory left R > 0");
  resistance_ = res.value;
}

double VirtualDevice::read() {
  if (read_noise_sigma_ == 0.0) return resistance_;
  return resistance_ * (1.0 + read_noise_sigma_ * rng_.next());
}

void apply_segment(VirtualDevice& device, const PulseSegment& segment, IntegrationMethod method,
                   const IntegratorOptions& opts) {
  device.apply(segment, method, opts);
}

double read_resistance(VirtualDevice& device) { return device.read(); }

double device_current(const VirtualDevice& device, double v) { return device.current(v); }

Trace run_waveform(VirtualDevice& device, std::span<const PulseSegment> waveform,
                   IntegrationMethod method, const IntegratorOptions& opts) {
  for (const auto& seg : waveform)
    if (!(seg.width >= 0.0)) throw Error(ErrorCode::domain, "segment width must be >= 0");

  Trace trace;
  trace.reserve(waveform.size() + 1);
  trace.push_back({0.0, 0.0, device.resistance()});
  double t = 0.0;
  for (const auto& seg : waveform) {
    if (seg.width == 0.0) continue;
    device.apply(seg, method, opts);
    t += seg.width;
    trace.push_back({t, seg.amplitude, device.resistance()});
  }
  return trace;
}

std::string write_waveform_csv(std::span<const PulseSegment> waveform) {
  std::string out(kWaveformHeader);
  out += '\n';
  for (const auto& seg : waveform)
    out += io::format_exact(seg.amplitude) + "," + io::format_exact(seg.width) + "\n";
  return out;
}

Waveform read_waveform_csv(std::string_view text) {
  const auto table = io::parse_csv(text, kWaveformHeader);
  Waveform w;
  w.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    auto amp = io::parse_double(row[0]);
    auto width = io::parse_double(row[1]);
    if (!amp || !width || !(*width >= 0.0))
      throw Error(ErrorCode::parse, "waveform row " + std::to_string(i + 1) + " is invalid");
    w.push_back({*amp, *width});
  }
  return w;
}

std::string write_trace_csv(std::span<const TracePoint> trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& p : trace)
    out += io::format_digits(p.time, 12) + "," + io::format_digits(p.voltage, 12) + "," +
           io::format_digits(p.resistance, 12) + "\n";
  return out;
}

Trace read_trace_csv(std::string_view text) {
  const auto table = io::parse_csv(text, kTraceHeader);
  Trace trace;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    auto t = io::parse_double(row[0]);
    auto v = io::parse_double(row[1]);
    auto r = io::parse_double(row[2]);
    if (!t || !v || !r) throw Error(ErrorCode::parse, "trace row " + std::to_string(i + 1) + " is invalid");
    trace.push_back({*t, *v, *r});
  }
  return trace;
}

}  // namespace reram
