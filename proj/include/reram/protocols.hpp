#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "reram/io.hpp"
#include "reram/simulation.hpp"

namespace reram {

/// Operating-state sweeper: trains of identical pulses, polarity alternating
/// every train and amplitude stepping every two trains, read after each pulse.
struct SweeperConfig {
  int pulses_per_train = 500;
  double pulse_width = 100e-6;  // s
  double v_start = 0.6;         // V
  double v_step = 0.1;          // V
  double v_stop = 0.8;          // V

  bool operator==(const SweeperConfig&) const = default;
};

/// Biasing optimizer: alternating-polarity voltage ramps that keep the device
/// inside a tolerance band around a target state, read once per train.
struct OptimizerConfig {
  int pulses_per_train = 10;
  double pulse_width = 100e-6;  // s
  double band = 0.10;           // half-width, fraction of target
  double target = 13650.0;      // Ohm
  double ramp_start = 0.1;      // V
  double ramp_step = 0.02;      // V
  double ramp_max = 0.9;        // V
  int max_trains = 2000;
  // Flip on any out-of-band read instead of only on the driven side.
  bool two_sided = false;

  double band_low() const noexcept { return target * (1.0 - band); }
  double band_high() const noexcept { return target * (1.0 + band); }

  bool operator==(const OptimizerConfig&) const = default;
};

void validate(const SweeperConfig& cfg);
void validate(const OptimizerConfig& cfg);

/// Amplitude of sweeper train k (signed).
double sweeper_amplitude(const SweeperConfig& cfg, int train);
int sweeper_train_count(const SweeperConfig& cfg);

enum class Phase { write, read };

struct MeasurementRecord {
  static constexpr int kReadPulse = -1;

  int train = 0;
  int pulse = kReadPulse;  // index within the train for writes
  Phase phase = Phase::read;
  double voltage = 0.0;  // write amplitude, or the read-out voltage
  double width = 0.0;    // s; zero for reads
  double resistance = 0.0;  // Ohm, reads only

  bool operator==(const MeasurementRecord&) const = default;
};

enum class ProtocolTag { sweeper, optimizer };

constexpr const char* to_string(ProtocolTag tag) noexcept {
  return tag == ProtocolTag::sweeper ? "sweeper" : "optimizer";
}

struct MeasurementLog {
  std::variant<SweeperConfig, OptimizerConfig> config;
  std::vector<MeasurementRecord> records;

  ProtocolTag tag() const noexcept {
    return std::holds_alternative<SweeperConfig>(config) ? ProtocolTag::sweeper
                                                         : ProtocolTag::optimizer;
  }

  bool operator==(const MeasurementLog&) const = default;
};

MeasurementLog run_sweeper(VirtualDevice& device, const SweeperConfig& cfg,
                           IntegrationMethod method = IntegrationMethod::closed_form);

/// Throws Error(runaway_device) when the state leaves [100 Ohm, 10 MOhm].
MeasurementLog run_optimizer(VirtualDevice& device, const OptimizerConfig& cfg,
                             IntegrationMethod method = IntegrationMethod::closed_form);

inline constexpr double kRunawayLow = 100.0;
inline constexpr double kRunawayHigh = 1e7;

// Log file: CSV `train,pulse,phase,voltage_V,width_s,resistance_ohm` with
// phase W/R, plus a key = value sidecar holding the protocol and config.
inline constexpr std::string_view kLogHeader = "train,pulse,phase,voltage_V,width_s,resistance_ohm";

std::string write_log_csv(const MeasurementLog& log);
std::string write_log_sidecar(const MeasurementLog& log);

io::KeyValueDoc config_to_doc(const MeasurementLog& log);

/// Parses a log. Without a sidecar the protocol must be given and the config
/// is inferred from the records (pulse width and pulses per train).
MeasurementLog read_log(std::string_view csv, std::optional<std::string_view> sidecar,
                        std::optional<ProtocolTag> tag = std::nullopt);

}  // namespace reram
