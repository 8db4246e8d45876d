#pragma once

// Log-level invariant checkers shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "reram/protocols.hpp"

namespace reram::test {

struct OptimizerTrain {
  double voltage = 0.0;
  double read = 0.0;
};

inline std::vector<OptimizerTrain> optimizer_trains(const MeasurementLog& log) {
  std::vector<OptimizerTrain> out;
  double v = 0.0;
  bool pending = false;
  for (const auto& r : log.records) {
    if (r.phase == Phase::write) {
      v = r.voltage;
      pending = true;
    } else if (pending) {
      out.push_back({v, r.resistance});
      pending = false;
    }
  }
  return out;
}

/// Empty string when the optimizer log satisfies the band/flip rules.
inline std::string check_optimizer_log(const MeasurementLog& log) {
  const auto& cfg = std::get<OptimizerConfig>(log.config);
  const auto trains = optimizer_trains(log);
  const double lo = cfg.band_low(), hi = cfg.band_high();
  double excursion = 0.0;
  double prev = 0.0;
  bool have_prev = false;
  for (const auto& r : log.records) {
    if (r.phase != Phase::read) continue;
    if (have_prev) excursion = std::max(excursion, std::abs(r.resistance - prev));
    prev = r.resistance;
    have_prev = true;
  }
  for (std::size_t k = 0; k < trains.size(); ++k) {
    const auto& t = trains[k];
    if (t.read < lo - excursion || t.read > hi + excursion)
      return "train " + std::to_string(k) + " read outside inflated band";
    if (k + 1 == trains.size()) break;
    const auto& next = trains[k + 1];
    const bool driven_exit = cfg.two_sided ? (t.read < lo || t.read > hi)
                             : t.voltage > 0.0 ? t.read > hi
                                               : t.read < lo;
    const bool flipped = (t.voltage > 0.0) != (next.voltage > 0.0);
    if (driven_exit != flipped) return "train " + std::to_string(k) + " flip rule violated";
    if (!flipped) {
      const double expect = std::min(std::abs(t.voltage) + cfg.ramp_step, cfg.ramp_max);
      if (std::abs(std::abs(next.voltage) - expect) > 1e-9)
        return "train " + std::to_string(k + 1) + " ramp step violated";
    } else if (std::abs(std::abs(next.voltage) - cfg.ramp_start) > 1e-12) {
      return "train " + std::to_string(k + 1) + " did not restart the ramp";
    }
  }
  return {};
}

/// Signed train amplitudes of a sweeper log in order.
inline std::vector<double> sweeper_amplitudes(const MeasurementLog& log) {
  std::vector<double> out;
  int train = -1;
  for (const auto& r : log.records) {
    if (r.phase == Phase::write && r.train != train) {
      out.push_back(r.voltage);
      train = r.train;
    }
  }
  return out;
}

}  // namespace reram::test
