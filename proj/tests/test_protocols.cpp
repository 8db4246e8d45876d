#include <doctest.h>

#include <cmath>

#include "protocol_checks.hpp"
#include "reram/error.hpp"
#include "reram/protocols.hpp"
#include "test_support.hpp"

using namespace reram;
using reram::test::rel_err;

namespace {
const ModelParams P = preset_params();

std::size_t count_phase(const MeasurementLog& log, Phase ph) {
  std::size_t n = 0;
  for (const auto& r : log.records) n += r.phase == ph;
  return n;
}
}  // namespace

TEST_CASE("sweeper default schedule") {
  VirtualDevice d(P, 13650.0);
  const auto log = run_sweeper(d, SweeperConfig{});
  CHECK(log.tag() == ProtocolTag::sweeper);
  const auto amps = reram::test::sweeper_amplitudes(log);
  const std::vector<double> expected{0.6, -0.6, 0.7, -0.7, 0.8, -0.8};
  REQUIRE(amps.size() == expected.size());
  for (std::size_t k = 0; k < amps.size(); ++k) CHECK(std::abs(amps[k] - expected[k]) < 1e-12);
  CHECK(count_phase(log, Phase::write) == 3000);
  CHECK(count_phase(log, Phase::read) == 3000);
}

TEST_CASE("sweeper train 0 ends at the closed-form state") {
  VirtualDevice d(P, 13650.0);
  const auto log = run_sweeper(d, SweeperConfig{});
  // Last read of train 0: 500 pulses x 100 us at +0.6 V from 13.65 kOhm.
  const auto& last0 = log.records[2 * 500 - 1];
  REQUIRE(last0.phase == Phase::read);
  REQUIRE(last0.train == 0);
  CHECK(rel_err(last0.resistance, 15677.652570829217) < 1e-9);
}

TEST_CASE("sweeper schedule rule for other configs") {
  SweeperConfig c{3, 1e-4, 0.2, 0.15, 0.5};
  CHECK(sweeper_train_count(c) == 6);
  for (int k = 0; k < 6; ++k) {
    const double mag = 0.2 + (k / 2) * 0.15;
    CHECK(std::abs(std::abs(sweeper_amplitude(c, k)) - mag) < 1e-12);
    CHECK((sweeper_amplitude(c, k) > 0) == (k % 2 == 0));
  }
  SweeperConfig single{2, 1e-4, 0.7, 0.1, 0.7};
  CHECK(sweeper_train_count(single) == 2);
}

TEST_CASE("sweeper trains are monotone toward their threshold") {
  VirtualDevice d(P, 13650.0);
  const auto log = run_sweeper(d, SweeperConfig{});
  double prev = 13650.0;
  int train = 0;
  for (const auto& r : log.records) {
    if (r.phase != Phase::read) continue;
    const double amp = sweeper_amplitude(SweeperConfig{}, r.train);
    const double thr = threshold_resistance(P, amp);
    if (r.train != train) train = r.train;
    if (amp > 0) {
      CHECK(r.resistance >= prev);
      CHECK(r.resistance <= thr);
    } else {
      CHECK(r.resistance <= prev);
      CHECK(r.resistance >= thr);
    }
    prev = r.resistance;
  }
}

TEST_CASE("sweeper config validation") {
  VirtualDevice d(P, 13650.0);
  CHECK_THROWS_AS(run_sweeper(d, SweeperConfig{0}), Error);
  CHECK_THROWS_AS(run_sweeper(d, SweeperConfig{10, 1e-4, 0.9, 0.1, 0.8}), Error);
}

TEST_CASE("optimizer band arithmetic and per-train window") {
  OptimizerConfig c;
  CHECK(c.band_low() == doctest::Approx(12285.0).epsilon(1e-12));
  CHECK(c.band_high() == doctest::Approx(15015.0).epsilon(1e-12));
  CHECK(c.pulses_per_train * c.pulse_width == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("optimizer obeys the band and flip rules on the preset") {
  VirtualDevice d(P, 13650.0);
  const auto log = run_optimizer(d, OptimizerConfig{});
  CHECK(log.tag() == ProtocolTag::optimizer);
  CHECK(reram::test::check_optimizer_log(log).empty());
  const auto trains = reram::test::optimizer_trains(log);
  CHECK(trains.size() > 50);
  int flips = 0;
  for (std::size_t k = 1; k < trains.size(); ++k) flips += (trains[k].voltage > 0) != (trains[k - 1].voltage > 0);
  CHECK(flips > 10);
  // N writes per train, each 100 us.
  std::size_t writes = 0;
  for (const auto& r : log.records) writes += r.phase == Phase::write;
  CHECK(writes == trains.size() * 10);
}

TEST_CASE("optimizer in-band train repeats polarity at the next ramp level") {
  VirtualDevice d(P, 13650.0);
  const auto log = run_optimizer(d, OptimizerConfig{});
  const auto trains = reram::test::optimizer_trains(log);
  REQUIRE(trains.size() > 2);
  // Train 0 at +0.1 V barely moves 13.65 kOhm: same polarity, +0.02 V.
  CHECK(trains[0].voltage == doctest::Approx(0.1));
  CHECK(trains[1].voltage == doctest::Approx(0.12));
}

TEST_CASE("optimizer two-sided variant") {
  VirtualDevice d(P, 13650.0);
  OptimizerConfig c;
  c.two_sided = true;
  c.max_trains = 300;
  const auto log = run_optimizer(d, c);
  CHECK(reram::test::check_optimizer_log(log).empty());
}

TEST_CASE("optimizer stops once both polarities completed a ramp to the cap") {
  // Positive bias only switches above 0.88 V and leaves the 1% band on the
  // 0.9 V cap train; negative bias never switches. Expect one full positive
  // ramp (41 levels) then one full negative ramp (41 levels).
  ModelParams p = P;
  p.positive = {0.05, 0.12, 13650.0 - 10000.0 * 0.88, 10000.0};
  p.negative = {-1e-3, 0.18, 1e6, 0.0};
  VirtualDevice d(p, 13650.0);
  OptimizerConfig c;
  c.band = 0.01;
  const auto trains = reram::test::optimizer_trains(run_optimizer(d, c));
  REQUIRE(trains.size() == 82);
  CHECK(trains[40].voltage == doctest::Approx(0.9));
  CHECK(trains[41].voltage == doctest::Approx(-0.1));
  CHECK(trains[81].voltage == doctest::Approx(-0.9));

  // A device that never leaves the band keeps pulsing at the cap until the budget.
  ModelParams idle = P;
  idle.positive.amplitude = 1e-15;
  VirtualDevice d2(idle, 13650.0);
  OptimizerConfig budget;
  budget.max_trains = 120;
  CHECK(reram::test::optimizer_trains(run_optimizer(d2, budget)).size() == 120);
}

TEST_CASE("optimizer runaway detection") {
  ModelParams wild = P;
  wild.positive.threshold_intercept = 2e7;
  wild.positive.amplitude = 1.0;
  VirtualDevice d(wild, 13650.0);
  try {
    run_optimizer(d, OptimizerConfig{});
    FAIL("expected runaway");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::runaway_device);
  }
}

TEST_CASE("protocol replay is bit-identical") {
  for (double sigma : {0.0, 0.005}) {
    VirtualDevice a(P, 13650.0, {}, sigma, 99), b(P, 13650.0, {}, sigma, 99);
    CHECK(run_sweeper(a, SweeperConfig{}) == run_sweeper(b, SweeperConfig{}));
    VirtualDevice c(P, 13650.0, {}, sigma, 5), e(P, 13650.0, {}, sigma, 5);
    CHECK(write_log_csv(run_optimizer(c, OptimizerConfig{})) == write_log_csv(run_optimizer(e, OptimizerConfig{})));
  }
}

TEST_CASE("log files round trip through the readers") {
  VirtualDevice d(P, 13650.0, {}, 0.003, 17);
  SweeperConfig sc{20, 1e-4, 0.6, 0.1, 0.8};
  const auto sweep = run_sweeper(d, sc);
  const auto sidecar = write_log_sidecar(sweep);
  const auto back = read_log(write_log_csv(sweep), std::string_view(sidecar));
  CHECK(back == sweep);

  const auto opt = run_optimizer(d, OptimizerConfig{});
  const auto side2 = write_log_sidecar(opt);
  CHECK(read_log(write_log_csv(opt), std::string_view(side2)) == opt);

  // Without a sidecar the timing is inferred.
  const auto inferred = read_log(write_log_csv(sweep), std::nullopt, ProtocolTag::sweeper);
  const auto& ic = std::get<SweeperConfig>(inferred.config);
  CHECK(ic.pulses_per_train == 20);
  CHECK(ic.pulse_width == 1e-4);
  CHECK_THROWS_AS(read_log(write_log_csv(sweep), std::nullopt), Error);
  CHECK_THROWS_AS(read_log(write_log_csv(sweep), std::string_view(sidecar), ProtocolTag::optimizer), Error);
}

TEST_CASE("log CSV schema violations") {
  const std::string header = "train,pulse,phase,voltage_V,width_s,resistance_ohm\n";
  const std::string meta = "protocol = sweeper\nS = 1\nt_w = 0.0001\nV_start = 0.6\nV_step = 0.1\nV_stop = 0.8\n";
  CHECK_NOTHROW(read_log(header + "0,0,W,0.6,0.0001,\n0,-1,R,0.2,0,13000\n", std::string_view(meta)));
  CHECK_THROWS_AS(read_log(header + "0,0,X,0.6,0.0001,\n", std::string_view(meta)), Error);
  CHECK_THROWS_AS(read_log(header + "0,0,W,0.6,0.0001,5\n", std::string_view(meta)), Error);
  CHECK_THROWS_AS(read_log(header + "0,-1,R,0.2,0,-3\n", std::string_view(meta)), Error);
  CHECK_THROWS_AS(read_log("train,pulse\n0,0\n", std::string_view(meta)), Error);
  CHECK_THROWS_AS(read_log(header + "0,0,W,0.6\n", std::string_view(meta)), Error);
}
