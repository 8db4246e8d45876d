#include "reram/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "reram/error.hpp"

namespace reram {

void validate(const SweeperConfig& c) {
  if (c.pulses_per_train < 1) throw Error(ErrorCode::usage, "sweeper: pulses per train must be >= 1");
  if (!(c.pulse_width > 0.0)) throw Error(ErrorCode::usage, "sweeper: pulse width must be > 0");
  if (!(c.v_start > 0.0) || !(c.v_start <= c.v_stop))
    throw Error(ErrorCode::usage, "sweeper: need 0 < V_start <= V_stop");
  if (!(c.v_step > 0.0)) throw Error(ErrorCode::usage, "sweeper: V_step must be > 0");
}

void validate(const OptimizerConfig& c) {
  if (c.pulses_per_train < 1) throw Error(ErrorCode::usage, "optimizer: pulses per train must be >= 1");
  if (!(c.pulse_width > 0.0)) throw Error(ErrorCode::usage, "optimizer: pulse width must be > 0");
  if (!(c.band > 0.0 && c.band < 1.0)) throw Error(ErrorCode::usage, "optimizer: need 0 < eps_opt < 1");
  if (!(c.target > 0.0)) throw Error(ErrorCode::usage, "optimizer: target R_0 must be > 0");
  if (!(c.ramp_start > 0.0) || !(c.ramp_start <= c.ramp_max))
    throw Error(ErrorCode::usage, "optimizer: need 0 < ramp start <= ramp max");
  if (!(c.ramp_step > 0.0)) throw Error(ErrorCode::usage, "optimizer: ramp step must be > 0");
  if (c.max_trains < 1) throw Error(ErrorCode::usage, "optimizer: max trains must be >= 1");
}

int sweeper_train_count(const SweeperConfig& c) {
  const int levels = static_cast<int>(std::floor((c.v_stop - c.v_start) / c.v_step + 1e-9)) + 1;
  return 2 * levels;
}

double sweeper_amplitude(const SweeperConfig& c, int train) {
  const double magnitude = c.v_start + (train / 2) * c.v_step;
  return train % 2 == 0 ? magnitude : -magnitude;
}

MeasurementLog run_sweeper(VirtualDevice& device, const SweeperConfig& cfg,
                           IntegrationMethod method) {
  validate(cfg);
  MeasurementLog log{cfg, {}};
  const int trains = sweeper_train_count(cfg);
  log.records.reserve(static_cast<std::size_t>(trains) * cfg.pulses_per_train * 2);
  const double v_read = device.params().read_voltage;
  for (int k = 0; k < trains; ++k) {
    const double amp = sweeper_amplitude(cfg, k);
    for (int p = 0; p < cfg.pulses_per_train; ++p) {
      device.apply({amp, cfg.pulse_width}, method);
      log.records.push_back({k, p, Phase::write, amp, cfg.pulse_width, 0.0});
      log.records.push_back({k, MeasurementRecord::kReadPulse, Phase::read, v_read, 0.0, device.read()});
    }
  }
  return log;
}

MeasurementLog run_optimizer(VirtualDevice& device, const OptimizerConfig& cfg,
                             IntegrationMethod method) {
  validate(cfg);
  MeasurementLog log{cfg, {}};
  const double v_read = device.params().read_voltage;
  const double lo = cfg.band_low();
  const double hi = cfg.band_high();

  auto polarity = Polarity::positive;
  int ramp_index = 0;
  bool capped[2] = {false, false};  // indexed by polarity; reached ramp_max since the last flip
  auto slot = [](Polarity p) { return p == Polarity::positive ? 0 : 1; };

  // Baseline read so the first train has a pre-train state.
  log.records.push_back({0, MeasurementRecord::kReadPulse, Phase::read, v_read, 0.0, device.read()});

  for (int train = 0; train < cfg.max_trains; ++train) {
    const double magnitude = std::min(cfg.ramp_start + ramp_index * cfg.ramp_step, cfg.ramp_max);
    const double amp = polarity == Polarity::positive ? magnitude : -magnitude;
    for (int p = 0; p < cfg.pulses_per_train; ++p) {
      device.apply({amp, cfg.pulse_width}, method);
      log.records.push_back({train, p, Phase::write, amp, cfg.pulse_width, 0.0});
    }
    const double r = device.read();
    log.records.push_back({train, MeasurementRecord::kReadPulse, Phase::read, v_read, 0.0, r});

    const double state = device.resistance();
    if (!(state >= kRunawayLow && state <= kRunawayHigh))
      throw Error(ErrorCode::runaway_device,
                  "state " + io::format_digits(state, 6) + " Ohm after train " + std::to_string(train),
                  "optimizer");

    if (magnitude >= cfg.ramp_max) capped[slot(polarity)] = true;

    const bool exited = cfg.two_sided ? (r < lo || r > hi)
                        : polarity == Polarity::positive ? r > hi
                                                         : r < lo;
    if (exited) {
      polarity = opposite(polarity);
      ramp_index = 0;
      capped[slot(polarity)] = false;
    } else {
      ++ramp_index;
    }
    if (capped[0] && capped[1]) break;
  }
  return log;
}

// ---------------------------------------------------------------------------
// File I/O

std::string write_log_csv(const MeasurementLog& log) {
  std::string out(kLogHeader);
  out += '\n';
  for (const auto& r : log.records) {
    out += std::to_string(r.train);
    out += ',';
    out += std::to_string(r.pulse);
    out += r.phase == Phase::write ? ",W," : ",R,";
    out += io::format_exact(r.voltage);
    out += ',';
    out += io::format_exact(r.width);
    out += ',';
    if (r.phase == Phase::read) out += io::format_exact(r.resistance);
    out += '\n';
  }
  return out;
}

io::KeyValueDoc config_to_doc(const MeasurementLog& log) {
  io::KeyValueDoc doc;
  doc.set("protocol", to_string(log.tag()));
  if (const auto* s = std::get_if<SweeperConfig>(&log.config)) {
    doc.set("S", std::to_string(s->pulses_per_train));
    doc.set("t_w", s->pulse_width);
    doc.set("V_start", s->v_start);
    doc.set("V_step", s->v_step);
    doc.set("V_stop", s->v_stop);
  } else {
    const auto& o = std::get<OptimizerConfig>(log.config);
    doc.set("N", std::to_string(o.pulses_per_train));
    doc.set("t_w", o.pulse_width);
    doc.set("eps_opt", o.band);
    doc.set("R_0", o.target);
    doc.set("ramp_V_start", o.ramp_start);
    doc.set("ramp_V_step", o.ramp_step);
    doc.set("ramp_V_max", o.ramp_max);
    doc.set("max_trains", std::to_string(o.max_trains));
    doc.set("two_sided", o.two_sided ? "true" : "false");
  }
  return doc;
}

std::string write_log_sidecar(const MeasurementLog& log) {
  return config_to_doc(log).render("measurement log configuration");
}

namespace {

int require_int(const io::KeyValueDoc& doc, std::string_view key) {
  const auto* v = doc.find(key);
  if (!v) throw Error(ErrorCode::parse, "sidecar missing key '" + std::string(key) + "'");
  auto n = io::parse_int(*v);
  if (!n) throw Error(ErrorCode::parse, "sidecar key '" + std::string(key) + "' is not an integer");
  return static_cast<int>(*n);
}

std::vector<MeasurementRecord> parse_records(std::string_view csv) {
  const auto table = io::parse_csv(csv, kLogHeader);
  std::vector<MeasurementRecord> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto where = "log row " + std::to_string(i + 1) + ": ";
    MeasurementRecord rec;
    auto train = io::parse_int(row[0]);
    auto pulse = io::parse_int(row[1]);
    auto volt = io::parse_double(row[3]);
    auto width = io::parse_double(row[4]);
    if (!train || !pulse || !volt || !width) throw Error(ErrorCode::parse, where + "bad numeric field");
    rec.train = static_cast<int>(*train);
    rec.pulse = static_cast<int>(*pulse);
    rec.voltage = *volt;
    rec.width = *width;
    if (row[2] == "W") {
      rec.phase = Phase::write;
      if (!row[5].empty()) throw Error(ErrorCode::parse, where + "write rows carry no resistance");
    } else if (row[2] == "R") {
      rec.phase = Phase::read;
      auto r = io::parse_double(row[5]);
      if (!r || !(*r > 0.0)) throw Error(ErrorCode::parse, where + "read rows need a positive resistance");
      rec.resistance = *r;
    } else {
      throw Error(ErrorCode::parse, where + "phase must be W or R");
    }
    out.push_back(rec);
  }
  return out;
}

}  // namespace

MeasurementLog read_log(std::string_view csv, std::optional<std::string_view> sidecar,
                        std::optional<ProtocolTag> tag) {
  MeasurementLog log;
  log.records = parse_records(csv);

  if (sidecar) {
    const auto doc = io::KeyValueDoc::parse(*sidecar);
    const auto* proto = doc.find("protocol");
    if (!proto) throw Error(ErrorCode::parse, "sidecar missing 'protocol'");
    ProtocolTag found;
    if (*proto == "sweeper") found = ProtocolTag::sweeper;
    else if (*proto == "optimizer") found = ProtocolTag::optimizer;
    else throw Error(ErrorCode::parse, "unknown protocol '" + *proto + "'");
    if (tag && *tag != found)
      throw Error(ErrorCode::parse, std::string("log is tagged ") + to_string(found) +
                                        ", expected " + to_string(*tag));
    if (found == ProtocolTag::sweeper) {
      SweeperConfig c;
      c.pulses_per_train = require_int(doc, "S");
      c.pulse_width = doc.number("t_w");
      c.v_start = doc.number("V_start");
      c.v_step = doc.number("V_step");
      c.v_stop = doc.number("V_stop");
      log.config = c;
    } else {
      OptimizerConfig c;
      c.pulses_per_train = require_int(doc, "N");
      c.pulse_width = doc.number("t_w");
      c.band = doc.number("eps_opt");
      c.target = doc.number("R_0");
      c.ramp_start = doc.number_or("ramp_V_start", c.ramp_start);
      c.ramp_step = doc.number_or("ramp_V_step", c.ramp_step);
      c.ramp_max = doc.number_or("ramp_V_max", c.ramp_max);
      if (doc.contains("max_trains")) c.max_trains = require_int(doc, "max_trains");
      if (const auto* ts = doc.find("two_sided")) c.two_sided = *ts == "true";
      log.config = c;
    }
    return log;
  }

  if (!tag) throw Error(ErrorCode::usage, "log without sidecar needs an explicit protocol");
  // Infer the timing constants from the write records.
  double width = 0.0;
  std::map<int, int> writes_per_train;
  for (const auto& r : log.records) {
    if (r.phase != Phase::write) continue;
    width = r.width;
    ++writes_per_train[r.train];
  }
  if (writes_per_train.empty()) throw Error(ErrorCode::parse, "log contains no write records");
  int pulses = 0;
  for (const auto& [train, n] : writes_per_train) pulses = std::max(pulses, n);
  if (*tag == ProtocolTag::sweeper) {
    SweeperConfig c;
    c.pulses_per_train = pulses;
    c.pulse_width = width;
    log.config = c;
  } else {
    OptimizerConfig c;
    c.pulses_per_train = pulses;
    c.pulse_width = width;
    log.config = c;
  }
  return log;
}

}  // namespace reram
