#include "reram/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "reram/error.hpp"
#include "reram/io.hpp"
#include "reram/kernels.hpp"

namespace reram {

std::vector<TrainDelta> optimizer_train_deltas(const MeasurementLog& log) {
  std::vector<TrainDelta> out;
  std::optional<double> last_read;
  const auto& recs = log.records;
  std::size_t i = 0;
  int previous_train = -1;
  while (i < recs.size()) {
    if (recs[i].phase == Phase::read) {
      last_read = recs[i].resistance;
      ++i;
      continue;
    }
    const int train = recs[i].train;
    if (train <= previous_train)
      throw Error(ErrorCode::log_integrity,
                  "train " + std::to_string(train) + " writes are not contiguous", "refinement");
    previous_train = train;
    const double v = recs[i].voltage;
    const auto r_pre = last_read;
    while (i < recs.size() && recs[i].phase == Phase::write) {
      if (recs[i].train != train || recs[i].voltage != v)
        throw Error(ErrorCode::log_integrity,
                    "train " + std::to_string(train) + " mixes amplitudes or train indices",
                    "refinement");
      ++i;
    }
    if (i == recs.size()) break;  // trailing writes without a read
    const double r_post = recs[i].resistance;
    if (r_pre) out.push_back({*r_pre, v, r_post - *r_pre});
  }
  return out;
}

double densest_band_center(std::span<const double> values, double band) {
  if (values.empty()) throw Error(ErrorCode::no_data, "no values to refine");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

  double best = sorted.front();
  std::ptrdiff_t best_count = -1;
  for (double c : sorted) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), c * (1.0 - band));
    const auto hi = std::upper_bound(sorted.begin(), sorted.end(), c * (1.0 + band));
    const auto count = hi - lo;
    const bool better =
        count > best_count ||
        (count == best_count && (std::abs(c - median) < std::abs(best - median) ||
                                 (std::abs(c - median) == std::abs(best - median) && c < best)));
    if (better) {
      best = c;
      best_count = count;
    }
  }
  return best;
}

std::vector<RatePoint> optimizer_rates(std::span<const TrainDelta> trains, int pulses_per_train,
                                       double pulse_width) {
  if (pulses_per_train < 1 || !(pulse_width > 0.0))
    throw Error(ErrorCode::usage, "need N >= 1 and t_w > 0");
  const double window = pulses_per_train * pulse_width;
  std::vector<RatePoint> out;
  out.reserve(trains.size());
  for (const auto& t : trains) out.push_back({t.r_pre, t.voltage, t.delta / window});
  return out;
}

std::pair<RefinedSet, RefinedSet> refine_optimizer_log(const MeasurementLog& log,
                                                       const RefinementConfig& cfg) {
  const auto* opt = std::get_if<OptimizerConfig>(&log.config);
  if (!opt) throw Error(ErrorCode::usage, "refinement needs an optimizer log", "refinement");
  if (!(cfg.band > 0.0 && cfg.band < 1.0))
    throw Error(ErrorCode::usage, "need 0 < eps_ref < 1", "refinement");

  const auto trains = optimizer_train_deltas(log);
  auto refine = [&](Polarity pol) {
    std::vector<TrainDelta> subset;
    for (const auto& t : trains)
      if (polarity_of(t.voltage) == pol && t.voltage != 0.0) subset.push_back(t);
    if (subset.empty())
      throw Error(ErrorCode::no_data, std::string("no ") + to_string(pol) + " trains",
                  "refinement");
    std::vector<double> pre;
    pre.reserve(subset.size());
    for (const auto& t : subset) pre.push_back(t.r_pre);
    const double center = densest_band_center(pre, cfg.band);
    std::vector<TrainDelta> kept;
    for (const auto& t : subset)
      if (t.r_pre >= center * (1.0 - cfg.band) && t.r_pre <= center * (1.0 + cfg.band))
        kept.push_back(t);
    return RefinedSet{pol, center, optimizer_rates(kept, opt->pulses_per_train, opt->pulse_width)};
  };
  return {refine(Polarity::positive), refine(Polarity::negative)};
}

std::vector<TrainSeries> sweeper_timeseries(const MeasurementLog& log) {
  const auto* sw = std::get_if<SweeperConfig>(&log.config);
  if (!sw) throw Error(ErrorCode::usage, "time series needs a sweeper log", "sweeper_timeseries");

  std::vector<TrainSeries> out;
  const auto& recs = log.records;
  auto integrity = [](std::size_t row, const std::string& what) {
    return Error(ErrorCode::log_integrity, "record " + std::to_string(row + 1) + ": " + what,
                 "sweeper_timeseries");
  };
  for (std::size_t i = 0; i < recs.size(); i += 2) {
    const auto& w = recs[i];
    if (w.phase != Phase::write) throw integrity(i, "expected a write pulse");
    if (i + 1 >= recs.size() || recs[i + 1].phase != Phase::read)
      throw integrity(i, "write pulse not followed by a read");
    if (recs[i + 1].train != w.train) throw integrity(i + 1, "read belongs to another train");

    if (out.empty() || out.back().train != w.train) {
      if (!out.empty() && w.train <= out.back().train) throw integrity(i, "train indices not increasing");
      out.push_back({w.train, w.voltage, {}, {}});
    }
    auto& series = out.back();
    if (w.voltage != series.voltage) throw integrity(i, "amplitude changes within a train");
    const auto k = series.time.size();
    series.time.push_back(static_cast<double>(k + 1) * w.width);
    series.resistance.push_back(recs[i + 1].resistance);
  }
  for (const auto& s : out)
    for (std::size_t k = 1; k < s.time.size(); ++k)
      if (!(s.time[k] > s.time[k - 1]))
        throw Error(ErrorCode::log_integrity,
                    "train " + std::to_string(s.train) + " has non-uniform pulse widths",
                    "sweeper_timeseries");
  return out;
}

std::vector<RatePoint> smoothing_derivative(const TrainSeries& series, int window) {
  if (window < kMinDerivativeWindow || window % 2 == 0)
    throw Error(ErrorCode::usage, "window must be odd and >= 5", "smoothing_derivative");
  if (series.time.size() != series.resistance.size())
    throw Error(ErrorCode::usage, "time and resistance lengths differ", "smoothing_derivative");
  if (series.time.size() < static_cast<std::size_t>(kMinDerivativeWindow))
    throw Error(ErrorCode::insufficient_data,
                "train " + std::to_string(series.train) + " has " +
                    std::to_string(series.time.size()) + " samples, need 5",
                "smoothing_derivative");

  const auto slopes =
      parallel::window_slopes(series.time, series.resistance, window, kMinDerivativeWindow);
  std::vector<RatePoint> out;
  out.reserve(slopes.size());
  for (std::size_t i = 0; i < slopes.size(); ++i)
    if (!std::isnan(slopes[i])) out.push_back({series.resistance[i], series.voltage, slopes[i]});
  return out;
}

std::string write_rate_points_csv(std::span<const RatePoint> points) {
  std::string out(kRatePointHeader);
  out += '\n';
  for (const auto& p : points)
    out += io::format_exact(p.resistance) + "," + io::format_exact(p.voltage) + "," +
           io::format_exact(p.rate) + "\n";
  return out;
}

std::vector<RatePoint> read_rate_points_csv(std::string_view text) {
  const auto table = io::parse_csv(text, kRatePointHeader);
  std::vector<RatePoint> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    auto r = io::parse_double(table.rows[i][0]);
    auto v = io::parse_double(table.rows[i][1]);
    auto m = io::parse_double(table.rows[i][2]);
    if (!r || !v || !m || !(*r > 0.0))
      throw Error(ErrorCode::parse, "rate point row " + std::to_string(i + 1) + " is invalid");
    out.push_back({*r, *v, *m});
  }
  return out;
}

}  // namespace reram
