#include "reram/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <Eigen/Dense>

#include "reram/error.hpp"

namespace reram {

namespace {

std::size_t distinct_count(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  return static_cast<std::size_t>(std::unique(xs.begin(), xs.end()) - xs.begin());
}

std::string volts(double v) { return io::format_digits(v, 6) + " V"; }

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const auto n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

WindowFit fit_window_quadratic(std::span<const RatePoint> points) {
  if (points.empty()) throw Error(ErrorCode::rank_deficient, "no points", "window_fit");
  const double v = points.front().voltage;
  std::vector<double> rs;
  rs.reserve(points.size());
  for (const auto& p : points) {
    if (p.voltage != v) throw Error(ErrorCode::usage, "points span several voltages", "window_fit");
    rs.push_back(p.resistance);
  }
  if (distinct_count(rs) < 3)
    throw Error(ErrorCode::rank_deficient, "fewer than 3 distinct resistances at " + volts(v),
                "window_fit");

  // Center and scale R so the Vandermonde system stays well conditioned.
  const auto n = static_cast<Eigen::Index>(points.size());
  const double mean = std::accumulate(rs.begin(), rs.end(), 0.0) / static_cast<double>(n);
  double spread = 0.0;
  for (double r : rs) spread = std::max(spread, std::abs(r - mean));
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = (rs[static_cast<std::size_t>(i)] - mean) / spread;
    design(i, 0) = x * x;
    design(i, 1) = x;
    design(i, 2) = 1.0;
    rhs(i) = points[static_cast<std::size_t>(i)].rate;
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  const double scale = coef.cwiseAbs().maxCoeff();
  if (coef(0) == 0.0 || std::abs(coef(0)) <= 1e-12 * scale)
    throw Error(ErrorCode::degenerate_quadratic, "no curvature at " + volts(v), "window_fit");

  WindowFit fit;
  fit.voltage = v;
  fit.n_points = static_cast<int>(n);
  fit.s_hat = coef(0) / (spread * spread);
  fit.r_hat = mean - spread * coef(1) / (2.0 * coef(0));
  double ss = 0.0;
  for (const auto& p : points) {
    const double d = fit.r_hat - p.resistance;
    const double e = p.rate - fit.s_hat * d * d;
    ss += e * e;
  }
  fit.rmse = std::sqrt(ss / static_cast<double>(n));

  const bool expected_positive = v > 0.0;
  if ((fit.s_hat > 0.0) != expected_positive && v != 0.0)
    fit.warnings.push_back("direction violation: sensitivity sign disagrees with " +
                           std::string(to_string(polarity_of(v))) + " bias at " + volts(v));
  return fit;
}

ThresholdLine fit_threshold_line(std::span<const Boundary> boundaries, Polarity pol) {
  std::vector<double> vs;
  for (const auto& b : boundaries) vs.push_back(b.voltage);
  if (distinct_count(vs) < 2)
    throw Error(ErrorCode::underdetermined,
                std::string("need >= 2 distinct voltages for the ") + to_string(pol) + " line",
                "threshold_line");
  const double n = static_cast<double>(boundaries.size());
  double vm = 0.0, rm = 0.0;
  for (const auto& b : boundaries) {
    vm += b.voltage;
    rm += b.resistance;
  }
  vm /= n;
  rm /= n;
  double svv = 0.0, svr = 0.0, srr = 0.0;
  for (const auto& b : boundaries) {
    svv += (b.voltage - vm) * (b.voltage - vm);
    svr += (b.voltage - vm) * (b.resistance - rm);
    srr += (b.resistance - rm) * (b.resistance - rm);
  }
  ThresholdLine line;
  line.polarity = pol;
  line.slope = svr / svv;
  line.intercept = rm - line.slope * vm;
  line.n_points = static_cast<int>(boundaries.size());
  double ss_res = 0.0;
  for (const auto& b : boundaries) {
    const double e = b.resistance - line.at(b.voltage);
    ss_res += e * e;
  }
  line.r_squared = srr > 0.0 ? std::clamp(1.0 - ss_res / srr, 0.0, 1.0) : 1.0;
  return line;
}

namespace {

struct ExpModelCost {
  std::span<const RatePoint> points;
  std::vector<double> weights;

  // Residual sum of squares with the amplitude solved exactly; also returns A.
  std::pair<double, double> operator()(double scale) const {
    double syg = 0.0, sgg = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double g = std::expm1(std::abs(points[i].voltage) / scale) * weights[i];
      syg += points[i].rate * g;
      sgg += g * g;
      syy += points[i].rate * points[i].rate;
    }
    if (!(sgg > 0.0) || !std::isfinite(sgg)) return {std::numeric_limits<double>::infinity(), 0.0};
    const double a = syg / sgg;
    return {std::max(syy - a * syg, 0.0), a};
  }
};

}  // namespace

SensitivityFit fit_sensitivity_exp(std::span<const RatePoint> points, double reference,
                                   const ThresholdLine& line) {
  const auto pol = line.polarity;
  std::vector<double> mags;
  bool any_signal = false;
  ExpModelCost cost{points, {}};
  for (const auto& p : points) {
    const double r = line.at(p.voltage);
    const bool active = pol == Polarity::positive ? reference < r : reference > r;
    if (!active)
      throw Error(ErrorCode::domain,
                  "reference " + io::format_digits(reference, 8) + " Ohm is outside the active window at " +
                      volts(p.voltage),
                  "sensitivity_fit");
    cost.weights.push_back((r - reference) * (r - reference));
    mags.push_back(std::abs(p.voltage));
    any_signal = any_signal || p.rate != 0.0;
  }
  if (!any_signal) throw Error(ErrorCode::no_switching_signal, "all rates are zero", "sensitivity_fit");
  if (distinct_count(mags) < 3)
    throw Error(ErrorCode::underdetermined, "need >= 3 distinct |v|", "sensitivity_fit");

  constexpr int kScan = 400;
  const double log_lo = std::log(kScaleLow);
  const double step = (std::log(kScaleHigh) - log_lo) / (kScan - 1);
  auto grid = [&](int k) { return std::exp(log_lo + step * k); };
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kScan; ++k) {
    const double c = cost(grid(k)).first;
    if (c < best_cost) {
      best_cost = c;
      best = k;
    }
  }

  SensitivityFit fit;
  fit.polarity = pol;
  fit.reference = reference;
  fit.n_points = static_cast<int>(points.size());

  double a = grid(std::max(best - 1, 0));
  double b = grid(std::min(best + 1, kScan - 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = cost(x1).first;
  double f2 = cost(x2).first;
  while (b - a > 1e-13 * (a + b)) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = cost(x1).first;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = cost(x2).first;
    }
  }
  double t = 0.5 * (a + b);
  auto [ss, amp] = cost(t);
  if (best_cost < ss) {  // the bracket was one-sided at a scan edge
    t = grid(best);
    std::tie(ss, amp) = cost(t);
  }
  fit.voltage_scale = t;
  fit.amplitude = amp;
  fit.rmse = std::sqrt(ss / static_cast<double>(points.size()));
  if (best == 0 || best == kScan - 1)
    fit.warnings.push_back("t at bound: voltage scale minimizer sits on the scan interval edge");
  return fit;
}

namespace {

PolarityConsistency consistency_for(const ModelParams& params, const RefinedSet& set) {
  PolarityConsistency out;
  std::vector<double> rel;
  for (const auto& p : set.points) {
    if (p.rate == 0.0) continue;
    const double predicted = switching_rate_exact(params, set.center, p.voltage);
    rel.push_back(std::abs(predicted - p.rate) / std::abs(p.rate));
  }
  out.informative = rel.size();
  out.uninformative = rel.empty();
  if (!rel.empty()) {
    out.worst = *std::max_element(rel.begin(), rel.end());
    out.median = median_of(rel);
  }
  return out;
}

}  // namespace

ConsistencyMetric cross_consistency(const ModelParams& params,
                                    const std::pair<RefinedSet, RefinedSet>& refined) {
  ConsistencyMetric m;
  m.positive = consistency_for(params, refined.first);
  m.negative = consistency_for(params, refined.second);
  m.worst = std::max(m.positive.worst, m.negative.worst);
  return m;
}

ExtractionResult extract_model(const MeasurementLog& sweeper_log,
                               const MeasurementLog& optimizer_log, const ExtractionConfig& cfg) {
  ExtractionResult result;
  auto& report = result.report;
  auto record = [&](const Error& e) { report.errors.push_back({e.stage(), e.what()}); };
  auto excluded = [&](double v) {
    for (double x : cfg.exclude_voltages)
      if (std::abs(x - v) <= 1e-9 * std::max(1.0, std::abs(v))) return true;
    return false;
  };

  // Sweeper branch: per-train window fits, then threshold lines.
  try {
    for (const auto& series : sweeper_timeseries(sweeper_log)) {
      if (excluded(series.voltage)) continue;
      try {
        std::vector<RatePoint> active;
        for (const auto& p : smoothing_derivative(series, cfg.window))
          if (std::abs(p.rate) > cfg.min_rate) active.push_back(p);
        auto fit = fit_window_quadratic(active);
        fit.train = series.train;
        report.windows.push_back(std::move(fit));
      } catch (const Error& e) {
        report.errors.push_back({e.stage(), "train " + std::to_string(series.train) + " at " +
                                                volts(series.voltage) + ": " + e.what()});
      }
    }
  } catch (const Error& e) {
    record(e);
  }
  std::stable_sort(report.windows.begin(), report.windows.end(),
                   [](const WindowFit& a, const WindowFit& b) { return a.voltage < b.voltage; });

  for (auto pol : {Polarity::positive, Polarity::negative}) {
    std::vector<Boundary> bounds;
    for (const auto& w : report.windows) {
      if (w.voltage == 0.0 || polarity_of(w.voltage) != pol) continue;
      if (!w.warnings.empty()) {
        report.warnings.push_back("train " + std::to_string(w.train) +
                                  " excluded from threshold line: " + w.warnings.front());
        continue;
      }
      bounds.push_back({w.voltage, w.r_hat});
    }
    try {
      auto line = fit_threshold_line(bounds, pol);
      if (line.slope < 0.0) {
        // Least squares under slope >= 0 lands on the boundary: the mean level.
        double mean = 0.0;
        for (const auto& b : bounds) mean += b.resistance;
        mean /= static_cast<double>(bounds.size());
        report.warnings.push_back(std::string(to_string(pol)) + " threshold slope " +
                                  io::format_digits(line.slope, 6) + " Ohm/V constrained to 0");
        line.slope = 0.0;
        line.intercept = mean;
        line.r_squared = 0.0;
      }
      (pol == Polarity::positive ? report.positive_line : report.negative_line) = line;
    } catch (const Error& e) {
      record(e);
    }
  }

  // Optimizer branch: refinement, then sensitivity at each band center.
  std::optional<std::pair<RefinedSet, RefinedSet>> refined;
  try {
    refined = refine_optimizer_log(optimizer_log, cfg.refinement);
    report.positive_reference = refined->first.center;
    report.negative_reference = refined->second.center;
  } catch (const Error& e) {
    record(e);
  }

  for (auto pol : {Polarity::positive, Polarity::negative}) {
    const auto& line = pol == Polarity::positive ? report.positive_line : report.negative_line;
    auto& slot = pol == Polarity::positive ? report.positive_sensitivity : report.negative_sensitivity;
    if (!refined) {
      report.errors.push_back({"sensitivity_fit", std::string(to_string(pol)) +
                                                      ": no refined optimizer data"});
      continue;
    }
    if (!line) {
      report.errors.push_back({"sensitivity_fit", std::string(to_string(pol)) +
                                                      ": threshold line unavailable"});
      continue;
    }
    const auto& set = pol == Polarity::positive ? refined->first : refined->second;
    std::vector<RatePoint> usable;
    for (const auto& p : set.points) {
      const double r = line->at(p.voltage);
      if (pol == Polarity::positive ? set.center < r : set.center > r) usable.push_back(p);
    }
    try {
      slot = fit_sensitivity_exp(usable, set.center, *line);
      for (const auto& w : slot->warnings) report.warnings.push_back(std::string(to_string(pol)) + ": " + w);
    } catch (const Error& e) {
      report.errors.push_back({e.stage(), std::string(to_string(pol)) + ": " + e.what()});
    }
  }

  if (report.positive_line && report.negative_line && report.positive_sensitivity &&
      report.negative_sensitivity) {
    ModelParams p;
    p.positive = {report.positive_sensitivity->amplitude, report.positive_sensitivity->voltage_scale,
                  report.positive_line->intercept, report.positive_line->slope};
    p.negative = {report.negative_sensitivity->amplitude, report.negative_sensitivity->voltage_scale,
                  report.negative_line->intercept, report.negative_line->slope};
    p.read_voltage = cfg.read_voltage;
    try {
      validate(p);
      result.params = p;
    } catch (const Error& e) {
      report.errors.push_back({"assemble", e.what()});
    }
  }

  if (result.params && refined) {
    report.consistency = cross_consistency(*result.params, *refined);
    for (auto [pc, name] : {std::pair{&report.consistency->positive, "positive"},
                            std::pair{&report.consistency->negative, "negative"}})
      if (pc->uninformative)
        report.warnings.push_back(std::string("cross-consistency uninformative for ") + name +
                                  " polarity: no nonzero refined rates");
  }
  return result;
}

io::KeyValueDoc report_to_doc(const ExtractionResult& result, const SmoothingParams& smoothing) {
  io::KeyValueDoc doc;
  if (result.params) doc = io::params_to_doc(*result.params, smoothing);
  const auto& r = result.report;
  doc.set("fit.status", result.params ? "complete" : "partial");
  for (std::size_t i = 0; i < r.windows.size(); ++i) {
    const auto& w = r.windows[i];
    const auto key = "window." + std::to_string(i) + ".";
    doc.set(key + "train", std::to_string(w.train));
    doc.set(key + "voltage", w.voltage);
    doc.set(key + "s_hat", w.s_hat);
    doc.set(key + "r_hat", w.r_hat);
    doc.set(key + "rmse", w.rmse);
    doc.set(key + "n_points", std::to_string(w.n_points));
  }
  for (const auto* line : {&r.positive_line, &r.negative_line}) {
    if (!*line) continue;
    const auto key = std::string("line.") + to_string((*line)->polarity) + ".";
    doc.set(key + "intercept", (*line)->intercept);
    doc.set(key + "slope", (*line)->slope);
    doc.set(key + "r_squared", (*line)->r_squared);
    doc.set(key + "n_points", std::to_string((*line)->n_points));
  }
  for (const auto* fit : {&r.positive_sensitivity, &r.negative_sensitivity}) {
    if (!*fit) continue;
    const auto key = std::string("sensitivity.") + to_string((*fit)->polarity) + ".";
    doc.set(key + "amplitude", (*fit)->amplitude);
    doc.set(key + "voltage_scale", (*fit)->voltage_scale);
    doc.set(key + "rmse", (*fit)->rmse);
    doc.set(key + "reference", (*fit)->reference);
    doc.set(key + "n_points", std::to_string((*fit)->n_points));
  }
  if (r.positive_reference) doc.set("reference.RS_0p", *r.positive_reference);
  if (r.negative_reference) doc.set("reference.RS_0n", *r.negative_reference);
  if (r.consistency) {
    for (auto [pc, name] : {std::pair{&r.consistency->positive, "positive"},
                            std::pair{&r.consistency->negative, "negative"}}) {
      const auto key = std::string("consistency.") + name + ".";
      doc.set(key + "median", pc->median);
      doc.set(key + "worst", pc->worst);
      doc.set(key + "informative", std::to_string(pc->informative));
      doc.set(key + "uninformative", pc->uninformative ? "true" : "false");
    }
    doc.set("consistency.worst", r.consistency->worst);
  }
  for (std::size_t i = 0; i < r.errors.size(); ++i) {
    doc.set("error." + std::to_string(i) + ".stage", r.errors[i].stage);
    doc.set("error." + std::to_string(i) + ".detail", r.errors[i].detail);
  }
  for (std::size_t i = 0; i < r.warnings.size(); ++i)
    doc.set("warning." + std::to_string(i), r.warnings[i]);
  return doc;
}

}  // namespace reram
