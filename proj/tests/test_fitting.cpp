#include <doctest.h>

#include <cmath>

#include "reram/error.hpp"
#include "reram/fitting.hpp"
#include "test_support.hpp"

using namespace reram;
using reram::test::rel_err;

namespace {

const ModelParams P = preset_params();

std::vector<RatePoint> parabola(double s, double r0, double v, double lo, double hi, int n) {
  std::vector<RatePoint> pts;
  for (int i = 0; i < n; ++i) {
    const double r = lo + (hi - lo) * i / (n - 1);
    pts.push_back({r, v, s * (r0 - r) * (r0 - r)});
  }
  return pts;
}

std::pair<RefinedSet, RefinedSet> model_refined(const ModelParams& truth, double rp, double rn) {
  RefinedSet pos{Polarity::positive, rp, {}};
  RefinedSet neg{Polarity::negative, rn, {}};
  for (double v = 0.3; v <= 0.9001; v += 0.05) {
    pos.points.push_back({rp, v, switching_rate_exact(truth, rp, v)});
    neg.points.push_back({rn, -v, switching_rate_exact(truth, rn, -v)});
  }
  return {pos, neg};
}

}  // namespace

TEST_CASE("window quadratic recovers an exact parabola") {
  const auto pts = parabola(0.0381399, 17280.0, 0.8, 12000.0, 17000.0, 60);
  const auto fit = fit_window_quadratic(pts);
  CHECK(rel_err(fit.s_hat, 0.0381399) < 1e-9);
  CHECK(rel_err(fit.r_hat, 17280.0) < 1e-9);
  CHECK(fit.rmse < 1e-6 * 0.0381399 * 5280.0 * 5280.0);
  CHECK(fit.n_points == 60);
  CHECK(fit.warnings.empty());

  const auto neg = parabola(-0.0917263, 10482.0, -0.8, 11000.0, 15000.0, 40);
  const auto nf = fit_window_quadratic(neg);
  CHECK(rel_err(nf.r_hat, 10482.0) < 1e-9);
  CHECK(nf.warnings.empty());
}

TEST_CASE("window quadratic: scaling the rates scales s_hat only") {
  reram::test::Gen g(51);
  for (int i = 0; i < 50; ++i) {
    auto pts = parabola(g.uniform(1e-3, 1e-1), g.uniform(15000, 20000), 0.7, 11000, 14000, 30);
    const auto base = fit_window_quadratic(pts);
    const double alpha = g.uniform(0.1, 10.0);
    for (auto& p : pts) p.rate *= alpha;
    const auto scaled = fit_window_quadratic(pts);
    CHECK(rel_err(scaled.s_hat, alpha * base.s_hat) < 1e-9);
    CHECK(rel_err(scaled.r_hat, base.r_hat) < 1e-9);
  }
}

TEST_CASE("window quadratic errors and warnings") {
  const std::vector<RatePoint> two{{1000, 0.5, 1}, {2000, 0.5, 2}, {2000, 0.5, 3}};
  try {
    fit_window_quadratic(two);
    FAIL("expected rank deficiency");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::rank_deficient);
  }
  const auto line = std::vector<RatePoint>{{1000, 0.5, 1}, {2000, 0.5, 2}, {3000, 0.5, 3}};
  CHECK_THROWS_AS(fit_window_quadratic(line), Error);

  const auto wrong = parabola(-0.01, 17000.0, 0.8, 12000.0, 16000.0, 20);
  CHECK(fit_window_quadratic(wrong).warnings.size() == 1);
}

TEST_CASE("threshold line through the negative preset boundary") {
  const std::vector<Boundary> b{{-0.6, 14064.0}, {-0.7, 12273.0}, {-0.8, 10482.0}};
  const auto line = fit_threshold_line(b, Polarity::negative);
  CHECK(line.intercept == doctest::Approx(24810.0).epsilon(1e-9));
  CHECK(line.slope == doctest::Approx(17910.0).epsilon(1e-9));
  CHECK(line.r_squared == doctest::Approx(1.0));
  CHECK(line.n_points == 3);

  const std::vector<Boundary> one{{0.8, 17280.0}, {0.8, 17281.0}};
  try {
    fit_threshold_line(one, Polarity::positive);
    FAIL("expected underdetermined");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::underdetermined);
  }
}

TEST_CASE("sensitivity fit recovers both branches") {
  for (auto pol : {Polarity::positive, Polarity::negative}) {
    const auto& br = P.branch(pol);
    const double ref = pol == Polarity::positive ? 12600.0 : 14900.0;
    std::vector<RatePoint> pts;
    for (int k = 0; k < 6; ++k) {
      const double v = pol == Polarity::positive ? 0.3 + 0.1 * k : -(0.65 + 0.05 * k);
      pts.push_back({ref, v, switching_rate_exact(P, ref, v)});
    }
    const ThresholdLine line{pol, br.threshold_intercept, br.threshold_slope, 1.0, 3};
    const auto fit = fit_sensitivity_exp(pts, ref, line);
    CHECK(rel_err(fit.amplitude, br.amplitude) < 1e-3);
    CHECK(rel_err(fit.voltage_scale, br.voltage_scale) < 1e-3);
    CHECK(fit.warnings.empty());
  }
}

TEST_CASE("sensitivity fit errors") {
  const ThresholdLine line{Polarity::positive, 17160.0, 150.0, 1.0, 3};
  std::vector<RatePoint> zeros;
  for (double v : {0.3, 0.5, 0.7}) zeros.push_back({12600.0, v, 0.0});
  try {
    fit_sensitivity_exp(zeros, 12600.0, line);
    FAIL("expected no switching signal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_switching_signal);
  }
  std::vector<RatePoint> outside{{18000.0, 0.5, 1.0}, {18000.0, 0.6, 2.0}, {18000.0, 0.7, 3.0}};
  CHECK_THROWS_AS(fit_sensitivity_exp(outside, 18000.0, line), Error);
}

TEST_CASE("cross consistency") {
  const auto refined = model_refined(P, 12600.0, 14900.0);
  const auto self = cross_consistency(P, refined);
  CHECK(self.positive.median < 1e-12);
  CHECK(self.negative.median < 1e-12);
  CHECK_FALSE(self.positive.uninformative);

  auto doubled = P;
  doubled.negative.amplitude *= 2.0;
  const auto off = cross_consistency(doubled, refined);
  CHECK(off.negative.median == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(off.positive.median < 1e-12);
  CHECK(off.worst == doctest::Approx(1.0).epsilon(1e-9));

  auto silent = refined;
  for (auto& p : silent.first.points) p.rate = 0.0;
  const auto un = cross_consistency(P, silent);
  CHECK(un.positive.uninformative);
  CHECK(un.positive.informative == 0);
}

TEST_CASE("extract_model collects stage errors") {
  VirtualDevice d(P, 13650.0);
  SweeperConfig one{500, 1e-4, 0.6, 0.1, 0.6};
  const auto sweep = run_sweeper(d, one);
  MeasurementLog empty_opt{OptimizerConfig{}, {}};
  const auto result = extract_model(sweep, empty_opt);
  CHECK_FALSE(result.params);
  CHECK_FALSE(result.report.positive_line);
  CHECK(result.report.errors.size() >= 2);
  bool line_err = false, refine_err = false;
  for (const auto& e : result.report.errors) {
    line_err = line_err || e.stage == "threshold_line";
    refine_err = refine_err || e.stage == "refinement";
  }
  CHECK(line_err);
  CHECK(refine_err);
  const auto doc = report_to_doc(result, {});
  CHECK(*doc.find("fit.status") == "partial");
  CHECK(doc.contains("error.0.stage"));
}

TEST_CASE("extract_model constrains a negative threshold slope to the mean level") {
  // Positive boundaries that fall with bias give an OLS slope < 0.
  auto truth = P;
  truth.positive.threshold_intercept = 17800.0;
  truth.positive.threshold_slope = 600.0;
  VirtualDevice sd(truth, 13650.0);
  const auto sweep = run_sweeper(sd, SweeperConfig{});
  auto flipped = sweep;
  // Relabel the +0.6 and +0.8 V trains so the recovered boundary decreases with v.
  for (auto& r : flipped.records)
    if (r.phase == Phase::write && r.voltage > 0.0) r.voltage = r.voltage > 0.75 ? 0.6 : r.voltage < 0.65 ? 0.8 : 0.7;
  VirtualDevice od(P, 13650.0);
  const auto opt = run_optimizer(od, OptimizerConfig{});
  const auto result = extract_model(flipped, opt);
  REQUIRE(result.report.positive_line);
  CHECK(result.report.positive_line->slope == 0.0);
  CHECK(result.report.positive_line->r_squared == 0.0);
  bool warned = false;
  for (const auto& w : result.report.warnings) warned = warned || w.find("constrained to 0") != std::string::npos;
  CHECK(warned);
}
