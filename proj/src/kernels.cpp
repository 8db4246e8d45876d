#include "reram/kernels.hpp"

#include <algorithm>
#include <cstdint>
#include <exception>
#include <limits>

#include "reram/error.hpp"

namespace reram {

double window_slope(std::span<const double> t, std::span<const double> y, std::size_t first,
                    std::size_t count) noexcept {
  double tm = 0.0, ym = 0.0;
  for (std::size_t k = first; k < first + count; ++k) {
    tm += t[k];
    ym += y[k];
  }
  tm /= static_cast<double>(count);
  ym /= static_cast<double>(count);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = first; k < first + count; ++k) {
    const double dt = t[k] - tm;
    sxy += dt * (y[k] - ym);
    sxx += dt * dt;
  }
  return sxy / sxx;
}

namespace {

inline double rate_at(const ModelParams& p, const SmoothingParams& sm, double r, double v,
                      RateVariant variant) {
  return variant == RateVariant::exact ? switching_rate_exact(p, r, v)
                                       : switching_rate_smooth(p, sm, r, v);
}

inline double slope_at(std::span<const double> t, std::span<const double> y, std::int64_t i,
                       int window, int min_window) {
  const auto n = static_cast<std::int64_t>(t.size());
  const std::int64_t half = std::min<std::int64_t>({window / 2, i, n - 1 - i});
  const std::int64_t count = 2 * half + 1;
  if (count < min_window) return std::numeric_limits<double>::quiet_NaN();
  return window_slope(t, y, static_cast<std::size_t>(i - half), static_cast<std::size_t>(count));
}

void check_surface_inputs(std::span<const double> resistances) {
  for (double r : resistances)
    if (!(r > 0.0)) throw Error(ErrorCode::domain, "surface resistances must be positive");
}

}  // namespace

namespace serial {

std::vector<double> rate_surface(const ModelParams& p, const SmoothingParams& sm,
                                 std::span<const double> rs, std::span<const double> vs,
                                 RateVariant variant) {
  check_surface_inputs(rs);
  std::vector<double> out(rs.size() * vs.size());
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t j = 0; j < vs.size(); ++j)
      out[i * vs.size() + j] = rate_at(p, sm, rs[i], vs[j], variant);
  return out;
}

std::vector<double> pulse_responses(const ModelParams& p, std::span<const Trajectory> jobs) {
  std::vector<double> out(jobs.size());
  for (std::size_t k = 0; k < jobs.size(); ++k)
    out[k] = pulse_response(p, jobs[k].r0, jobs[k].v, jobs[k].dt);
  return out;
}

std::vector<double> window_slopes(std::span<const double> t, std::span<const double> y, int window,
                                  int min_window) {
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    out[i] = slope_at(t, y, static_cast<std::int64_t>(i), window, min_window);
  return out;
}

}  // namespace serial

namespace parallel {

// Exceptions must not escape an OpenMP region; the first one is captured and
// rethrown after the loop.
std::vector<double> rate_surface(const ModelParams& p, const SmoothingParams& sm,
                                 std::span<const double> rs, std::span<const double> vs,
                                 RateVariant variant) {
  check_surface_inputs(rs);
  std::vector<double> out(rs.size() * vs.size());
  const auto nr = static_cast<std::int64_t>(rs.size());
  const auto nv = vs.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nv; ++j)
      out[static_cast<std::size_t>(i) * nv + j] = rate_at(p, sm, rs[i], vs[j], variant);
  return out;
}

std::vector<double> pulse_responses(const ModelParams& p, std::span<const Trajectory> jobs) {
  std::vector<double> out(jobs.size());
  const auto n = static_cast<std::int64_t>(jobs.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) {
    try {
      out[k] = pulse_response(p, jobs[k].r0, jobs[k].v, jobs[k].dt);
    } catch (...) {
#pragma omp critical(reram_kernel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<double> window_slopes(std::span<const double> t, std::span<const double> y, int window,
                                  int min_window) {
  std::vector<double> out(t.size());
  const auto n = static_cast<std::int64_t>(t.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = slope_at(t, y, i, window, min_window);
  return out;
}

}  // namespace parallel

}  // namespace reram
