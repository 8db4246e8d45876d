#include <doctest.h>

#include <cstring>

#include "reram/error.hpp"
#include "reram/kernels.hpp"
#include "test_support.hpp"

using namespace reram;

namespace {

const ModelParams P = preset_params();

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("rate surface: parallel matches the serial reference") {
  std::vector<double> rs, vs;
  for (int i = 0; i < 97; ++i) rs.push_back(9000.0 + 100.0 * i);
  for (int j = 0; j < 61; ++j) vs.push_back(-0.9 + 0.03 * j);
  for (auto variant : {RateVariant::exact, RateVariant::smooth}) {
    const auto a = serial::rate_surface(P, {}, rs, vs, variant);
    const auto b = parallel::rate_surface(P, {}, rs, vs, variant);
    CHECK(bit_equal(a, b));
    CHECK(a[5 * vs.size() + 7] ==
          (variant == RateVariant::exact ? switching_rate_exact(P, rs[5], vs[7])
                                         : switching_rate_smooth(P, {}, rs[5], vs[7])));
  }
  std::vector<double> bad{1000.0, -1.0};
  CHECK_THROWS_AS(parallel::rate_surface(P, {}, bad, vs, RateVariant::exact), Error);
}

TEST_CASE("batched pulse responses match and propagate errors") {
  reram::test::Gen g(41);
  std::vector<Trajectory> jobs;
  for (int i = 0; i < 3000; ++i)
    jobs.push_back({g.uniform(5000, 30000), g.uniform(-1, 1), g.uniform(0, 0.1)});
  CHECK(bit_equal(serial::pulse_responses(P, jobs), parallel::pulse_responses(P, jobs)));
  jobs[1234].r0 = -1.0;
  CHECK_THROWS_AS(parallel::pulse_responses(P, jobs), Error);
}

TEST_CASE("window slopes match and mark short windows") {
  std::vector<double> t, y;
  reram::test::Gen g(42);
  for (int i = 0; i < 1001; ++i) {
    t.push_back(1e-4 * (i + 1));
    y.push_back(10000.0 + g.uniform(-50, 50));
  }
  const auto a = serial::window_slopes(t, y, 11, 5);
  const auto b = parallel::window_slopes(t, y, 11, 5);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isnan(a[i])) CHECK(std::isnan(b[i]));
    else CHECK(a[i] == b[i]);
  }
  CHECK(std::isnan(a[0]));
  CHECK(std::isnan(a[1]));
  CHECK_FALSE(std::isnan(a[2]));
  CHECK(std::isnan(a[1000]));
}
