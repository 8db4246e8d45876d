#include <doctest.h>

#include <regex>

#include "reram/error.hpp"
#include "reram/io.hpp"
#include "reram/va_emit.hpp"
#include "test_support.hpp"

using namespace reram;
using reram::test::rel_err;

namespace {

std::size_t count_of(const std::string& text, const std::string& token) {
  std::size_t n = 0;
  for (auto pos = text.find(token); pos != std::string::npos; pos = text.find(token, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("preset emission matches the golden fixture") {
  const auto golden = io::read_file(RERAM_GOLDEN_DIR "/reram_model_preset.va");
  CHECK(emit_verilog_a(preset_params(), {}) == golden);
}

TEST_CASE("literal formatting") {
  CHECK(va_literal(1.09e-3, 9) == "1.09000000e-03");
  CHECK(va_literal(-1.09e-3, 9) == "-1.09000000e-03");
  CHECK(va_literal(17160.0, 6) == "1.71600e+04");
  CHECK(emit_verilog_a(preset_params(), {}).find("1.09000000e-03") != std::string::npos);
}

TEST_CASE("structural tokens") {
  const auto text = emit_verilog_a(preset_params(), {});
  CHECK(count_of(text, "idt(") == 1);
  CHECK(count_of(text, "limexp(") >= 1);
  CHECK(count_of(text, "electrical rs;") == 1);
  CHECK(std::regex_search(text, std::regex(R"(module\s+reram_model\s*\(\s*p\s*,\s*n\s*\))")));
  CHECK(std::regex_search(text, std::regex(R"(I\(p,\s*n\)\s*<\+)")));
  // No exponential outside limexp.
  CHECK_FALSE(std::regex_search(text, std::regex(R"((^|[^a-z_])exp\()")));
  for (char c : text) CHECK(static_cast<unsigned char>(c) < 128);
  CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("parameter defaults round-trip at the declared precision") {
  reram::test::Gen g(61);
  for (int precision : {6, 9, 12, 17}) {
    auto p = preset_params();
    p.positive.amplitude *= g.uniform(0.5, 2.0);
    p.negative.voltage_scale *= g.uniform(0.5, 2.0);
    p.positive.threshold_slope = g.uniform(50, 500);
    SmoothingParams sm{g.uniform(0.5, 2), g.uniform(1e-4, 1e-2), 80.0};
    const auto parsed = parse_va_parameters(emit_verilog_a(p, sm, {"m", 12345.0, precision}));
    const double tol = 0.5 * std::pow(10.0, 1 - precision);
    CHECK(parsed.size() == 13);
    CHECK(rel_err(parsed.at("A_p"), p.positive.amplitude) <= tol);
    CHECK(rel_err(parsed.at("A_n"), p.negative.amplitude) <= tol);
    CHECK(rel_err(parsed.at("t_n"), p.negative.voltage_scale) <= tol);
    CHECK(rel_err(parsed.at("a1"), p.positive.threshold_slope) <= tol);
    CHECK(rel_err(parsed.at("b_v"), sm.voltage_slope) <= tol);
    CHECK(rel_err(parsed.at("R_init"), 12345.0) <= tol);
  }
}

TEST_CASE("emission is deterministic and validates options") {
  const auto p = preset_params();
  CHECK(emit_verilog_a(p, {}) == emit_verilog_a(p, {}));
  for (const char* bad : {"", "9lives", "has space", "module", "exp", "a-b"}) {
    try {
      emit_verilog_a(p, {}, {bad, 13650.0, 9});
      FAIL("expected bad module name");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::bad_module_name);
    }
  }
  CHECK_THROWS_AS(emit_verilog_a(p, {}, {"m", 0.0, 9}), Error);
  CHECK_THROWS_AS(emit_verilog_a(p, {}, {"m", 1.0, 5}), Error);
  CHECK_THROWS_AS(emit_verilog_a(p, {}, {"m", 1.0, 18}), Error);
  CHECK(emit_verilog_a(p, {}, {"_dev2", 1.0, 9}).find("module _dev2(") != std::string::npos);
}
