#include "reram/va_emit.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <utility>

#include "reram/error.hpp"
#include "reram/io.hpp"

namespace reram {

namespace {

constexpr std::array<std::string_view, 24> kReservedWords = {
    "module", "endmodule", "analog", "begin",   "end",      "parameter", "real",   "integer",
    "inout",  "input",     "output", "electrical", "if",    "else",      "for",    "while",
    "case",   "endcase",   "idt",    "ddt",     "limexp",   "exp",       "branch", "ground"};

bool valid_identifier(std::string_view name) {
  if (name.empty()) return false;
  const auto first = static_cast<unsigned char>(name.front());
  if (!(std::isalpha(first) || name.front() == '_')) return false;
  for (char c : name) {
    const auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || c == '_' || c == '$')) return false;
  }
  for (auto word : kReservedWords)
    if (word == name) return false;
  return true;
}

}  // namespace

std::string va_literal(double x, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", precision - 1, x);
  return buf;
}

std::string emit_verilog_a(const ModelParams& p, const SmoothingParams& sm, const EmitOptions& opts) {
  if (!valid_identifier(opts.module_name))
    throw Error(ErrorCode::bad_module_name, "'" + opts.module_name + "' is not a usable identifier",
                "emit_va");
  if (!(opts.initial_resistance > 0.0))
    throw Error(ErrorCode::usage, "initial resistance must be positive", "emit_va");
  if (opts.precision < 6 || opts.precision > 17)
    throw Error(ErrorCode::usage, "precision must lie in [6, 17]", "emit_va");
  validate(p);
  validate(sm);

  const auto lit = [&](double x) { return va_literal(x, opts.precision); };
  const auto param = [&](std::string_view name, double value, std::string_view range = {}) {
    std::string line = "  parameter real " + std::string(name) + " = " + lit(value);
    if (!range.empty()) line += " from " + std::string(range);
    return line + ";\n";
  };

  std::string out;
  out += "// " + opts.module_name + ": voltage- and state-controlled ReRAM switching-rate model.\n";
  out +=
      "//\n"
      "// The resistive state R lives on internal node `rs` (1 V on the node reads as 1 Ohm)\n"
      "// and is advanced by time integration of dR/dt = m(R, v):\n"
      "//\n"
      "//   m = s_p(v) (r_p(v) - R)^2 [R < r_p(v)] [v > 0]\n"
      "//     + s_n(v) (R - r_n(v))^2 [R > r_n(v)] [v < 0]\n"
      "//   s_x(v) = A_x (limexp(|v| / t_x) - 1),  r_p(v) = a0 + a1 v,  r_n(v) = b0 + b1 v\n"
      "//\n"
      "// Each step [.] is a logistic sigmoid of slope b_R (resistance) or b_v (voltage);\n"
      "// all exponentials are evaluated through limexp.\n"
      "\n"
      "`include \"constants.vams\"\n"
      "`include \"disciplines.vams\"\n"
      "\n";
  out += "module " + opts.module_name + "(p, n);\n";
  out +=
      "  inout p, n;\n"
      "  electrical p, n;\n"
      "  electrical rs;\n"
      "\n"
      "  // switching sensitivity, Ohm^-1 s^-1 and V\n";
  out += param("A_p", p.positive.amplitude);
  out += param("A_n", p.negative.amplitude);
  out += param("t_p", p.positive.voltage_scale, "(0:inf)");
  out += param("t_n", p.negative.voltage_scale, "(0:inf)");
  out += "  // absolute threshold lines, Ohm and Ohm/V\n";
  out += param("a0", p.positive.threshold_intercept);
  out += param("a1", p.positive.threshold_slope, "[0:inf)");
  out += param("b0", p.negative.threshold_intercept);
  out += param("b1", p.negative.threshold_slope, "[0:inf)");
  out += "  // read-out voltage defining the resistive state (informational)\n";
  out += param("V_read", p.read_voltage);
  out += "  // sigmoid slopes, Ohm and V\n";
  out += param("b_R", sm.resistance_slope, "(0:inf)");
  out += param("b_v", sm.voltage_slope, "(0:inf)");
  out += "  // limexp knee assumed during extraction; the simulator applies its own\n";
  out += param("limexp_threshold", sm.limexp_knee, "(0:inf)");
  out += "  // initial resistive state, Ohm\n";
  out += param("R_init", opts.initial_resistance, "(0:inf)");
  out +=
      "\n"
      "  real v, R, rp, rn, sp, sn, gate_rp, gate_rn, gate_vp, gate_vn, rate;\n"
      "\n"
      "  analog begin\n"
      "    v = V(p, n);\n"
      "    R = V(rs);\n"
      "    rp = a0 + a1 * v;\n"
      "    rn = b0 + b1 * v;\n"
      "    sp = A_p * (limexp(abs(v) / t_p) - 1.0);\n"
      "    sn = A_n * (limexp(abs(v) / t_n) - 1.0);\n"
      "    gate_rp = 1.0 / (1.0 + limexp(-(rp - R) / b_R));\n"
      "    gate_rn = 1.0 / (1.0 + limexp(-(R - rn) / b_R));\n"
      "    gate_vp = 1.0 / (1.0 + limexp(-v / b_v));\n"
      "    gate_vn = 1.0 / (1.0 + limexp(v / b_v));\n"
      "    rate = sp * (rp - R) * (rp - R) * gate_rp * gate_vp\n"
      "         + sn * (R - rn) * (R - rn) * gate_rn * gate_vn;\n"
      "    V(rs) <+ idt(rate, R_init);\n"
      "    I(p, n) <+ v / R;\n"
      "  end\n"
      "endmodule\n";
  return out;
}

std::map<std::string, double> parse_va_parameters(std::string_view text) {
  std::map<std::string, double> out;
  constexpr std::string_view kPrefix = "parameter real ";
  std::size_t pos = 0;
  while ((pos = text.find(kPrefix, pos)) != std::string_view::npos) {
    pos += kPrefix.size();
    const auto eq = text.find('=', pos);
    const auto semi = text.find(';', pos);
    if (eq == std::string_view::npos || semi == std::string_view::npos || eq > semi) break;
    auto name = text.substr(pos, eq - pos);
    while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
    auto value = text.substr(eq + 1, semi - eq - 1);
    if (const auto from = value.find(" from "); from != std::string_view::npos)
      value = value.substr(0, from);
    if (auto x = io::parse_double(value)) out.emplace(std::string(name), *x);
    pos = semi;
  }
  return out;
}

}  // namespace reram
