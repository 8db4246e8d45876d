#pragma once

#include <map>
#include <string>
#include <string_view>

#include "reram/model.hpp"

namespace reram {

struct EmitOptions {
  std::string module_name = "reram_model";
  double initial_resistance = 13650.0;  // Ohm
  int precision = 9;                    // significant digits of numeric literals, [6, 17]
};

/// Verilog-A module for the smoothed model: two terminals, the resistive
/// state on an internal node advanced with idt(), ohmic terminal current, and
/// every exponential routed through limexp(). Deterministic: equal inputs give
/// byte-identical text (ASCII, LF line endings).
///
/// Throws Error(bad_module_name) for an invalid identifier and Error(usage)
/// for out-of-range options.
std::string emit_verilog_a(const ModelParams& params, const SmoothingParams& smoothing,
                           const EmitOptions& opts = {});

/// Scientific literal with `precision` significant digits, e.g. 1.09000000e-03.
std::string va_literal(double x, int precision);

/// `parameter real NAME = VALUE` defaults found in module text.
std::map<std::string, double> parse_va_parameters(std::string_view text);

}  // namespace reram
