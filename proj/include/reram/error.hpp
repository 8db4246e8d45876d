#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace reram {

enum class ErrorCode {
  domain,               // argument outside the mathematical domain
  threshold_undefined,  // zero threshold slope for the requested branch
  stiff_segment,        // integrator step budget exhausted
  runaway_device,       // device state left the physical range
  log_integrity,        // malformed measurement log
  no_data,              // empty polarity subset / empty input
  insufficient_data,    // too few samples for the requested window
  rank_deficient,
  degenerate_quadratic,
  underdetermined,
  no_switching_signal,
  bad_module_name,
  parse,                // schema violation in an input file
  io,                   // unreadable / unwritable file
  usage,                // invalid configuration or CLI usage
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. `stage` names the pipeline stage that raised it
/// (empty for plain model evaluation).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string stage = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorCode code_;
  std::string stage_;
};

// Non-fatal diagnostics (validity range, direction violations, ...).
// The handler is process-global; install it before spawning workers.
using WarningHandler = std::function<void(std::string_view)>;

void set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace reram
