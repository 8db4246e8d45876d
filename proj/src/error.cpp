#include "reram/error.hpp"

#include <cstdio>
#include <mutex>
#include <utility>

namespace reram {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain: return "domain error";
    case ErrorCode::threshold_undefined: return "threshold undefined";
    case ErrorCode::stiff_segment: return "stiff segment";
    case ErrorCode::runaway_device: return "runaway device";
    case ErrorCode::log_integrity: return "log integrity";
    case ErrorCode::no_data: return "no data for polarity";
    case ErrorCode::insufficient_data: return "insufficient data";
    case ErrorCode::rank_deficient: return "rank deficient";
    case ErrorCode::degenerate_quadratic: return "degenerate quadratic";
    case ErrorCode::underdetermined: return "underdetermined";
    case ErrorCode::no_switching_signal: return "no switching signal";
    case ErrorCode::bad_module_name: return "bad module name";
    case ErrorCode::parse: return "schema violation";
    case ErrorCode::io: return "io error";
    case ErrorCode::usage: return "usage error";
  }
  return "unknown error";
}

namespace {

std::string compose(ErrorCode code, const std::string& message, const std::string& stage) {
  std::string out;
  if (!stage.empty()) out += "[" + stage + "] ";
  out += to_string(code);
  if (!message.empty()) out += ": " + message;
  return out;
}

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& handler() {
  static WarningHandler h = [](std::string_view msg) {
    std::fprintf(stderr, "warning: %.*s\n", static_cast<int>(msg.size()), msg.data());
  };
  return h;
}

}  // namespace

Error::Error(ErrorCode code, std::string message, std::string stage)
    : std::runtime_error(compose(code, message, stage)), code_(code), stage_(std::move(stage)) {}

void set_warning_handler(WarningHandler h) {
  std::lock_guard lock(handler_mutex());
  handler() = h ? std::move(h) : [](std::string_view) {};
}

void warn(std::string_view message) {
  std::lock_guard lock(handler_mutex());
  handler()(message);
}

}  // namespace reram
