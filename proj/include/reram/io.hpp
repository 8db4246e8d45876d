#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "reram/model.hpp"

namespace reram::io {

/// Shortest text that parses back to the same double (17 significant digits).
std::string format_exact(double x);
/// Scientific or general notation at `digits` significant digits.
std::string format_digits(double x, int digits);

/// Strict double parse: the whole token must be consumed.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

/// Ordered `key = value` document with `#` comments.
class KeyValueDoc {
 public:
  void set(std::string key, std::string value);
  void set(std::string key, double value) { set(std::move(key), format_exact(value)); }

  bool contains(std::string_view key) const;
  const std::string* find(std::string_view key) const;
  /// Throws Error(parse) when missing or not a number.
  double number(std::string_view key) const;
  double number_or(std::string_view key, double fallback) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string render(std::string_view header_comment = {}) const;
  static KeyValueDoc parse(std::string_view text);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a comma-separated file with a header line. Throws Error(parse) when
/// the header differs from `expected_header` (if given) or a row has the
/// wrong number of fields.
CsvTable parse_csv(std::string_view text, std::string_view expected_header = {});

std::string read_file(const std::filesystem::path& path);
/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Parameter file: model + smoothing constants, SI units.
KeyValueDoc params_to_doc(const ModelParams& params, const SmoothingParams& smoothing);
std::pair<ModelParams, SmoothingParams> params_from_doc(const KeyValueDoc& doc);
std::string write_params(const ModelParams& params, const SmoothingParams& smoothing);
std::pair<ModelParams, SmoothingParams> read_params(std::string_view text);

}  // namespace reram::io
