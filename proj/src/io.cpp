#include "reram/io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "reram/error.hpp"

namespace reram::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string format_exact(double x) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw Error(ErrorCode::domain, "cannot format number");
  return std::string(buf.data(), end);
}

std::string format_digits(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

std::optional<long long> parse_int(std::string_view text) {
  text = trim(text);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

void KeyValueDoc::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

const std::string* KeyValueDoc::find(std::string_view key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return &v;
  return nullptr;
}

bool KeyValueDoc::contains(std::string_view key) const { return find(key) != nullptr; }

double KeyValueDoc::number(std::string_view key) const {
  const auto* v = find(key);
  if (!v) throw Error(ErrorCode::parse, "missing key '" + std::string(key) + "'");
  auto x = parse_double(*v);
  if (!x) throw Error(ErrorCode::parse, "key '" + std::string(key) + "' is not a number: " + *v);
  return *x;
}

double KeyValueDoc::number_or(std::string_view key, double fallback) const {
  return contains(key) ? number(key) : fallback;
}

std::string KeyValueDoc::render(std::string_view header_comment) const {
  std::string out;
  if (!header_comment.empty()) {
    std::istringstream in{std::string(header_comment)};
    for (std::string line; std::getline(in, line);) out += "# " + line + "\n";
  }
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

KeyValueDoc KeyValueDoc::parse(std::string_view text) {
  KeyValueDoc doc;
  std::size_t lineno = 0;
  while (!text.empty()) {
    ++lineno;
    const auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::parse, "line " + std::to_string(lineno) + ": expected 'key = value'");
    auto key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorCode::parse, "line " + std::to_string(lineno) + ": empty key");
    doc.set(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return doc;
}

CsvTable parse_csv(std::string_view text, std::string_view expected_header) {
  CsvTable table;
  bool have_header = false;
  std::size_t lineno = 0;
  while (!text.empty()) {
    ++lineno;
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    if (!have_header) {
      if (!expected_header.empty() && trim(line) != expected_header)
        throw Error(ErrorCode::parse, "unexpected CSV header '" + std::string(line) +
                                          "', expected '" + std::string(expected_header) + "'");
      table.header = split_fields(line);
      have_header = true;
      continue;
    }
    auto fields = split_fields(line);
    if (fields.size() != table.header.size())
      throw Error(ErrorCode::parse, "line " + std::to_string(lineno) + ": expected " +
                                        std::to_string(table.header.size()) + " fields, got " +
                                        std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw Error(ErrorCode::parse, "missing CSV header");
  return table;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::io, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::io, "cannot move output into '" + path.string() + "'");
  }
}

namespace {

constexpr std::array<std::string_view, 12> kParamKeys = {
    "A_p", "A_n", "t_p", "t_n", "a0", "a1", "b0", "b1", "V_read", "b_R", "b_v", "limexp_threshold"};

}  // namespace

KeyValueDoc params_to_doc(const ModelParams& p, const SmoothingParams& sm) {
  KeyValueDoc doc;
  doc.set("A_p", p.positive.amplitude);
  doc.set("A_n", p.negative.amplitude);
  doc.set("t_p", p.positive.voltage_scale);
  doc.set("t_n", p.negative.voltage_scale);
  doc.set("a0", p.positive.threshold_intercept);
  doc.set("a1", p.positive.threshold_slope);
  doc.set("b0", p.negative.threshold_intercept);
  doc.set("b1", p.negative.threshold_slope);
  doc.set("V_read", p.read_voltage);
  doc.set("b_R", sm.resistance_slope);
  doc.set("b_v", sm.voltage_slope);
  doc.set("limexp_threshold", sm.limexp_knee);
  return doc;
}

std::pair<ModelParams, SmoothingParams> params_from_doc(const KeyValueDoc& doc) {
  for (const auto& [k, v] : doc.entries()) {
    // Dotted keys carry diagnostics (fit reports); everything else must be known.
    if (k.find('.') != std::string::npos) continue;
    bool known = false;
    for (auto key : kParamKeys) known = known || key == k;
    if (!known) throw Error(ErrorCode::parse, "unknown parameter key '" + k + "'");
  }
  ModelParams p;
  p.positive.amplitude = doc.number("A_p");
  p.negative.amplitude = doc.number("A_n");
  p.positive.voltage_scale = doc.number("t_p");
  p.negative.voltage_scale = doc.number("t_n");
  p.positive.threshold_intercept = doc.number("a0");
  p.positive.threshold_slope = doc.number("a1");
  p.negative.threshold_intercept = doc.number("b0");
  p.negative.threshold_slope = doc.number("b1");
  p.read_voltage = doc.number_or("V_read", kDefaultReadVoltage);
  SmoothingParams sm;
  sm.resistance_slope = doc.number_or("b_R", sm.resistance_slope);
  sm.voltage_slope = doc.number_or("b_v", sm.voltage_slope);
  sm.limexp_knee = doc.number_or("limexp_threshold", sm.limexp_knee);
  validate(p);
  validate(sm);
  return {p, sm};
}

std::string write_params(const ModelParams& p, const SmoothingParams& sm) {
  return params_to_doc(p, sm).render("ReRAM switching-rate model parameters (SI units: Ohm, V, s)");
}

std::pair<ModelParams, SmoothingParams> read_params(std::string_view text) {
  return params_from_doc(KeyValueDoc::parse(text));
}

}  // namespace reram::io
