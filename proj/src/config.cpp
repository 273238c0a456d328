// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
#include "fdss/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string_view>

#include "fdss/error.hpp"
#include "fdss/io.hpp"

namespace fdss {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

class LineParser {
 public:
  LineParser(std::string_view text, const std::string& source, std::size_t line)
      : text_(text), source_(source), line_(line) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw UsageError(source_ + ":" + std::to_string(line_) + ": " + message);
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) {
      ++pos_;
    }
  }

  bool at_end_or_comment() {
    skip_space();
    return pos_ >= text_.size() || text_[pos_] == '#';
  }

  ConfigValue value() {
    skip_space();
    if (pos_ >= text_.size()) {
      fail("missing value");
    }
    ConfigValue v;
    v.line = line_;
    const char c = text_[pos_];
    if (c == '"') {
      v.type = ConfigValue::Type::string;
      ++pos_;
      while (true) {
        if (pos_ >= text_.size()) {
          fail("unterminated string");
        }
        const char d = text_[pos_++];
        if (d == '"') {
          break;
        }
        if (d == '\\') {
          if (pos_ >= text_.size()) {
            fail("unterminated escape");
          }
          const char e = text_[pos_++];
          switch (e) {
            case 'n':
              v.text += '\n';
              break;
            case 't':
              v.text += '\t';
              break;
            case '"':
            case '\\':
              v.text += e;
              break;
            default:
              fail(std::string("unsupported escape \\") + e);
          }
        } else {
          v.text += d;
        }
      }
      return v;
    }
    if (c == '[') {
      v.type = ConfigValue::Type::array;
      ++pos_;
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        return v;
      }
      while (true) {
        ConfigValue item = value();
        if (item.type == ConfigValue::Type::array) {
          fail("nested arrays are not supported");
        }
        v.items.push_back(std::move(item));
        skip_space();
        if (pos_ >= text_.size()) {
          fail("unterminated array (arrays must fit on one line)");
        }
        if (text_[pos_] == ',') {
          ++pos_;
          skip_space();
          if (pos_ < text_.size() && text_[pos_] == ']') {
            ++pos_;
            return v;
          }
          continue;
        }
        if (text_[pos_] == ']') {
          ++pos_;
          return v;
        }
        fail("expected ',' or ']' in array");
      }
    }
    std::size_t end = pos_;
    while (end < text_.size() && text_[end] != ',' && text_[end] != ']' && text_[end] != '#' &&
           text_[end] != ' ' && text_[end] != '\t') {
      ++end;
    }
    const std::string_view token = text_.substr(pos_, end - pos_);
    pos_ = end;
    if (token == "true" || token == "false") {
      v.type = ConfigValue::Type::boolean;
      v.flag = token == "true";
      return v;
    }
    double number = 0.0;
    std::string cleaned;
    for (char ch : token) {
      if (ch != '_') {
        cleaned += ch;
      }
    }
    const char* first = cleaned.data();
    if (!cleaned.empty() && cleaned.front() == '+') {
      ++first;
    }
    const auto result = std::from_chars(first, cleaned.data() + cleaned.size(), number);
    if (cleaned.empty() || result.ec != std::errc{} ||
        result.ptr != cleaned.data() + cleaned.size()) {
      fail("cannot parse value '" + std::string(token) + "' (strings need double quotes)");
    }
    v.type = ConfigValue::Type::number;
    v.text = std::string(first, static_cast<const char*>(cleaned.data() + cleaned.size()));
    return v;
  }

 private:
  std::string_view text_;
  const std::string& source_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

bool valid_key(std::string_view key) {
  if (key.empty()) {
    return false;
  }
  for (char c : key) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-';
    if (!ok) {
      return false;
    }
  }
  return true;
}

const char* type_name(ConfigValue::Type type) {
  switch (type) {
    case ConfigValue::Type::number:
      return "number";
    case ConfigValue::Type::boolean:
      return "boolean";
    case ConfigValue::Type::string:
      return "string";
    case ConfigValue::Type::array:
      return "array";
  }
  return "value";
}

}  // namespace

Config::Config(std::string source, std::map<std::string, ConfigValue> entries)
    : source_(std::move(source)), entries_(std::move(entries)) {}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

const ConfigValue& Config::at(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw UsageError(source_ + ": missing key '" + key + "'");
  }
  return it->second;
}

namespace {

[[noreturn]] void wrong_type(const std::string& source, const std::string& key,
                             const ConfigValue& v, const char* wanted) {
  throw UsageError(source + ":" + std::to_string(v.line) + ": '" + key + "' must be a " + wanted +
                   ", found " + type_name(v.type));
}

double as_number(const std::string& source, const std::string& key, const ConfigValue& v) {
  if (v.type != ConfigValue::Type::number) {
    wrong_type(source, key, v, "number");
  }
  double out = 0.0;
  std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
  return out;
}

std::uint64_t as_unsigned(const std::string& source, const std::string& key, const ConfigValue& v) {
  if (v.type != ConfigValue::Type::number) {
    wrong_type(source, key, v, "non-negative integer");
  }
  std::uint64_t out = 0;
  const auto result = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
  if (result.ec != std::errc{} || result.ptr != v.text.data() + v.text.size()) {
    throw UsageError(source + ":" + std::to_string(v.line) + ": '" + key +
                     "' must be a non-negative integer, found " + v.text);
  }
  return out;
}

}  // namespace

double Config::number(const std::string& key) const { return as_number(source_, key, at(key)); }

std::size_t Config::count(const std::string& key) const {
  return static_cast<std::size_t>(as_unsigned(source_, key, at(key)));
}

std::uint64_t Config::unsigned_integer(const std::string& key) const {
  return as_unsigned(source_, key, at(key));
}

bool Config::boolean(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (v.type != ConfigValue::Type::boolean) {
    wrong_type(source_, key, v, "boolean");
  }
  return v.flag;
}

std::string Config::string(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (v.type != ConfigValue::Type::string) {
    wrong_type(source_, key, v, "string");
  }
  return v.text;
}

std::vector<double> Config::numbers(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (v.type != ConfigValue::Type::array) {
    return {as_number(source_, key, v)};
  }
  std::vector<double> out;
  for (const auto& item : v.items) {
    out.push_back(as_number(source_, key, item));
  }
  return out;
}

std::vector<std::size_t> Config::counts(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (v.type != ConfigValue::Type::array) {
    return {static_cast<std::size_t>(as_unsigned(source_, key, v))};
  }
  std::vector<std::size_t> out;
  for (const auto& item : v.items) {
    out.push_back(static_cast<std::size_t>(as_unsigned(source_, key, item)));
  }
  return out;
}

std::vector<std::string> Config::strings(const std::string& key) const {
  const ConfigValue& v = at(key);
  if (v.type == ConfigValue::Type::string) {
    return {v.text};
  }
  if (v.type != ConfigValue::Type::array) {
    wrong_type(source_, key, v, "string or array of strings");
  }
  std::vector<std::string> out;
  for (const auto& item : v.items) {
    if (item.type != ConfigValue::Type::string) {
      wrong_type(source_, key, item, "string");
    }
    out.push_back(item.text);
  }
  return out;
}

void Config::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : entries_) {
    if (allowed.count(key) == 0) {
      throw UsageError(source_ + ":" + std::to_string(value.line) + ": unknown key '" + key + "'");
    }
  }
}

Config parse_config(std::istream& in, const std::string& source) {
  std::map<std::string, ConfigValue> entries;
  std::string section;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') {
      raw.pop_back();
    }
    const std::string_view text = trim(raw);
    if (text.empty() || text.front() == '#') {
      continue;
    }
    LineParser parser(text, source, line);
    if (text.front() == '[') {
      const auto close = text.find(']');
      if (close == std::string_view::npos) {
        parser.fail("unterminated section header");
      }
      const std::string_view name = trim(text.substr(1, close - 1));
      if (!valid_key(name)) {
        parser.fail("invalid section name '" + std::string(name) + "'");
      }
      const std::string_view rest = trim(text.substr(close + 1));
      if (!rest.empty() && rest.front() != '#') {
        parser.fail("unexpected text after section header");
      }
      section = std::string(name);
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      parser.fail("expected 'key = value'");
    }
    const std::string_view key = trim(text.substr(0, eq));
    if (!valid_key(key)) {
      parser.fail("invalid key '" + std::string(key) + "'");
    }
    LineParser value_parser(text.substr(eq + 1), source, line);
    ConfigValue value = value_parser.value();
    if (!value_parser.at_end_or_comment()) {
      value_parser.fail("unexpected text after value");
    }
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (!entries.emplace(full, std::move(value)).second) {
      parser.fail("duplicate key '" + full + "'");
    }
  }
  return {source, std::move(entries)};
}

Config read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError(path + ": cannot open configuration file");
  }
  return parse_config(in, path);
}

std::vector<double> linspace(double from, double to, std::size_t count) {
  if (count == 0) {
    return {};
  }
  if (count == 1) {
    return {from};
  }
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = from + (to - from) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  out.back() = to;
  return out;
}

ExperimentConfig experiment_config(const Config& config) {
  config.require_known({"experiment.process", "experiment.sizes", "experiment.tests",
                        "experiment.replications", "experiment.alpha", "experiment.seed",
                        "domain.a", "domain.b", "domain.points", "shift.c1", "shift.c2",
                        "shift.c2_from", "shift.c2_to", "shift.c2_count", "calibration.draws",
                        "calibration.perms", "calibration.boots",
                        "calibration.variance_fraction", "calibration.add_one"});
  ExperimentConfig out;
  if (config.has("experiment.process")) {
    out.process = parse_process_spec(config.string("experiment.process"));
  }
  if (config.has("experiment.sizes")) {
    out.sizes = config.counts("experiment.sizes");
  }
  if (config.has("experiment.tests")) {
    out.tests.clear();
    for (const auto& name : config.strings("experiment.tests")) {
      out.tests.push_back(parse_selector(name));
    }
  }
  if (config.has("experiment.replications")) {
    out.replications = config.count("experiment.replications");
  }
  if (config.has("experiment.alpha")) {
    out.alpha = config.number("experiment.alpha");
  }
  if (config.has("experiment.seed")) {
    out.seed = config.unsigned_integer("experiment.seed");
  }
  const double a = config.has("domain.a") ? config.number("domain.a") : out.domain.a();
  const double b = config.has("domain.b") ? config.number("domain.b") : out.domain.b();
  const std::size_t points =
      config.has("domain.points") ? config.count("domain.points") : out.domain.size();
  out.domain = GridDomain(a, b, points);
  if (config.has("shift.c1")) {
    out.c1 = config.number("shift.c1");
  }
  const bool ranged = config.has("shift.c2_from") || config.has("shift.c2_to") ||
                      config.has("shift.c2_count");
  if (config.has("shift.c2") && ranged) {
    throw UsageError(config.source() + ": give either shift.c2 or shift.c2_from/c2_to/c2_count");
  }
  if (config.has("shift.c2")) {
    out.c2 = config.numbers("shift.c2");
  } else if (ranged) {
    out.c2 = linspace(config.number("shift.c2_from"), config.number("shift.c2_to"),
                      config.count("shift.c2_count"));
  }
  if (config.has("calibration.draws")) {
    out.calibration.draws = config.count("calibration.draws");
  }
  if (config.has("calibration.perms")) {
    out.calibration.perms = config.count("calibration.perms");
  }
  if (config.has("calibration.boots")) {
    out.calibration.boots = config.count("calibration.boots");
  }
  if (config.has("calibration.variance_fraction")) {
    out.calibration.variance_fraction = config.number("calibration.variance_fraction");
  }
  if (config.has("calibration.add_one")) {
    out.calibration.add_one = config.boolean("calibration.add_one");
  }
  return out;
}

nlohmann::json to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["process"] = to_string(config.process);
  j["domain"] = {{"a", config.domain.a()}, {"b", config.domain.b()}, {"points", config.domain.size()}};
  j["sizes"] = config.sizes;
  j["c1"] = config.c1;
  j["c2"] = config.c2;
  std::vector<std::string> tests;
  for (TestId id : config.tests) {
    tests.emplace_back(selector(id));
  }
  j["tests"] = tests;
  j["calibration"] = {{"draws", config.calibration.draws},
                      {"perms", config.calibration.perms},
                      {"boots", config.calibration.boots},
                      {"variance_fraction", config.calibration.variance_fraction},
                      {"add_one", config.calibration.add_one}};
  j["replications"] = config.replications;
  j["alpha"] = config.alpha;
  j["seed"] = config.seed;
  return j;
}

}  // namespace fdss
