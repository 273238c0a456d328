// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
//
// Declarative run configuration: a TOML subset with [section] headers,
// `key = value` lines, '#' comments and values that are numbers, booleans,
// double-quoted strings or single-line arrays of those.
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdss/experiment.hpp"

namespace fdss {

struct ConfigValue {
  enum class Type { number, boolean, string, array };
  Type type = Type::number;
  std::string text;  // number literal or string contents
  bool flag = false;
  std::vector<ConfigValue> items;
  std::size_t line = 0;
};

class Config {
 public:
  Config() = default;
  Config(std::string source, std::map<std::string, ConfigValue> entries);

  const std::string& source() const noexcept { return source_; }
  // Keys are "section.key" (or "key" before the first section).
  bool has(const std::string& key) const;
  const ConfigValue& at(const std::string& key) const;

  double number(const std::string& key) const;
  std::size_t count(const std::string& key) const;  // non-negative integer
  std::uint64_t unsigned_integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::string string(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::size_t> counts(const std::string& key) const;
  std::vector<std::string> strings(const std::string& key) const;

  // Throws UsageError naming the first key outside `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

 private:
  std::string source_;
  std::map<std::string, ConfigValue> entries_;
};

// Malformed files raise UsageError with "<source>:<line>: ...".
Config parse_config(std::istream& in, const std::string& source);
Config read_config(const std::string& path);

// Sections [experiment] (process, sizes, tests, replications, alpha, seed),
// [domain] (a, b, points), [shift] (c1, c2 list or c2_from/c2_to/c2_count)
// and [calibration] (draws, perms, boots, variance_fraction, add_one).
ExperimentConfig experiment_config(const Config& config);
nlohmann::json to_json(const ExperimentConfig& config);

// Evenly spaced values from..to inclusive.
std::vector<double> linspace(double from, double to, std::size_t count);

}  // namespace fdss
