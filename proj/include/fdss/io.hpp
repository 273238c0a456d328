// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
//
// Functional CSV datasets, report serialization and result tables.
//
// Dataset layout: a header row (group column name followed by one name per
// grid point) and one observation per row, "label,v_1,...,v_m". Groups are
// numbered in order of first appearance of their label.
#pragma once

#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdss/experiment.hpp"
#include "fdss/inference.hpp"
#include "fdss/sample.hpp"

namespace fdss {

struct DomainBounds {
  double a = 0.0;
  double b = 1.0;
};

// Every malformed input raises InputError with "<source>: row R[, column C]".
GroupedSample parse_dataset_csv(std::istream& in, const std::string& source,
                                DomainBounds bounds = {});
GroupedSample read_dataset_csv(const std::string& path, DomainBounds bounds = {});

// Values with 17 significant digits, so reading back is bit-exact.
void write_dataset_csv(const GroupedSample& sample, std::ostream& out);
void write_dataset_csv(const GroupedSample& sample, const std::string& path);

// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

enum class ReportFormat { json, csv };
ReportFormat parse_report_format(const std::string& name);

nlohmann::json to_json(const TestReport& report);

// JSON: an array of reports, or {"manifest": ..., "reports": [...]} when a
// manifest is given. CSV: test,statistic,p_value,method,replicates.
void write_reports(const std::vector<TestReport>& reports, std::ostream& out, ReportFormat format,
                   const nlohmann::json* manifest = nullptr);
void write_reports(const std::vector<TestReport>& reports, const std::string& path,
                   ReportFormat format, const nlohmann::json* manifest = nullptr);

void write_size_table(const std::vector<RateEstimate>& rates, std::ostream& out);
// One row per (test, c2).
void write_power_table(const PowerCurve& curve, double c1, std::ostream& out);

// Opens `path` for writing; "-" is standard output (or `standard_output`
// when given). Throws InputError when
// the path cannot be written.
class OutputFile {
 public:
  explicit OutputFile(const std::string& path, std::ostream* standard_output = nullptr);
  std::ostream& stream();
  // Flushes; throws InputError when the write failed.
  void close();

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* standard_output_;
};

inline constexpr const char* kArtifactVersion = "0.1.0";

struct RunManifest {
  std::string command;
  nlohmann::json config;  // echo of the effective configuration
  std::uint64_t seed = 0;
  int threads = 0;
  double wall_seconds = 0.0;
  std::string started;  // ISO-8601 UTC
};

nlohmann::json manifest_json(const RunManifest& manifest);

}  // namespace fdss
