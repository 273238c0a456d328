// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
#include "fdss/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "fdss/error.hpp"

namespace fdss {
namespace {

// Splits one CSV record; double quotes may wrap a field ("" escapes a quote).
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string location(const std::string& source, std::size_t row) {
  return source + ": row " + std::to_string(row);
}

std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') {
      out += '"';
    }
  }
  return out + "\"";
}

}  // namespace

GroupedSample parse_dataset_csv(std::istream& in, const std::string& source, DomainBounds bounds) {
  std::string line;
  std::size_t row = 0;
  std::size_t columns = 0;
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::vector<std::vector<double>>> grouped;
  bool header = true;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (trim(line).empty()) {
      continue;
    }
    const std::vector<std::string> fields = split_record(line);
    if (header) {
      if (fields.size() < 2) {
        throw InputError(location(source, row) +
                         ": header needs a group column and at least one value column");
      }
      columns = fields.size();
      header = false;
      continue;
    }
    if (fields.size() != columns) {
      throw InputError(location(source, row) + ": expected " + std::to_string(columns) +
                       " columns, found " + std::to_string(fields.size()));
    }
    const std::string label(trim(fields[0]));
    if (label.empty()) {
      throw InputError(location(source, row) + ", column 1: empty group label");
    }
    std::vector<double> values(columns - 1);
    for (std::size_t c = 1; c < columns; ++c) {
      const std::string_view cell = trim(fields[c]);
      double value = 0.0;
      const auto result = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || result.ec != std::errc{} || result.ptr != cell.data() + cell.size()) {
        throw InputError(location(source, row) + ", column " + std::to_string(c + 1) +
                         ": non-numeric value '" + std::string(cell) + "'");
      }
      if (!std::isfinite(value)) {
        throw InputError(location(source, row) + ", column " + std::to_string(c + 1) +
                         ": non-finite value '" + std::string(cell) + "'");
      }
      values[c - 1] = value;
    }
    auto [it, inserted] = index.try_emplace(label, order.size());
    if (inserted) {
      order.push_back(label);
      grouped.emplace_back();
    }
    grouped[it->second].push_back(std::move(values));
  }
  if (header) {
    throw InputError(source + ": empty file (no header row)");
  }
  if (order.empty()) {
    throw InputError(source + ": no observations after the header row");
  }
  if (order.size() < 2) {
    throw InputError(source + ": K >= 2 required, found the single group '" + order[0] + "'");
  }
  if (!(bounds.a < bounds.b) || !std::isfinite(bounds.a) || !std::isfinite(bounds.b)) {
    throw InputError("domain bounds need a < b");
  }
  const GridDomain domain(bounds.a, bounds.b, columns - 1);
  std::size_t n = 0;
  std::vector<std::size_t> sizes;
  for (const auto& g : grouped) {
    sizes.push_back(g.size());
    n += g.size();
  }
  Eigen::MatrixXd values(static_cast<Eigen::Index>(columns - 1), static_cast<Eigen::Index>(n));
  Eigen::Index j = 0;
  for (const auto& g : grouped) {
    for (const auto& obs : g) {
      values.col(j++) =
          Eigen::Map<const Eigen::VectorXd>(obs.data(), static_cast<Eigen::Index>(obs.size()));
    }
  }
  GroupedSample sample(domain, std::move(values), std::move(sizes));
  sample.set_labels(order);
  return sample;
}

GroupedSample read_dataset_csv(const std::string& path, DomainBounds bounds) {
  std::ifstream in(path);
  if (!in) {
    throw InputError(path + ": cannot open dataset");
  }
  return parse_dataset_csv(in, path, bounds);
}

void write_dataset_csv(const GroupedSample& sample, std::ostream& out) {
  char buffer[40];
  out << "group";
  for (std::size_t i = 0; i < sample.grid_size(); ++i) {
    std::snprintf(buffer, sizeof buffer, "%.17g", sample.domain().point(i));
    out << ',' << buffer;
  }
  out << '\n';
  const Eigen::MatrixXd& values = sample.values();
  for (std::size_t k = 0; k < sample.groups(); ++k) {
    const std::string label = quote_field(sample.labels()[k]);
    for (std::size_t i = 0; i < sample.group_size(k); ++i) {
      const auto col = static_cast<Eigen::Index>(sample.offset(k) + i);
      out << label;
      for (Eigen::Index t = 0; t < values.rows(); ++t) {
        std::snprintf(buffer, sizeof buffer, "%.17g", values(t, col));
        out << ',' << buffer;
      }
      out << '\n';
    }
  }
}

void write_dataset_csv(const GroupedSample& sample, const std::string& path) {
  OutputFile file(path);
  write_dataset_csv(sample, file.stream());
  file.close();
}

std::string format_double(double x) {
  char buffer[40];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, x);
  return {buffer, result.ptr};
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") {
    return ReportFormat::json;
  }
  if (name == "csv") {
    return ReportFormat::csv;
  }
  throw UsageError("unknown report format '" + name + "' (expected json or csv)");
}

nlohmann::json to_json(const TestReport& report) {
  nlohmann::json j;
  j["test"] = report.test;
  j["statistic"] = report.statistic;
  j["p_value"] = report.p_value;
  j["method"] = std::string(to_string(report.method));
  j["replicates"] = report.replicates;
  j["seed"] = report.seed;
  j["diagnostics"] = nlohmann::json::object();
  for (const auto& [key, value] : report.diagnostics) {
    j["diagnostics"][key] = value;
  }
  if (!report.advice.empty()) {
    j["advice"] = report.advice;
  }
  return j;
}

void write_reports(const std::vector<TestReport>& reports, std::ostream& out, ReportFormat format,
                   const nlohmann::json* manifest) {
  if (format == ReportFormat::csv) {
    out << "test,statistic,p_value,method,replicates\n";
    for (const auto& r : reports) {
      out << quote_field(r.test) << ',' << format_double(r.statistic) << ','
          << format_double(r.p_value) << ',' << to_string(r.method) << ',' << r.replicates
          << '\n';
    }
    return;
  }
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : reports) {
    list.push_back(to_json(r));
  }
  if (manifest != nullptr) {
    nlohmann::json doc;
    doc["manifest"] = *manifest;
    doc["reports"] = std::move(list);
    out << doc.dump(2) << '\n';
  } else {
    out << list.dump(2) << '\n';
  }
}

void write_reports(const std::vector<TestReport>& reports, const std::string& path,
                   ReportFormat format, const nlohmann::json* manifest) {
  OutputFile file(path);
  write_reports(reports, file.stream(), format, manifest);
  file.close();
}

void write_size_table(const std::vector<RateEstimate>& rates, std::ostream& out) {
  out << "test,rate,standard_error,rejections,valid,errors\n";
  for (const auto& r : rates) {
    out << r.test << ',' << format_double(r.rate) << ',' << format_double(r.standard_error)
        << ',' << r.rejections << ',' << r.valid << ',' << r.errors << '\n';
  }
}

void write_power_table(const PowerCurve& curve, double c1, std::ostream& out) {
  out << "test,c1,c2,rate,standard_error,rejections,valid,errors\n";
  for (std::size_t t = 0; t < curve.tests.size(); ++t) {
    for (std::size_t p = 0; p < curve.c2.size(); ++p) {
      const RateEstimate& r = curve.rates[t][p];
      out << curve.tests[t] << ',' << format_double(c1) << ',' << format_double(curve.c2[p])
          << ',' << format_double(r.rate) << ',' << format_double(r.standard_error) << ','
          << r.rejections << ',' << r.valid << ',' << r.errors << '\n';
    }
  }
}

OutputFile::OutputFile(const std::string& path, std::ostream* standard_output)
    : path_(path), standard_output_(standard_output != nullptr ? standard_output : &std::cout) {
  if (path == "-") {
    return;
  }
  file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
  if (!*file_) {
    throw InputError(path + ": cannot open for writing");
  }
}

std::ostream& OutputFile::stream() { return file_ ? *file_ : *standard_output_; }

void OutputFile::close() {
  stream().flush();
  if (!stream()) {
    throw InputError(path_ + ": write failed");
  }
  if (file_) {
    file_->close();
  }
}

nlohmann::json manifest_json(const RunManifest& manifest) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["artifact_version"] = kArtifactVersion;
  j["seed"] = manifest.seed;
  j["threads"] = manifest.threads;
  j["started"] = manifest.started;
  j["wall_seconds"] = manifest.wall_seconds;
  j["config"] = manifest.config;
  return j;
}

}  // namespace fdss
