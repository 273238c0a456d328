// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
#include "fdss/registry.hpp"

#include <array>

#include "fdss/baselines.hpp"
#include "fdss/error.hpp"
#include "fdss/inference.hpp"

namespace fdss {
namespace {

constexpr std::array kTests = {
    TestId::ss_asym, TestId::ss_boot,    TestId::ss_perm, TestId::ss_exact, TestId::cff,
    TestId::zc,      TestId::zc_perm,    TestId::ftype,   TestId::ftype_perm, TestId::gpf,
    TestId::gpf_naive, TestId::gpf_perm, TestId::fmax,    TestId::hr,
};

}  // namespace

std::span<const TestId> all_tests() { return kTests; }

std::string_view selector(TestId id) {
  switch (id) {
    case TestId::ss_asym:
      return "ss-asym";
    case TestId::ss_boot:
      return "ss-boot";
    case TestId::ss_perm:
      return "ss-perm";
    case TestId::ss_exact:
      return "ss-exact";
    case TestId::cff:
      return "cff";
    case TestId::zc:
      return "zc";
    case TestId::zc_perm:
      return "zc-perm";
    case TestId::ftype:
      return "ftype";
    case TestId::ftype_perm:
      return "ftype-perm";
    case TestId::gpf:
      return "gpf";
    case TestId::gpf_naive:
      return "gpf-naive";
    case TestId::gpf_perm:
      return "gpf-perm";
    case TestId::fmax:
      return "fmax";
    case TestId::hr:
      return "hr";
  }
  return "unknown";
}

std::string selector_list() {
  std::string out;
  for (TestId id : kTests) {
    if (!out.empty()) {
      out += ", ";
    }
    out += selector(id);
  }
  return out;
}

TestId parse_selector(std::string_view name) {
  for (TestId id : kTests) {
    if (selector(id) == name) {
      return id;
    }
  }
  throw UsageError("unknown test selector '" + std::string(name) +
                   "'; valid selectors: " + selector_list());
}

std::vector<TestId> parse_selectors(std::string_view text) {
  std::vector<TestId> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      out.push_back(parse_selector(item));
    }
    if (comma == std::string_view::npos) {
      break;
    }
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) {
    throw UsageError("no test selected; valid selectors: " + selector_list());
  }
  return out;
}

namespace {

TestReport dispatch(TestId id, const GroupedSample& sample, const CalibrationSettings& settings,
                    std::uint64_t seed, Exec exec) {
  const PValueOptions options{settings.add_one};
  switch (id) {
    case TestId::ss_asym:
      return asymptotic_test(sample, settings.draws, seed, options, exec);
    case TestId::ss_boot:
      return bootstrap_test(sample, settings.boots, seed, options, exec);
    case TestId::ss_perm:
      return permutation_test(sample, settings.perms, seed, options, exec);
    case TestId::ss_exact:
      return exact_permutation_test(sample, settings.exact_limit, exec);
    case TestId::cff:
      return cff_test(sample, settings.boots, seed, options, exec);
    case TestId::zc:
      return zc_test(sample, BaselineMode::naive, settings.perms, seed, options, exec);
    case TestId::zc_perm:
      return zc_test(sample, BaselineMode::permutation, settings.perms, seed, options, exec);
    case TestId::ftype:
      return f_type_test(sample, BaselineMode::naive, settings.perms, seed, options, exec);
    case TestId::ftype_perm:
      return f_type_test(sample, BaselineMode::permutation, settings.perms, seed, options, exec);
    case TestId::gpf: {
      // Permutation for small samples, the two-cumulant approximation otherwise.
      const BaselineMode mode = recommended_calibration(sample.sizes()) == Calibration::permutation
                                    ? BaselineMode::permutation
                                    : BaselineMode::naive;
      return gpf_test(sample, mode, settings.perms, seed, options, exec);
    }
    case TestId::gpf_perm:
      return gpf_test(sample, BaselineMode::permutation, settings.perms, seed, options, exec);
    case TestId::gpf_naive:
      return gpf_test(sample, BaselineMode::naive, settings.perms, seed, options, exec);
    case TestId::fmax:
      return fmax_test(sample, settings.boots, seed, options, exec);
    case TestId::hr:
      return hr_test(sample, settings.variance_fraction);
  }
  throw UsageError("unknown test");
}

}  // namespace

TestReport run_test(TestId id, const GroupedSample& sample, const CalibrationSettings& settings,
                    std::uint64_t seed, Exec exec) {
  TestReport report = dispatch(id, sample, settings, seed, exec);
  report.test = selector(id);
  return report;
}

}  // namespace fdss
