// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
//
// Test selectors shared by the harness and the command line.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fdss/exec.hpp"
#include "fdss/inference.hpp"
#include "fdss/sample.hpp"

namespace fdss {

enum class TestId {
  ss_asym,
  ss_boot,
  ss_perm,
  ss_exact,
  cff,
  zc,
  zc_perm,
  ftype,
  ftype_perm,
  gpf,
  gpf_naive,
  gpf_perm,
  fmax,
  hr,
};

struct CalibrationSettings {
  std::size_t draws = 1000;  // Gaussian draws for the asymptotic SS p-value
  std::size_t perms = 500;
  std::size_t boots = 500;
  double variance_fraction = 0.9;
  double exact_limit = kExactEnumerationLimit;
  bool add_one = false;
};

std::span<const TestId> all_tests();
std::string_view selector(TestId id);
// Throws UsageError listing every valid selector.
TestId parse_selector(std::string_view name);
std::vector<TestId> parse_selectors(std::string_view comma_separated);
std::string selector_list();

TestReport run_test(TestId id, const GroupedSample& sample, const CalibrationSettings& settings,
                    std::uint64_t seed, Exec exec = Exec::parallel);

}  // namespace fdss
