// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "fdss/exec.hpp"
#include "fdss/sample.hpp"

namespace fdss {

enum class Calibration { asymptotic, bootstrap, permutation, exact, naive };

std::string_view to_string(Calibration method);
Calibration parse_calibration(std::string_view name);

struct TestReport {
  std::string test;  // selector name, e.g. "ss-perm"
  double statistic = 0.0;
  double p_value = 1.0;
  Calibration method = Calibration::permutation;
  std::size_t replicates = 0;  // N, M_b or M_p; enumerated assignments for exact
  std::uint64_t seed = 0;
  std::map<std::string, double> diagnostics;
  std::string advice;
};

struct PValueOptions {
  // (count + 1) / (R + 1) instead of the plain proportion count / R.
  bool add_one = false;
};

// A resampled statistic ties the observed one when it lies within this
// relative distance; ties count as "at least as large".
inline constexpr double kTieTolerance = 1e-10;

inline bool at_least(double candidate, double observed) noexcept {
  const double scale = observed < 0.0 ? -observed : observed;
  return candidate >= observed - kTieTolerance * (scale > 1.0 ? scale : 1.0);
}

double proportion(std::size_t count, std::size_t replicates, const PValueOptions& options);

// Advice only: permutation is preferred when min n_k <= 5 and n <= 20.
Calibration recommended_calibration(std::span<const std::size_t> sizes);

TestReport asymptotic_test(const GroupedSample& sample, std::size_t n_draws, std::uint64_t seed,
                           const PValueOptions& options = {}, Exec exec = Exec::parallel);
TestReport bootstrap_test(const GroupedSample& sample, std::size_t m_b, std::uint64_t seed,
                          const PValueOptions& options = {}, Exec exec = Exec::parallel);
TestReport permutation_test(const GroupedSample& sample, std::size_t m_p, std::uint64_t seed,
                            const PValueOptions& options = {}, Exec exec = Exec::parallel);

inline constexpr double kExactEnumerationLimit = 1e5;

// Number of distinct labeled group assignments, n! / prod n_k!.
double assignment_count(std::span<const std::size_t> sizes);

// Enumerates every distinct assignment of the pooled sample to groups of the
// observed sizes. Throws InputError when there are more than `limit`.
TestReport exact_permutation_test(const GroupedSample& sample,
                                  double limit = kExactEnumerationLimit,
                                  Exec exec = Exec::parallel);

}  // namespace fdss
