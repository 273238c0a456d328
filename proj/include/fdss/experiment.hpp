// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo size and power studies, subsampling studies on real data and
// the limiting powers under shrinking alternatives.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fdss/exec.hpp"
#include "fdss/function_space.hpp"
#include "fdss/process.hpp"
#include "fdss/registry.hpp"
#include "fdss/sample.hpp"

namespace fdss {

struct ExperimentConfig {
  ProcessSpec process;
  GridDomain domain{0.25, 0.75, 100};
  std::vector<std::size_t> sizes{20, 20, 20};
  double c1 = 0.0;
  std::vector<double> c2;  // power curve points
  std::vector<TestId> tests{TestId::ss_asym};
  CalibrationSettings calibration;
  std::size_t replications = 500;
  double alpha = 0.05;
  std::uint64_t seed = 0;
};

// Throws InputError when replications < 1, alpha outside (0, 1), fewer than
// two groups or no tests.
void validate(const ExperimentConfig& config);

struct RateEstimate {
  std::string test;
  std::size_t rejections = 0;
  std::size_t valid = 0;   // replications that produced a p-value
  std::size_t errors = 0;  // replications where the test raised an error
  double rate = 0.0;       // rejections / valid
  double standard_error = 0.0;
  std::string first_error;
};

// Replication r draws its noise from derive_seed(seed, replication, r) and
// runs test t with derive_seed(seed, test_calibration, r, t), so size runs
// and the c2 = 0 point of a power curve coincide.
std::uint64_t replication_seed(std::uint64_t master, std::size_t replication);
std::uint64_t test_seed(std::uint64_t master, std::size_t replication, TestId test);

// Data of replication r at shift c2 (c1 from the config).
GroupedSample replication_sample(const ExperimentConfig& config, std::size_t replication,
                                 double c2, Exec exec = Exec::serial);

// Null data (c1 = c2 = 0) regardless of the config's shift values.
std::vector<RateEstimate> estimate_size(const ExperimentConfig& config,
                                        Exec exec = Exec::parallel);

struct PowerCurve {
  std::vector<double> c2;
  std::vector<std::string> tests;
  std::vector<std::vector<RateEstimate>> rates;  // rates[test][point]
};

// Throws InputError when the c2 list is empty.
PowerCurve power_curve(const ExperimentConfig& config, Exec exec = Exec::parallel);

struct SubsampleConfig {
  std::size_t subgroup_size = 4;
  std::size_t replications = 500;
  double alpha = 0.05;
  std::vector<TestId> tests{TestId::ss_perm};
  CalibrationSettings calibration;
  std::uint64_t seed = 0;
  bool size_study = true;
  bool power_study = true;
};

struct SubsampleResult {
  std::vector<std::string> included_groups;  // size study
  std::vector<std::string> omitted_groups;   // too small to split into K subgroups
  // size[test] averages the per-group rates; size_by_group[test][g].
  std::vector<RateEstimate> size;
  std::vector<std::vector<RateEstimate>> size_by_group;
  std::vector<RateEstimate> power;
};

// Size: each group with at least K * subgroup_size observations is split at
// random into K subgroups. Power: one random subgroup from each group.
SubsampleResult subsample_study(const GroupedSample& data, const SubsampleConfig& config,
                                Exec exec = Exec::parallel);

struct ShrinkingAlternative {
  std::vector<double> lambda;
  std::vector<GridFunction> delta;
  ProcessSpec base;
  GridDomain domain{0.25, 0.75, 100};
};

// lambda_k in (0, 1) summing to 1 (within 1e-9), one delta per group on the
// alternative's domain.
void validate(const ShrinkingAlternative& alt);

// delta = (0, c1 eta_1, c2 eta_2) with equal weights.
ShrinkingAlternative figure_alternative(const ProcessSpec& base, const GridDomain& domain,
                                        double c1, double c2);

struct AsymptoticPowerSettings {
  std::size_t derivative_pairs = 20000;  // pairs (X, X') averaged for E[s'(X - X')]
  std::size_t outer = 2000;              // nested Monte Carlo for C under the null
  std::size_t inner = 200;
  std::size_t covariance_paths = 5000;   // draws estimating Gamma for the baselines
  std::size_t gaussian_draws = 20000;
};

struct AsymptoticPower {
  double power = 0.0;
  double standard_error = 0.0;  // binomial, over gaussian_draws
  bool unstable = false;        // E||X - X'||^{-1} estimate not settled
  std::string note;
};

AsymptoticPower asymptotic_power_ss(const ShrinkingAlternative& alt, double alpha,
                                    const AsymptoticPowerSettings& settings, std::uint64_t seed,
                                    Exec exec = Exec::parallel);

enum class AsymptoticBaseline { cff, zc, hr };

std::string_view to_string(AsymptoticBaseline test);
AsymptoticBaseline parse_asymptotic_baseline(std::string_view name);

AsymptoticPower asymptotic_power_baseline(AsymptoticBaseline test,
                                          const ShrinkingAlternative& alt, double alpha,
                                          const AsymptoticPowerSettings& settings,
                                          std::uint64_t seed, double variance_fraction = 0.9,
                                          Exec exec = Exec::parallel);

}  // namespace fdss
