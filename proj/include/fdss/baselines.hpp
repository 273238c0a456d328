// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
//
// Mean-based functional ANOVA tests used as baselines: CFF, ZC, F-type,
// GPF (integrated pointwise F), F-max (sup of pointwise F) and HR (PCA
// scores with group-specific score covariances).
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "fdss/exec.hpp"
#include "fdss/function_space.hpp"
#include "fdss/inference.hpp"
#include "fdss/sample.hpp"

namespace fdss {

struct PointwiseF {
  GridFunction values;
};

// Classical one-way ANOVA F at every grid point. Requires n > K; throws
// InputError naming the first grid point with zero residual variance.
PointwiseF pointwise_f(const GroupedSample& sample);

double cff_statistic(const GroupedSample& sample);
double zc_statistic(const GroupedSample& sample);
double f_type_statistic(const GroupedSample& sample);
double gpf_statistic(const GroupedSample& sample);
double fmax_statistic(const GroupedSample& sample);

// Traces of the pooled within-group covariance Gamma (denominator n - K) in
// embedded coefficients.
struct PooledTraces {
  double trace = 0.0;         // tr(Gamma)
  double trace_squared = 0.0;  // tr(Gamma^2)
};
PooledTraces pooled_traces(const GroupedSample& sample);

enum class BaselineMode { naive, permutation };

TestReport cff_test(const GroupedSample& sample, std::size_t m_boot, std::uint64_t seed,
                    const PValueOptions& options = {}, Exec exec = Exec::parallel);
TestReport zc_test(const GroupedSample& sample, BaselineMode mode, std::size_t resamples,
                   std::uint64_t seed, const PValueOptions& options = {},
                   Exec exec = Exec::parallel);
TestReport f_type_test(const GroupedSample& sample, BaselineMode mode, std::size_t resamples,
                       std::uint64_t seed, const PValueOptions& options = {},
                       Exec exec = Exec::parallel);
TestReport gpf_test(const GroupedSample& sample, BaselineMode mode, std::size_t resamples,
                    std::uint64_t seed, const PValueOptions& options = {},
                    Exec exec = Exec::parallel);
TestReport fmax_test(const GroupedSample& sample, std::size_t m_boot, std::uint64_t seed,
                     const PValueOptions& options = {}, Exec exec = Exec::parallel);

struct PcaScores {
  std::size_t d = 0;
  std::vector<Eigen::VectorXd> scores;            // pooled order, length-d each
  std::vector<Eigen::MatrixXd> group_covariances;  // Psi_{nk}, 1/n_k normalisation
  std::vector<Eigen::VectorXd> group_means;        // xibar_k
  Eigen::VectorXd eigenvalues;                     // all eigenvalues of Omega_n, descending
  double explained_fraction = 0.0;
};

// Smallest d whose leading eigenvalues reach `fraction` of the total.
std::size_t components_for_fraction(const Eigen::VectorXd& descending, double fraction);

PcaScores pca_scores(const GroupedSample& sample, double variance_fraction = 0.9);
// Throws InputError when some n_k <= d or a Psi_{nk} is singular.
double hr_statistic(const GroupedSample& sample, double variance_fraction = 0.9);
TestReport hr_test(const GroupedSample& sample, double variance_fraction = 0.9);

}  // namespace fdss
