// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
//
// Spatial signs, pooled spatial ranks and the SS statistic
//   SS_n = sum_k n_k || Rbar_k ||^2,
// where Rbar_k averages the pooled spatial ranks R(X_ki) over group k.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fdss/exec.hpp"
#include "fdss/function_space.hpp"
#include "fdss/sample.hpp"

namespace fdss {

// Norms at or below this are treated as exact zeros, so s(0) = 0 also
// covers resampled duplicates.
inline constexpr double kZeroNormTolerance = 1e-12;

GridFunction spatial_sign(const GridFunction& x);

// n^{-1} sum_j s(x - pooled_j).
GridFunction spatial_rank(const GridFunction& x, std::span<const GridFunction> pooled);

// All n^2 pairwise signs s(X_a - X_b) of a pooled sample, in embedded
// coefficients. Built once, read-only afterwards. Memory is n^2 m doubles.
class SignCache {
 public:
  // coefficients: m x n, one pooled observation per column.
  explicit SignCache(const Eigen::MatrixXd& coefficients, Exec exec = Exec::parallel);
  explicit SignCache(const GroupedSample& sample, Exec exec = Exec::parallel);

  std::size_t observations() const noexcept { return n_; }
  std::size_t grid_size() const noexcept { return m_; }

  // s(X_a - X_b) as m coefficients; zero when a == b.
  Eigen::Map<const Eigen::VectorXd> sign(std::size_t a, std::size_t b) const noexcept {
    return {data_.data() + (a * n_ + b) * m_, static_cast<Eigen::Index>(m_)};
  }

  // Column a is the pooled spatial rank R(X_a) = n^{-1} sum_b s(X_a - X_b).
  Eigen::MatrixXd rank_vectors(Exec exec = Exec::parallel) const;

  // Spatial ranks with respect to a weighted pooled sample: column a is
  // (sum_b w_b)^{-1} sum_b w_b s(X_a - X_b). Bootstrap resamples use the
  // multiplicities of the drawn indices as weights.
  Eigen::MatrixXd weighted_rank_vectors(std::span<const double> weights,
                                        Exec exec = Exec::parallel) const;

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<double> data_;
};

// Gram matrix <R_a, R_b> of the pooled rank vectors (n x n).
Eigen::MatrixXd rank_gram(const Eigen::MatrixXd& rank_vectors, Exec exec = Exec::parallel);

// SS for the assignment in which group k holds pooled indices
// order[offset_k .. offset_k + sizes[k]); uses only the rank Gram matrix,
// which does not change when the pooled sample is regrouped.
double ss_from_rank_gram(const Eigen::MatrixXd& gram, std::span<const std::size_t> order,
                         std::span<const std::size_t> sizes);

struct SsStatistic {
  double value = 0.0;
  std::vector<GridFunction> rank_means;  // Rbar_k
  HTuple u_n;                            // (sqrt(n_1) Rbar_1, ..., sqrt(n_K) Rbar_K)
};

SsStatistic ss_statistic(const GroupedSample& sample, Exec exec = Exec::parallel);

}  // namespace fdss
