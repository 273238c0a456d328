// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
//
// Estimator of the limiting covariance of U_n on H^K and the Gaussian
// sampler behind the asymptotic p-value. Operators live in embedded
// coefficients, where x (outer) y : w -> <w, x> y is the matrix y x^T.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fdss/exec.hpp"
#include "fdss/sample.hpp"
#include "fdss/spatial_sign.hpp"

namespace fdss {

// K x K array of m x m blocks; block (k1, k2) is sigma_{k1 k2}.
class BlockOperator {
 public:
  BlockOperator(std::size_t groups, std::size_t grid_size);

  std::size_t groups() const noexcept { return groups_; }
  std::size_t grid_size() const noexcept { return m_; }

  Eigen::MatrixXd& block(std::size_t k1, std::size_t k2) { return blocks_[k1 * groups_ + k2]; }
  const Eigen::MatrixXd& block(std::size_t k1, std::size_t k2) const {
    return blocks_[k1 * groups_ + k2];
  }

  // Covariance matrix of the stacked coefficient vector (U_1; ...; U_K).
  // sigma_{k1 k2} = Cov(U_k1, U_k2) maps into component k2, so the dense
  // position (k1, k2) holds sigma_{k2 k1} = sigma_{k1 k2}^T.
  Eigen::MatrixXd dense() const;
  static BlockOperator from_dense(const Eigen::MatrixXd& dense, std::size_t groups);

  double trace() const;
  // max |block(k1,k2) - block(k2,k1)^T|.
  double asymmetry() const;

 private:
  std::size_t groups_;
  std::size_t m_;
  std::vector<Eigen::MatrixXd> blocks_;
};

// Within-group sign averages feeding C_n(i, j, k). For a reference point
// X_{k b} of group k, column b of means(k) stacks, over i = 1..K,
//   n_i^{-1} sum_l s(X_{i l} - X_{k b}).
class SignMeans {
 public:
  SignMeans(const GroupedSample& sample, const SignCache& cache, Exec exec = Exec::parallel);

  std::size_t groups() const noexcept { return sizes_.size(); }
  std::size_t grid_size() const noexcept { return m_; }
  // (K m) x n_k.
  const Eigen::MatrixXd& means(std::size_t k) const noexcept { return means_[k]; }

  // (n_k - 1)^{-1} sum_b M_b M_b^T - mbar mbar^T for M = means(k); its block
  // (j, i) is C_n(i, j, k). Requires n_k >= 2.
  Eigen::MatrixXd cross_moments(std::size_t k) const;

 private:
  std::vector<std::size_t> sizes_;
  std::size_t m_;
  std::vector<Eigen::MatrixXd> means_;
};

// Matrix of C_n(i, j, k); throws DegenerateEstimatorError when n_k < 2.
Eigen::MatrixXd c_hat(std::size_t i, std::size_t j, std::size_t k, const GroupedSample& sample);

// sigma_{k1k2} = sqrt(w_k1 w_k2) sum_l w_l [C(k1,k2,l) - C(l,k2,k1) - C(k1,l,k2)]
//              + 1{k1 = k2} sum_{l1,l2} w_l1 w_l2 C(l1,l2,k1),
// with w_l = n_l / n for the estimator and w_l = lambda_l in the limit.
using CrossCovariance = std::function<Eigen::MatrixXd(std::size_t, std::size_t, std::size_t)>;
BlockOperator assemble_sigma(std::span<const double> weights, std::size_t grid_size,
                             const CrossCovariance& c, Exec exec = Exec::parallel);

// Throws DegenerateEstimatorError when any group has fewer than 2 observations.
BlockOperator sigma_hat(const GroupedSample& sample, Exec exec = Exec::parallel);
BlockOperator sigma_hat(const GroupedSample& sample, const SignCache& cache,
                        Exec exec = Exec::parallel);

// Eigenvalues are non-increasing and clipped at zero.
struct NullSpectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // columns, empty when not requested
  std::size_t clipped = 0;       // small negative eigenvalues set to zero
  double min_raw_eigenvalue = 0.0;
};

// Relative size of a negative eigenvalue that is still treated as round-off.
inline constexpr double kEigenClipTolerance = 1e-8;

// Throws NumericalError when the eigensolver fails or an eigenvalue is more
// negative than kEigenClipTolerance times the largest one.
NullSpectrum null_spectrum(const BlockOperator& op, bool with_vectors = true);

// count draws of ||W||^2 = sum_i alpha_i z_i^2, W ~ G(0, op); draw d uses its
// own stream derived from (seed, d).
std::vector<double> sample_null_norms(const NullSpectrum& spectrum, std::size_t count,
                                      std::uint64_t seed, Exec exec = Exec::parallel);
std::vector<double> sample_null_norms(const BlockOperator& op, std::size_t count,
                                      std::uint64_t seed, Exec exec = Exec::parallel);

}  // namespace fdss
