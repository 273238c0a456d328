// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
#include "fdss/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fdss/error.hpp"
#include "fdss/rng.hpp"

namespace fdss {
namespace {

void require_estimable(const GroupedSample& sample) {
  for (std::size_t k = 0; k < sample.groups(); ++k) {
    if (sample.group_size(k) < 2) {
      throw DegenerateEstimatorError(
          "covariance estimator needs at least 2 observations in every group; group " +
          std::to_string(k + 1) + " has " + std::to_string(sample.group_size(k)) +
          " (use permutation calibration instead)");
    }
  }
}

std::string describe(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  out << "matrix " << m.rows() << "x" << m.cols() << ", trace " << m.trace()
      << ", frobenius norm " << m.norm() << ", diagonal range ["
      << m.diagonal().minCoeff() << ", " << m.diagonal().maxCoeff() << "]";
  return out.str();
}

}  // namespace

BlockOperator::BlockOperator(std::size_t groups, std::size_t grid_size)
    : groups_(groups),
      m_(grid_size),
      blocks_(groups * groups, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid_size),
                                                     static_cast<Eigen::Index>(grid_size))) {}

Eigen::MatrixXd BlockOperator::dense() const {
  const auto m = static_cast<Eigen::Index>(m_);
  Eigen::MatrixXd out(m * static_cast<Eigen::Index>(groups_), m * static_cast<Eigen::Index>(groups_));
  for (std::size_t k1 = 0; k1 < groups_; ++k1) {
    for (std::size_t k2 = 0; k2 < groups_; ++k2) {
      out.block(static_cast<Eigen::Index>(k1) * m, static_cast<Eigen::Index>(k2) * m, m, m) =
          block(k1, k2).transpose();
    }
  }
  return out;
}

BlockOperator BlockOperator::from_dense(const Eigen::MatrixXd& dense, std::size_t groups) {
  if (groups == 0 || dense.rows() != dense.cols() ||
      dense.rows() % static_cast<Eigen::Index>(groups) != 0) {
    throw InputError("dense operator shape does not match the group count");
  }
  const auto m = dense.rows() / static_cast<Eigen::Index>(groups);
  BlockOperator op(groups, static_cast<std::size_t>(m));
  for (std::size_t k1 = 0; k1 < groups; ++k1) {
    for (std::size_t k2 = 0; k2 < groups; ++k2) {
      op.block(k1, k2) =
          dense.block(static_cast<Eigen::Index>(k1) * m, static_cast<Eigen::Index>(k2) * m, m, m)
              .transpose();
    }
  }
  return op;
}

double BlockOperator::trace() const {
  double t = 0.0;
  for (std::size_t k = 0; k < groups_; ++k) {
    t += block(k, k).trace();
  }
  return t;
}

double BlockOperator::asymmetry() const {
  double worst = 0.0;
  for (std::size_t k1 = 0; k1 < groups_; ++k1) {
    for (std::size_t k2 = 0; k2 < groups_; ++k2) {
      worst = std::max(worst, (block(k1, k2) - block(k2, k1).transpose()).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

SignMeans::SignMeans(const GroupedSample& sample, const SignCache& cache, Exec exec)
    : sizes_(sample.sizes().begin(), sample.sizes().end()), m_(sample.grid_size()) {
  const std::size_t groups = sizes_.size();
  const auto m = static_cast<Eigen::Index>(m_);
  means_.resize(groups);
  for (std::size_t k = 0; k < groups; ++k) {
    means_[k] = Eigen::MatrixXd::Zero(m * static_cast<Eigen::Index>(groups),
                                      static_cast<Eigen::Index>(sizes_[k]));
  }
  const auto n = static_cast<long>(sample.total());
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (long z = 0; z < n; ++z) {
    const std::size_t k = sample.group_of(static_cast<std::size_t>(z));
    const auto column = static_cast<Eigen::Index>(static_cast<std::size_t>(z) - sample.offset(k));
    for (std::size_t i = 0; i < groups; ++i) {
      auto target = means_[k].col(column).segment(static_cast<Eigen::Index>(i) * m, m);
      for (std::size_t l = 0; l < sample.group_size(i); ++l) {
        target += cache.sign(sample.offset(i) + l, static_cast<std::size_t>(z));
      }
      target /= static_cast<double>(sample.group_size(i));
    }
  }
}

Eigen::MatrixXd SignMeans::cross_moments(std::size_t k) const {
  const Eigen::MatrixXd& means = means_[k];
  const auto nk = static_cast<double>(means.cols());
  if (means.cols() < 2) {
    throw DegenerateEstimatorError("C_n(i, j, k) needs n_k >= 2");
  }
  const Eigen::VectorXd centre = means.rowwise().sum() / nk;
  Eigen::MatrixXd out = means * means.transpose();
  out /= (nk - 1.0);
  out.noalias() -= centre * centre.transpose();
  return out;
}

Eigen::MatrixXd c_hat(std::size_t i, std::size_t j, std::size_t k, const GroupedSample& sample) {
  const std::size_t groups = sample.groups();
  if (i >= groups || j >= groups || k >= groups) {
    throw InputError("group index out of range");
  }
  if (sample.group_size(k) < 2) {
    throw DegenerateEstimatorError("C_n(i, j, k) needs at least 2 observations in group " +
                                   std::to_string(k + 1));
  }
  const SignCache cache(sample);
  const SignMeans means(sample, cache);
  const auto m = static_cast<Eigen::Index>(sample.grid_size());
  return means.cross_moments(k).block(static_cast<Eigen::Index>(j) * m,
                                      static_cast<Eigen::Index>(i) * m, m, m);
}

BlockOperator assemble_sigma(std::span<const double> weights, std::size_t grid_size,
                             const CrossCovariance& c, Exec exec) {
  const std::size_t groups = weights.size();
  BlockOperator op(groups, grid_size);
  const auto pairs = static_cast<long>(groups * groups);
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
  for (long p = 0; p < pairs; ++p) {
    const std::size_t k1 = static_cast<std::size_t>(p) / groups;
    const std::size_t k2 = static_cast<std::size_t>(p) % groups;
    Eigen::MatrixXd& target = op.block(k1, k2);
    const double outer = std::sqrt(weights[k1] * weights[k2]);
    for (std::size_t l = 0; l < groups; ++l) {
      target += (outer * weights[l]) * (c(k1, k2, l) - c(l, k2, k1) - c(k1, l, k2));
    }
    if (k1 == k2) {
      for (std::size_t l1 = 0; l1 < groups; ++l1) {
        for (std::size_t l2 = 0; l2 < groups; ++l2) {
          target += (weights[l1] * weights[l2]) * c(l1, l2, k1);
        }
      }
    }
  }
  return op;
}

BlockOperator sigma_hat(const GroupedSample& sample, Exec exec) {
  require_estimable(sample);
  const SignCache cache(sample, exec);
  return sigma_hat(sample, cache, exec);
}

BlockOperator sigma_hat(const GroupedSample& sample, const SignCache& cache, Exec exec) {
  require_estimable(sample);
  const std::size_t groups = sample.groups();
  const SignMeans means(sample, cache, exec);
  std::vector<Eigen::MatrixXd> moments(groups);
  for (std::size_t k = 0; k < groups; ++k) {
    moments[k] = means.cross_moments(k);
  }
  std::vector<double> weights(groups);
  for (std::size_t k = 0; k < groups; ++k) {
    weights[k] = static_cast<double>(sample.group_size(k)) / static_cast<double>(sample.total());
  }
  const auto m = static_cast<Eigen::Index>(sample.grid_size());
  const CrossCovariance c = [&](std::size_t i, std::size_t j, std::size_t k) -> Eigen::MatrixXd {
    return moments[k].block(static_cast<Eigen::Index>(j) * m, static_cast<Eigen::Index>(i) * m, m, m);
  };
  return assemble_sigma(weights, sample.grid_size(), c, exec);
}

NullSpectrum null_spectrum(const BlockOperator& op, bool with_vectors) {
  Eigen::MatrixXd dense = op.dense();
  // Round-off asymmetry only; the estimator is self-adjoint by construction.
  dense = 0.5 * (dense + dense.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      dense, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigendecomposition failed for " + describe(dense));
  }
  const Eigen::VectorXd& ascending = solver.eigenvalues();
  const Eigen::Index size = ascending.size();
  NullSpectrum spectrum;
  spectrum.eigenvalues = ascending.reverse();
  if (with_vectors) {
    spectrum.eigenvectors = solver.eigenvectors().rowwise().reverse();
  }
  spectrum.min_raw_eigenvalue = size > 0 ? ascending(0) : 0.0;
  const double largest = size > 0 ? std::max(ascending(size - 1), 0.0) : 0.0;
  const double tolerance = kEigenClipTolerance * largest;
  for (Eigen::Index i = 0; i < size; ++i) {
    double& value = spectrum.eigenvalues(i);
    if (value < 0.0) {
      if (-value > tolerance && largest > 0.0) {
        std::ostringstream msg;
        msg << "covariance operator is not non-negative definite: eigenvalue " << value
            << " against largest " << largest << " (" << describe(dense) << ")";
        throw NumericalError(msg.str());
      }
      value = 0.0;
      ++spectrum.clipped;
    }
  }
  return spectrum;
}

std::vector<double> sample_null_norms(const NullSpectrum& spectrum, std::size_t count,
                                      std::uint64_t seed, Exec exec) {
  std::vector<double> active;
  for (Eigen::Index i = 0; i < spectrum.eigenvalues.size(); ++i) {
    if (spectrum.eigenvalues(i) > 0.0) {
      active.push_back(spectrum.eigenvalues(i));
    }
  }
  std::vector<double> draws(count, 0.0);
  const auto total = static_cast<long>(count);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (long d = 0; d < total; ++d) {
    rng::Stream stream(seed, rng::Purpose::null_draw, static_cast<std::uint64_t>(d));
    double sum = 0.0;
    for (double alpha : active) {
      const double z = stream.normal();
      sum += alpha * z * z;
    }
    draws[static_cast<std::size_t>(d)] = sum;
  }
  return draws;
}

std::vector<double> sample_null_norms(const BlockOperator& op, std::size_t count,
                                      std::uint64_t seed, Exec exec) {
  return sample_null_norms(null_spectrum(op, false), count, seed, exec);
}

}  // namespace fdss
