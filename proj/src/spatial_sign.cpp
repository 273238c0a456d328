// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
#include "fdss/spatial_sign.hpp"

#include <cmath>

#include "fdss/error.hpp"

namespace fdss {

GridFunction spatial_sign(const GridFunction& x) {
  const double norm = l2_norm(x);
  if (norm <= kZeroNormTolerance) {
    return GridFunction::zero(x.domain());
  }
  return x * (1.0 / norm);
}

GridFunction spatial_rank(const GridFunction& x, std::span<const GridFunction> pooled) {
  if (pooled.empty()) {
    throw InputError("spatial rank needs a nonempty pooled sample");
  }
  GridFunction sum = GridFunction::zero(x.domain());
  for (const auto& y : pooled) {
    sum += spatial_sign(x - y);
  }
  return sum * (1.0 / static_cast<double>(pooled.size()));
}

SignCache::SignCache(const Eigen::MatrixXd& coefficients, Exec exec)
    : n_(static_cast<std::size_t>(coefficients.cols())),
      m_(static_cast<std::size_t>(coefficients.rows())),
      data_(n_ * n_ * m_, 0.0) {
  const auto n = static_cast<long>(n_);
  const std::size_t m = m_;
  const double* x = coefficients.data();
  double* out = data_.data();
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
  for (long a = 0; a < n; ++a) {
    const double* xa = x + static_cast<std::size_t>(a) * m;
    for (long b = a + 1; b < n; ++b) {
      const double* xb = x + static_cast<std::size_t>(b) * m;
      double* ab = out + (static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b)) * m;
      double* ba = out + (static_cast<std::size_t>(b) * n_ + static_cast<std::size_t>(a)) * m;
      double sq = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double d = xa[i] - xb[i];
        ab[i] = d;
        sq += d * d;
      }
      const double norm = std::sqrt(sq);
      if (norm <= kZeroNormTolerance) {
        for (std::size_t i = 0; i < m; ++i) {
          ab[i] = 0.0;
          ba[i] = 0.0;
        }
        continue;
      }
      const double inv = 1.0 / norm;
      for (std::size_t i = 0; i < m; ++i) {
        ab[i] *= inv;
        ba[i] = -ab[i];
      }
    }
  }
}

SignCache::SignCache(const GroupedSample& sample, Exec exec)
    : SignCache(sample.coefficients(), exec) {}

Eigen::MatrixXd SignCache::rank_vectors(Exec exec) const {
  std::vector<double> ones(n_, 1.0);
  return weighted_rank_vectors(ones, exec);
}

Eigen::MatrixXd SignCache::weighted_rank_vectors(std::span<const double> weights,
                                                 Exec exec) const {
  if (weights.size() != n_) {
    throw InputError("rank weights must have one entry per pooled observation");
  }
  double total = 0.0;
  for (double w : weights) {
    total += w;
  }
  Eigen::MatrixXd ranks = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_),
                                                static_cast<Eigen::Index>(n_));
  if (total <= 0.0) {
    return ranks;
  }
  const auto n = static_cast<long>(n_);
  const double scale = 1.0 / total;
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (long a = 0; a < n; ++a) {
    double* r = ranks.data() + static_cast<std::size_t>(a) * m_;
    for (std::size_t b = 0; b < n_; ++b) {
      const double w = weights[b];
      if (w == 0.0) {
        continue;
      }
      const double* s = data_.data() + (static_cast<std::size_t>(a) * n_ + b) * m_;
      for (std::size_t i = 0; i < m_; ++i) {
        r[i] += w * s[i];
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      r[i] *= scale;
    }
  }
  return ranks;
}

Eigen::MatrixXd rank_gram(const Eigen::MatrixXd& rank_vectors, Exec exec) {
  const auto n = static_cast<long>(rank_vectors.cols());
  const auto m = static_cast<std::size_t>(rank_vectors.rows());
  Eigen::MatrixXd gram(n, n);
  const double* r = rank_vectors.data();
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
  for (long a = 0; a < n; ++a) {
    const double* ra = r + static_cast<std::size_t>(a) * m;
    for (long b = 0; b <= a; ++b) {
      const double* rb = r + static_cast<std::size_t>(b) * m;
      double dot = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        dot += ra[i] * rb[i];
      }
      gram(a, b) = dot;
      gram(b, a) = dot;
    }
  }
  return gram;
}

double ss_from_rank_gram(const Eigen::MatrixXd& gram, std::span<const std::size_t> order,
                         std::span<const std::size_t> sizes) {
  double value = 0.0;
  std::size_t start = 0;
  for (const std::size_t size : sizes) {
    double block = 0.0;
    for (std::size_t a = start; a < start + size; ++a) {
      const auto ia = static_cast<Eigen::Index>(order[a]);
      for (std::size_t b = start; b < start + size; ++b) {
        block += gram(ia, static_cast<Eigen::Index>(order[b]));
      }
    }
    value += block / static_cast<double>(size);
    start += size;
  }
  return value;
}

SsStatistic ss_statistic(const GroupedSample& sample, Exec exec) {
  const SignCache cache(sample, exec);
  const Eigen::MatrixXd ranks = cache.rank_vectors(exec);
  const GridDomain& domain = sample.domain();

  std::vector<GridFunction> means;
  std::vector<GridFunction> parts;
  double value = 0.0;
  for (std::size_t k = 0; k < sample.groups(); ++k) {
    const auto nk = static_cast<double>(sample.group_size(k));
    const Eigen::VectorXd mean =
        ranks.middleCols(static_cast<Eigen::Index>(sample.offset(k)),
                         static_cast<Eigen::Index>(sample.group_size(k)))
            .rowwise()
            .sum() /
        nk;
    value += nk * mean.squaredNorm();
    means.push_back(from_coefficients(domain, {mean.data(), static_cast<std::size_t>(mean.size())}));
    parts.push_back(means.back() * std::sqrt(nk));
  }
  return SsStatistic{value, std::move(means), HTuple(std::move(parts))};
}

}  // namespace fdss
