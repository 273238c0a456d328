// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
//
// Literal transcriptions of the estimators, written against raw grid values
// with plain loops. They share nothing with the library kernels except the
// midpoint quadrature weight.
#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fdss/sample.hpp"

namespace oracle {

using Vec = std::vector<double>;
using Group = std::vector<Vec>;

struct Data {
  double h = 1.0;  // quadrature weight
  std::vector<Group> groups;
};

inline Data from_sample(const fdss::GroupedSample& s) {
  Data d;
  d.h = s.domain().weight();
  for (std::size_t k = 0; k < s.groups(); ++k) {
    Group g;
    for (std::size_t i = 0; i < s.group_size(k); ++i) {
      const auto col = s.values().col(static_cast<Eigen::Index>(s.offset(k) + i));
      g.emplace_back(col.data(), col.data() + col.size());
    }
    d.groups.push_back(g);
  }
  return d;
}

inline double norm(const Vec& x, double h) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(h * acc);
}

// s(x - y) in grid values.
inline Vec sign_of_difference(const Vec& x, const Vec& y, double h) {
  Vec d(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) d[t] = x[t] - y[t];
  const double r = norm(d, h);
  if (r == 0.0) return Vec(x.size(), 0.0);
  for (double& v : d) v /= r;
  return d;
}

inline std::size_t total(const Data& d) {
  std::size_t n = 0;
  for (const auto& g : d.groups) n += g.size();
  return n;
}

// SS_n = sum_k n_k || n_k^{-1} sum_i n^{-1} sum_{all j} s(X_ki - X_j) ||^2.
inline double ss(const Data& d) {
  const std::size_t n = total(d);
  const std::size_t m = d.groups[0][0].size();
  double value = 0.0;
  for (const auto& g : d.groups) {
    Vec mean(m, 0.0);
    for (const auto& x : g) {
      for (const auto& other : d.groups) {
        for (const auto& y : other) {
          const Vec s = sign_of_difference(x, y, d.h);
          for (std::size_t t = 0; t < m; ++t) mean[t] += s[t] / static_cast<double>(n * g.size());
        }
      }
    }
    value += static_cast<double>(g.size()) * norm(mean, d.h) * norm(mean, d.h);
  }
  return value;
}

// C_n(i, j, k) as the matrix of the operator x (outer) y : w -> <w, x> y in
// embedded coefficients sqrt(h) * values, i.e. y x^T.
inline Eigen::MatrixXd c_n(const Data& d, std::size_t i, std::size_t j, std::size_t k) {
  const std::size_t m = d.groups[0][0].size();
  const double root_h = std::sqrt(d.h);
  const Group& gi = d.groups[i];
  const Group& gj = d.groups[j];
  const Group& gk = d.groups[k];
  Eigen::MatrixXd first = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd a_total = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd b_total = Eigen::VectorXd::Zero(m);
  for (const auto& z : gk) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    for (const auto& x : gi) {
      const Vec s = sign_of_difference(x, z, d.h);
      for (std::size_t t = 0; t < m; ++t) a[t] += root_h * s[t] / static_cast<double>(gi.size());
    }
    for (const auto& y : gj) {
      const Vec s = sign_of_difference(y, z, d.h);
      for (std::size_t t = 0; t < m; ++t) b[t] += root_h * s[t] / static_cast<double>(gj.size());
    }
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = 0; q < m; ++q) {
        first(p, q) += b[p] * a[q];
      }
    }
    a_total += a;
    b_total += b;
  }
  const double nk = static_cast<double>(gk.size());
  first /= nk - 1.0;
  a_total /= nk;
  b_total /= nk;
  return first - b_total * a_total.transpose();
}

// sigma^{(n)}_{k1 k2}.
inline Eigen::MatrixXd sigma_block(const Data& d, std::size_t k1, std::size_t k2) {
  const std::size_t K = d.groups.size();
  const double n = static_cast<double>(total(d));
  const double n1 = static_cast<double>(d.groups[k1].size());
  const double n2 = static_cast<double>(d.groups[k2].size());
  const std::size_t m = d.groups[0][0].size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t l = 0; l < K; ++l) {
    const double nl = static_cast<double>(d.groups[l].size());
    out += std::sqrt(n1 * n2) / n * (nl / n) *
           (c_n(d, k1, k2, l) - c_n(d, l, k2, k1) - c_n(d, k1, l, k2));
  }
  if (k1 == k2) {
    for (std::size_t l1 = 0; l1 < K; ++l1) {
      for (std::size_t l2 = 0; l2 < K; ++l2) {
        const double w = static_cast<double>(d.groups[l1].size() * d.groups[l2].size()) / (n * n);
        out += w * c_n(d, l1, l2, k1);
      }
    }
  }
  return out;
}

// Scalar one-way ANOVA F statistic.
inline double anova_f(const std::vector<Vec>& groups) {
  double grand = 0.0;
  std::size_t n = 0;
  for (const auto& g : groups) {
    for (double v : g) grand += v;
    n += g.size();
  }
  grand /= static_cast<double>(n);
  double between = 0.0;
  double within = 0.0;
  for (const auto& g : groups) {
    double mean = 0.0;
    for (double v : g) mean += v;
    mean /= static_cast<double>(g.size());
    between += static_cast<double>(g.size()) * (mean - grand) * (mean - grand);
    for (double v : g) within += (v - mean) * (v - mean);
  }
  const double K = static_cast<double>(groups.size());
  return (between / (K - 1.0)) / (within / (static_cast<double>(n) - K));
}

// Welch-free two-sample pooled t statistic.
inline double pooled_t(const Vec& x, const Vec& y) {
  auto mean = [](const Vec& v) {
    double s = 0.0;
    for (double a : v) s += a;
    return s / static_cast<double>(v.size());
  };
  const double mx = mean(x);
  const double my = mean(y);
  double ss = 0.0;
  for (double a : x) ss += (a - mx) * (a - mx);
  for (double a : y) ss += (a - my) * (a - my);
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  const double sp2 = ss / (nx + ny - 2.0);
  return (mx - my) / std::sqrt(sp2 * (1.0 / nx + 1.0 / ny));
}

// Gaussian sample with per-group offsets, m x n values in group order.
inline fdss::GroupedSample random_sample(std::mt19937_64& gen, std::vector<std::size_t> sizes,
                                         std::size_t m, double a = 0.0, double b = 1.0,
                                         double spread = 1.0) {
  std::normal_distribution<double> normal(0.0, spread);
  std::size_t n = 0;
  for (auto s : sizes) n += s;
  Eigen::MatrixXd values(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    for (Eigen::Index t = 0; t < values.rows(); ++t) {
      values(t, j) = normal(gen);
    }
  }
  return fdss::GroupedSample(fdss::GridDomain(a, b, m), values, std::move(sizes));
}

// Haar-random orthogonal matrix.
inline Eigen::MatrixXd random_orthogonal(std::mt19937_64& gen, std::size_t m) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(gen);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ();
}

}  // namespace oracle
