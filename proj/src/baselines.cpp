// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
#include "fdss/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

#include "fdss/error.hpp"
#include "fdss/rng.hpp"

namespace fdss {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Sizes = std::vector<std::size_t>;

Sizes sizes_of(const GroupedSample& sample) {
  return {sample.sizes().begin(), sample.sizes().end()};
}

void require_more_than_groups(const GroupedSample& sample) {
  if (sample.total() <= sample.groups()) {
    throw InputError("test needs more observations than groups (n = " +
                     std::to_string(sample.total()) + ", K = " +
                     std::to_string(sample.groups()) + ")");
  }
}

// Columns of x are observations in group order.
Eigen::MatrixXd group_means(const Eigen::MatrixXd& x, const Sizes& sizes) {
  Eigen::MatrixXd means(x.rows(), static_cast<Eigen::Index>(sizes.size()));
  Eigen::Index start = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const auto nk = static_cast<Eigen::Index>(sizes[k]);
    means.col(static_cast<Eigen::Index>(k)) =
        x.middleCols(start, nk).rowwise().sum() / static_cast<double>(nk);
    start += nk;
  }
  return means;
}

Eigen::MatrixXd residuals(const Eigen::MatrixXd& x, const Sizes& sizes,
                          const Eigen::MatrixXd& means) {
  Eigen::MatrixXd r = x;
  Eigen::Index start = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const auto nk = static_cast<Eigen::Index>(sizes[k]);
    r.middleCols(start, nk).colwise() -= means.col(static_cast<Eigen::Index>(k));
    start += nk;
  }
  return r;
}

Eigen::VectorXd grand_mean(const Eigen::MatrixXd& means, const Sizes& sizes) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(means.rows());
  double n = 0.0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    g += static_cast<double>(sizes[k]) * means.col(static_cast<Eigen::Index>(k));
    n += static_cast<double>(sizes[k]);
  }
  return g / n;
}

// Between-group sum of squares at every grid point (unweighted values).
Eigen::VectorXd between_ss(const Eigen::MatrixXd& means, const Sizes& sizes) {
  const Eigen::VectorXd g = grand_mean(means, sizes);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(means.rows());
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    out += static_cast<double>(sizes[k]) *
           (means.col(static_cast<Eigen::Index>(k)) - g).array().square().matrix();
  }
  return out;
}

double zc_value(const Eigen::MatrixXd& x, const Sizes& sizes, double weight) {
  return weight * between_ss(group_means(x, sizes), sizes).sum();
}

double cff_value(const Eigen::MatrixXd& x, const Sizes& sizes, double weight) {
  const Eigen::MatrixXd means = group_means(x, sizes);
  double total = 0.0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    for (std::size_t l = k + 1; l < sizes.size(); ++l) {
      total += static_cast<double>(sizes[k]) *
               (means.col(static_cast<Eigen::Index>(k)) - means.col(static_cast<Eigen::Index>(l)))
                   .squaredNorm();
    }
  }
  return weight * total;
}

double f_type_value(const Eigen::MatrixXd& x, const Sizes& sizes, double weight) {
  const Eigen::MatrixXd means = group_means(x, sizes);
  const double n = static_cast<double>(x.cols());
  const double groups = static_cast<double>(sizes.size());
  const double between = weight * between_ss(means, sizes).sum() / (groups - 1.0);
  const double within = weight * residuals(x, sizes, means).squaredNorm() / (n - groups);
  return within > 0.0 ? between / within : kNaN;
}

// Residual variance at a point counts as zero below this fraction of the
// mean square there; exact zeros are rarely exact after centring.
constexpr double kZeroVarianceRelative = 1e-24;

// Pointwise F; returns the index of the first degenerate point in `bad`
// (or -1) instead of throwing so resampling loops stay exception free.
Eigen::VectorXd pointwise_f_values(const Eigen::MatrixXd& x, const Sizes& sizes, Eigen::Index& bad) {
  const Eigen::MatrixXd means = group_means(x, sizes);
  const double n = static_cast<double>(x.cols());
  const double groups = static_cast<double>(sizes.size());
  const Eigen::VectorXd between = between_ss(means, sizes) / (groups - 1.0);
  const Eigen::VectorXd within =
      residuals(x, sizes, means).rowwise().squaredNorm() / (n - groups);
  const Eigen::VectorXd scale = x.rowwise().squaredNorm() / n;
  Eigen::VectorXd f(x.rows());
  bad = -1;
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    if (!(within(t) > kZeroVarianceRelative * scale(t)) || within(t) <= 0.0) {
      if (bad < 0) {
        bad = t;
      }
      f(t) = kNaN;
      continue;
    }
    f(t) = between(t) / within(t);
  }
  return f;
}

double gpf_value(const Eigen::MatrixXd& x, const Sizes& sizes, double weight) {
  Eigen::Index bad = -1;
  const Eigen::VectorXd f = pointwise_f_values(x, sizes, bad);
  return bad >= 0 ? kNaN : weight * f.sum();
}

double fmax_value(const Eigen::MatrixXd& x, const Sizes& sizes, double /*weight*/) {
  Eigen::Index bad = -1;
  const Eigen::VectorXd f = pointwise_f_values(x, sizes, bad);
  return bad >= 0 ? kNaN : f.maxCoeff();
}

using StatFn = double (*)(const Eigen::MatrixXd&, const Sizes&, double);

enum class Resampling { permutation, residual_bootstrap };

struct ResampleOutcome {
  std::size_t exceed = 0;
  std::size_t degenerate = 0;
};

// Permutation reassigns the observations; the residual bootstrap draws n
// group-mean-centred residuals with replacement from the pooled residuals.
ResampleOutcome resample(const Eigen::MatrixXd& base, const Sizes& sizes, double weight,
                         double observed, std::size_t count, std::uint64_t seed,
                         Resampling scheme, StatFn stat, Exec exec) {
  const auto n = static_cast<std::size_t>(base.cols());
  std::vector<char> exceed(count, 0);
  std::vector<char> degenerate(count, 0);
  const auto total = static_cast<long>(count);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (long r = 0; r < total; ++r) {
    rng::Stream stream(seed, rng::Purpose::resample, static_cast<std::uint64_t>(r));
    std::vector<std::size_t> order(n);
    if (scheme == Resampling::permutation) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t i = n - 1; i > 0; --i) {
        std::swap(order[i], order[static_cast<std::size_t>(stream.below(i + 1))]);
      }
    } else {
      for (auto& o : order) {
        o = static_cast<std::size_t>(stream.below(n));
      }
    }
    Eigen::MatrixXd x(base.rows(), base.cols());
    for (std::size_t j = 0; j < n; ++j) {
      x.col(static_cast<Eigen::Index>(j)) = base.col(static_cast<Eigen::Index>(order[j]));
    }
    const double value = stat(x, sizes, weight);
    const auto idx = static_cast<std::size_t>(r);
    if (std::isnan(value)) {
      degenerate[idx] = 1;
    } else {
      exceed[idx] = at_least(value, observed) ? 1 : 0;
    }
  }
  ResampleOutcome out;
  out.exceed = static_cast<std::size_t>(std::count(exceed.begin(), exceed.end(), char{1}));
  out.degenerate =
      static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), char{1}));
  return out;
}

TestReport resampled_report(const GroupedSample& sample, const char* name, double observed,
                            std::size_t count, std::uint64_t seed, Resampling scheme,
                            StatFn stat, const PValueOptions& options,
                            Exec exec) {
  if (count == 0) {
    throw InputError("number of resamples must be at least 1");
  }
  const Sizes sizes = sizes_of(sample);
  const double weight = sample.domain().weight();
  Eigen::MatrixXd base = sample.values();
  if (scheme == Resampling::residual_bootstrap) {
    base = residuals(base, sizes, group_means(base, sizes));
  }
  const ResampleOutcome outcome =
      resample(base, sizes, weight, observed, count, seed, scheme, stat, exec);
  TestReport report;
  report.test = name;
  report.statistic = observed;
  report.p_value = proportion(outcome.exceed, count, options);
  report.method =
      scheme == Resampling::permutation ? Calibration::permutation : Calibration::bootstrap;
  report.replicates = count;
  report.seed = seed;
  if (outcome.degenerate > 0) {
    report.diagnostics["degenerate_replicates"] = static_cast<double>(outcome.degenerate);
  }
  return report;
}

double chi_square_upper(double x, double df) {
  if (x <= 0.0) {
    return 1.0;
  }
  const boost::math::chi_squared_distribution<double> dist(df);
  return boost::math::cdf(boost::math::complement(dist, x));
}

std::string point_name(const GridDomain& domain, Eigen::Index t) {
  std::ostringstream out;
  out << "grid point " << t + 1 << " (t = " << domain.point(static_cast<std::size_t>(t)) << ")";
  return out.str();
}

}  // namespace

PointwiseF pointwise_f(const GroupedSample& sample) {
  require_more_than_groups(sample);
  Eigen::Index bad = -1;
  const Eigen::VectorXd f = pointwise_f_values(sample.values(), sizes_of(sample), bad);
  if (bad >= 0) {
    throw InputError("zero residual variance at " + point_name(sample.domain(), bad) +
                     "; pointwise F is undefined");
  }
  return {GridFunction(sample.domain(), std::vector<double>(f.data(), f.data() + f.size()))};
}

double cff_statistic(const GroupedSample& sample) {
  return cff_value(sample.values(), sizes_of(sample), sample.domain().weight());
}

double zc_statistic(const GroupedSample& sample) {
  return zc_value(sample.values(), sizes_of(sample), sample.domain().weight());
}

PooledTraces pooled_traces(const GroupedSample& sample) {
  require_more_than_groups(sample);
  const Sizes sizes = sizes_of(sample);
  const Eigen::MatrixXd coeffs = sample.coefficients();
  const Eigen::MatrixXd r = residuals(coeffs, sizes, group_means(coeffs, sizes));
  // Gamma = R R^T / (n - K) shares its nonzero spectrum with R^T R / (n - K).
  const Eigen::MatrixXd gram = r.transpose() * r;
  const double dof = static_cast<double>(sample.total() - sample.groups());
  PooledTraces out;
  out.trace = gram.trace() / dof;
  out.trace_squared = gram.squaredNorm() / (dof * dof);
  return out;
}

double f_type_statistic(const GroupedSample& sample) {
  require_more_than_groups(sample);
  const double value = f_type_value(sample.values(), sizes_of(sample), sample.domain().weight());
  if (std::isnan(value)) {
    throw InputError("F-type statistic undefined: zero within-group variation");
  }
  return value;
}

double gpf_statistic(const GroupedSample& sample) {
  const PointwiseF f = pointwise_f(sample);
  double sum = 0.0;
  for (double v : f.values.values()) {
    sum += v;
  }
  return sample.domain().weight() * sum;
}

double fmax_statistic(const GroupedSample& sample) {
  const PointwiseF f = pointwise_f(sample);
  const auto values = f.values.values();
  return *std::max_element(values.begin(), values.end());
}

TestReport cff_test(const GroupedSample& sample, std::size_t m_boot, std::uint64_t seed,
                    const PValueOptions& options, Exec exec) {
  for (std::size_t k = 0; k < sample.groups(); ++k) {
    if (sample.group_size(k) < 2) {
      throw InputError("CFF test needs at least 2 observations per group");
    }
  }
  return resampled_report(sample, "cff", cff_statistic(sample), m_boot, seed,
                          Resampling::residual_bootstrap, cff_value, options, exec);
}

TestReport zc_test(const GroupedSample& sample, BaselineMode mode, std::size_t resamples,
                   std::uint64_t seed, const PValueOptions& options, Exec exec) {
  require_more_than_groups(sample);
  const double observed = zc_statistic(sample);
  if (mode == BaselineMode::permutation) {
    return resampled_report(sample, "zc-perm", observed, resamples, seed,
                            Resampling::permutation, zc_value, options, exec);
  }
  const PooledTraces traces = pooled_traces(sample);
  if (!(traces.trace > 0.0) || !(traces.trace_squared > 0.0)) {
    throw InputError("ZC naive calibration undefined: zero pooled covariance");
  }
  const double groups = static_cast<double>(sample.groups());
  const double beta = traces.trace_squared / traces.trace;
  const double kappa = (groups - 1.0) * traces.trace * traces.trace / traces.trace_squared;
  TestReport report;
  report.test = "zc";
  report.statistic = observed;
  report.p_value = chi_square_upper(observed / beta, kappa);
  report.method = Calibration::naive;
  report.replicates = 0;
  report.seed = seed;
  report.diagnostics["beta"] = beta;
  report.diagnostics["kappa"] = kappa;
  return report;
}

TestReport f_type_test(const GroupedSample& sample, BaselineMode mode, std::size_t resamples,
                       std::uint64_t seed, const PValueOptions& options, Exec exec) {
  const double observed = f_type_statistic(sample);
  if (mode == BaselineMode::permutation) {
    return resampled_report(sample, "ftype-perm", observed, resamples, seed,
                            Resampling::permutation, f_type_value, options, exec);
  }
  const PooledTraces traces = pooled_traces(sample);
  const double kappa = traces.trace * traces.trace / traces.trace_squared;
  const double d1 = static_cast<double>(sample.groups() - 1) * kappa;
  const double d2 = static_cast<double>(sample.total() - sample.groups()) * kappa;
  TestReport report;
  report.test = "ftype";
  report.statistic = observed;
  if (observed <= 0.0) {
    report.p_value = 1.0;
  } else {
    const boost::math::fisher_f_distribution<double> dist(d1, d2);
    report.p_value = boost::math::cdf(boost::math::complement(dist, observed));
  }
  report.method = Calibration::naive;
  report.replicates = 0;
  report.seed = seed;
  report.diagnostics["kappa"] = kappa;
  return report;
}

TestReport gpf_test(const GroupedSample& sample, BaselineMode mode, std::size_t resamples,
                    std::uint64_t seed, const PValueOptions& options, Exec exec) {
  const double observed = gpf_statistic(sample);
  if (mode == BaselineMode::permutation) {
    return resampled_report(sample, "gpf-perm", observed, resamples, seed,
                            Resampling::permutation, gpf_value, options, exec);
  }
  // Pointwise correlation operator rho of the pooled within-group residuals:
  // tr(rho) = b - a and tr(rho^2) = h^2 sum_{s,t} rho(s,t)^2.
  const Sizes sizes = sizes_of(sample);
  const Eigen::MatrixXd& x = sample.values();
  Eigen::MatrixXd r = residuals(x, sizes, group_means(x, sizes));
  const Eigen::VectorXd norms = r.rowwise().norm();
  for (Eigen::Index t = 0; t < r.rows(); ++t) {
    r.row(t) /= norms(t);
  }
  const double h = sample.domain().weight();
  const double tr_rho = sample.domain().length();
  const double tr_rho2 = h * h * (r.transpose() * r).squaredNorm();
  const double groups = static_cast<double>(sample.groups());
  const double beta = tr_rho2 / tr_rho;
  const double d = (groups - 1.0) * tr_rho * tr_rho / tr_rho2;
  TestReport report;
  report.test = "gpf";
  report.statistic = observed;
  report.p_value = chi_square_upper((groups - 1.0) * observed / beta, d);
  report.method = Calibration::naive;
  report.replicates = 0;
  report.seed = seed;
  report.diagnostics["beta"] = beta;
  report.diagnostics["kappa"] = d;
  return report;
}

TestReport fmax_test(const GroupedSample& sample, std::size_t m_boot, std::uint64_t seed,
                     const PValueOptions& options, Exec exec) {
  const double observed = fmax_statistic(sample);
  return resampled_report(sample, "fmax", observed, m_boot, seed, Resampling::residual_bootstrap,
                          fmax_value, options, exec);
}

std::size_t components_for_fraction(const Eigen::VectorXd& descending, double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw InputError("variance fraction must lie in (0, 1]");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < descending.size(); ++i) {
    total += std::max(descending(i), 0.0);
  }
  if (!(total > 0.0)) {
    throw InputError("pooled covariance is zero; no principal components");
  }
  double running = 0.0;
  for (Eigen::Index i = 0; i < descending.size(); ++i) {
    running += std::max(descending(i), 0.0);
    if (running >= fraction * total) {
      return static_cast<std::size_t>(i + 1);
    }
  }
  return static_cast<std::size_t>(descending.size());
}

PcaScores pca_scores(const GroupedSample& sample, double variance_fraction) {
  const Sizes sizes = sizes_of(sample);
  const Eigen::MatrixXd coeffs = sample.coefficients();
  const Eigen::MatrixXd r = residuals(coeffs, sizes, group_means(coeffs, sizes));
  const Eigen::MatrixXd omega = r * r.transpose() / static_cast<double>(sample.total());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(omega);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition of the pooled covariance failed");
  }
  PcaScores out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.d = components_for_fraction(out.eigenvalues, variance_fraction);
  const auto d = static_cast<Eigen::Index>(out.d);
  const Eigen::MatrixXd basis = solver.eigenvectors().rowwise().reverse().leftCols(d);
  double total = 0.0;
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
    total += std::max(out.eigenvalues(i), 0.0);
  }
  out.explained_fraction = out.eigenvalues.head(d).cwiseMax(0.0).sum() / total;

  const Eigen::MatrixXd xi = basis.transpose() * coeffs;  // d x n
  out.scores.reserve(sample.total());
  for (Eigen::Index j = 0; j < xi.cols(); ++j) {
    out.scores.emplace_back(xi.col(j));
  }
  const Eigen::MatrixXd means = group_means(xi, sizes);
  const Eigen::MatrixXd centred = residuals(xi, sizes, means);
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    out.group_means.emplace_back(means.col(static_cast<Eigen::Index>(k)));
    const auto block = centred.middleCols(static_cast<Eigen::Index>(sample.offset(k)),
                                          static_cast<Eigen::Index>(sizes[k]));
    out.group_covariances.emplace_back(block * block.transpose() /
                                       static_cast<double>(sizes[k]));
  }
  return out;
}

namespace {

Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& psi, std::size_t k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (psi + psi.transpose()));
  const Eigen::VectorXd& values = solver.eigenvalues();
  if (solver.info() != Eigen::Success || !(values(0) > 1e-12 * values(values.size() - 1))) {
    throw InputError("HR test: score covariance of group " + std::to_string(k + 1) +
                     " is singular; use fewer components or another test");
  }
  return solver.eigenvectors() * values.cwiseInverse().asDiagonal() *
         solver.eigenvectors().transpose();
}

double hr_value(const GroupedSample& sample, const PcaScores& pca) {
  for (std::size_t k = 0; k < sample.groups(); ++k) {
    if (sample.group_size(k) <= pca.d) {
      throw InputError("HR test needs n_k > d in every group (group " + std::to_string(k + 1) +
                       " has " + std::to_string(sample.group_size(k)) + ", d = " +
                       std::to_string(pca.d) + "); use fewer components or another test");
    }
  }
  const auto d = static_cast<Eigen::Index>(pca.d);
  std::vector<Eigen::MatrixXd> inverses;
  Eigen::MatrixXd precision = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd weighted = Eigen::VectorXd::Zero(d);
  for (std::size_t k = 0; k < sample.groups(); ++k) {
    inverses.push_back(checked_inverse(pca.group_covariances[k], k));
    const double nk = static_cast<double>(sample.group_size(k));
    precision += nk * inverses.back();
    weighted += nk * inverses.back() * pca.group_means[k];
  }
  const Eigen::VectorXd centre = precision.ldlt().solve(weighted);
  double value = 0.0;
  for (std::size_t k = 0; k < sample.groups(); ++k) {
    const Eigen::VectorXd diff = pca.group_means[k] - centre;
    value += static_cast<double>(sample.group_size(k)) * diff.dot(inverses[k] * diff);
  }
  return value;
}

}  // namespace

double hr_statistic(const GroupedSample& sample, double variance_fraction) {
  return hr_value(sample, pca_scores(sample, variance_fraction));
}

TestReport hr_test(const GroupedSample& sample, double variance_fraction) {
  const PcaScores pca = pca_scores(sample, variance_fraction);
  const double value = hr_value(sample, pca);
  const double df = static_cast<double>((sample.groups() - 1) * pca.d);
  TestReport report;
  report.test = "hr";
  report.statistic = value;
  report.p_value = chi_square_upper(value, df);
  report.method = Calibration::asymptotic;
  report.replicates = 0;
  report.diagnostics["components"] = static_cast<double>(pca.d);
  report.diagnostics["explained_fraction"] = pca.explained_fraction;
  return report;
}

}  // namespace fdss
