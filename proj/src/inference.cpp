// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
#include "fdss/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include "fdss/covariance.hpp"
#include "fdss/error.hpp"
#include "fdss/rng.hpp"
#include "fdss/spatial_sign.hpp"

namespace fdss {
namespace {

std::vector<std::size_t> identity_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

void require_replicates(std::size_t r, const char* what) {
  if (r == 0) {
    throw InputError(std::string(what) + " must be at least 1");
  }
}

std::size_t count_true(const std::vector<char>& flags) {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), char{1}));
}

}  // namespace

std::string_view to_string(Calibration method) {
  switch (method) {
    case Calibration::asymptotic:
      return "asymptotic";
    case Calibration::bootstrap:
      return "bootstrap";
    case Calibration::permutation:
      return "permutation";
    case Calibration::exact:
      return "exact";
    case Calibration::naive:
      return "naive";
  }
  return "unknown";
}

Calibration parse_calibration(std::string_view name) {
  for (auto c : {Calibration::asymptotic, Calibration::bootstrap, Calibration::permutation,
                 Calibration::exact, Calibration::naive}) {
    if (to_string(c) == name) {
      return c;
    }
  }
  throw UsageError("unknown calibration method '" + std::string(name) + "'");
}

double proportion(std::size_t count, std::size_t replicates, const PValueOptions& options) {
  if (options.add_one) {
    return static_cast<double>(count + 1) / static_cast<double>(replicates + 1);
  }
  return static_cast<double>(count) / static_cast<double>(replicates);
}

Calibration recommended_calibration(std::span<const std::size_t> sizes) {
  const std::size_t smallest = *std::min_element(sizes.begin(), sizes.end());
  const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  return (smallest <= 5 && total <= 20) ? Calibration::permutation : Calibration::asymptotic;
}

namespace {

std::string advice_for(const GroupedSample& sample, Calibration used) {
  const Calibration preferred = recommended_calibration(sample.sizes());
  if (preferred == Calibration::permutation && used == Calibration::asymptotic) {
    return "small groups (min n_k <= 5, n <= 20): permutation calibration recommended";
  }
  return {};
}

}  // namespace

TestReport asymptotic_test(const GroupedSample& sample, std::size_t n_draws, std::uint64_t seed,
                           const PValueOptions& options, Exec exec) {
  require_replicates(n_draws, "number of Gaussian draws");
  const SignCache cache(sample, exec);
  const Eigen::MatrixXd gram = rank_gram(cache.rank_vectors(exec), exec);
  const auto order = identity_order(sample.total());
  const double observed = ss_from_rank_gram(gram, order, sample.sizes());

  const BlockOperator sigma = sigma_hat(sample, cache, exec);
  const NullSpectrum spectrum = null_spectrum(sigma, false);
  const std::vector<double> draws = sample_null_norms(spectrum, n_draws, seed, exec);
  std::size_t count = 0;
  for (double d : draws) {
    count += at_least(d, observed) ? 1 : 0;
  }

  TestReport report;
  report.test = "ss-asym";
  report.statistic = observed;
  report.p_value = proportion(count, n_draws, options);
  report.method = Calibration::asymptotic;
  report.replicates = n_draws;
  report.seed = seed;
  report.diagnostics["clipped_eigenvalues"] = static_cast<double>(spectrum.clipped);
  report.diagnostics["min_raw_eigenvalue"] = spectrum.min_raw_eigenvalue;
  report.diagnostics["sigma_trace"] = spectrum.eigenvalues.sum();
  report.advice = advice_for(sample, Calibration::asymptotic);
  return report;
}

TestReport bootstrap_test(const GroupedSample& sample, std::size_t m_b, std::uint64_t seed,
                          const PValueOptions& options, Exec exec) {
  require_replicates(m_b, "number of bootstrap samples");
  const std::size_t n = sample.total();
  const SignCache cache(sample, exec);
  const auto order = identity_order(n);
  const double observed =
      ss_from_rank_gram(rank_gram(cache.rank_vectors(exec), exec), order, sample.sizes());
  const std::vector<std::size_t> sizes(sample.sizes().begin(), sample.sizes().end());
  const auto m = static_cast<Eigen::Index>(sample.grid_size());

  std::vector<char> exceed(m_b, 0);
  const auto total = static_cast<long>(m_b);
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
  for (long r = 0; r < total; ++r) {
    rng::Stream stream(seed, rng::Purpose::resample, static_cast<std::uint64_t>(r));
    std::vector<std::size_t> drawn(n);
    std::vector<double> counts(n, 0.0);
    for (auto& d : drawn) {
      d = static_cast<std::size_t>(stream.below(n));
      counts[d] += 1.0;
    }
    // Ranks with respect to the resampled pooled sample depend only on the
    // drawn index; repeated draws have s(0) = 0 because S(a, a) = 0.
    const Eigen::MatrixXd ranks = cache.weighted_rank_vectors(counts, Exec::serial);
    double value = 0.0;
    std::size_t start = 0;
    for (const std::size_t nk : sizes) {
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(m);
      for (std::size_t a = start; a < start + nk; ++a) {
        sum += ranks.col(static_cast<Eigen::Index>(drawn[a]));
      }
      value += sum.squaredNorm() / static_cast<double>(nk);
      start += nk;
    }
    exceed[static_cast<std::size_t>(r)] = at_least(value, observed) ? 1 : 0;
  }

  TestReport report;
  report.test = "ss-boot";
  report.statistic = observed;
  report.p_value = proportion(count_true(exceed), m_b, options);
  report.method = Calibration::bootstrap;
  report.replicates = m_b;
  report.seed = seed;
  return report;
}

TestReport permutation_test(const GroupedSample& sample, std::size_t m_p, std::uint64_t seed,
                            const PValueOptions& options, Exec exec) {
  require_replicates(m_p, "number of permutations");
  const std::size_t n = sample.total();
  const SignCache cache(sample, exec);
  const Eigen::MatrixXd gram = rank_gram(cache.rank_vectors(exec), exec);
  const double observed = ss_from_rank_gram(gram, identity_order(n), sample.sizes());

  std::vector<char> exceed(m_p, 0);
  const auto total = static_cast<long>(m_p);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (long r = 0; r < total; ++r) {
    rng::Stream stream(seed, rng::Purpose::resample, static_cast<std::uint64_t>(r));
    std::vector<std::size_t> order = identity_order(n);
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(order[i], order[static_cast<std::size_t>(stream.below(i + 1))]);
    }
    exceed[static_cast<std::size_t>(r)] =
        at_least(ss_from_rank_gram(gram, order, sample.sizes()), observed) ? 1 : 0;
  }

  TestReport report;
  report.test = "ss-perm";
  report.statistic = observed;
  report.p_value = proportion(count_true(exceed), m_p, options);
  report.method = Calibration::permutation;
  report.replicates = m_p;
  report.seed = seed;
  return report;
}

double assignment_count(std::span<const std::size_t> sizes) {
  // lgamma keeps the guard finite for large n.
  double log_count = 0.0;
  std::size_t n = 0;
  for (auto s : sizes) {
    n += s;
    log_count -= std::lgamma(static_cast<double>(s) + 1.0);
  }
  log_count += std::lgamma(static_cast<double>(n) + 1.0);
  return std::round(std::exp(log_count));
}

TestReport exact_permutation_test(const GroupedSample& sample, double limit, Exec exec) {
  const double assignments = assignment_count(sample.sizes());
  if (assignments > limit) {
    char count[64];
    std::snprintf(count, sizeof count, "%.4g assignments, above the limit %.4g", assignments,
                  limit);
    throw InputError(std::string("exact enumeration needs ") + count +
                     "; use Monte-Carlo permutation calibration");
  }
  const std::size_t n = sample.total();
  const SignCache cache(sample, exec);
  const Eigen::MatrixXd gram = rank_gram(cache.rank_vectors(exec), exec);
  const double observed = ss_from_rank_gram(gram, identity_order(n), sample.sizes());

  // Every distinct arrangement of the label multiset is one assignment.
  std::vector<std::size_t> labels;
  for (std::size_t k = 0; k < sample.groups(); ++k) {
    labels.insert(labels.end(), sample.group_size(k), k);
  }
  std::vector<std::size_t> order(n);
  std::vector<std::size_t> cursor(sample.groups());
  std::size_t count = 0;
  std::size_t enumerated = 0;
  do {
    for (std::size_t k = 0; k < sample.groups(); ++k) {
      cursor[k] = sample.offset(k);
    }
    for (std::size_t j = 0; j < n; ++j) {
      order[cursor[labels[j]]++] = j;
    }
    count += at_least(ss_from_rank_gram(gram, order, sample.sizes()), observed) ? 1 : 0;
    ++enumerated;
  } while (std::next_permutation(labels.begin(), labels.end()));

  TestReport report;
  report.test = "ss-exact";
  report.statistic = observed;
  report.p_value = static_cast<double>(count) / static_cast<double>(enumerated);
  report.method = Calibration::exact;
  report.replicates = enumerated;
  report.seed = 0;
  return report;
}

}  // namespace fdss
