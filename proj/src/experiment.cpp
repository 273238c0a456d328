// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
#include "fdss/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>

#include "fdss/baselines.hpp"
#include "fdss/covariance.hpp"
#include "fdss/error.hpp"
#include "fdss/rng.hpp"
#include "fdss/spatial_sign.hpp"

namespace fdss {
namespace {

enum Outcome : char { accept = 0, reject = 1, failed = 2 };

double binomial_se(double rate, std::size_t count) {
  return count == 0 ? std::numeric_limits<double>::quiet_NaN() : std::sqrt(rate * (1.0 - rate) / static_cast<double>(count));
}

void finish(RateEstimate& estimate) {
  estimate.rate = estimate.valid == 0
                      ? std::numeric_limits<double>::quiet_NaN()
                      : static_cast<double>(estimate.rejections) / static_cast<double>(estimate.valid);
  estimate.standard_error = binomial_se(estimate.rate, estimate.valid);
}

std::vector<GridFunction> zero_shifts(const GridDomain& domain, std::size_t groups) {
  return std::vector<GridFunction>(groups, GridFunction::zero(domain));
}

// Runs every test on every (replication, point); outcomes[(r * P + p) * T + t].
struct Batch {
  std::vector<char> outcomes;
  std::vector<std::string> messages;  // first error message per test
};

template <class MakeSample, class SeedFor>
Batch run_batch(std::size_t replications, std::size_t points, const std::vector<TestId>& tests,
                const CalibrationSettings& calibration, double alpha, MakeSample make_sample,
                SeedFor seed_for, Exec exec) {
  const std::size_t t_count = tests.size();
  Batch batch;
  batch.outcomes.assign(replications * points * t_count, accept);
  std::vector<std::string> messages(replications * t_count);
  std::vector<std::exception_ptr> crashes(replications);
  const auto total = static_cast<long>(replications);
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
  for (long rl = 0; rl < total; ++rl) {
    const auto r = static_cast<std::size_t>(rl);
    try {
      for (std::size_t p = 0; p < points; ++p) {
        const GroupedSample sample = make_sample(r, p);
        for (std::size_t t = 0; t < t_count; ++t) {
          char& slot = batch.outcomes[(r * points + p) * t_count + t];
          try {
            const TestReport report =
                run_test(tests[t], sample, calibration, seed_for(r, tests[t]), Exec::serial);
            slot = report.p_value <= alpha ? reject : accept;
          } catch (const Error& e) {
            slot = failed;
            if (messages[r * t_count + t].empty()) {
              messages[r * t_count + t] = e.what();
            }
          }
        }
      }
    } catch (...) {
      crashes[r] = std::current_exception();
    }
  }
  for (const auto& crash : crashes) {
    if (crash) {
      std::rethrow_exception(crash);
    }
  }
  batch.messages.assign(t_count, {});
  for (std::size_t t = 0; t < t_count; ++t) {
    for (std::size_t r = 0; r < replications; ++r) {
      if (!messages[r * t_count + t].empty()) {
        batch.messages[t] = messages[r * t_count + t];
        break;
      }
    }
  }
  return batch;
}

RateEstimate tally(const Batch& batch, std::size_t replications, std::size_t points,
                   std::size_t t_count, std::size_t p, std::size_t t, std::string name) {
  RateEstimate estimate;
  estimate.test = std::move(name);
  for (std::size_t r = 0; r < replications; ++r) {
    const char o = batch.outcomes[(r * points + p) * t_count + t];
    if (o == failed) {
      ++estimate.errors;
    } else {
      ++estimate.valid;
      estimate.rejections += o == reject ? 1 : 0;
    }
  }
  if (estimate.errors > 0) {
    estimate.first_error = batch.messages[t];
  }
  finish(estimate);
  return estimate;
}

}  // namespace

void validate(const ExperimentConfig& config) {
  validate(config.process);
  if (config.replications < 1) {
    throw InputError("replications must be at least 1");
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw InputError("nominal level alpha must lie in (0, 1)");
  }
  if (config.sizes.size() < 2) {
    throw InputError("K >= 2 required");
  }
  for (auto s : config.sizes) {
    if (s == 0) {
      throw InputError("group sizes must be positive");
    }
  }
  if (config.tests.empty()) {
    throw InputError("no tests selected");
  }
}

std::uint64_t replication_seed(std::uint64_t master, std::size_t replication) {
  return rng::derive_seed(master, rng::Purpose::replication, replication);
}

std::uint64_t test_seed(std::uint64_t master, std::size_t replication, TestId test) {
  return rng::derive_seed(master, rng::Purpose::test_calibration, replication,
                          static_cast<std::uint64_t>(test));
}

namespace {

std::vector<GridFunction> config_shifts(const ExperimentConfig& config, double c2) {
  if (config.sizes.size() != 3) {
    if (config.c1 != 0.0 || c2 != 0.0) {
      throw InputError("the (c1, c2) shift design needs exactly 3 groups");
    }
    return zero_shifts(config.domain, config.sizes.size());
  }
  return shift_functions({config.c1, c2}, config.domain);
}

}  // namespace

GroupedSample replication_sample(const ExperimentConfig& config, std::size_t replication,
                                 double c2, Exec exec) {
  const auto shifts = config_shifts(config, c2);
  return generate_grouped(config.process, config.domain, shifts, config.sizes,
                          replication_seed(config.seed, replication), exec);
}

std::vector<RateEstimate> estimate_size(const ExperimentConfig& config, Exec exec) {
  validate(config);
  const auto shifts = zero_shifts(config.domain, config.sizes.size());
  const std::size_t n = std::accumulate(config.sizes.begin(), config.sizes.end(), std::size_t{0});
  auto make_sample = [&](std::size_t r, std::size_t) {
    const Eigen::MatrixXd noise = simulate_path_matrix(
        config.process, config.domain, n, replication_seed(config.seed, r), Exec::serial);
    return shifted_sample(config.domain, noise, shifts, config.sizes);
  };
  auto seed_for = [&](std::size_t r, TestId id) { return test_seed(config.seed, r, id); };
  const Batch batch = run_batch(config.replications, 1, config.tests, config.calibration,
                                config.alpha, make_sample, seed_for, exec);
  std::vector<RateEstimate> out;
  for (std::size_t t = 0; t < config.tests.size(); ++t) {
    out.push_back(tally(batch, config.replications, 1, config.tests.size(), 0, t,
                        std::string(selector(config.tests[t]))));
  }
  return out;
}

PowerCurve power_curve(const ExperimentConfig& config, Exec exec) {
  validate(config);
  if (config.c2.empty()) {
    throw InputError("power curve needs at least one c2 value");
  }
  const std::size_t points = config.c2.size();
  std::vector<std::vector<GridFunction>> shifts;
  for (double c2 : config.c2) {
    shifts.push_back(config_shifts(config, c2));
  }
  const std::size_t n = std::accumulate(config.sizes.begin(), config.sizes.end(), std::size_t{0});
  // One noise set per replication, reused for every c2; run_batch visits the
  // points of a replication in order on one thread.
  thread_local Eigen::MatrixXd noise;
  auto make_sample = [&](std::size_t r, std::size_t p) {
    if (p == 0) {
      noise = simulate_path_matrix(config.process, config.domain, n,
                                   replication_seed(config.seed, r), Exec::serial);
    }
    return shifted_sample(config.domain, noise, shifts[p], config.sizes);
  };
  auto seed_for = [&](std::size_t r, TestId id) { return test_seed(config.seed, r, id); };
  const Batch batch = run_batch(config.replications, points, config.tests, config.calibration,
                                config.alpha, make_sample, seed_for, exec);
  PowerCurve curve;
  curve.c2 = config.c2;
  for (std::size_t t = 0; t < config.tests.size(); ++t) {
    curve.tests.emplace_back(selector(config.tests[t]));
    std::vector<RateEstimate> row;
    for (std::size_t p = 0; p < points; ++p) {
      row.push_back(tally(batch, config.replications, points, config.tests.size(), p, t,
                          curve.tests.back()));
    }
    curve.rates.push_back(std::move(row));
  }
  return curve;
}

SubsampleResult subsample_study(const GroupedSample& data, const SubsampleConfig& config,
                                Exec exec) {
  if (config.replications < 1 || config.subgroup_size < 1) {
    throw InputError("subsample study needs replications >= 1 and subgroup size >= 1");
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw InputError("nominal level alpha must lie in (0, 1)");
  }
  const std::size_t groups = data.groups();
  const std::size_t s = config.subgroup_size;
  const auto m = static_cast<Eigen::Index>(data.grid_size());
  const std::vector<std::size_t> sub_sizes(groups, s);
  const std::size_t t_count = config.tests.size();
  SubsampleResult result;

  auto pick = [&](rng::Stream& stream, std::size_t group, std::size_t count) {
    std::vector<std::size_t> idx(data.group_size(group));
    std::iota(idx.begin(), idx.end(), data.offset(group));
    for (std::size_t i = 0; i < count; ++i) {
      std::swap(idx[i], idx[i + static_cast<std::size_t>(stream.below(idx.size() - i))]);
    }
    idx.resize(count);
    return idx;
  };
  auto build = [&](const std::vector<std::size_t>& columns) {
    Eigen::MatrixXd values(m, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
      values.col(static_cast<Eigen::Index>(j)) = data.values().col(static_cast<Eigen::Index>(columns[j]));
    }
    return GroupedSample(data.domain(), std::move(values), sub_sizes);
  };

  if (config.size_study) {
    std::vector<std::size_t> included;
    for (std::size_t g = 0; g < groups; ++g) {
      if (data.group_size(g) >= groups * s) {
        included.push_back(g);
        result.included_groups.push_back(data.labels()[g]);
      } else {
        result.omitted_groups.push_back(data.labels()[g]);
      }
    }
    if (included.empty()) {
      throw InputError("every group has fewer than K * subgroup_size = " +
                       std::to_string(groups * s) + " observations; size study impossible");
    }
    result.size.resize(t_count);
    result.size_by_group.assign(t_count, {});
    for (std::size_t t = 0; t < t_count; ++t) {
      result.size[t].test = selector(config.tests[t]);
    }
    for (const std::size_t g : included) {
      auto make_sample = [&](std::size_t r, std::size_t) {
        rng::Stream stream(config.seed, rng::Purpose::subsample, r, g + 1);
        return build(pick(stream, g, groups * s));
      };
      auto seed_for = [&](std::size_t r, TestId id) {
        return rng::derive_seed(test_seed(config.seed, r, id), rng::Purpose::subsample, g + 1);
      };
      const Batch batch = run_batch(config.replications, 1, config.tests, config.calibration,
                                    config.alpha, make_sample, seed_for, exec);
      for (std::size_t t = 0; t < t_count; ++t) {
        RateEstimate e = tally(batch, config.replications, 1, t_count, 0, t,
                               std::string(selector(config.tests[t])));
        RateEstimate& pooled = result.size[t];
        pooled.rejections += e.rejections;
        pooled.valid += e.valid;
        pooled.errors += e.errors;
        if (pooled.first_error.empty()) {
          pooled.first_error = e.first_error;
        }
        result.size_by_group[t].push_back(std::move(e));
      }
    }
    for (auto& e : result.size) {
      finish(e);
    }
  }

  if (config.power_study) {
    for (std::size_t g = 0; g < groups; ++g) {
      if (data.group_size(g) < s) {
        throw InputError("group '" + data.labels()[g] + "' has " +
                         std::to_string(data.group_size(g)) + " observations, fewer than the subgroup size " +
                         std::to_string(s));
      }
    }
    auto make_sample = [&](std::size_t r, std::size_t) {
      rng::Stream stream(config.seed, rng::Purpose::subsample, r, 0);
      std::vector<std::size_t> columns;
      for (std::size_t g = 0; g < groups; ++g) {
        const auto part = pick(stream, g, s);
        columns.insert(columns.end(), part.begin(), part.end());
      }
      return build(columns);
    };
    auto seed_for = [&](std::size_t r, TestId id) { return test_seed(config.seed, r, id); };
    const Batch batch = run_batch(config.replications, 1, config.tests, config.calibration,
                                  config.alpha, make_sample, seed_for, exec);
    for (std::size_t t = 0; t < t_count; ++t) {
      result.power.push_back(tally(batch, config.replications, 1, t_count, 0, t,
                                   std::string(selector(config.tests[t]))));
    }
  }
  return result;
}

void validate(const ShrinkingAlternative& alt) {
  validate(alt.base);
  if (alt.lambda.size() < 2) {
    throw InputError("K >= 2 required");
  }
  if (alt.delta.size() != alt.lambda.size()) {
    throw InputError("need one delta function per lambda weight");
  }
  double sum = 0.0;
  for (double l : alt.lambda) {
    if (!(l > 0.0 && l < 1.0)) {
      throw InputError("lambda weights must lie in (0, 1)");
    }
    sum += l;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InputError("lambda weights must sum to 1");
  }
  for (const auto& d : alt.delta) {
    require_same_domain(d.domain(), alt.domain);
  }
}

ShrinkingAlternative figure_alternative(const ProcessSpec& base, const GridDomain& domain,
                                        double c1, double c2) {
  ShrinkingAlternative alt;
  alt.lambda = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  alt.delta = shift_functions({c1, c2}, domain);
  alt.base = base;
  alt.domain = domain;
  return alt;
}

namespace {

Eigen::VectorXd coefficient_vector(const GridFunction& f) {
  const auto c = to_coefficients(f);
  return Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
}

// Blocks of fixed size keep floating sums independent of the thread count.
constexpr std::size_t kBlock = 500;

double empirical_quantile(std::vector<double> draws, double level) {
  std::sort(draws.begin(), draws.end());
  const auto index = static_cast<std::size_t>(
      std::ceil(level * static_cast<double>(draws.size())));
  return draws[std::min(draws.size() - 1, index == 0 ? 0 : index - 1)];
}

AsymptoticPower power_from_draws(const std::vector<double>& null_draws,
                                 const std::vector<double>& alt_draws, double alpha) {
  const double q = empirical_quantile(null_draws, 1.0 - alpha);
  const auto hits = std::count_if(alt_draws.begin(), alt_draws.end(),
                                  [&](double v) { return v >= q; });
  AsymptoticPower out;
  out.power = static_cast<double>(hits) / static_cast<double>(alt_draws.size());
  out.standard_error = binomial_se(out.power, alt_draws.size());
  return out;
}

}  // namespace

AsymptoticPower asymptotic_power_ss(const ShrinkingAlternative& alt, double alpha,
                                    const AsymptoticPowerSettings& settings, std::uint64_t seed,
                                    Exec exec) {
  validate(alt);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InputError("nominal level alpha must lie in (0, 1)");
  }
  if (settings.derivative_pairs < 2 || settings.outer < 2 || settings.inner < 1 ||
      settings.gaussian_draws < 1) {
    throw InputError("Monte-Carlo sizes too small");
  }
  const std::size_t groups = alt.lambda.size();
  const auto m = static_cast<Eigen::Index>(alt.domain.size());
  const double root_h = std::sqrt(alt.domain.weight());

  // E[s'(X - X')] = E[(I - e e^T) / ||x||], e = x / ||x||, x = X - X'.
  const std::size_t pairs = settings.derivative_pairs;
  const std::size_t blocks = (pairs + kBlock - 1) / kBlock;
  std::vector<Eigen::MatrixXd> outer_sums(blocks);
  std::vector<double> inverse_sums(blocks, 0.0);
  std::vector<std::size_t> degenerate(blocks, 0);
  const std::uint64_t pair_seed = rng::derive_seed(seed, rng::Purpose::power_mc, 0);
  const auto block_count = static_cast<long>(blocks);
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
  for (long b = 0; b < block_count; ++b) {
    const std::size_t first = static_cast<std::size_t>(b) * kBlock;
    const std::size_t count = std::min(kBlock, pairs - first);
    const Eigen::MatrixXd x = simulate_path_matrix(
        alt.base, alt.domain, 2 * count, rng::derive_seed(pair_seed, rng::Purpose::power_mc, static_cast<std::uint64_t>(b)),
        Exec::serial);
    Eigen::MatrixXd scaled(m, static_cast<Eigen::Index>(count));
    double inv = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const Eigen::VectorXd diff =
          root_h * (x.col(static_cast<Eigen::Index>(2 * i)) - x.col(static_cast<Eigen::Index>(2 * i + 1)));
      const double norm = diff.norm();
      if (norm <= kZeroNormTolerance) {
        scaled.col(static_cast<Eigen::Index>(i)).setZero();
        ++degenerate[static_cast<std::size_t>(b)];
        continue;
      }
      inv += 1.0 / norm;
      // e e^T / ||x|| = (x / ||x||^{3/2}) (x / ||x||^{3/2})^T
      scaled.col(static_cast<Eigen::Index>(i)) = diff / std::pow(norm, 1.5);
    }
    outer_sums[static_cast<std::size_t>(b)] = scaled * scaled.transpose();
    inverse_sums[static_cast<std::size_t>(b)] = inv;
  }
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(m, m);
  double inv_total = 0.0;
  double inv_first = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    outer += outer_sums[b];
    inv_total += inverse_sums[b];
    if (b < blocks / 2) {
      inv_first += inverse_sums[b];
    }
  }
  const double used = static_cast<double>(pairs);
  const Eigen::MatrixXd derivative =
      (inv_total / used) * Eigen::MatrixXd::Identity(m, m) - outer / used;

  AsymptoticPower result;
  if (blocks >= 2) {
    const double first_pairs = static_cast<double>((blocks / 2) * kBlock);
    const double mean_first = inv_first / first_pairs;
    const double mean_second = (inv_total - inv_first) / (used - first_pairs);
    const double spread = std::abs(mean_first - mean_second) / std::max(mean_first, mean_second);
    if (spread > 0.1) {
      result.unstable = true;
      result.note = "E||X - X'||^{-1} estimate unstable (half-sample means " +
                    std::to_string(mean_first) + " and " + std::to_string(mean_second) + ")";
    }
  }

  Eigen::VectorXd delta_bar = Eigen::VectorXd::Zero(m);
  for (std::size_t k = 0; k < groups; ++k) {
    delta_bar += alt.lambda[k] * coefficient_vector(alt.delta[k]);
  }
  Eigen::VectorXd u0(m * static_cast<Eigen::Index>(groups));
  for (std::size_t k = 0; k < groups; ++k) {
    u0.segment(static_cast<Eigen::Index>(k) * m, m) =
        derivative * (std::sqrt(alt.lambda[k]) * (coefficient_vector(alt.delta[k]) - delta_bar));
  }

  // Under the null every C(i, j, k) is Cov(g(X)) with g(z) = E[s(X - z)].
  const std::uint64_t outer_seed = rng::derive_seed(seed, rng::Purpose::power_mc, 1);
  const Eigen::MatrixXd z =
      simulate_path_matrix(alt.base, alt.domain, settings.outer, outer_seed, exec);
  Eigen::MatrixXd g(m, static_cast<Eigen::Index>(settings.outer));
  const auto outer_count = static_cast<long>(settings.outer);
#pragma omp parallel for schedule(dynamic, 4) if (exec == Exec::parallel)
  for (long b = 0; b < outer_count; ++b) {
    const Eigen::MatrixXd inner = simulate_path_matrix(
        alt.base, alt.domain, settings.inner,
        rng::derive_seed(seed, rng::Purpose::power_mc, 2, static_cast<std::uint64_t>(b)),
        Exec::serial);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(m);
    for (Eigen::Index l = 0; l < inner.cols(); ++l) {
      const Eigen::VectorXd diff = inner.col(l) - z.col(b);
      const double norm = root_h * diff.norm();
      if (norm > kZeroNormTolerance) {
        sum += (root_h / norm) * diff;
      }
    }
    g.col(b) = sum / static_cast<double>(settings.inner);
  }
  const Eigen::VectorXd g_mean = g.rowwise().mean();
  const Eigen::MatrixXd centred = g.colwise() - g_mean;
  const Eigen::MatrixXd c0 =
      centred * centred.transpose() / static_cast<double>(settings.outer - 1);
  const CrossCovariance c = [&](std::size_t, std::size_t, std::size_t) { return c0; };
  const BlockOperator sigma =
      assemble_sigma(alt.lambda, static_cast<std::size_t>(m), c, exec);
  const NullSpectrum spectrum = null_spectrum(sigma, true);
  const Eigen::VectorXd proj = spectrum.eigenvectors.transpose() * u0;
  const double residual = std::max(0.0, u0.squaredNorm() - proj.squaredNorm());

  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < spectrum.eigenvalues.size(); ++i) {
    if (spectrum.eigenvalues(i) > 0.0) {
      active.push_back(i);
    }
  }
  const std::size_t draws = settings.gaussian_draws;
  std::vector<double> null_draws(draws);
  std::vector<double> alt_draws(draws);
  const auto draw_count = static_cast<long>(draws);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (long d = 0; d < draw_count; ++d) {
    rng::Stream null_stream(seed, rng::Purpose::power_mc, 3, static_cast<std::uint64_t>(d));
    rng::Stream alt_stream(seed, rng::Purpose::power_mc, 4, static_cast<std::uint64_t>(d));
    double null_sum = 0.0;
    double alt_sum = residual;
    for (const Eigen::Index i : active) {
      const double root = std::sqrt(spectrum.eigenvalues(i));
      const double z0 = null_stream.normal();
      null_sum += root * root * z0 * z0;
      const double shifted = proj(i) + root * alt_stream.normal();
      alt_sum += shifted * shifted;
    }
    for (Eigen::Index i = 0; i < proj.size(); ++i) {
      if (!(spectrum.eigenvalues(i) > 0.0)) {
        alt_sum += proj(i) * proj(i);
      }
    }
    null_draws[static_cast<std::size_t>(d)] = null_sum;
    alt_draws[static_cast<std::size_t>(d)] = alt_sum;
  }
  AsymptoticPower power = power_from_draws(null_draws, alt_draws, alpha);
  power.unstable = result.unstable;
  power.note = result.note;
  const std::size_t zero_pairs = std::accumulate(degenerate.begin(), degenerate.end(), std::size_t{0});
  if (zero_pairs > 0) {
    power.note += (power.note.empty() ? "" : "; ") + std::to_string(zero_pairs) +
                  " coincident pairs skipped";
  }
  return power;
}

std::string_view to_string(AsymptoticBaseline test) {
  switch (test) {
    case AsymptoticBaseline::cff:
      return "cff";
    case AsymptoticBaseline::zc:
      return "zc";
    case AsymptoticBaseline::hr:
      return "hr";
  }
  return "unknown";
}

AsymptoticBaseline parse_asymptotic_baseline(std::string_view name) {
  for (auto t : {AsymptoticBaseline::cff, AsymptoticBaseline::zc, AsymptoticBaseline::hr}) {
    if (to_string(t) == name) {
      return t;
    }
  }
  throw UsageError("unknown asymptotic baseline '" + std::string(name) +
                   "'; valid: cff, zc, hr");
}

AsymptoticPower asymptotic_power_baseline(AsymptoticBaseline test,
                                          const ShrinkingAlternative& alt, double alpha,
                                          const AsymptoticPowerSettings& settings,
                                          std::uint64_t seed, double variance_fraction,
                                          Exec exec) {
  validate(alt);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InputError("nominal level alpha must lie in (0, 1)");
  }
  const ProcessKind kind = alt.base.kind;
  if ((kind == ProcessKind::t_process && alt.base.df <= 2) ||
      (kind == ProcessKind::squared_t && alt.base.df <= 4)) {
    throw InputError("asymptotic power of the mean-based tests needs E||X||^2 < infinity; " +
                     to_string(alt.base) + " has no finite second moment");
  }
  if (settings.covariance_paths < 2 || settings.gaussian_draws < 1) {
    throw InputError("Monte-Carlo sizes too small");
  }
  const std::size_t groups = alt.lambda.size();
  const auto m = static_cast<Eigen::Index>(alt.domain.size());

  const Eigen::MatrixXd paths =
      std::sqrt(alt.domain.weight()) *
      simulate_path_matrix(alt.base, alt.domain, settings.covariance_paths,
                           rng::derive_seed(seed, rng::Purpose::power_mc, 5), exec);
  const Eigen::MatrixXd centred = paths.colwise() - paths.rowwise().mean();
  const Eigen::MatrixXd gamma =
      centred * centred.transpose() / static_cast<double>(settings.covariance_paths - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gamma);
  if (solver.info() != Eigen::Success || !(gamma.trace() > 0.0)) {
    throw NumericalError("estimating the covariance operator of the base process failed");
  }
  const Eigen::VectorXd eigenvalues = solver.eigenvalues().reverse().cwiseMax(0.0);
  const Eigen::MatrixXd basis = solver.eigenvectors().rowwise().reverse();
  std::vector<Eigen::VectorXd> a(groups);
  for (std::size_t k = 0; k < groups; ++k) {
    a[k] = basis.transpose() * coefficient_vector(alt.delta[k]);
  }
  const std::vector<double>& lambda = alt.lambda;

  if (test == AsymptoticBaseline::hr) {
    const std::size_t d = components_for_fraction(eigenvalues, variance_fraction);
    const auto dd = static_cast<Eigen::Index>(d);
    const auto kd = static_cast<Eigen::Index>(groups * d);
    // P0 is common to all groups, so Psi_k = diag(gamma_1..gamma_d) for every k.
    const Eigen::VectorXd psi = eigenvalues.head(dd);
    if (!(psi.minCoeff() > 0.0)) {
      throw NumericalError("score covariance of the base process is singular");
    }
    const Eigen::MatrixXd psi_inv_root = psi.cwiseSqrt().cwiseInverse().asDiagonal();
    Eigen::MatrixXd stacked(kd, dd);
    Eigen::MatrixXd precision = Eigen::MatrixXd::Zero(dd, dd);
    Eigen::VectorXd v(kd);
    for (std::size_t k = 0; k < groups; ++k) {
      const auto row = static_cast<Eigen::Index>(k) * dd;
      stacked.block(row, 0, dd, dd) = std::sqrt(lambda[k]) * psi_inv_root;
      precision += lambda[k] * psi.cwiseInverse().asDiagonal().toDenseMatrix();
      v.segment(row, dd) = std::sqrt(lambda[k]) * (psi_inv_root * a[k].head(dd));
    }
    const Eigen::MatrixXd projector =
        Eigen::MatrixXd::Identity(kd, kd) -
        stacked * precision.inverse() * stacked.transpose();
    const double noncentrality = std::max(0.0, v.dot(projector * v));
    const double df = static_cast<double>((groups - 1) * d);
    const boost::math::chi_squared_distribution<double> central(df);
    const double q = boost::math::quantile(central, 1.0 - alpha);
    AsymptoticPower out;
    if (noncentrality > 0.0) {
      const boost::math::non_central_chi_squared_distribution<double> shifted(df, noncentrality);
      out.power = boost::math::cdf(boost::math::complement(shifted, q));
    } else {
      out.power = boost::math::cdf(boost::math::complement(central, q));
    }
    out.note = "d = " + std::to_string(d) + ", noncentrality " + std::to_string(noncentrality);
    return out;
  }

  const Eigen::VectorXd root_gamma = eigenvalues.cwiseSqrt();
  auto statistic = [&](const std::vector<Eigen::VectorXd>& z) {
    // z[k] = sqrt(lambda_k) delta_k + Y_k in the eigenbasis of Gamma.
    double value = 0.0;
    if (test == AsymptoticBaseline::cff) {
      for (std::size_t k = 0; k < groups; ++k) {
        for (std::size_t l = k + 1; l < groups; ++l) {
          value += (z[k] - std::sqrt(lambda[k] / lambda[l]) * z[l]).squaredNorm();
        }
      }
    } else {
      Eigen::VectorXd pooled = Eigen::VectorXd::Zero(m);
      for (std::size_t k = 0; k < groups; ++k) {
        value += z[k].squaredNorm();
        pooled += std::sqrt(lambda[k]) * z[k];
      }
      value -= pooled.squaredNorm();
    }
    return value;
  };
  const std::size_t draws = settings.gaussian_draws;
  std::vector<double> null_draws(draws);
  std::vector<double> alt_draws(draws);
  const auto draw_count = static_cast<long>(draws);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (long dl = 0; dl < draw_count; ++dl) {
    const auto d = static_cast<std::uint64_t>(dl);
    rng::Stream null_stream(seed, rng::Purpose::power_mc, 6, d);
    rng::Stream alt_stream(seed, rng::Purpose::power_mc, 7, d);
    std::vector<Eigen::VectorXd> y0(groups, Eigen::VectorXd(m));
    std::vector<Eigen::VectorXd> y1(groups, Eigen::VectorXd(m));
    for (std::size_t k = 0; k < groups; ++k) {
      for (Eigen::Index i = 0; i < m; ++i) {
        y0[k](i) = root_gamma(i) * null_stream.normal();
        y1[k](i) = root_gamma(i) * alt_stream.normal();
      }
      y1[k] += std::sqrt(lambda[k]) * a[k];
    }
    null_draws[static_cast<std::size_t>(dl)] = statistic(y0);
    alt_draws[static_cast<std::size_t>(dl)] = statistic(y1);
  }
  return power_from_draws(null_draws, alt_draws, alpha);
}

}  // namespace fdss
