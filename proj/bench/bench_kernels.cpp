// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
//
// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "fdss/covariance.hpp"
#include "fdss/inference.hpp"
#include "fdss/process.hpp"
#include "fdss/spatial_sign.hpp"

namespace {

using fdss::Exec;

fdss::GroupedSample make_sample(std::size_t nk) {
  const fdss::GridDomain domain(0.25, 0.75, 100);
  return fdss::generate_grouped({}, domain, fdss::ShiftSpec{}, {nk, nk, nk}, 1);
}

Exec exec_of(const benchmark::State& state) {
  return state.range(1) == 0 ? Exec::serial : Exec::parallel;
}

void BM_SignCache(benchmark::State& state) {
  const auto sample = make_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    fdss::SignCache cache(sample, exec_of(state));
    benchmark::DoNotOptimize(cache.sign(0, 1).data());
  }
}

void BM_RankGram(benchmark::State& state) {
  const auto sample = make_sample(static_cast<std::size_t>(state.range(0)));
  const fdss::SignCache cache(sample);
  const Eigen::MatrixXd ranks = cache.rank_vectors();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fdss::rank_gram(ranks, exec_of(state)).data());
  }
}

void BM_SigmaHat(benchmark::State& state) {
  const auto sample = make_sample(static_cast<std::size_t>(state.range(0)));
  const fdss::SignCache cache(sample);
  for (auto _ : state) {
    const auto sigma = fdss::sigma_hat(sample, cache, exec_of(state));
    benchmark::DoNotOptimize(sigma.block(0, 0).data());
  }
}

void BM_NullDraws(benchmark::State& state) {
  const auto sample = make_sample(static_cast<std::size_t>(state.range(0)));
  const auto spectrum = fdss::null_spectrum(fdss::sigma_hat(sample), false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fdss::sample_null_norms(spectrum, 1000, 7, exec_of(state)).data());
  }
}

void BM_PermutationTest(benchmark::State& state) {
  const auto sample = make_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fdss::permutation_test(sample, 500, 3, {}, exec_of(state)).p_value);
  }
}

void BM_AsymptoticTest(benchmark::State& state) {
  const auto sample = make_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fdss::asymptotic_test(sample, 1000, 3, {}, exec_of(state)).p_value);
  }
}

// Arguments: {group size, 0 = serial / 1 = parallel}.
void sizes(benchmark::internal::Benchmark* b) {
  for (int nk : {10, 20, 40}) {
    b->Args({nk, 0});
    b->Args({nk, 1});
  }
  b->Unit(benchmark::kMillisecond);
}

BENCHMARK(BM_SignCache)->Apply(sizes);
BENCHMARK(BM_RankGram)->Apply(sizes);
BENCHMARK(BM_SigmaHat)->Apply(sizes);
BENCHMARK(BM_NullDraws)->Apply(sizes);
BENCHMARK(BM_PermutationTest)->Apply(sizes);
BENCHMARK(BM_AsymptoticTest)->Apply(sizes);

}  // namespace

BENCHMARK_MAIN();
