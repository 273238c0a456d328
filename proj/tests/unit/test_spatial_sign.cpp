#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fdss/spatial_sign.hpp"
#include "oracles.hpp"

using namespace fdss;

TEST_CASE("spatial sign has unit norm and s(0) = 0") {
  const GridDomain d(0.0, 2.0, 7);
  const auto x = GridFunction::sample(d, [](double t) { return t - 0.3; });
  CHECK(l2_norm(spatial_sign(x)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(l2_norm(spatial_sign(GridFunction::zero(d))) == 0.0);
  CHECK(l2_norm(spatial_sign(GridFunction::constant(d, 1e-14))) == 0.0);
}

TEST_CASE("two singleton groups give SS = 0.5") {
  std::mt19937_64 gen(1);
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = oracle::random_sample(gen, {1, 1}, 2 + rep % 5);
    CHECK(std::abs(ss_statistic(s).value - 0.5) <= 1e-12);
  }
}

TEST_CASE("weighted rank means sum to zero") {
  std::mt19937_64 gen(2);
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = oracle::random_sample(gen, {3, 5, 2, 4}, 8);
    const SsStatistic st = ss_statistic(s);
    for (std::size_t t = 0; t < s.grid_size(); ++t) {
      double acc = 0.0;
      for (std::size_t k = 0; k < s.groups(); ++k) {
        acc += static_cast<double>(s.group_size(k)) * st.rank_means[k][t];
      }
      CHECK(std::abs(acc) <= 1e-10);
    }
  }
}

TEST_CASE("constant functions reduce SS to the Kruskal-Wallis statistic") {
  // With X = c * 1 on [a, b], R(X_a) = (2 r_a - n - 1) / (n sqrt(b - a)) and
  // SS = 4 n^-2 sum_k n_k (rbar_k - (n + 1) / 2)^2 = KW (n + 1) / (3 n).
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal;
  const std::vector<std::size_t> sizes{4, 6, 5};
  const std::size_t n = 15;
  const GridDomain d(-1.0, 2.0, 5);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> c(n);
    for (auto& v : c) v = normal(gen);
    Eigen::MatrixXd values(5, static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) values.col(static_cast<Eigen::Index>(j)).setConstant(c[j]);
    const GroupedSample s(d, values, sizes);

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto x, auto y) { return c[x] < c[y]; });
    std::vector<double> rank(n);
    for (std::size_t r = 0; r < n; ++r) rank[idx[r]] = static_cast<double>(r + 1);
    double kw = 0.0;
    std::size_t start = 0;
    for (auto nk : sizes) {
      double mean = 0.0;
      for (std::size_t i = start; i < start + nk; ++i) mean += rank[i];
      mean /= static_cast<double>(nk);
      kw += static_cast<double>(nk) * (mean - (n + 1) / 2.0) * (mean - (n + 1) / 2.0);
      start += nk;
    }
    kw *= 12.0 / (n * (n + 1.0));
    CHECK(std::abs(ss_statistic(s).value - kw * (n + 1.0) / (3.0 * n)) <= 1e-12);
  }
}

TEST_CASE("SS equals the brute-force transcription for n <= 8, m <= 4") {
  std::mt19937_64 gen(4);
  const std::vector<std::vector<std::size_t>> designs{
      {1, 1}, {2, 2}, {3, 5}, {2, 3, 3}, {2, 2, 2, 2}, {1, 4, 3}, {4, 4}};
  for (const auto& sizes : designs) {
    for (std::size_t m : {2u, 3u, 4u}) {
      const auto s = oracle::random_sample(gen, sizes, m, 0.0, 1.5);
      CHECK(std::abs(ss_statistic(s).value - oracle::ss(oracle::from_sample(s))) <= 1e-12);
    }
  }
}

TEST_CASE("ties: repeated observations contribute zero signs") {
  const GridDomain d(0.0, 1.0, 3);
  Eigen::MatrixXd v(3, 4);
  v << 1, 1, 0, 2,
       0, 0, 1, 2,
       2, 2, 1, 0;
  const GroupedSample s(d, v, {2, 2});
  CHECK(std::abs(ss_statistic(s).value - oracle::ss(oracle::from_sample(s))) <= 1e-12);
}

TEST_CASE("SS is invariant under translation, scaling and orthogonal maps") {
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 10; ++rep) {
    const auto s = oracle::random_sample(gen, {4, 3, 5}, 12);
    const double base = ss_statistic(s).value;
    Eigen::VectorXd shift = Eigen::VectorXd::LinSpaced(12, -2.0, 5.0);
    const Eigen::MatrixXd translated = s.values().colwise() + shift;
    const Eigen::MatrixXd scaled = 37.5 * s.values();
    const Eigen::MatrixXd rotated = oracle::random_orthogonal(gen, 12) * s.values();
    for (const auto* v : {&translated, &scaled, &rotated}) {
      const GroupedSample t(s.domain(), *v, {4, 3, 5});
      CHECK(std::abs(ss_statistic(t).value - base) <= 1e-10);
    }
  }
}

TEST_CASE("serial and parallel kernels agree exactly") {
  std::mt19937_64 gen(6);
  const auto s = oracle::random_sample(gen, {7, 9, 6}, 30);
  const SignCache serial(s, Exec::serial);
  const SignCache parallel(s, Exec::parallel);
  const Eigen::MatrixXd r1 = serial.rank_vectors(Exec::serial);
  const Eigen::MatrixXd r2 = parallel.rank_vectors(Exec::parallel);
  CHECK((r1 - r2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((rank_gram(r1, Exec::serial) - rank_gram(r2, Exec::parallel)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(ss_statistic(s, Exec::serial).value == ss_statistic(s, Exec::parallel).value);
}

TEST_CASE("rank Gram shortcut matches the direct statistic under relabeling") {
  std::mt19937_64 gen(7);
  const auto s = oracle::random_sample(gen, {3, 4, 5}, 6);
  const SignCache cache(s);
  const Eigen::MatrixXd gram = rank_gram(cache.rank_vectors());
  std::vector<std::size_t> order(12);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), gen);
  const std::vector<std::size_t> sizes{3, 4, 5};
  const GroupedSample permuted = s.regroup(order, sizes);
  CHECK(ss_from_rank_gram(gram, order, sizes) ==
        doctest::Approx(ss_statistic(permuted).value).epsilon(1e-12));
}

TEST_CASE("weighted ranks with unit weights equal plain ranks") {
  std::mt19937_64 gen(8);
  const auto s = oracle::random_sample(gen, {3, 3}, 5);
  const SignCache cache(s);
  const std::vector<double> ones(6, 1.0);
  CHECK((cache.weighted_rank_vectors(ones) - cache.rank_vectors()).cwiseAbs().maxCoeff() <= 1e-15);
}
