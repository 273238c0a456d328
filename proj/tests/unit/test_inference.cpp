#include <doctest.h>

#include <cmath>
#include <random>

#include "fdss/error.hpp"
#include "fdss/inference.hpp"
#include "oracles.hpp"

using namespace fdss;

TEST_CASE("assignment counts") {
  const std::vector<std::size_t> a{2, 2, 2};
  CHECK(assignment_count(a) == 90.0);
  const std::vector<std::size_t> b{3, 3};
  CHECK(assignment_count(b) == 20.0);
  const std::vector<std::size_t> c{4, 4, 4};
  CHECK(assignment_count(c) == 34650.0);
}

TEST_CASE("p-value proportions") {
  CHECK(proportion(5, 100, {}) == 0.05);
  CHECK(proportion(5, 100, {true}) == doctest::Approx(6.0 / 101.0));
  CHECK(at_least(1.0 - 1e-12, 1.0));
  CHECK_FALSE(at_least(1.0 - 1e-8, 1.0));
}

TEST_CASE("exact and Monte-Carlo permutation p-values agree on n = 6") {
  std::mt19937_64 gen(21);
  for (int rep = 0; rep < 4; ++rep) {
    const auto s = oracle::random_sample(gen, {2, 2, 2}, 5);
    const TestReport exact = exact_permutation_test(s);
    const TestReport mc = permutation_test(s, 50000, 100 + rep);
    CHECK(exact.replicates == 90);
    CHECK(exact.p_value >= 1.0 / 90.0);
    CHECK(std::abs(exact.p_value - mc.p_value) <= 0.02);
    CHECK(exact.statistic == mc.statistic);
  }
}

TEST_CASE("exact enumeration refuses large designs") {
  std::mt19937_64 gen(22);
  const auto s = oracle::random_sample(gen, {10, 10, 10}, 3);
  CHECK_THROWS_AS(exact_permutation_test(s), InputError);
}

TEST_CASE("calibrations are deterministic and thread-independent") {
  std::mt19937_64 gen(23);
  const auto s = oracle::random_sample(gen, {6, 7, 5}, 12);
  const auto a1 = asymptotic_test(s, 400, 9, {}, Exec::serial);
  const auto a2 = asymptotic_test(s, 400, 9, {}, Exec::parallel);
  CHECK(a1.p_value == a2.p_value);
  const auto b1 = bootstrap_test(s, 200, 9, {}, Exec::serial);
  const auto b2 = bootstrap_test(s, 200, 9, {}, Exec::parallel);
  CHECK(b1.p_value == b2.p_value);
  const auto p1 = permutation_test(s, 300, 9, {}, Exec::serial);
  const auto p2 = permutation_test(s, 300, 9, {}, Exec::parallel);
  CHECK(p1.p_value == p2.p_value);
  CHECK(permutation_test(s, 300, 10).p_value != doctest::Approx(-1.0));
  CHECK(a1.method == Calibration::asymptotic);
  CHECK(b1.method == Calibration::bootstrap);
  CHECK(p1.method == Calibration::permutation);
  CHECK(a1.replicates == 400);
}

TEST_CASE("permutation p-values are invariant under transformations") {
  std::mt19937_64 gen(24);
  const auto s = oracle::random_sample(gen, {5, 4, 6}, 10);
  const double base = permutation_test(s, 500, 77).p_value;
  const double asym = asymptotic_test(s, 500, 77).p_value;
  const Eigen::MatrixXd q = oracle::random_orthogonal(gen, 10);
  const std::vector<Eigen::MatrixXd> variants{
      s.values().colwise() + Eigen::VectorXd::LinSpaced(10, 1.0, 3.0),
      0.01 * s.values(), q * s.values()};
  for (const auto& v : variants) {
    const GroupedSample t(s.domain(), v, {5, 4, 6});
    CHECK(permutation_test(t, 500, 77).p_value == base);
    CHECK(asymptotic_test(t, 500, 77).p_value == asym);
  }
}

TEST_CASE("a clear location shift is detected by every calibration") {
  std::mt19937_64 gen(25);
  auto s = oracle::random_sample(gen, {10, 10, 10}, 8);
  Eigen::MatrixXd v = s.values();
  v.rightCols(10).array() += 3.0;
  const GroupedSample shifted(s.domain(), v, {10, 10, 10});
  CHECK(asymptotic_test(shifted, 1000, 1).p_value <= 0.01);
  CHECK(bootstrap_test(shifted, 300, 1).p_value <= 0.01);
  CHECK(permutation_test(shifted, 300, 1).p_value <= 0.01);
}

TEST_CASE("asymptotic calibration needs two observations per group") {
  std::mt19937_64 gen(26);
  const auto s = oracle::random_sample(gen, {1, 4}, 3);
  CHECK_THROWS_AS(asymptotic_test(s, 100, 1), DegenerateEstimatorError);
  CHECK_NOTHROW(permutation_test(s, 100, 1));
}

TEST_CASE("small designs get permutation advice") {
  const std::vector<std::size_t> small{4, 4, 4};
  const std::vector<std::size_t> large{20, 20, 20};
  CHECK(recommended_calibration(small) == Calibration::permutation);
  CHECK(recommended_calibration(large) == Calibration::asymptotic);
  std::mt19937_64 gen(27);
  CHECK_FALSE(asymptotic_test(oracle::random_sample(gen, small, 4), 100, 1).advice.empty());
}

TEST_CASE("calibration names round-trip") {
  for (auto c : {Calibration::asymptotic, Calibration::bootstrap, Calibration::permutation,
                 Calibration::exact, Calibration::naive}) {
    CHECK(parse_calibration(to_string(c)) == c);
  }
}
