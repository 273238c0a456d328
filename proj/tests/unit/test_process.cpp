#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "fdss/error.hpp"
#include "fdss/process.hpp"

using namespace fdss;

namespace {

double ks_students_t(std::vector<double> x, double df) {
  const boost::math::students_t dist(df);
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = boost::math::cdf(dist, x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

const GridDomain kDomain(0.25, 0.75, 10);

}  // namespace

TEST_CASE("SBM has covariance min(s, t)") {
  const std::size_t n = 20000;
  const Eigen::MatrixXd paths = simulate_path_matrix({}, kDomain, n, 1);
  const Eigen::MatrixXd cov = paths * paths.transpose() / static_cast<double>(n);
  for (std::size_t i = 0; i < 10; i += 3) {
    for (std::size_t j = 0; j < 10; j += 4) {
      const double s = kDomain.point(i);
      const double t = kDomain.point(j);
      // sd of the sample second moment: sqrt((s t + min^2) / n).
      const double sd = std::sqrt((s * t + std::min(s, t) * std::min(s, t)) / n);
      CHECK(std::abs(cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                     std::min(s, t)) <= 4.0 * sd);
    }
  }
  CHECK(std::abs(paths.row(5).mean()) <= 4.0 * std::sqrt(kDomain.point(5) / n));
}

TEST_CASE("t process marginals are scaled Student t") {
  for (int df : {1, 3}) {
    const ProcessSpec spec{ProcessKind::t_process, df, std::nullopt};
    const Eigen::MatrixXd paths = simulate_path_matrix(spec, kDomain, 5000, 2);
    std::vector<double> x;
    for (Eigen::Index j = 0; j < paths.cols(); ++j) {
      x.push_back(paths(7, j) / std::sqrt(kDomain.point(7)));
    }
    CHECK(ks_students_t(x, df) < 1.95 / std::sqrt(5000.0));
  }
}

TEST_CASE("transformed kinds reuse the Gaussian path of the same seed") {
  const Eigen::MatrixXd sbm = simulate_path_matrix({}, kDomain, 50, 3);
  const Eigen::MatrixXd gbm = simulate_path_matrix({ProcessKind::gbm, 0, {}}, kDomain, 50, 3);
  const Eigen::MatrixXd sq = simulate_path_matrix({ProcessKind::squared_sbm, 0, {}}, kDomain, 50, 3);
  CHECK((gbm.array().log() - sbm.array()).abs().maxCoeff() <= 1e-12);
  CHECK((sq.array() - sbm.array().square()).abs().maxCoeff() == 0.0);
  const Eigen::MatrixXd t3 = simulate_path_matrix({ProcessKind::t_process, 3, {}}, kDomain, 50, 3);
  const Eigen::MatrixXd t3sq = simulate_path_matrix({ProcessKind::squared_t, 3, {}}, kDomain, 50, 3);
  CHECK((t3sq.array() - t3.array().square()).abs().maxCoeff() == 0.0);
  // One chi-square per path: the ratio to the Gaussian path is constant in t.
  const Eigen::ArrayXXd ratio = t3.array() / sbm.array();
  for (Eigen::Index j = 0; j < 50; ++j) {
    CHECK((ratio.col(j) - ratio(0, j)).abs().maxCoeff() <= 1e-12 * std::abs(ratio(0, j)));
  }
}

TEST_CASE("GBM mean is exp(t / 2)") {
  const std::size_t n = 40000;
  const Eigen::MatrixXd gbm = simulate_path_matrix({ProcessKind::gbm, 0, {}}, kDomain, n, 4);
  const double t = kDomain.point(9);
  const double var = std::exp(2.0 * t) - std::exp(t);
  CHECK(std::abs(gbm.row(9).mean() - std::exp(t / 2.0)) <= 4.0 * std::sqrt(var / n));
}

TEST_CASE("contamination scales a p-fraction of paths by s") {
  const ProcessSpec base{};
  ProcessSpec none = base;
  none.contamination = Contamination{0.0, 5.0};
  CHECK(simulate_path_matrix(none, kDomain, 30, 5) == simulate_path_matrix(base, kDomain, 30, 5));
  ProcessSpec all = base;
  all.contamination = Contamination{1.0, 5.0};
  CHECK((simulate_path_matrix(all, kDomain, 30, 5) - 5.0 * simulate_path_matrix(base, kDomain, 30, 5))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
  ProcessSpec mixed = base;
  mixed.contamination = Contamination{0.25, 5.0};
  const std::size_t n = 8000;
  const Eigen::MatrixXd a = simulate_path_matrix(mixed, kDomain, n, 6);
  const Eigen::MatrixXd b = simulate_path_matrix(base, kDomain, n, 6);
  std::size_t scaled = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double r = a(0, j) / b(0, j);
    REQUIRE((std::abs(r - 1.0) < 1e-9 || std::abs(r - 5.0) < 1e-9));
    scaled += std::abs(r - 5.0) < 1e-9;
  }
  CHECK(std::abs(static_cast<double>(scaled) / n - 0.25) <= 4.0 * std::sqrt(0.25 * 0.75 / n));
}

TEST_CASE("contaminated squared base squares before scaling") {
  ProcessSpec spec{ProcessKind::squared_sbm, 0, Contamination{1.0, 5.0}};
  const Eigen::MatrixXd a = simulate_path_matrix(spec, kDomain, 10, 7);
  const Eigen::MatrixXd b = simulate_path_matrix({}, kDomain, 10, 7);
  CHECK((a.array() - 5.0 * b.array().square()).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("paths are prefix-stable and thread-independent") {
  const ProcessSpec spec{ProcessKind::t_process, 1, Contamination{0.3, 4.0}};
  const Eigen::MatrixXd longer = simulate_path_matrix(spec, kDomain, 40, 8, Exec::parallel);
  const Eigen::MatrixXd shorter = simulate_path_matrix(spec, kDomain, 25, 8, Exec::serial);
  CHECK(longer.leftCols(25) == shorter);
}

TEST_CASE("process specs parse and print") {
  for (const char* text : {"sbm", "gbm", "t1", "t3", "sbm^2", "t3^2", "contaminated(sbm,0.25,5)",
                           "contaminated(t3^2,0.1,2.5)"}) {
    CHECK(to_string(parse_process_spec(text)) == text);
  }
  CHECK(parse_process_spec("t3").df == 3);
  CHECK(parse_process_spec("contaminated(gbm,0.5,3)").contamination->scale == 3.0);
  for (const char* bad : {"", "brownian", "t0", "t-1", "contaminated(sbm,1.5,5)",
                          "contaminated(sbm,0.2,0)", "contaminated(sbm,0.2)", "t3^3"}) {
    CHECK_THROWS_AS(parse_process_spec(bad), InputError);
  }
}

TEST_CASE("shift functions") {
  CHECK(eta2(0.25) == 0.0);
  CHECK(eta2(0.75) == 0.0);
  CHECK(eta2(0.5) == doctest::Approx(0.0625));
  const GridDomain d(0.25, 0.75, 100);
  const auto mu = shift_functions({1.0, 2.0}, d);
  CHECK(l2_norm(mu[0]) == 0.0);
  CHECK(mu[1][d.nearest_index(0.5)] == doctest::Approx(0.5).epsilon(0.01));
  double peak = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) peak = std::max(peak, mu[2][i]);
  CHECK(peak <= 0.125);
  CHECK(peak == doctest::Approx(0.125).epsilon(1e-3));
}

TEST_CASE("common random numbers across shifts") {
  const GridDomain d(0.25, 0.75, 20);
  const GroupedSample null = generate_grouped({}, d, ShiftSpec{0.0, 0.0}, {4, 5, 6}, 9);
  const GroupedSample alt = generate_grouped({}, d, ShiftSpec{0.0, 1.0}, {4, 5, 6}, 9);
  const Eigen::MatrixXd diff = alt.values() - null.values();
  CHECK(diff.leftCols(9).cwiseAbs().maxCoeff() == 0.0);
  for (Eigen::Index j = 9; j < 15; ++j) {
    for (std::size_t t = 0; t < d.size(); ++t) {
      CHECK(diff(static_cast<Eigen::Index>(t), j) == doctest::Approx(eta2(d.point(t))).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(generate_grouped({}, d, ShiftSpec{}, {4, 5}, 9), InputError);
}

TEST_CASE("SBM marginal variance over 1e5 paths") {
  const std::size_t n = 100000;
  const Eigen::MatrixXd paths = simulate_path_matrix({}, kDomain, n, 12);
  const std::size_t i = kDomain.nearest_index(0.6);
  const double t = kDomain.point(i);
  const Eigen::ArrayXd row = paths.row(static_cast<Eigen::Index>(i)).transpose().array();
  const double var = (row - row.mean()).square().sum() / (n - 1.0);
  // Gaussian: sd of the sample variance is t sqrt(2 / (n - 1)).
  CHECK(std::abs(var - t) <= 3.0 * t * std::sqrt(2.0 / (n - 1.0)));
}

TEST_CASE("t process with many degrees of freedom approaches SBM") {
  const std::size_t n = 10000;
  const Eigen::MatrixXd t200 =
      simulate_path_matrix({ProcessKind::t_process, 200, {}}, kDomain, n, 13);
  const Eigen::MatrixXd sbm = simulate_path_matrix({}, kDomain, n, 14);
  std::vector<double> x;
  std::vector<double> y;
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j) {
    x.push_back(t200(4, j));
    y.push_back(sbm(4, j));
  }
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  // Two-sample KS distance.
  double d = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n && j < n) {
    if (x[i] <= y[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) - static_cast<double>(j)) / n);
  }
  CHECK(d < 0.02);
}
