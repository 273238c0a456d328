#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/SVD>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

#include "fdss/baselines.hpp"
#include "fdss/error.hpp"
#include "fdss/registry.hpp"
#include "oracles.hpp"

using namespace fdss;

namespace {

std::vector<Eigen::VectorXd> group_means(const oracle::Data& d) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& g : d.groups) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g[0].size()));
    for (const auto& x : g) mean += Eigen::Map<const Eigen::VectorXd>(x.data(), mean.size());
    out.push_back(mean / static_cast<double>(g.size()));
  }
  return out;
}

double zc_oracle(const oracle::Data& d) {
  const auto means = group_means(d);
  Eigen::VectorXd grand = Eigen::VectorXd::Zero(means[0].size());
  for (std::size_t k = 0; k < means.size(); ++k) grand += d.groups[k].size() * means[k];
  grand /= static_cast<double>(oracle::total(d));
  double value = 0.0;
  for (std::size_t k = 0; k < means.size(); ++k) {
    value += d.groups[k].size() * d.h * (means[k] - grand).squaredNorm();
  }
  return value;
}

double cff_oracle(const oracle::Data& d) {
  const auto means = group_means(d);
  double value = 0.0;
  for (std::size_t k = 0; k < means.size(); ++k) {
    for (std::size_t l = k + 1; l < means.size(); ++l) {
      value += d.groups[k].size() * d.h * (means[k] - means[l]).squaredNorm();
    }
  }
  return value;
}

// Pooled within-group covariance in coefficients, denominator n - K.
Eigen::MatrixXd gamma_oracle(const oracle::Data& d) {
  const auto means = group_means(d);
  const auto m = means[0].size();
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t k = 0; k < means.size(); ++k) {
    for (const auto& x : d.groups[k]) {
      const Eigen::VectorXd r = std::sqrt(d.h) * (Eigen::Map<const Eigen::VectorXd>(x.data(), m) - means[k]);
      gamma += r * r.transpose();
    }
  }
  return gamma / static_cast<double>(oracle::total(d) - d.groups.size());
}

// HR in an SVD basis of the raw residual values.
double hr_oracle(const GroupedSample& s, std::size_t d) {
  const auto data = oracle::from_sample(s);
  const auto means = group_means(data);
  Eigen::MatrixXd r(s.grid_size(), s.total());
  for (std::size_t k = 0, j = 0; k < s.groups(); ++k) {
    for (const auto& x : data.groups[k]) {
      r.col(j++) = Eigen::Map<const Eigen::VectorXd>(x.data(), r.rows()) - means[k];
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeThinU);
  const Eigen::MatrixXd basis = svd.matrixU().leftCols(static_cast<Eigen::Index>(d));
  std::vector<Eigen::VectorXd> xbar;
  std::vector<Eigen::MatrixXd> psi_inv;
  Eigen::MatrixXd precision = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd weighted = Eigen::VectorXd::Zero(d);
  for (std::size_t k = 0; k < s.groups(); ++k) {
    const double nk = static_cast<double>(s.group_size(k));
    Eigen::VectorXd mean = basis.transpose() * means[k];
    Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(d, d);
    for (const auto& x : data.groups[k]) {
      const Eigen::VectorXd xi =
          basis.transpose() * Eigen::Map<const Eigen::VectorXd>(x.data(), r.rows()) - mean;
      psi += xi * xi.transpose() / nk;
    }
    psi_inv.push_back(psi.inverse());
    xbar.push_back(mean);
    precision += nk * psi_inv.back();
    weighted += nk * psi_inv.back() * mean;
  }
  const Eigen::VectorXd centre = precision.inverse() * weighted;
  double value = 0.0;
  for (std::size_t k = 0; k < s.groups(); ++k) {
    value += s.group_size(k) * (xbar[k] - centre).dot(psi_inv[k] * (xbar[k] - centre));
  }
  return value;
}

}  // namespace

TEST_CASE("pointwise F equals the scalar ANOVA at every grid point") {
  std::mt19937_64 gen(31);
  const auto s = oracle::random_sample(gen, {5, 7, 4}, 9);
  const auto d = oracle::from_sample(s);
  const PointwiseF f = pointwise_f(s);
  for (std::size_t t = 0; t < 9; ++t) {
    std::vector<oracle::Vec> scalar(3);
    for (std::size_t k = 0; k < 3; ++k) {
      for (const auto& x : d.groups[k]) scalar[k].push_back(x[t]);
    }
    CHECK(std::abs(f.values[t] - oracle::anova_f(scalar)) <= 1e-10 * std::max(1.0, f.values[t]));
  }
}

TEST_CASE("two-group pointwise F is the squared pooled t") {
  std::mt19937_64 gen(32);
  const auto s = oracle::random_sample(gen, {6, 9}, 5);
  const auto d = oracle::from_sample(s);
  const PointwiseF f = pointwise_f(s);
  for (std::size_t t = 0; t < 5; ++t) {
    oracle::Vec x, y;
    for (const auto& v : d.groups[0]) x.push_back(v[t]);
    for (const auto& v : d.groups[1]) y.push_back(v[t]);
    const double tt = oracle::pooled_t(x, y);
    CHECK(f.values[t] == doctest::Approx(tt * tt).epsilon(1e-10));
  }
}

TEST_CASE("between-group statistics match their definitions") {
  std::mt19937_64 gen(33);
  for (int rep = 0; rep < 10; ++rep) {
    const auto s = oracle::random_sample(gen, {4, 6, 5, 3}, 7, 0.25, 0.75);
    const auto d = oracle::from_sample(s);
    CHECK(zc_statistic(s) == doctest::Approx(zc_oracle(d)).epsilon(1e-12));
    CHECK(cff_statistic(s) == doctest::Approx(cff_oracle(d)).epsilon(1e-12));
    const Eigen::MatrixXd gamma = gamma_oracle(d);
    const PooledTraces tr = pooled_traces(s);
    CHECK(tr.trace == doctest::Approx(gamma.trace()).epsilon(1e-12));
    CHECK(tr.trace_squared == doctest::Approx((gamma * gamma).trace()).epsilon(1e-12));
    // F_n = (ZC / (K - 1)) / tr(Gamma).
    CHECK(f_type_statistic(s) == doctest::Approx(zc_oracle(d) / 3.0 / gamma.trace()).epsilon(1e-12));
  }
}

TEST_CASE("CFF is twice ZC for two equal groups") {
  std::mt19937_64 gen(34);
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = oracle::random_sample(gen, {6, 6}, 11);
    CHECK(std::abs(cff_statistic(s) - 2.0 * zc_statistic(s)) <= 1e-10);
  }
}

TEST_CASE("GPF never exceeds (b - a) times F-max") {
  std::mt19937_64 gen(35);
  for (std::size_t rep = 0; rep < 50; ++rep) {
    const auto s = oracle::random_sample(gen, {3u + rep % 4u, 4u, 5u}, 13, -1.0, 2.0);
    const double fmax = fmax_statistic(s);
    CHECK(gpf_statistic(s) <= 3.0 * fmax * (1.0 + 1e-14));
    const PointwiseF f = pointwise_f(s);
    double integral = 0.0;
    double sup = 0.0;
    for (std::size_t t = 0; t < 13; ++t) {
      integral += f.values[t] * s.domain().weight();
      sup = std::max(sup, f.values[t]);
    }
    CHECK(gpf_statistic(s) == doctest::Approx(integral).epsilon(1e-13));
    CHECK(fmax == sup);
  }
}

TEST_CASE("zero residual variance is located") {
  const GridDomain d(0.0, 1.0, 3);
  Eigen::MatrixXd v(3, 4);
  v << 1, 2, 3, 4,
       5, 5, 5, 5,
       0, 1, 0, 2;
  const GroupedSample s(d, v, {2, 2});
  try {
    pointwise_f(s);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("grid point 2") != std::string::npos);
  }
}

TEST_CASE("naive ZC and F-type p-values follow the two-cumulant match") {
  std::mt19937_64 gen(36);
  const auto s = oracle::random_sample(gen, {8, 9, 7}, 10);
  const Eigen::MatrixXd gamma = gamma_oracle(oracle::from_sample(s));
  const double tr = gamma.trace();
  const double tr2 = (gamma * gamma).trace();
  const double beta = tr2 / tr;
  const double kappa = 2.0 * tr * tr / tr2;
  const boost::math::chi_squared chi(kappa);
  const double zc = zc_statistic(s);
  CHECK(zc_test(s, BaselineMode::naive, 0, 1).p_value ==
        doctest::Approx(boost::math::cdf(boost::math::complement(chi, zc / beta))).epsilon(1e-10));
  const double k_hat = tr * tr / tr2;
  const boost::math::fisher_f f(2.0 * k_hat, 21.0 * k_hat);
  CHECK(f_type_test(s, BaselineMode::naive, 0, 1).p_value ==
        doctest::Approx(boost::math::cdf(boost::math::complement(f, f_type_statistic(s))))
            .epsilon(1e-10));
}

TEST_CASE("resampled baselines are deterministic and thread-independent") {
  std::mt19937_64 gen(37);
  const auto s = oracle::random_sample(gen, {6, 6, 6}, 8);
  CHECK(cff_test(s, 200, 4, {}, Exec::serial).p_value == cff_test(s, 200, 4, {}, Exec::parallel).p_value);
  CHECK(fmax_test(s, 200, 4, {}, Exec::serial).p_value == fmax_test(s, 200, 4, {}, Exec::parallel).p_value);
  CHECK(gpf_test(s, BaselineMode::permutation, 200, 4, {}, Exec::serial).p_value ==
        gpf_test(s, BaselineMode::permutation, 200, 4, {}, Exec::parallel).p_value);
  CHECK(zc_test(s, BaselineMode::permutation, 200, 4).method == Calibration::permutation);
  CHECK(cff_test(s, 200, 4).method == Calibration::bootstrap);
}

TEST_CASE("gpf switches to permutation calibration for small samples") {
  std::mt19937_64 gen(39);
  const CalibrationSettings settings;
  const auto small = oracle::random_sample(gen, {4, 4, 4}, 8);
  const auto large = oracle::random_sample(gen, {20, 20, 20}, 8);
  CHECK(run_test(TestId::gpf, small, settings, 3).method == Calibration::permutation);
  CHECK(run_test(TestId::gpf, small, settings, 3).p_value ==
        run_test(TestId::gpf_perm, small, settings, 3).p_value);
  CHECK(run_test(TestId::gpf, large, settings, 3).method == Calibration::naive);
  CHECK(run_test(TestId::gpf, large, settings, 3).p_value ==
        run_test(TestId::gpf_naive, large, settings, 3).p_value);
  CHECK(run_test(TestId::gpf_perm, large, settings, 3).method == Calibration::permutation);
}

TEST_CASE("HR picks the minimal number of components") {
  std::mt19937_64 gen(38);
  for (int rep = 0; rep < 10; ++rep) {
    const auto s = oracle::random_sample(gen, {15, 15, 15}, 6);
    const PcaScores pca = pca_scores(s, 0.9);
    const Eigen::VectorXd& ev = pca.eigenvalues;
    const double total = ev.cwiseMax(0.0).sum();
    CHECK(ev.head(static_cast<Eigen::Index>(pca.d)).sum() >= 0.9 * total);
    if (pca.d > 1) {
      CHECK(ev.head(static_cast<Eigen::Index>(pca.d - 1)).sum() < 0.9 * total);
    }
    CHECK(pca.explained_fraction >= 0.9);
  }
  Eigen::VectorXd ev(4);
  ev << 5, 3, 1.5, 0.5;
  CHECK(components_for_fraction(ev, 0.8) == 2);
  CHECK(components_for_fraction(ev, 0.85) == 3);
  CHECK(components_for_fraction(ev, 1.0) == 4);
}

TEST_CASE("HR statistic matches an SVD-basis transcription") {
  std::mt19937_64 gen(39);
  for (int rep = 0; rep < 10; ++rep) {
    const auto s = oracle::random_sample(gen, {12, 10, 14}, 5, 0.25, 0.75);
    const PcaScores pca = pca_scores(s, 0.9);
    CHECK(hr_statistic(s) == doctest::Approx(hr_oracle(s, pca.d)).epsilon(1e-8));
    const TestReport r = hr_test(s);
    const boost::math::chi_squared chi(2.0 * pca.d);
    CHECK(r.p_value ==
          doctest::Approx(boost::math::cdf(boost::math::complement(chi, r.statistic))).epsilon(1e-10));
  }
}

TEST_CASE("HR rejects groups no larger than d") {
  std::mt19937_64 gen(40);
  const auto s = oracle::random_sample(gen, {3, 30, 30}, 20);
  CHECK_THROWS_AS(hr_statistic(s, 0.99), InputError);
}
