#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "dynid/errors.hpp"
#include "dynid/metrics.hpp"
#include "dynid/random.hpp"

namespace dynid {
namespace {

VectorXd v(std::initializer_list<double> xs) {
  VectorXd out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

TEST(Mse, Examples) {
  Rng rng(1);
  VectorXd x(50);
  for (auto& e : x) e = rng.uniform(-3, 3);
  EXPECT_EQ(mse(x, x), 0.0);
  EXPECT_EQ(mse(v({0, 0}), v({1, 1})), 1.0);
  EXPECT_DOUBLE_EQ(mse(v({1, 2, 3}), v({2, 2, 1})), 5.0 / 3.0);
  EXPECT_THROW(mse(v({1}), v({1, 2})), Error);
}

TEST(Mse, SymmetricAndNonNegative) {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    VectorXd a(20), b(20);
    for (int i = 0; i < 20; ++i) {
      a[i] = rng.uniform(-1, 1);
      b[i] = rng.uniform(-1, 1);
    }
    EXPECT_GE(mse(a, b), 0.0);
    EXPECT_DOUBLE_EQ(mse(a, b), mse(b, a));
    EXPECT_NEAR(deviation_norm(a, b), std::sqrt(20 * mse(a, b)), 1e-14);
  }
}

TEST(DeviationNorm, ReferenceGainColumns) {
  const VectorXd gt = v({13.9557, 13.8669, 11.5049, 11.5438, 11.6143, 11.4149});
  const VectorXd c1 = v({14.87, 13.26, 11.13, 10.62, 11.03, 11.47});
  const VectorXd c2 = v({14.7336, 14.3300, 11.5476, 11.2487, 11.5000, 11.5000});
  const VectorXd c3 = v({13.5841, 14.2959, 11.3716, 11.2408, 11.7682, 11.7681});
  EXPECT_NEAR(deviation_norm(c1, gt), 1.5946, 5e-5);
  EXPECT_NEAR(deviation_norm(c2, gt), 0.9637, 5e-5);
  EXPECT_NEAR(deviation_norm(c3, gt), 0.7617, 5e-5);
}

TEST(Mnae, Examples) {
  const VectorXd x = VectorXd::LinSpaced(5, -1.0, 1.0);
  EXPECT_EQ(mnae(x, x), 0.0);
  EXPECT_EQ(mnae(x, (x.array() + 0.1).matrix()), 10.0);
  EXPECT_EQ(mnae(v({0, 1}), v({1, 2})), 200.0);
}

TEST(Mnae, OffsetCaseOnOtherGrids) {
  // fl(x + 0.1) - x is not exactly 0.1 for |x| >= 1, so other grids land on
  // 10 only to a few ulp.
  for (int n : {2, 3, 7, 100, 2501}) {
    const VectorXd x = VectorXd::LinSpaced(n, -1.0, 1.0);
    EXPECT_NEAR(mnae(x, (x.array() + 0.1).matrix()), 10.0, 1e-12) << n;
    EXPECT_NEAR(mnae(x, (x.array() - 0.1).matrix()), 10.0, 1e-12) << n;
  }
}

TEST(Mnae, ScaleInvarianceAndErrors) {
  Rng rng(3);
  VectorXd a(40), b(40);
  for (int i = 0; i < 40; ++i) {
    a[i] = rng.uniform(-2, 2);
    b[i] = rng.uniform(-2, 2);
  }
  for (double s : {0.01, 3.0, 1e4}) EXPECT_NEAR(mnae(s * a, s * b), mnae(a, b), 1e-12 * mnae(a, b));
  EXPECT_GE(mnae(a, b), 0.0);
  EXPECT_THROW(mnae(VectorXd::Ones(5), VectorXd::Zero(5)), Error);
  EXPECT_THROW(mnae(a, b.head(3)), Error);
}

TEST(ImprovementFactor, Ratio) {
  EXPECT_DOUBLE_EQ(improvement_factor(7.1533, 6.1591), 7.1533 / 6.1591);
  EXPECT_THROW(improvement_factor(1.0, 0.0), Error);
}

TEST(Report, PerfectPredictionIsAllZero) {
  Rng rng(4);
  MatrixXd meas(300, 3), qd(300, 3);
  for (int k = 0; k < 300; ++k)
    for (int j = 0; j < 3; ++j) {
      meas(k, j) = rng.uniform(-2, 2);
      qd(k, j) = rng.uniform(-1, 1);
    }
  const ValidationReport r = validation_report(meas, meas, qd, 0.17);
  ASSERT_EQ(r.joints.size(), 3u);
  for (const auto& j : r.joints) {
    EXPECT_EQ(j.mse, 0.0);
    EXPECT_EQ(j.mnae, 0.0);
    EXPECT_EQ(j.mnae_region, 0.0);
    EXPECT_FALSE(j.eta.has_value());
  }
  EXPECT_EQ(r.average.mnae, 0.0);
  const std::string csv = format_report(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "joint,mse,mnae,mnae_nonlinear_region");
  EXPECT_NE(csv.find("\navg,"), std::string::npos);
}

TEST(Report, RegionUsesLowVelocitySamples) {
  MatrixXd meas(4, 1), pred(4, 1), qd(4, 1);
  meas << 0, 1, 2, 4;
  pred << 0, 1, 3, 4;
  qd << 1.0, 1.0, 0.1, 0.05;
  const ValidationReport r = validation_report(meas, pred, qd, 0.17);
  EXPECT_DOUBLE_EQ(r.joints[0].mnae, 200.0 / 4 * 1 / 4);
  // Region: samples 3 and 4, range 2, one unit error.
  EXPECT_DOUBLE_EQ(r.joints[0].mnae_region, 200.0 / 2 * 1 / 2);
  qd << 1, 1, 1, 0.05;
  EXPECT_TRUE(std::isnan(validation_report(meas, pred, qd, 0.17).joints[0].mnae_region));
}

TEST(Report, EtaAgainstBaseline) {
  MatrixXd meas(3, 2), pred(3, 2), base(3, 2), qd = MatrixXd::Ones(3, 2);
  meas << 0, 0, 1, 2, 2, 4;
  pred = meas;
  pred(1, 0) += 0.1;
  pred(1, 1) += 0.1;
  base = meas;
  base(1, 0) += 0.3;
  base(1, 1) += 0.2;
  const ValidationReport r = validation_report(meas, pred, qd, 0.17, &base);
  EXPECT_NEAR(*r.joints[0].eta, 3.0, 1e-12);
  EXPECT_NEAR(*r.joints[1].eta, 2.0, 1e-12);
  ASSERT_TRUE(r.average.eta.has_value());
  EXPECT_GT(*r.average.eta, 0.0);
  const std::string csv = format_report(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "joint,mse,mnae,mnae_nonlinear_region,eta");
}

}  // namespace
}  // namespace dynid
