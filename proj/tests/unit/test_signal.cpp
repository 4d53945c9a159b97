#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dynid/errors.hpp"
#include "dynid/random.hpp"
#include "dynid/signal.hpp"

namespace dynid {
namespace {

constexpr double kRate = 125.0;
constexpr double kCut = 10.0;

VectorXd tone(double hz, int n, double phase = 0.3) {
  VectorXd x(n);
  for (int k = 0; k < n; ++k) x[k] = std::sin(2 * std::numbers::pi * hz * k / kRate + phase);
  return x;
}

double rms(const VectorXd& x) { return std::sqrt(x.squaredNorm() / static_cast<double>(x.size())); }

TEST(Butterworth, UnitDcGainAndHalfPowerAtCutoff) {
  const Biquad f = butterworth_lowpass(kCut, kRate);
  EXPECT_EQ(f.a[0], 1.0);
  EXPECT_NEAR((f.b[0] + f.b[1] + f.b[2]) / (1 + f.a[1] + f.a[2]), 1.0, 1e-14);
  // |H| at the cutoff is 1/sqrt(2) thanks to prewarping.
  const double w = 2 * std::numbers::pi * kCut / kRate;
  const std::complex<double> z = std::polar(1.0, -w);
  const std::complex<double> h = (f.b[0] + f.b[1] * z + f.b[2] * z * z) / (1.0 + f.a[1] * z + f.a[2] * z * z);
  EXPECT_NEAR(std::abs(h), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_THROW(butterworth_lowpass(62.5, kRate), Error);
  EXPECT_THROW(butterworth_lowpass(0.0, kRate), Error);
}

TEST(Lowpass, DcUnchanged) {
  const MatrixXd dc = MatrixXd::Constant(500, 3, 2.75);
  EXPECT_LT((lowpass(dc, kCut, kRate) - dc).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Lowpass, ToneAboveCutoffAttenuated) {
  const VectorXd x = tone(4 * kCut, 2500);
  const VectorXd y = lowpass(x, kCut, kRate);
  // Zero-phase filtering squares the magnitude response; judge away from the edges.
  EXPECT_LE(rms(y.segment(200, 2100)), 0.05 * rms(x.segment(200, 2100)));
}

TEST(Lowpass, PassbandPreservedAndZeroPhase) {
  const VectorXd x = tone(kCut / 10, 2500);
  const VectorXd y = lowpass(x, kCut, kRate);
  EXPECT_LT(std::abs(rms(y.segment(200, 2100)) / rms(x.segment(200, 2100)) - 1.0), 0.01);
  EXPECT_LT((y - x).segment(200, 2100).cwiseAbs().maxCoeff(), 0.01);
}

TEST(Lowpass, WhiteNoiseVarianceReduced) {
  Rng rng(1);
  VectorXd x(5000);
  for (int k = 0; k < x.size(); ++k) x[k] = rng.normal();
  const VectorXd y = lowpass(x, kCut, kRate);
  EXPECT_LT(y.squaredNorm(), 0.5 * x.squaredNorm());
}

TEST(Lowpass, ChannelsIndependentAndDeterministic) {
  MatrixXd m(800, 2);
  m.col(0) = tone(3.0, 800);
  m.col(1) = tone(20.0, 800, 1.0);
  const MatrixXd y = lowpass(m, kCut, kRate);
  EXPECT_EQ(y.col(0), lowpass(MatrixXd(m.col(0)), kCut, kRate).col(0));
  EXPECT_EQ(y, lowpass(m, kCut, kRate));
}

TEST(Lowpass, ShortSeriesRejected) {
  EXPECT_THROW(lowpass(MatrixXd::Constant(9, 1, 1.0), kCut, kRate), Error);
  EXPECT_NO_THROW(lowpass(MatrixXd::Constant(10, 1, 1.0), kCut, kRate));
}

}  // namespace
}  // namespace dynid
