#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "dynid/errors.hpp"
#include "dynid/samples.hpp"
#include "dynid/simulator.hpp"
#include "dynid/model.hpp"

namespace dynid {
namespace {

SampleSet small_set(Scenario scenario = Scenario::kPayload) {
  const RobotModel m = ur10_reference_model();
  SimulationOptions o;
  o.noise_v = 0.05;
  o.seed = 3;
  FourierTrajectory t = random_trajectory(m.limits, 2);
  t.duration = 0.4;
  if (scenario == Scenario::kPayload) o.payload = franka_hand_payload().spec;
  return simulate(m, t, o);
}

std::string header(int n) {
  std::string h = "t";
  for (const char* p : {"q", "qd", "v"})
    for (int j = 1; j <= n; ++j) h += std::string(",") + p + std::to_string(j);
  return h + ",scenario";
}

TEST(Differentiate, ConstantRampAndSine) {
  EXPECT_EQ(differentiate(MatrixXd::Constant(10, 2, 3.0), 0.01), MatrixXd::Zero(10, 2));
  const VectorXd ramp = VectorXd::LinSpaced(11, 0.0, 5.0);  // slope 0.5 / 0.1
  const MatrixXd d = differentiate(ramp, 0.1);
  for (int k = 0; k < 11; ++k) EXPECT_NEAR(d(k, 0), 5.0, 1e-12);
  const double dt = 1e-3;
  VectorXd s(2000);
  for (int k = 0; k < 2000; ++k) s[k] = std::sin(k * dt);
  const MatrixXd ds = differentiate(s, dt);
  for (int k = 1; k < 2000; ++k) EXPECT_NEAR(ds(k, 0), std::cos(k * dt), dt);
  EXPECT_EQ(ds(0, 0), ds(1, 0));
}

TEST(Differentiate, RequiresUniformGrid) {
  VectorXd t = VectorXd::LinSpaced(5, 0.0, 0.4);
  EXPECT_NO_THROW(differentiate(MatrixXd::Zero(5, 1), t));
  t[3] += 1e-6;
  EXPECT_THROW(differentiate(MatrixXd::Zero(5, 1), t), Error);
  EXPECT_THROW(differentiate(MatrixXd::Zero(1, 1), 0.1), Error);
}

TEST(LinearRegion, MaskMatchesThreshold) {
  const SampleSet s = small_set();
  const auto mask = linear_region_mask(s, 0.17);
  for (int k = 0; k < s.size(); ++k)
    for (int j = 0; j < 6; ++j) EXPECT_EQ(mask(k, j), std::abs(s.qd(k, j)) > 0.17);
}

TEST(Csv, RoundTripIsBitwise) {
  const SampleSet s = small_set();
  const std::string text = format_samples(s);
  EXPECT_EQ(text.substr(0, text.find('\n')), header(6));
  const SampleSet r = parse_samples(text);
  EXPECT_EQ(r.t, s.t);
  EXPECT_EQ(r.q, s.q);
  EXPECT_EQ(r.qd, s.qd);
  EXPECT_EQ(r.v, s.v);
  EXPECT_EQ(r.qdd, differentiate(s.qd, s.t));
  EXPECT_EQ(r.scenario, Scenario::kPayload);
  EXPECT_EQ(format_samples(r), text);
}

TEST(Csv, FileRoundTripKeepsScenario) {
  const SampleSet s = small_set(Scenario::kNoPayload);
  const auto path = std::filesystem::temp_directory_path() / "dynid_samples_test.csv";
  write_samples(path.string(), s);
  const SampleSet r = read_samples(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(r.scenario, Scenario::kNoPayload);
  EXPECT_EQ(r.v, s.v);
}

TEST(Csv, SchemaErrorsAreDistinct) {
  const std::string good = format_samples(small_set());
  auto expect_schema = [](const std::string& text, const std::string& needle) {
    try {
      parse_samples(text);
      FAIL() << "no error for " << needle;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kSchema);
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  // Missing column named.
  std::string missing = good;
  missing.replace(missing.find(",v6"), 3, "");
  expect_schema(missing, "v6");
  // Ragged row.
  std::string ragged = good;
  const std::size_t line2 = ragged.find('\n') + 1;
  ragged.insert(ragged.find('\n', line2), ",7");
  expect_schema(ragged, "row");
  // NaN field.
  std::string nan = good;
  const std::size_t comma = nan.find(',', line2);
  nan.replace(line2, comma - line2, "nan");
  expect_schema(nan, "NaN");
  expect_schema("", "empty");
  expect_schema("time,q1\n0,1\n", "header");
}

TEST(Csv, BadScenarioTag) {
  EXPECT_THROW(parse_scenario("c"), Error);
  EXPECT_EQ(parse_scenario("a"), Scenario::kNoPayload);
  EXPECT_EQ(scenario_tag(Scenario::kPayload), 'b');
}

TEST(Doubles, RoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 0.0}) {
    EXPECT_EQ(parse_double(format_double(x), "x"), x);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_THROW(parse_double("1.2.3", "x"), Error);
}

TEST(Slice, KeepsRows) {
  const SampleSet s = small_set();
  const SampleSet part = slice(s, 10, 5);
  EXPECT_EQ(part.size(), 5);
  EXPECT_EQ(part.q.row(0), s.q.row(10));
  EXPECT_EQ(part.t[4], s.t[14]);
  EXPECT_THROW(slice(s, 48, 10), Error);
}

}  // namespace
}  // namespace dynid
