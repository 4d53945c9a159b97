#include <gtest/gtest.h>

#include <cmath>

#include "dynid/errors.hpp"
#include "dynid/estimation.hpp"
#include "dynid/simulator.hpp"
#include "dynid/solver.hpp"
#include "oracles.hpp"

namespace dynid {
namespace {

const RobotModel& truth() {
  static const RobotModel m = ur10_reference_model();
  return m;
}

FourierTrajectory traj(std::uint64_t seed = 5) { return random_trajectory(truth().limits, seed); }

TEST(Simulate, NoiselessIsModelConsistent) {
  const BaseParameterMap map = compute_base_map(truth().chain);
  const RobotModel exact = exact_identified_model(truth(), map);
  const SampleSet s = simulate(truth(), traj());
  EXPECT_EQ(s.scenario, Scenario::kNoPayload);
  EXPECT_EQ(s.source, SampleSource::kSimulated);
  EXPECT_EQ(s.size(), 2500);
  EXPECT_EQ(s.qdd, differentiate(s.qd, s.t));
  double worst = 0.0;
  for (int k = 0; k < s.size(); ++k) {
    const VectorXd v = predict_currents_full(map, truth().chain, *exact.chi, *exact.friction_current, s.state(k));
    worst = std::max(worst, (v - s.v.row(k).transpose()).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Simulate, CurrentNoiseHasRequestedSpread) {
  SimulationOptions noisy;
  noisy.noise_v = 0.05;
  noisy.seed = 17;
  const SampleSet clean = simulate(truth(), traj());
  const SampleSet s = simulate(truth(), traj(), noisy);
  EXPECT_EQ(s.qd, clean.qd);
  const Eigen::ArrayXXd diff = (s.v - clean.v).array();
  const double mean = diff.mean();
  const double sd = std::sqrt((diff - mean).square().sum() / static_cast<double>(diff.size() - 1));
  EXPECT_LT(std::abs(sd / 0.05 - 1.0), 0.1);
  EXPECT_LT(std::abs(mean), 0.005);
}

TEST(Simulate, VelocityNoiseFeedsAcceleration) {
  SimulationOptions o;
  o.noise_qd = 0.01;
  o.seed = 3;
  const SampleSet clean = simulate(truth(), traj());
  const SampleSet s = simulate(truth(), traj(), o);
  EXPECT_NE(s.qd, clean.qd);
  EXPECT_EQ(s.q, clean.q);
  EXPECT_EQ(s.v, clean.v);  // torque uses the clean states
  EXPECT_EQ(s.qdd, differentiate(s.qd, s.t));
}

TEST(Simulate, DeterministicPerSeed) {
  SimulationOptions o;
  o.noise_v = 0.05;
  o.noise_qd = 0.002;
  o.seed = 9;
  const SampleSet a = simulate(truth(), traj(), o), b = simulate(truth(), traj(), o);
  EXPECT_EQ(a.v, b.v);
  EXPECT_EQ(a.qd, b.qd);
  o.seed = 10;
  EXPECT_NE(simulate(truth(), traj(), o).v, a.v);
}

TEST(Simulate, StaticWeightlessFrictionlessArmDrawsNoCurrent) {
  RobotModel m = truth();
  m.chain.gravity.setZero();
  for (auto& f : m.friction) f = JointFriction{};
  FourierTrajectory still = traj();
  still.a.setZero();
  still.b.setZero();
  EXPECT_EQ(simulate(m, still).v, MatrixXd::Zero(2500, 6));
}

TEST(Simulate, PayloadMakesScenarioB) {
  SimulationOptions o;
  o.payload = franka_hand_payload().spec;
  const SampleSet s = simulate(truth(), traj(), o);
  EXPECT_EQ(s.scenario, Scenario::kPayload);
  const SampleSet a = simulate(truth(), traj());
  const Vector10d pl = payload_to_frame_n(*o.payload);
  for (int k = 0; k < s.size(); k += 50) {
    const JointState st = s.state(k);
    const VectorXd extra = last_link_regressor(truth().chain, st) * pl;
    EXPECT_LT((s.v.row(k) - a.v.row(k) - extra.cwiseQuotient(truth().gains).transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Simulate, LinearFrictionLaw) {
  SimulationOptions o;
  o.friction = FrictionLaw::kLinear;
  const SampleSet s = simulate(truth(), traj(), o);
  const MatrixXd tau = simulate_torques(truth(), s, o);
  for (int k = 0; k < s.size(); k += 25) {
    const JointState st = s.state(k);
    VectorXd f(6);
    for (int j = 0; j < 6; ++j) {
      const JointFriction& fr = truth().friction[static_cast<std::size_t>(j)];
      f[j] = fr.offset + fr.viscous * st.qd[j] + fr.magnitude * sign_of(st.qd[j]);
    }
    const VectorXd expected = rnea(truth().chain, truth().links, st) + f;
    EXPECT_LT((tau.row(k).transpose() - expected).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((s.v.row(k).transpose() - expected.cwiseQuotient(truth().gains)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Simulate, RequiresPhysicalModel) {
  const RobotModel shell = exact_identified_model(truth(), compute_base_map(truth().chain));
  try {
    simulate(shell, traj());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUsage);
  }
  RobotModel no_gains = truth();
  no_gains.gains.resize(0);
  EXPECT_THROW(simulate(no_gains, traj()), Error);
}

}  // namespace
}  // namespace dynid
