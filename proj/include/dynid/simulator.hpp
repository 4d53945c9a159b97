#pragma once

#include <cstdint>
#include <optional>

#include "dynid/model.hpp"
#include "dynid/samples.hpp"
#include "dynid/trajectory.hpp"

namespace dynid {

enum class FrictionLaw { kSigmoid, kLinear };

struct SimulationOptions {
  /// kLinear evaluates f_o + f_v qd + f_c sgn(qd) from the same friction rows.
  FrictionLaw friction = FrictionLaw::kSigmoid;
  std::optional<PayloadSpec> payload;  // attached payload makes the set scenario b
  double noise_v = 0.0;   // A
  double noise_qd = 0.0;  // rad/s
  std::uint64_t seed = 0;
};

/// Motor currents for the given kinematic samples (t, q, qd). The torque uses
/// the backward-Euler acceleration of the clean qd, i.e. exactly what the
/// identification pipeline derives on read. Noise is added to qd and v
/// afterwards and qdd is recomputed from the noisy qd.
SampleSet simulate(const RobotModel& model, const SampleSet& kinematics,
                   const SimulationOptions& options = {});
SampleSet simulate(const RobotModel& model, const FourierTrajectory& traj,
                   const SimulationOptions& options = {});

/// Torque-level model output (rigid body + friction, payload included) for
/// every sample of `set`, using its qdd as given.
MatrixXd simulate_torques(const RobotModel& model, const SampleSet& set,
                          const SimulationOptions& options = {});

}  // namespace dynid
