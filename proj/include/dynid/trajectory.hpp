#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dynid/reduction.hpp"
#include "dynid/samples.hpp"

namespace dynid {

/// Symmetric joint limits |q| <= position, |qd| <= velocity, |qdd| <= acceleration.
struct JointLimits {
  VectorXd position;      // rad
  VectorXd velocity;      // rad/s
  VectorXd acceleration;  // rad/s^2

  int dof() const { return static_cast<int>(position.size()); }
};

JointLimits ur10_limits();

/// q(t) = q0 + sum_k a_k sin(k w t) + b_k cos(k w t), w = 2 pi / T_f.
struct FourierTrajectory {
  VectorXd q0;
  MatrixXd a, b;  // n x N_h
  double period = 20.0;         // T_f, s
  double duration = 20.0;       // s
  double sample_period = 0.008;  // s

  int dof() const { return static_cast<int>(q0.size()); }
  int harmonics() const { return static_cast<int>(a.cols()); }
};

/// Throws unless N_h >= 1, shapes agree and T_f is an integer multiple of
/// the sample period.
void validate(const FourierTrajectory& traj);

JointState evaluate(const FourierTrajectory& traj, double t);

struct TrajectorySampling {
  SampleSet samples;  // v is zero; qdd is the analytic acceleration
  bool truncated = false;  // duration was not a multiple of the sample period
};

/// floor(duration / sample_period) samples at t = k * sample_period.
TrajectorySampling sample(const FourierTrajectory& traj);

struct TrajectoryOptions {
  int harmonics = 5;
  double period = 20.0;
  double rate_hz = 125.0;
  double duration = 20.0;
  /// Fraction of each limit the trajectory may use.
  double limit_fraction = 0.6;
  /// Joint-range half-width, rad; the generator keeps |q - q0| below this.
  double position_span = 2.5;
};

/// Random coefficients from a seeded generator, scaled so that position,
/// velocity and acceleration stay within limit_fraction of the limits.
FourierTrajectory random_trajectory(const JointLimits& limits, std::uint64_t seed,
                                    const TrajectoryOptions& options = {});

/// Built-in held-out trajectories "A" and "B" (fixed seeds).
FourierTrajectory named_trajectory(const std::string& name, const JointLimits& limits);

struct LimitViolation {
  int joint = 0;  // 1-based
  std::string quantity;  // position | velocity | acceleration
  double peak = 0.0;
  double limit = 0.0;
};

struct ExcitationScore {
  double condition = 0.0;  // infinite when rank deficient
  bool rank_deficient = false;
  bool feasible = true;
  std::vector<LimitViolation> violations;
};

/// Condition number of the stacked minimal regressor over the sampled
/// trajectory plus a limit check. Infeasible trajectories are reported only.
ExcitationScore excitation_score(const BaseParameterMap& map, const KinematicChain& chain,
                                 const FourierTrajectory& traj, const JointLimits& limits);

}  // namespace dynid
