#include "dynid/simulator.hpp"

#include "dynid/errors.hpp"
#include "dynid/random.hpp"

namespace dynid {

namespace {

void require_complete(const RobotModel& model) {
  if (static_cast<int>(model.links.size()) != model.dof()) {
    throw usage_error("simulation needs inertial parameters for every link");
  }
  if (static_cast<int>(model.friction.size()) != model.dof()) {
    throw usage_error("simulation needs friction parameters for every joint");
  }
  if (model.gains.size() != model.dof() || (model.gains.array() <= 0.0).any()) {
    throw usage_error("simulation needs positive motor gains for every joint");
  }
}

VectorXd friction_torque(const FrictionSet& f, FrictionLaw law, const VectorXd& qd) {
  if (law == FrictionLaw::kSigmoid) return friction_sigmoid(f, qd);
  VectorXd out(qd.size());
  for (Eigen::Index j = 0; j < qd.size(); ++j) {
    const JointFriction& p = f[static_cast<std::size_t>(j)];
    out[j] = p.offset + p.viscous * qd[j] + p.magnitude * sign_of(qd[j]);
  }
  return out;
}

}  // namespace

MatrixXd simulate_torques(const RobotModel& model, const SampleSet& set,
                          const SimulationOptions& options) {
  require_complete(model);
  if (set.dof() != model.dof()) throw schema_error("samples do not match the model's joint count");
  DynamicParameters params = model.dynamic_parameters();
  if (options.payload) params = apply_payload(params, payload_to_frame_n(*options.payload));
  MatrixXd tau(set.size(), model.dof());
  for (int k = 0; k < set.size(); ++k) {
    const JointState s = set.state(k);
    tau.row(k) = (rnea(model.chain, params, s) + friction_torque(model.friction, options.friction, s.qd))
                     .transpose();
  }
  return tau;
}

SampleSet simulate(const RobotModel& model, const SampleSet& kinematics,
                   const SimulationOptions& options) {
  require_complete(model);
  if (options.noise_v < 0.0 || options.noise_qd < 0.0) {
    throw usage_error("noise levels must be non-negative");
  }
  SampleSet out = kinematics;
  out.qdd = differentiate(kinematics.qd, kinematics.t);
  const MatrixXd tau = simulate_torques(model, out, options);
  out.v = tau.array().rowwise() / model.gains.transpose().array();

  // Separate streams so that one noise level does not shift the other's draws.
  Rng rng_v(options.seed);
  Rng rng_qd(options.seed ^ 0x5DEECE66DULL);
  if (options.noise_v > 0.0) {
    for (Eigen::Index k = 0; k < out.v.rows(); ++k) {
      for (Eigen::Index j = 0; j < out.v.cols(); ++j) out.v(k, j) += options.noise_v * rng_v.normal();
    }
  }
  if (options.noise_qd > 0.0) {
    for (Eigen::Index k = 0; k < out.qd.rows(); ++k) {
      for (Eigen::Index j = 0; j < out.qd.cols(); ++j) out.qd(k, j) += options.noise_qd * rng_qd.normal();
    }
    out.qdd = differentiate(out.qd, out.t);
  }
  out.scenario = options.payload ? Scenario::kPayload : Scenario::kNoPayload;
  out.source = SampleSource::kSimulated;
  return out;
}

SampleSet simulate(const RobotModel& model, const FourierTrajectory& traj,
                   const SimulationOptions& options) {
  return simulate(model, sample(traj).samples, options);
}

}  // namespace dynid
