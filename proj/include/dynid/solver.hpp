#pragma once

#include <memory>
#include <optional>

#include "dynid/model.hpp"

namespace dynid {

/// Torque-level inverse dynamics split into the terms of
/// tau = M(q) qdd + C(q, qd) qd + f(qd) + g(q). When a payload is configured
/// it is part of every rigid-body term, so the split stays exact for the
/// combined system.
class InverseDynamicsSolver {
 public:
  virtual ~InverseDynamicsSolver() = default;

  virtual int dof() const = 0;
  virtual VectorXd torque(const JointState& state) const = 0;
  virtual MatrixXd inertia(const VectorXd& q) const = 0;
  virtual VectorXd coriolis_times_qd(const VectorXd& q, const VectorXd& qd) const = 0;
  virtual VectorXd friction(const VectorXd& qd) const = 0;
  virtual VectorXd gravity(const VectorXd& q) const = 0;

  virtual bool has_payload() const = 0;
  /// Returns a new solver; this one is left untouched.
  virtual std::unique_ptr<InverseDynamicsSolver> configure_payload(const PayloadSpec& spec) const = 0;
  virtual std::unique_ptr<InverseDynamicsSolver> clear_payload() const = 0;
};

/// Everything the solver needs from the three identification stages.
struct IdentifiedModel {
  KinematicChain chain;
  BaseParameterMap map;
  VectorXd chi;          // per-joint current-level layout
  FrictionSet psi;       // current level
  VectorXd gains;        // K
  std::optional<Vector10d> payload;  // pi_L in frame n

  static IdentifiedModel from(const RobotModel& model);
};

void validate(const IdentifiedModel& model);

/// tau = K (U_f chi_f + v_Psi) + Y_n pi_L.
class IdentifiedSolver final : public InverseDynamicsSolver {
 public:
  explicit IdentifiedSolver(IdentifiedModel model);

  int dof() const override { return model_.chain.dof(); }
  VectorXd torque(const JointState& state) const override;
  MatrixXd inertia(const VectorXd& q) const override;
  VectorXd coriolis_times_qd(const VectorXd& q, const VectorXd& qd) const override;
  VectorXd friction(const VectorXd& qd) const override;
  VectorXd gravity(const VectorXd& q) const override;

  bool has_payload() const override { return model_.payload.has_value(); }
  std::unique_ptr<InverseDynamicsSolver> configure_payload(const PayloadSpec& spec) const override;
  std::unique_ptr<InverseDynamicsSolver> clear_payload() const override;

  /// Rigid-body part of the arm (no friction, no payload) at a state,
  /// evaluated on the given chain.
  VectorXd arm_rigid(const KinematicChain& chain, const JointState& state) const;
  VectorXd payload_torque(const KinematicChain& chain, const JointState& state) const;
  const IdentifiedModel& model() const { return model_; }

 private:
  IdentifiedModel model_;
  KinematicChain no_gravity_;
};

/// Physical-parameter solver (RNEA on link parameters plus sigmoid friction
/// at torque level). Serves as the comparison point for identified models.
class ReferenceSolver final : public InverseDynamicsSolver {
 public:
  explicit ReferenceSolver(const RobotModel& model);

  int dof() const override { return chain_.dof(); }
  VectorXd torque(const JointState& state) const override;
  MatrixXd inertia(const VectorXd& q) const override;
  VectorXd coriolis_times_qd(const VectorXd& q, const VectorXd& qd) const override;
  VectorXd friction(const VectorXd& qd) const override;
  VectorXd gravity(const VectorXd& q) const override;

  bool has_payload() const override { return payload_.has_value(); }
  std::unique_ptr<InverseDynamicsSolver> configure_payload(const PayloadSpec& spec) const override;
  std::unique_ptr<InverseDynamicsSolver> clear_payload() const override;

 private:
  KinematicChain chain_;
  DynamicParameters arm_;
  DynamicParameters params_;  // arm plus payload
  FrictionSet friction_;
  std::optional<Vector10d> payload_;
};

/// IdentifiedSolver for a model that finished all stages, otherwise a
/// ReferenceSolver when physical parameters are present.
std::unique_ptr<InverseDynamicsSolver> make_solver(const RobotModel& model);

/// Identification results that a perfect run on `truth` would produce:
/// chi from the projected link parameters divided by K, friction rows
/// divided by K, gains copied.
RobotModel exact_identified_model(const RobotModel& truth, const BaseParameterMap& map);

}  // namespace dynid
