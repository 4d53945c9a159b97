#include "dynid/solver.hpp"

#include "dynid/errors.hpp"
#include "dynid/estimation.hpp"

namespace dynid {

IdentifiedModel IdentifiedModel::from(const RobotModel& model) {
  model.require_stage(Stage::kGains);
  IdentifiedModel m;
  m.chain = model.chain;
  m.map = *model.base_map;
  m.chi = *model.chi;
  m.psi = *model.friction_current;
  m.gains = *model.gains_estimated;
  return m;
}

void validate(const IdentifiedModel& model) {
  check_compatible(model.map, model.chain);
  const int n = model.chain.dof();
  if (model.chi.size() != model.map.joint_layout_size()) {
    throw schema_error("coefficient vector does not match the base map layout");
  }
  if (static_cast<int>(model.psi.size()) != n || model.gains.size() != n) {
    throw schema_error("friction or gains do not match the joint count");
  }
  if ((model.gains.array() <= 0.0).any() || !model.gains.allFinite()) {
    throw schema_error("identified gains must be positive");
  }
}

IdentifiedSolver::IdentifiedSolver(IdentifiedModel model)
    : model_(std::move(model)), no_gravity_(without_gravity(model_.chain)) {
  validate(model_);
}

VectorXd IdentifiedSolver::arm_rigid(const KinematicChain& chain, const JointState& state) const {
  const MatrixXd y = regressor(chain, state);
  return model_.gains.cwiseProduct(nonfriction_currents(model_.map, y, model_.chi));
}

VectorXd IdentifiedSolver::payload_torque(const KinematicChain& chain, const JointState& state) const {
  if (!model_.payload) return VectorXd::Zero(dof());
  return last_link_regressor(chain, state) * *model_.payload;
}

VectorXd IdentifiedSolver::torque(const JointState& state) const {
  const MatrixXd y = regressor(model_.chain, state);
  VectorXd v = nonfriction_currents(model_.map, y, model_.chi) + friction_sigmoid(model_.psi, state.qd);
  VectorXd tau = model_.gains.cwiseProduct(v);
  if (model_.payload) tau += y.middleCols(kLinkParams * (dof() - 1), kLinkParams) * *model_.payload;
  return tau;
}

MatrixXd IdentifiedSolver::inertia(const VectorXd& q) const {
  const int n = dof();
  MatrixXd m(n, n);
  JointState s{q, VectorXd::Zero(n), VectorXd::Zero(n)};
  for (int i = 0; i < n; ++i) {
    s.qdd.setZero();
    s.qdd[i] = 1.0;
    m.col(i) = arm_rigid(no_gravity_, s) + payload_torque(no_gravity_, s);
  }
  return m;
}

VectorXd IdentifiedSolver::coriolis_times_qd(const VectorXd& q, const VectorXd& qd) const {
  const JointState s{q, qd, VectorXd::Zero(dof())};
  return arm_rigid(no_gravity_, s) + payload_torque(no_gravity_, s);
}

VectorXd IdentifiedSolver::friction(const VectorXd& qd) const {
  return model_.gains.cwiseProduct(friction_sigmoid(model_.psi, qd));
}

VectorXd IdentifiedSolver::gravity(const VectorXd& q) const {
  const JointState s{q, VectorXd::Zero(dof()), VectorXd::Zero(dof())};
  return arm_rigid(model_.chain, s) + payload_torque(model_.chain, s);
}

std::unique_ptr<InverseDynamicsSolver> IdentifiedSolver::configure_payload(const PayloadSpec& spec) const {
  IdentifiedModel m = model_;
  m.payload = payload_to_frame_n(spec);
  return std::make_unique<IdentifiedSolver>(std::move(m));
}

std::unique_ptr<InverseDynamicsSolver> IdentifiedSolver::clear_payload() const {
  IdentifiedModel m = model_;
  m.payload.reset();
  return std::make_unique<IdentifiedSolver>(std::move(m));
}

ReferenceSolver::ReferenceSolver(const RobotModel& model)
    : chain_(model.chain), arm_(model.dynamic_parameters()), params_(arm_), friction_(model.friction) {
  if (static_cast<int>(friction_.size()) != model.dof()) {
    throw usage_error("reference solver needs friction parameters for every joint");
  }
}

VectorXd ReferenceSolver::torque(const JointState& state) const {
  return rnea(chain_, params_, state) + friction_sigmoid(friction_, state.qd);
}

MatrixXd ReferenceSolver::inertia(const VectorXd& q) const { return inertia_matrix(chain_, params_, q); }

VectorXd ReferenceSolver::coriolis_times_qd(const VectorXd& q, const VectorXd& qd) const {
  return coriolis_vector(chain_, params_, q, qd);
}

VectorXd ReferenceSolver::friction(const VectorXd& qd) const { return friction_sigmoid(friction_, qd); }

VectorXd ReferenceSolver::gravity(const VectorXd& q) const { return gravity_vector(chain_, params_, q); }

std::unique_ptr<InverseDynamicsSolver> ReferenceSolver::configure_payload(const PayloadSpec& spec) const {
  auto out = std::make_unique<ReferenceSolver>(*this);
  out->payload_ = payload_to_frame_n(spec);
  out->params_ = apply_payload(arm_, *out->payload_);
  return out;
}

std::unique_ptr<InverseDynamicsSolver> ReferenceSolver::clear_payload() const {
  auto out = std::make_unique<ReferenceSolver>(*this);
  out->payload_.reset();
  out->params_ = arm_;
  return out;
}

std::unique_ptr<InverseDynamicsSolver> make_solver(const RobotModel& model) {
  if (model.stage() == Stage::kGains) {
    return std::make_unique<IdentifiedSolver>(IdentifiedModel::from(model));
  }
  if (model.stage() == Stage::kNone && model.has_physical()) {
    return std::make_unique<ReferenceSolver>(model);
  }
  model.require_stage(Stage::kGains);
  throw usage_error("model cannot be solved");
}

RobotModel exact_identified_model(const RobotModel& truth, const BaseParameterMap& map) {
  check_compatible(map, truth.chain);
  if (!truth.has_physical()) throw usage_error("exact identification needs a physical model");
  const int n = truth.dof();
  const DynamicParameters params = truth.dynamic_parameters();  // friction blocks zero
  const VectorXd theta = map.joint_coefficients(map.coefficients(params.values()));
  VectorXd chi = theta;
  FrictionSet psi;
  for (int j = 0; j < n; ++j) {
    const int cj = map.joints[static_cast<std::size_t>(j)].size();
    chi.segment(map.joint_offset(j), cj) /= truth.gains[j];
    JointFriction f = truth.friction[static_cast<std::size_t>(j)];
    f.offset /= truth.gains[j];
    f.viscous /= truth.gains[j];
    f.magnitude /= truth.gains[j];
    psi.push_back(f);
  }
  RobotModel out;
  out.name = truth.name + "_exact";
  out.chain = truth.chain;
  out.limits = truth.limits;
  out.linear_threshold = truth.linear_threshold;
  out.base_map = map;
  out.chi = chi;
  out.friction_current = psi;
  out.gains_estimated = truth.gains;
  return out;
}

}  // namespace dynid
