#include "dynid/dynamics.hpp"

#include <cmath>
#include <string>

#include "dynid/errors.hpp"

namespace dynid {

namespace {

const Vector3d kAxisZ = Vector3d::UnitZ();

/// Parameter-independent part of a Newton-Euler sweep, all quantities in the
/// frame of the link.
struct LinkMotion {
  Matrix3d rotation;  // frame i w.r.t. frame i-1
  Vector3d offset;    // origin i minus origin i-1, in frame i
  Vector3d axis;      // joint axis z_{i-1}, in frame i
  Vector3d omega, omega_dot, accel;
};

void check_state(const KinematicChain& chain, const JointState& state) {
  const int n = chain.dof();
  if (state.q.size() != n || state.qd.size() != n || state.qdd.size() != n) {
    throw schema_error("joint state size does not match the " +
                       std::to_string(n) + "-joint chain");
  }
}

std::vector<LinkMotion> forward_pass(const KinematicChain& chain,
                                     const JointState& state) {
  const int n = chain.dof();
  std::vector<LinkMotion> links(static_cast<std::size_t>(n));
  Vector3d omega = Vector3d::Zero();
  Vector3d omega_dot = Vector3d::Zero();
  Vector3d accel = -chain.gravity;
  for (int i = 0; i < n; ++i) {
    const FramePose step = dh_transform(chain.rows[i], state.q[i]);
    LinkMotion& link = links[static_cast<std::size_t>(i)];
    link.rotation = step.rotation;
    const Matrix3d rt = step.rotation.transpose();
    link.offset = rt * step.origin;
    link.axis = rt * kAxisZ;
    const double qd = state.qd[i];
    const double qdd = state.qdd[i];
    link.omega = rt * (omega + qd * kAxisZ);
    link.omega_dot = rt * (omega_dot + qdd * kAxisZ + qd * omega.cross(kAxisZ));
    link.accel = rt * accel + link.omega_dot.cross(link.offset) +
                 link.omega.cross(link.omega.cross(link.offset));
    omega = link.omega;
    omega_dot = link.omega_dot;
    accel = link.accel;
  }
  return links;
}

struct Wrench {
  Vector3d force = Vector3d::Zero();
  Vector3d moment = Vector3d::Zero();  // about the link frame origin
};

Wrench link_wrench(const LinkMotion& m, const Vector10d& block) {
  const double mass = block[0];
  const Vector3d h = block.segment<3>(1);
  const Matrix3d inertia = inertia_from_block(block);
  Wrench w;
  w.force = mass * m.accel + m.omega_dot.cross(h) + m.omega.cross(m.omega.cross(h));
  w.moment = inertia * m.omega_dot + m.omega.cross(inertia * m.omega) +
             h.cross(m.accel);
  return w;
}

/// Backward recursion from `top` (0-based) down to the base, given the net
/// wrench of every link up to top. Adds joint torques into tau.
void backward_pass(const std::vector<LinkMotion>& links,
                   const std::vector<Wrench>& net, int top, VectorXd& tau) {
  Vector3d force = Vector3d::Zero();
  Vector3d moment = Vector3d::Zero();
  for (int i = top; i >= 0; --i) {
    const LinkMotion& m = links[static_cast<std::size_t>(i)];
    if (i < top) {
      const Matrix3d& child_rotation = links[static_cast<std::size_t>(i + 1)].rotation;
      force = child_rotation * force;
      moment = child_rotation * moment;
    }
    force += net[static_cast<std::size_t>(i)].force;
    moment += net[static_cast<std::size_t>(i)].moment + m.offset.cross(force);
    tau[i] += m.axis.dot(moment);
  }
}

VectorXd rnea_blocks(const KinematicChain& chain,
                     const std::vector<Vector10d>& blocks,
                     const JointState& state) {
  check_state(chain, state);
  const int n = chain.dof();
  if (static_cast<int>(blocks.size()) != n) {
    throw schema_error("parameter blocks do not match the chain length");
  }
  const auto links = forward_pass(chain, state);
  std::vector<Wrench> net(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    net[static_cast<std::size_t>(i)] =
        link_wrench(links[static_cast<std::size_t>(i)], blocks[static_cast<std::size_t>(i)]);
  }
  VectorXd tau = VectorXd::Zero(n);
  backward_pass(links, net, n - 1, tau);
  return tau;
}

std::vector<Vector10d> blocks_of(const DynamicParameters& params) {
  std::vector<Vector10d> blocks(static_cast<std::size_t>(params.dof()));
  for (int i = 0; i < params.dof(); ++i) blocks[static_cast<std::size_t>(i)] = params.link(i);
  return blocks;
}

}  // namespace

Matrix3d skew(const Vector3d& r) {
  Matrix3d s;
  s << 0.0, -r.z(), r.y(),
       r.z(), 0.0, -r.x(),
       -r.y(), r.x(), 0.0;
  return s;
}

InertialParameters InertialParameters::from_com_inertia(double mass,
                                                        const Vector3d& com,
                                                        const Matrix3d& inertia_com) {
  const Matrix3d s = skew(com);
  return InertialParameters{mass, com, inertia_com + mass * s.transpose() * s};
}

Matrix3d InertialParameters::inertia_com() const {
  const Matrix3d s = skew(com);
  return inertia_origin - mass * s.transpose() * s;
}

Vector10d InertialParameters::block() const {
  return make_link_block(mass, mass * com, inertia_origin);
}

InertialParameters InertialParameters::from_block(const Vector10d& block) {
  if (!(block[0] > 0.0)) {
    throw usage_error("cannot recover a COM from a block with non-positive mass");
  }
  return InertialParameters{block[0], block.segment<3>(1) / block[0],
                            inertia_from_block(block)};
}

Vector10d make_link_block(double mass, const Vector3d& first_moment,
                          const Matrix3d& inertia) {
  Vector10d b;
  b << mass, first_moment.x(), first_moment.y(), first_moment.z(),
      inertia(0, 0), inertia(0, 1), inertia(0, 2), inertia(1, 1), inertia(1, 2),
      inertia(2, 2);
  return b;
}

Matrix3d inertia_from_block(const Vector10d& b) {
  Matrix3d inertia;
  inertia << b[4], b[5], b[6],
             b[5], b[7], b[8],
             b[6], b[8], b[9];
  return inertia;
}

DynamicParameters::DynamicParameters(int dof)
    : dof_(dof), values_(VectorXd::Zero(kParamsPerJoint * dof)) {}

DynamicParameters::DynamicParameters(int dof, const VectorXd& values)
    : dof_(dof), values_(values) {
  if (values.size() != kParamsPerJoint * dof) {
    throw schema_error("dynamic parameter vector must have 13n = " +
                       std::to_string(kParamsPerJoint * dof) + " entries, got " +
                       std::to_string(values.size()));
  }
}

DynamicParameters DynamicParameters::from_links(
    const std::vector<InertialParameters>& links) {
  DynamicParameters p(static_cast<int>(links.size()));
  for (std::size_t i = 0; i < links.size(); ++i) {
    p.link(static_cast<int>(i)) = links[i].block();
  }
  return p;
}

Eigen::Matrix<double, 5, 1> JointFriction::as_vector() const {
  Eigen::Matrix<double, 5, 1> v;
  v << offset, viscous, magnitude, steepness, shift;
  return v;
}

JointFriction JointFriction::from_vector(const Eigen::Matrix<double, 5, 1>& v) {
  return JointFriction{v[0], v[1], v[2], v[3], v[4]};
}

JointState JointState::zero(int dof) {
  return JointState{VectorXd::Zero(dof), VectorXd::Zero(dof), VectorXd::Zero(dof)};
}

VectorXd rnea(const KinematicChain& chain, const DynamicParameters& params,
              const JointState& state) {
  if (params.dof() != chain.dof()) {
    throw schema_error("parameter vector is for " + std::to_string(params.dof()) +
                       " joints, chain has " + std::to_string(chain.dof()));
  }
  return rnea_blocks(chain, blocks_of(params), state);
}

VectorXd rnea(const KinematicChain& chain,
              const std::vector<InertialParameters>& links,
              const JointState& state) {
  std::vector<Vector10d> blocks;
  blocks.reserve(links.size());
  for (const auto& l : links) blocks.push_back(l.block());
  return rnea_blocks(chain, blocks, state);
}

MatrixXd inertia_matrix(const KinematicChain& chain,
                        const DynamicParameters& params, const VectorXd& q) {
  const int n = chain.dof();
  const KinematicChain free_chain = without_gravity(chain);
  JointState state = JointState::zero(n);
  state.q = q;
  MatrixXd mass_matrix(n, n);
  for (int k = 0; k < n; ++k) {
    state.qdd.setZero();
    state.qdd[k] = 1.0;
    mass_matrix.col(k) = rnea(free_chain, params, state);
  }
  return mass_matrix;
}

VectorXd coriolis_vector(const KinematicChain& chain,
                         const DynamicParameters& params, const VectorXd& q,
                         const VectorXd& qd) {
  JointState state = JointState::zero(chain.dof());
  state.q = q;
  state.qd = qd;
  return rnea(without_gravity(chain), params, state);
}

VectorXd gravity_vector(const KinematicChain& chain,
                        const DynamicParameters& params, const VectorXd& q) {
  JointState state = JointState::zero(chain.dof());
  state.q = q;
  return rnea(chain, params, state);
}

VectorXd friction_linear(const VectorXd& f_o, const VectorXd& f_v,
                         const VectorXd& f_c, const VectorXd& qd) {
  const Eigen::Index n = qd.size();
  if (f_o.size() != n || f_v.size() != n || f_c.size() != n) {
    throw schema_error("friction coefficient vectors do not match velocity size");
  }
  VectorXd out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out[j] = f_o[j] + f_v[j] * qd[j] + f_c[j] * sign_of(qd[j]);
  }
  return out;
}

VectorXd friction_linear(const DynamicParameters& params, const VectorXd& qd) {
  const int n = params.dof();
  if (qd.size() != n) throw schema_error("velocity size does not match parameters");
  VectorXd out(n);
  for (int j = 0; j < n; ++j) {
    const auto f = params.friction(j);
    out[j] = f[0] + f[1] * qd[j] + f[2] * sign_of(qd[j]);
  }
  return out;
}

double friction_sigmoid(const JointFriction& psi, double qd) {
  return psi.offset + psi.viscous * qd +
         psi.magnitude / (1.0 + std::exp(-psi.steepness * (psi.shift + qd)));
}

VectorXd friction_sigmoid(const FrictionSet& psi, const VectorXd& qd) {
  if (static_cast<Eigen::Index>(psi.size()) != qd.size()) {
    throw schema_error("friction set does not match velocity size");
  }
  VectorXd out(qd.size());
  for (Eigen::Index j = 0; j < qd.size(); ++j) {
    out[j] = friction_sigmoid(psi[static_cast<std::size_t>(j)], qd[j]);
  }
  return out;
}

MatrixXd regressor(const KinematicChain& chain, const JointState& state) {
  check_state(chain, state);
  const int n = chain.dof();
  const auto links = forward_pass(chain, state);
  MatrixXd y = MatrixXd::Zero(n, kParamsPerJoint * n);
  std::vector<Wrench> net(static_cast<std::size_t>(n));
  VectorXd tau(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < kLinkParams; ++k) {
      Vector10d unit = Vector10d::Zero();
      unit[k] = 1.0;
      // Only link i carries parameters, so the sweep starts at i.
      net[static_cast<std::size_t>(i)] = link_wrench(links[static_cast<std::size_t>(i)], unit);
      for (int l = 0; l < i; ++l) net[static_cast<std::size_t>(l)] = Wrench{};
      tau.setZero();
      backward_pass(links, net, i, tau);
      y.col(DynamicParameters::link_column(i, k)) = tau;
    }
  }
  for (int j = 0; j < n; ++j) {
    const int base = kLinkParams * n + kFrictionParams * j;
    y(j, base) = 1.0;
    y(j, base + 1) = state.qd[j];
    y(j, base + 2) = sign_of(state.qd[j]);
  }
  return y;
}

MatrixXd last_link_regressor(const KinematicChain& chain, const JointState& state) {
  check_state(chain, state);
  const int n = chain.dof();
  const auto links = forward_pass(chain, state);
  MatrixXd y(n, kLinkParams);
  std::vector<Wrench> net(static_cast<std::size_t>(n));
  VectorXd tau(n);
  for (int k = 0; k < kLinkParams; ++k) {
    Vector10d unit = Vector10d::Zero();
    unit[k] = 1.0;
    net[static_cast<std::size_t>(n - 1)] = link_wrench(links[static_cast<std::size_t>(n - 1)], unit);
    tau.setZero();
    backward_pass(links, net, n - 1, tau);
    y.col(k) = tau;
  }
  return y;
}

KinematicChain without_gravity(const KinematicChain& chain) {
  KinematicChain copy = chain;
  copy.gravity.setZero();
  return copy;
}

}  // namespace dynid
