#pragma once

#include <array>
#include <string>

#include "dynid/dynamics.hpp"

namespace dynid {

/// Rigid payload described in its own frame l, mounted on the last link.
struct PayloadSpec {
  double mass = 0.0;                          // kg
  Vector3d com_l = Vector3d::Zero();          // COM in frame l, m
  Matrix3d inertia_l = Matrix3d::Zero();      // about the COM, axes of frame l
  Matrix3d rotation = Matrix3d::Identity();   // R_l^n: orientation of l in frame n
  Vector3d translation = Vector3d::Zero();    // t_l^n: origin of l in frame n, m
};

/// Throws on negative mass, asymmetric inertia or a non-rotation R_l^n.
void validate(const PayloadSpec& spec);

/// [m_L, m_L r_L, I_L] in frame n with r_L = R r_l + t and
/// I_L = R I_l R^T + m_L [r_L]x^T [r_L]x.
Vector10d payload_to_frame_n(const PayloadSpec& spec);

Vector10d apply_payload(const Vector10d& last_link_block, const Vector10d& pi_l);
DynamicParameters apply_payload(const DynamicParameters& params, const Vector10d& pi_l);

struct TorqueSplit {
  VectorXd arm;      // model without payload, friction included
  VectorXd payload;  // Y_n(state) pi_L
};

/// Separates the torque of the arm from the payload contribution through the
/// last-link block of the regressor.
TorqueSplit split_torques(const KinematicChain& chain, const DynamicParameters& params,
                          const Vector10d& pi_l, const JointState& state);

/// Names of the 10 payload parameters in block order.
inline const std::array<std::string, 10> kPayloadParamNames = {
    "m", "hx", "hy", "hz", "ixx", "ixy", "ixz", "iyy", "iyz", "izz"};
int payload_param_index(const std::string& name);

/// What is known about the payload when estimating gains: the frame-n
/// parameters and which of them may be trusted.
struct PayloadKnowledge {
  Vector10d values = Vector10d::Zero();
  std::array<bool, 10> known{};

  int n_unknown() const;
};

PayloadKnowledge make_knowledge(const PayloadSpec& spec,
                                const std::vector<std::string>& known_names);

}  // namespace dynid
