#include "dynid/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dynid/errors.hpp"

namespace dynid {

namespace {

double wrap_angle(double angle) {
  constexpr double kPi = std::numbers::pi;
  double wrapped = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

void check_q(const KinematicChain& chain, const VectorXd& q) {
  if (q.size() != chain.dof()) {
    throw schema_error("joint vector has " + std::to_string(q.size()) +
                       " entries, chain has " + std::to_string(chain.dof()));
  }
}

}  // namespace

DhRow make_dh_row(double a, double alpha, double d, double joint_offset) {
  if (!std::isfinite(a) || !std::isfinite(alpha) || !std::isfinite(d) ||
      !std::isfinite(joint_offset)) {
    throw schema_error("DH row has non-finite entries");
  }
  if (a < 0.0) throw schema_error("DH row has negative link length a");
  return DhRow{a, wrap_angle(alpha), d, joint_offset};
}

Eigen::Isometry3d FramePose::isometry() const {
  Eigen::Isometry3d iso = Eigen::Isometry3d::Identity();
  iso.linear() = rotation;
  iso.translation() = origin;
  return iso;
}

FramePose FramePose::operator*(const FramePose& rhs) const {
  return FramePose{rotation * rhs.rotation, rotation * rhs.origin + origin};
}

KinematicChain ur10_chain() {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  KinematicChain chain;
  chain.rows = {
      make_dh_row(0.0, -kHalfPi, 0.1273),
      make_dh_row(0.612, 0.0, 0.0),
      make_dh_row(0.5723, 0.0, 0.0),
      make_dh_row(0.0, -kHalfPi, 0.163941),
      make_dh_row(0.0, kHalfPi, 0.1157),
      make_dh_row(0.0, 0.0, 0.0922),
  };
  return chain;
}

void validate(const KinematicChain& chain) {
  if (chain.rows.empty()) throw schema_error("kinematic chain has no rows");
  for (const auto& row : chain.rows) {
    if (row.a < 0.0 || !std::isfinite(row.a) || !std::isfinite(row.d) ||
        !(row.alpha > -std::numbers::pi && row.alpha <= std::numbers::pi) ||
        !std::isfinite(row.joint_offset)) {
      throw schema_error("DH row violates a >= 0, finite d, alpha in (-pi, pi]");
    }
  }
  if (!chain.gravity.allFinite()) throw schema_error("gravity is not finite");
}

FramePose dh_transform(const DhRow& row, double q) {
  const double theta = q + row.joint_offset;
  const double ct = std::cos(theta), st = std::sin(theta);
  const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
  FramePose pose;
  pose.rotation << ct, -st * ca, st * sa,
                   st, ct * ca, -ct * sa,
                   0.0, sa, ca;
  pose.origin << row.a * ct, row.a * st, row.d;
  return pose;
}

FramePose link_pose(const KinematicChain& chain, const VectorXd& q, int i) {
  check_q(chain, q);
  if (i < 1 || i > chain.dof()) {
    throw usage_error("link index " + std::to_string(i) + " outside 1.." +
                      std::to_string(chain.dof()));
  }
  FramePose pose;
  for (int k = 0; k < i; ++k) pose = pose * dh_transform(chain.rows[k], q[k]);
  return pose;
}

std::vector<FramePose> all_link_poses(const KinematicChain& chain,
                                      const VectorXd& q) {
  check_q(chain, q);
  std::vector<FramePose> poses(chain.rows.size() + 1);
  for (std::size_t k = 0; k < chain.rows.size(); ++k) {
    poses[k + 1] = poses[k] * dh_transform(chain.rows[k], q[static_cast<Eigen::Index>(k)]);
  }
  return poses;
}

MatrixXd point_jacobian(const KinematicChain& chain, const VectorXd& q, int i,
                        const Vector3d& point_in_frame_i) {
  const auto poses = all_link_poses(chain, q);
  if (i < 1 || i > chain.dof()) {
    throw usage_error("link index " + std::to_string(i) + " out of range");
  }
  const Vector3d point = poses[i].rotation * point_in_frame_i + poses[i].origin;
  MatrixXd jac = MatrixXd::Zero(6, chain.dof());
  for (int j = 0; j < i; ++j) {
    // joint j+1 rotates about z of frame j
    const Vector3d axis = poses[j].rotation.col(2);
    jac.block<3, 1>(0, j) = axis.cross(point - poses[j].origin);
    jac.block<3, 1>(3, j) = axis;
  }
  return jac;
}

}  // namespace dynid
