#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace dynid {

using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

inline constexpr double kStandardGravity = 9.80665;

/// One row of a standard (distal) Denavit-Hartenberg table. The joint angle is
/// theta = q + joint_offset.
struct DhRow {
  double a = 0.0;             // m
  double alpha = 0.0;         // rad, normalized to (-pi, pi]
  double d = 0.0;             // m
  double joint_offset = 0.0;  // rad
};

/// Builds a row with alpha wrapped into (-pi, pi]. Throws if a < 0 or any
/// value is not finite.
DhRow make_dh_row(double a, double alpha, double d, double joint_offset = 0.0);

struct KinematicChain {
  std::vector<DhRow> rows;
  Vector3d gravity{0.0, 0.0, -kStandardGravity};  // base frame, m/s^2

  int dof() const { return static_cast<int>(rows.size()); }
};

/// Pose of a frame w.r.t. the base frame.
struct FramePose {
  Matrix3d rotation = Matrix3d::Identity();
  Vector3d origin = Vector3d::Zero();

  Eigen::Isometry3d isometry() const;
  FramePose operator*(const FramePose& rhs) const;
};

/// Chain of Table I of the UR10 (a, alpha, d), all offsets zero, default
/// gravity.
KinematicChain ur10_chain();

/// Throws if the chain is empty or a row violates its invariants.
void validate(const KinematicChain& chain);

/// Homogeneous transform of frame i w.r.t. frame i-1 for joint value q:
/// Rz(theta) * Tz(d) * Tx(a) * Rx(alpha).
FramePose dh_transform(const DhRow& row, double q);

/// Pose of frame i (1-based, 1..n) w.r.t. frame 0.
FramePose link_pose(const KinematicChain& chain, const VectorXd& q, int i);

/// Poses of frames 0..n (index 0 is the base).
std::vector<FramePose> all_link_poses(const KinematicChain& chain,
                                      const VectorXd& q);

/// Geometric 6xn Jacobian (linear rows first) of a point rigidly attached to
/// frame i, with the point given in frame-i coordinates. Columns beyond i are
/// zero.
MatrixXd point_jacobian(const KinematicChain& chain, const VectorXd& q, int i,
                        const Vector3d& point_in_frame_i);

}  // namespace dynid
