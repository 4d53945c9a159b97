#pragma once

#include <vector>

#include <Eigen/Core>

#include "dynid/kinematics.hpp"

namespace dynid {

using Vector10d = Eigen::Matrix<double, 10, 1>;

inline constexpr int kLinkParams = 10;
inline constexpr int kFrictionParams = 3;
inline constexpr int kParamsPerJoint = kLinkParams + kFrictionParams;

/// Skew-symmetric cross-product matrix, [r]x * v == r.cross(v).
Matrix3d skew(const Vector3d& r);

/// Mass properties of one link, all expressed in the link's DH frame.
/// inertia_origin is taken about the frame origin, not the COM.
struct InertialParameters {
  double mass = 0.0;
  Vector3d com = Vector3d::Zero();
  Matrix3d inertia_origin = Matrix3d::Zero();

  /// From mass, COM and the inertia tensor about the COM (parallel-axis
  /// shift to the frame origin).
  static InertialParameters from_com_inertia(double mass, const Vector3d& com,
                                             const Matrix3d& inertia_com);

  /// Inverse of the parallel-axis shift.
  Matrix3d inertia_com() const;

  /// [m, m rx, m ry, m rz, Ixx, Ixy, Ixz, Iyy, Iyz, Izz].
  Vector10d block() const;

  /// Inverse of block(); needs m > 0 for the COM to be defined.
  static InertialParameters from_block(const Vector10d& block);
};

/// Packs (m, m r, I_origin) in the layout of InertialParameters::block().
Vector10d make_link_block(double mass, const Vector3d& first_moment,
                          const Matrix3d& inertia_origin);
Matrix3d inertia_from_block(const Vector10d& block);

/// Stacked parameter vector: 10 inertial values per link, links 1..n, then
/// [f_o, f_v, f_c] per joint, joints 1..n. Length 13n.
class DynamicParameters {
 public:
  DynamicParameters() = default;
  explicit DynamicParameters(int dof);
  DynamicParameters(int dof, const VectorXd& values);

  static DynamicParameters from_links(const std::vector<InertialParameters>& links);

  int dof() const { return dof_; }
  const VectorXd& values() const { return values_; }
  VectorXd& values() { return values_; }

  /// 0-based link index.
  Eigen::VectorBlock<const VectorXd, 10> link(int i) const {
    return values_.segment<10>(kLinkParams * i);
  }
  Eigen::VectorBlock<VectorXd, 10> link(int i) {
    return values_.segment<10>(kLinkParams * i);
  }
  Eigen::VectorBlock<const VectorXd, 3> friction(int j) const {
    return values_.segment<3>(kLinkParams * dof_ + kFrictionParams * j);
  }
  Eigen::VectorBlock<VectorXd, 3> friction(int j) {
    return values_.segment<3>(kLinkParams * dof_ + kFrictionParams * j);
  }

  static int link_column(int link, int k) { return kLinkParams * link + k; }
  int friction_column(int joint, int k) const {
    return kLinkParams * dof_ + kFrictionParams * joint + k;
  }

 private:
  int dof_ = 0;
  VectorXd values_;
};

/// Sigmoidal friction law of one joint:
/// f_o + f_v qd + f_c / (1 + exp(-delta (nu + qd))).
struct JointFriction {
  double offset = 0.0;     // f_o
  double viscous = 0.0;    // f_v
  double magnitude = 0.0;  // f_c
  double steepness = 0.0;  // delta, s/rad
  double shift = 0.0;      // nu, rad/s

  Eigen::Matrix<double, 5, 1> as_vector() const;
  static JointFriction from_vector(const Eigen::Matrix<double, 5, 1>& v);
};

using FrictionSet = std::vector<JointFriction>;

struct JointState {
  VectorXd q, qd, qdd;

  static JointState zero(int dof);
  int dof() const { return static_cast<int>(q.size()); }
};

/// Recursive Newton-Euler inverse dynamics, M qdd + C qd + g, friction
/// excluded. Link parameters are taken in (m, m r, I_origin) form, so first
/// moments without mass are accepted. Gravity comes from the chain.
VectorXd rnea(const KinematicChain& chain, const DynamicParameters& params,
              const JointState& state);
VectorXd rnea(const KinematicChain& chain,
              const std::vector<InertialParameters>& links,
              const JointState& state);

MatrixXd inertia_matrix(const KinematicChain& chain,
                        const DynamicParameters& params, const VectorXd& q);
VectorXd coriolis_vector(const KinematicChain& chain,
                         const DynamicParameters& params, const VectorXd& q,
                         const VectorXd& qd);
VectorXd gravity_vector(const KinematicChain& chain,
                        const DynamicParameters& params, const VectorXd& q);

/// sgn with sgn(0) = 0.
inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

VectorXd friction_linear(const VectorXd& f_o, const VectorXd& f_v,
                         const VectorXd& f_c, const VectorXd& qd);
/// Linear friction taken from the friction blocks of a parameter vector.
VectorXd friction_linear(const DynamicParameters& params, const VectorXd& qd);

double friction_sigmoid(const JointFriction& psi, double qd);
VectorXd friction_sigmoid(const FrictionSet& psi, const VectorXd& qd);

/// n x 13n regressor: Y(state) * pi == rnea(pi) + linear friction(pi).
/// Inertial columns come from one backward Newton-Euler pass per unit
/// parameter; friction columns are [1, qd_j, sgn(qd_j)] in row j.
MatrixXd regressor(const KinematicChain& chain, const JointState& state);

/// Last-link block (columns 10(n-1)..10n-1) of the regressor.
MatrixXd last_link_regressor(const KinematicChain& chain, const JointState& state);

/// Copy of the chain with gravity switched off.
KinematicChain without_gravity(const KinematicChain& chain);

}  // namespace dynid
