#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dynid/dynamics.hpp"

namespace dynid {

using Eigen::RowVectorXd;

/// Independent subset of the minimal-regressor columns that survive in one
/// joint row, plus how the remaining coefficients fold onto them:
/// row_j(Yhat_inertial) == row_j(Yhat_inertial)(:, columns) * recombination.
struct JointBasis {
  std::vector<int> columns;  // ascending, indices into the r inertial coefficients
  MatrixXd recombination;    // r_j x r

  int inertial_size() const { return static_cast<int>(columns.size()); }
  /// Inertial coefficients followed by [f_o, f_v, f_c] of the joint.
  int size() const { return inertial_size() + kFrictionParams; }
};

/// Projection from the 13n dynamic parameters to the c = r + 3n dynamic
/// coefficients pi_m, with Yhat(state) * pi_m == Y(state) * pi.
struct BaseParameterMap {
  int dof = 0;
  double svd_tolerance = 1e-10;
  int n_probe = 0;
  std::uint64_t seed = 0;
  std::vector<int> independent;  // ascending columns of the 10n inertial block
  MatrixXd inertial_projection;  // r x 10n
  std::vector<JointBasis> joints;
  std::vector<std::string> warnings;

  int inertial_rank() const { return static_cast<int>(independent.size()); }
  int n_coeff() const { return inertial_rank() + kFrictionParams * dof; }

  /// c x 13n matrix P with pi_m = P pi.
  MatrixXd projection() const;
  VectorXd coefficients(const VectorXd& pi) const;

  /// Offset of joint j's block in the per-joint (current-level) layout.
  int joint_offset(int j) const;
  /// Total length of the per-joint layout, sum of c_j.
  int joint_layout_size() const;
  /// Per-joint torque-level coefficients theta_j = [B_j pi_m,inertial; f_j],
  /// stacked over joints. Dividing block j by K_j gives chi_j.
  VectorXd joint_coefficients(const VectorXd& pi_m) const;
};

struct BaseMapOptions {
  int n_probe = 200;
  std::uint64_t seed = 1;
  double tolerance = 1e-10;  // relative to the largest singular value
};

/// Random probe states: q in [-pi, pi], qd in [-3, 3], qdd in [-10, 10].
std::vector<JointState> probe_states(int dof, int count, std::uint64_t seed);

/// Throws if n_probe * n < 13 n. A rank that differs for a second,
/// independent probe seed is recorded in `warnings` with both ranks.
BaseParameterMap compute_base_map(const KinematicChain& chain,
                                  const BaseMapOptions& options = {});

/// n x c minimal regressor.
MatrixXd minimal_regressor(const BaseParameterMap& map, const KinematicChain& chain,
                           const JointState& state);
MatrixXd minimal_from_full(const BaseParameterMap& map, const MatrixXd& y);

/// Row j of the current-level regressor u_j (length c_j), taken from a full
/// torque-level regressor.
RowVectorXd joint_row(const BaseParameterMap& map, const MatrixXd& y, int j);
/// Same without the three friction entries (length r_j).
RowVectorXd joint_row_inertial(const BaseParameterMap& map, const MatrixXd& y, int j);

/// Block-diagonal n x sum(c_j) matrix with u_j in row j.
MatrixXd current_level_regressor(const BaseParameterMap& map,
                                 const KinematicChain& chain, const JointState& state);
MatrixXd current_level_from_full(const BaseParameterMap& map, const MatrixXd& y);

/// Throws when the map was built for a different number of joints.
void check_compatible(const BaseParameterMap& map, const KinematicChain& chain);

}  // namespace dynid
