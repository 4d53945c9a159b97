#include "dynid/reduction.hpp"

#include <algorithm>
#include <numbers>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "dynid/errors.hpp"
#include "dynid/random.hpp"

namespace dynid {

namespace {

int numerical_rank(const MatrixXd& stack, double tolerance) {
  if (stack.size() == 0) return 0;
  Eigen::BDCSVD<MatrixXd> svd(stack);
  const VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  const double cut = tolerance * s[0];
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s[k] > cut) ++rank;
  }
  return rank;
}

/// First `rank` pivots of a column-pivoted QR, sorted ascending.
std::vector<int> pivot_columns(const MatrixXd& stack, int rank) {
  Eigen::ColPivHouseholderQR<MatrixXd> qr(stack);
  const auto& perm = qr.colsPermutation().indices();
  std::vector<int> cols(perm.data(), perm.data() + rank);
  std::sort(cols.begin(), cols.end());
  return cols;
}

MatrixXd select_columns(const MatrixXd& m, const std::vector<int>& cols) {
  MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(cols[k]);
  return out;
}

/// X with stack == stack(:, cols) * X, exact identity on the selected columns.
MatrixXd recombination(const MatrixXd& stack, const std::vector<int>& cols) {
  const MatrixXd basis = select_columns(stack, cols);
  MatrixXd x = basis.colPivHouseholderQr().solve(stack);
  for (std::size_t k = 0; k < cols.size(); ++k) {
    x.col(cols[k]).setZero();
    x(static_cast<Eigen::Index>(k), cols[k]) = 1.0;
  }
  return x;
}

MatrixXd inertial_stack(const KinematicChain& chain,
                        const std::vector<JointState>& states) {
  const int n = chain.dof();
  MatrixXd stack(static_cast<Eigen::Index>(states.size()) * n, kLinkParams * n);
  for (std::size_t s = 0; s < states.size(); ++s) {
    stack.middleRows(static_cast<Eigen::Index>(s) * n, n) =
        regressor(chain, states[s]).leftCols(kLinkParams * n);
  }
  return stack;
}

}  // namespace

MatrixXd BaseParameterMap::projection() const {
  const int r = inertial_rank();
  MatrixXd p = MatrixXd::Zero(n_coeff(), kParamsPerJoint * dof);
  p.topLeftCorner(r, kLinkParams * dof) = inertial_projection;
  p.bottomRightCorner(kFrictionParams * dof, kFrictionParams * dof).setIdentity();
  return p;
}

VectorXd BaseParameterMap::coefficients(const VectorXd& pi) const {
  if (pi.size() != kParamsPerJoint * dof) {
    throw schema_error("parameter vector length does not match the base map");
  }
  return projection() * pi;
}

int BaseParameterMap::joint_offset(int j) const {
  int offset = 0;
  for (int i = 0; i < j; ++i) offset += joints[static_cast<std::size_t>(i)].size();
  return offset;
}

int BaseParameterMap::joint_layout_size() const { return joint_offset(dof); }

VectorXd BaseParameterMap::joint_coefficients(const VectorXd& pi_m) const {
  if (pi_m.size() != n_coeff()) throw schema_error("coefficient vector length mismatch");
  const int r = inertial_rank();
  VectorXd theta(joint_layout_size());
  for (int j = 0; j < dof; ++j) {
    const JointBasis& basis = joints[static_cast<std::size_t>(j)];
    const int off = joint_offset(j);
    theta.segment(off, basis.inertial_size()) = basis.recombination * pi_m.head(r);
    theta.segment(off + basis.inertial_size(), kFrictionParams) =
        pi_m.segment(r + kFrictionParams * j, kFrictionParams);
  }
  return theta;
}

std::vector<JointState> probe_states(int dof, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<JointState> states;
  states.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    JointState st = JointState::zero(dof);
    for (int j = 0; j < dof; ++j) st.q[j] = rng.uniform(-std::numbers::pi, std::numbers::pi);
    for (int j = 0; j < dof; ++j) st.qd[j] = rng.uniform(-3.0, 3.0);
    for (int j = 0; j < dof; ++j) st.qdd[j] = rng.uniform(-10.0, 10.0);
    states.push_back(std::move(st));
  }
  return states;
}

BaseParameterMap compute_base_map(const KinematicChain& chain,
                                  const BaseMapOptions& options) {
  validate(chain);
  const int n = chain.dof();
  if (options.n_probe * n < kParamsPerJoint * n) {
    throw usage_error("need at least 13 probe states, got " +
                      std::to_string(options.n_probe));
  }
  if (!(options.tolerance > 0.0)) throw usage_error("SVD tolerance must be positive");

  const MatrixXd stack =
      inertial_stack(chain, probe_states(n, options.n_probe, options.seed));
  const int rank = numerical_rank(stack, options.tolerance);

  BaseParameterMap map;
  map.dof = n;
  map.svd_tolerance = options.tolerance;
  map.n_probe = options.n_probe;
  map.seed = options.seed;
  map.independent = pivot_columns(stack, rank);
  map.inertial_projection = recombination(stack, map.independent);

  const std::uint64_t other_seed = options.seed ^ 0x9E3779B97F4A7C15ULL;
  const int other_rank = numerical_rank(
      inertial_stack(chain, probe_states(n, options.n_probe, other_seed)),
      options.tolerance);
  if (other_rank != rank) {
    map.warnings.push_back("regressor rank differs between probe seeds: " +
                           std::to_string(rank) + " vs " + std::to_string(other_rank));
  }

  const MatrixXd reduced = select_columns(stack, map.independent);
  map.joints.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    MatrixXd rows(options.n_probe, rank);
    for (int s = 0; s < options.n_probe; ++s) rows.row(s) = reduced.row(s * n + j);
    JointBasis& basis = map.joints[static_cast<std::size_t>(j)];
    const int rj = numerical_rank(rows, options.tolerance);
    basis.columns = pivot_columns(rows, rj);
    basis.recombination = rj > 0 ? recombination(rows, basis.columns)
                                 : MatrixXd::Zero(0, rank);
  }
  return map;
}

void check_compatible(const BaseParameterMap& map, const KinematicChain& chain) {
  if (map.dof != chain.dof()) {
    throw schema_error("base map is for " + std::to_string(map.dof) +
                       " joints, chain has " + std::to_string(chain.dof()));
  }
}

MatrixXd minimal_from_full(const BaseParameterMap& map, const MatrixXd& y) {
  const int n = map.dof;
  if (y.rows() != n || y.cols() != kParamsPerJoint * n) {
    throw schema_error("regressor shape does not match the base map");
  }
  MatrixXd out(n, map.n_coeff());
  out.leftCols(map.inertial_rank()) = select_columns(y, map.independent);
  out.rightCols(kFrictionParams * n) = y.rightCols(kFrictionParams * n);
  return out;
}

MatrixXd minimal_regressor(const BaseParameterMap& map, const KinematicChain& chain,
                           const JointState& state) {
  check_compatible(map, chain);
  return minimal_from_full(map, regressor(chain, state));
}

RowVectorXd joint_row_inertial(const BaseParameterMap& map, const MatrixXd& y, int j) {
  const JointBasis& basis = map.joints[static_cast<std::size_t>(j)];
  RowVectorXd row(basis.inertial_size());
  for (int k = 0; k < basis.inertial_size(); ++k) {
    row[k] = y(j, map.independent[static_cast<std::size_t>(basis.columns[static_cast<std::size_t>(k)])]);
  }
  return row;
}

RowVectorXd joint_row(const BaseParameterMap& map, const MatrixXd& y, int j) {
  const JointBasis& basis = map.joints[static_cast<std::size_t>(j)];
  RowVectorXd row(basis.size());
  row.head(basis.inertial_size()) = joint_row_inertial(map, y, j);
  const int f = kLinkParams * map.dof + kFrictionParams * j;
  row.tail(kFrictionParams) = y.block(j, f, 1, kFrictionParams);
  return row;
}

MatrixXd current_level_from_full(const BaseParameterMap& map, const MatrixXd& y) {
  if (y.rows() != map.dof || y.cols() != kParamsPerJoint * map.dof) {
    throw schema_error("regressor shape does not match the base map");
  }
  MatrixXd u = MatrixXd::Zero(map.dof, map.joint_layout_size());
  for (int j = 0; j < map.dof; ++j) {
    const int size = map.joints[static_cast<std::size_t>(j)].size();
    u.block(j, map.joint_offset(j), 1, size) = joint_row(map, y, j);
  }
  return u;
}

MatrixXd current_level_regressor(const BaseParameterMap& map,
                                 const KinematicChain& chain, const JointState& state) {
  check_compatible(map, chain);
  return current_level_from_full(map, regressor(chain, state));
}

}  // namespace dynid
