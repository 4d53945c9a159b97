#include "dynid/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "dynid/errors.hpp"
#include "dynid/kernels.hpp"

namespace dynid {

namespace {

constexpr double kRankThreshold = 1e-10;
constexpr double kBisquareTuning = 4.685;
constexpr double kMadToSigma = 0.6745;
constexpr int kMaxIrlsIterations = 50;
constexpr double kWeightFloor = 1e-12;

void check_stack(const MatrixXd& stack, const VectorXd& rhs) {
  if (stack.rows() != rhs.size()) {
    throw schema_error("stack has " + std::to_string(stack.rows()) +
                       " rows but the right-hand side has " + std::to_string(rhs.size()));
  }
  if (!stack.allFinite() || !rhs.allFinite()) {
    throw numeric_error("least-squares stack contains non-finite values");
  }
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  double m = *mid;
  if (values.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(values.begin(), mid));
  }
  return m;
}

}  // namespace

VectorXd llse(const MatrixXd& stack, const VectorXd& rhs) {
  check_stack(stack, rhs);
  const Eigen::Index p = stack.cols();
  if (stack.rows() < p) {
    throw numeric_error("underdetermined stack: " + std::to_string(stack.rows()) +
                        " rows for " + std::to_string(p) + " unknowns");
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(stack);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() < p) {
    std::ostringstream msg;
    msg << "rank-deficient stack (rank " << qr.rank() << " of " << p
        << "), dependent columns:";
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < p; ++k) msg << ' ' << perm[k];
    throw numeric_error(msg.str());
  }
  return qr.solve(rhs);
}

VectorXd wlse(const MatrixXd& stack, const VectorXd& rhs, const VectorXd& weights) {
  check_stack(stack, rhs);
  if (weights.size() != rhs.size()) throw schema_error("weight count does not match rows");
  if (!weights.allFinite() || (weights.array() <= 0.0).any()) {
    throw numeric_error("weights must be positive and finite");
  }
  const VectorXd sw = weights.cwiseSqrt();
  return llse(sw.asDiagonal() * stack, sw.cwiseProduct(rhs));
}

RobustWeights robust_weights(const MatrixXd& stack, const VectorXd& rhs) {
  check_stack(stack, rhs);
  const Eigen::Index m = rhs.size();
  RobustWeights out;
  out.weights = VectorXd::Ones(m);
  if (m == 0) return out;
  const double rhs_scale = rhs.cwiseAbs().maxCoeff();
  const auto& k = kernels::active();
  VectorXd next(m);
  out.converged = false;
  for (int it = 1; it <= kMaxIrlsIterations; ++it) {
    out.iterations = it;
    const VectorXd sw = out.weights.cwiseSqrt();
    Eigen::ColPivHouseholderQR<MatrixXd> qr(sw.asDiagonal() * stack);
    qr.setThreshold(kRankThreshold);
    const VectorXd x = qr.solve(sw.cwiseProduct(rhs));
    const VectorXd r = rhs - stack * x;
    std::vector<double> abs_r(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) abs_r[static_cast<std::size_t>(i)] = std::fabs(r[i]);
    const double scale = median(abs_r) / kMadToSigma;
    // A numerically exact fit leaves only rounding noise; reweighting on it
    // would be arbitrary.
    if (!(scale > 64.0 * std::numeric_limits<double>::epsilon() * rhs_scale)) {
      out.weights.setOnes();
      out.converged = true;
      return out;
    }
    k.bisquare(r.data(), static_cast<std::size_t>(m), kBisquareTuning * scale, next.data());
    next = next.cwiseMax(kWeightFloor);
    const double change = (next - out.weights).cwiseAbs().maxCoeff();
    out.weights = next;
    if (change < 1e-6) {
      out.converged = true;
      break;
    }
  }
  return out;
}

double equilibrated_condition(const MatrixXd& stack) {
  if (stack.cols() == 0) return 1.0;
  MatrixXd scaled = stack;
  for (Eigen::Index c = 0; c < scaled.cols(); ++c) {
    const double norm = scaled.col(c).norm();
    if (norm == 0.0) return std::numeric_limits<double>::infinity();
    scaled.col(c) /= norm;
  }
  Eigen::JacobiSVD<MatrixXd> svd(scaled);
  const VectorXd& s = svd.singularValues();
  const double smin = s[s.size() - 1];
  if (smin == 0.0 || s.size() < stack.cols()) return std::numeric_limits<double>::infinity();
  return s[0] / smin;
}

namespace {

std::vector<MatrixXd> sample_regressors(const KinematicChain& chain, const SampleSet& set) {
  std::vector<MatrixXd> ys(static_cast<std::size_t>(set.size()));
  for (int k = 0; k < set.size(); ++k) ys[static_cast<std::size_t>(k)] = regressor(chain, set.state(k));
  return ys;
}

void check_samples(const BaseParameterMap& map, const KinematicChain& chain,
                   const SampleSet& samples) {
  check_compatible(map, chain);
  if (samples.dof() != chain.dof()) {
    throw schema_error("samples have " + std::to_string(samples.dof()) +
                       " joints, model has " + std::to_string(chain.dof()));
  }
}

}  // namespace

CurrentCoefficients identify_coefficients(const BaseParameterMap& map,
                                          const KinematicChain& chain,
                                          const SampleSet& samples,
                                          const IdentifyOptions& options) {
  check_samples(map, chain, samples);
  const int n = map.dof;
  const auto mask = linear_region_mask(samples, options.threshold);
  const auto ys = sample_regressors(chain, samples);

  CurrentCoefficients out;
  out.chi = VectorXd::Zero(map.joint_layout_size());
  out.covariance_diag = VectorXd::Zero(map.joint_layout_size());
  for (int j = 0; j < n; ++j) {
    const int cj = map.joints[static_cast<std::size_t>(j)].size();
    const int mj = static_cast<int>(mask.col(j).count());
    if (mj < cj) {
      throw numeric_error("joint " + std::to_string(j + 1) + ": only " + std::to_string(mj) +
                          " samples with |qd| > " + std::to_string(options.threshold) +
                          " rad/s for " + std::to_string(cj) + " coefficients");
    }
    MatrixXd a(mj, cj);
    VectorXd b(mj);
    if (options.current_filter) {
      MatrixXd full(samples.size(), cj);
      for (int k = 0; k < samples.size(); ++k) full.row(k) = joint_row(map, ys[static_cast<std::size_t>(k)], j);
      full = filtfilt(*options.current_filter, full);
      int row = 0;
      for (int k = 0; k < samples.size(); ++k) {
        if (!mask(k, j)) continue;
        a.row(row) = full.row(k);
        b[row] = samples.v(k, j);
        ++row;
      }
    } else {
      int row = 0;
      for (int k = 0; k < samples.size(); ++k) {
        if (!mask(k, j)) continue;
        a.row(row) = joint_row(map, ys[static_cast<std::size_t>(k)], j);
        b[row] = samples.v(k, j);
        ++row;
      }
    }
    const double cond = equilibrated_condition(a);
    if (!(cond <= options.max_condition)) {
      throw numeric_error("joint " + std::to_string(j + 1) +
                          ": regressor stack condition number " + std::to_string(cond) +
                          " exceeds " + std::to_string(options.max_condition) +
                          "; the trajectory is not persistently exciting");
    }
    RobustWeights w;
    w.weights = VectorXd::Ones(mj);
    if (options.robust) w = robust_weights(a, b);
    const VectorXd chi_j = wlse(a, b, w.weights);

    const VectorXd sw = w.weights.cwiseSqrt();
    const MatrixXd aw = sw.asDiagonal() * a;
    const VectorXd rw = sw.cwiseProduct(b - a * chi_j);
    const double sigma2 = mj > cj ? rw.squaredNorm() / (mj - cj) : 0.0;
    const MatrixXd info = aw.transpose() * aw;
    const VectorXd var = sigma2 * info.ldlt().solve(MatrixXd::Identity(cj, cj)).diagonal();

    const int off = map.joint_offset(j);
    out.chi.segment(off, cj) = chi_j;
    out.covariance_diag.segment(off, cj) = var;
    out.samples_used.push_back(mj);
    out.weights.push_back(std::move(w));
  }
  return out;
}

VectorXd predict_currents_from_regressor(const BaseParameterMap& map, const MatrixXd& y,
                                         const VectorXd& chi) {
  if (chi.size() != map.joint_layout_size()) {
    throw schema_error("coefficient vector does not match the base map layout");
  }
  VectorXd v(map.dof);
  for (int j = 0; j < map.dof; ++j) {
    const int cj = map.joints[static_cast<std::size_t>(j)].size();
    v[j] = joint_row(map, y, j).dot(chi.segment(map.joint_offset(j), cj));
  }
  return v;
}

VectorXd predict_currents(const BaseParameterMap& map, const KinematicChain& chain,
                          const VectorXd& chi, const JointState& state) {
  check_compatible(map, chain);
  return predict_currents_from_regressor(map, regressor(chain, state), chi);
}

VectorXd nonfriction_currents(const BaseParameterMap& map, const MatrixXd& y,
                              const VectorXd& chi) {
  if (chi.size() != map.joint_layout_size()) {
    throw schema_error("coefficient vector does not match the base map layout");
  }
  VectorXd v(map.dof);
  for (int j = 0; j < map.dof; ++j) {
    const int rj = map.joints[static_cast<std::size_t>(j)].inertial_size();
    v[j] = joint_row_inertial(map, y, j).dot(chi.segment(map.joint_offset(j), rj));
  }
  return v;
}

MatrixXd friction_residual_currents(const BaseParameterMap& map,
                                    const KinematicChain& chain, const VectorXd& chi,
                                    const SampleSet& samples,
                                    const std::optional<Biquad>& current_filter) {
  check_samples(map, chain, samples);
  MatrixXd predicted(samples.size(), map.dof);
  for (int k = 0; k < samples.size(); ++k) {
    const MatrixXd y = regressor(chain, samples.state(k));
    predicted.row(k) = nonfriction_currents(map, y, chi).transpose();
  }
  if (current_filter) predicted = filtfilt(*current_filter, predicted);
  return samples.v - predicted;
}

VectorXd predict_currents_full(const BaseParameterMap& map, const KinematicChain& chain,
                               const VectorXd& chi, const FrictionSet& psi,
                               const JointState& state) {
  check_compatible(map, chain);
  if (static_cast<int>(psi.size()) != map.dof) {
    throw schema_error("friction set does not match the joint count");
  }
  return nonfriction_currents(map, regressor(chain, state), chi) +
         friction_sigmoid(psi, state.qd);
}

GroundTruthGains ground_truth_gains(const MatrixXd& target_torque,
                                    const MatrixXd& target_current) {
  if (target_torque.rows() != target_current.rows() ||
      target_torque.cols() != target_current.cols()) {
    throw schema_error("torque and current series differ in shape");
  }
  const Eigen::Index n = target_torque.cols();
  GroundTruthGains out;
  out.K.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double sum = 0.0;
    int used = 0;
    for (Eigen::Index k = 0; k < target_torque.rows(); ++k) {
      if (target_current(k, j) == 0.0) continue;
      sum += target_torque(k, j) / target_current(k, j);
      ++used;
    }
    out.rejected.push_back(static_cast<int>(target_torque.rows()) - used);
    if (used == 0) {
      throw numeric_error("joint " + std::to_string(j + 1) +
                          ": every sample has zero target current");
    }
    out.K[j] = sum / used;
  }
  return out;
}

}  // namespace dynid
