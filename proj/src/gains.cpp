#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "dynid/errors.hpp"
#include "dynid/estimation.hpp"

namespace dynid {

namespace {

struct JointSystem {
  MatrixXd s;
  VectorXd rhs;
};

/// One scenario's rows of S_j and v - v_Psi over the whole series. Payload
/// columns stay zero for scenario a.
void scenario_series(const BaseParameterMap& map, int j, const std::vector<MatrixXd>& ys,
                     const SampleSet& set, const PayloadKnowledge* payload,
                     const JointFriction& f, int cols, MatrixXd& s, VectorXd& rhs) {
  const int rj = map.joints[static_cast<std::size_t>(j)].inertial_size();
  const int last = kLinkParams * (map.dof - 1);
  s = MatrixXd::Zero(set.size(), cols);
  rhs.resize(set.size());
  for (int k = 0; k < set.size(); ++k) {
    const MatrixXd& y = ys[static_cast<std::size_t>(k)];
    s.block(k, 0, 1, rj) = joint_row_inertial(map, y, j);
    if (payload) {
      int col = rj;
      double known = 0.0;
      for (int p = 0; p < kLinkParams; ++p) {
        const double yp = y(j, last + p);
        if (payload->known[static_cast<std::size_t>(p)]) {
          known += yp * payload->values[p];
        } else {
          s(k, col++) = yp;
        }
      }
      s(k, cols - 1) = known;
    }
    rhs[k] = friction_sigmoid(f, set.qd(k, j));
  }
}

/// S_j and v - v_Psi on the linearity-region samples of both scenarios.
/// Column layout: [u_f (r_j) | unknown payload columns (N_u) | known column].
JointSystem assemble(const BaseParameterMap& map, int j,
                     const std::vector<MatrixXd>& ys_a, const SampleSet& a,
                     const std::vector<MatrixXd>& ys_b, const SampleSet& b,
                     const PayloadKnowledge& payload, const FrictionSet& psi,
                     const GainOptions& options) {
  const int rj = map.joints[static_cast<std::size_t>(j)].inertial_size();
  const int cols = rj + payload.n_unknown() + 1;
  const JointFriction& f = psi[static_cast<std::size_t>(j)];

  int rows = 0;
  for (int k = 0; k < a.size(); ++k) rows += std::fabs(a.qd(k, j)) > options.threshold ? 1 : 0;
  for (int k = 0; k < b.size(); ++k) rows += std::fabs(b.qd(k, j)) > options.threshold ? 1 : 0;

  JointSystem sys{MatrixXd(rows, cols), VectorXd(rows)};
  int row = 0;
  for (const SampleSet* set : {&a, &b}) {
    const bool loaded = set == &b;
    MatrixXd s;
    VectorXd friction;
    scenario_series(map, j, loaded ? ys_b : ys_a, *set, loaded ? &payload : nullptr, f, cols, s,
                    friction);
    if (options.current_filter) {
      s = filtfilt(*options.current_filter, s);
      friction = filtfilt(*options.current_filter, friction);
    }
    for (int k = 0; k < set->size(); ++k) {
      if (!(std::fabs(set->qd(k, j)) > options.threshold)) continue;
      sys.s.row(row) = s.row(k);
      sys.rhs[row] = set->v(k, j) - friction[k];
      ++row;
    }
  }
  return sys;
}

/// Least squares over all columns but `fixed`, whose value is imposed;
/// minimum norm among the remaining coordinates.
VectorXd solve_with_fixed(const MatrixXd& s, const VectorXd& rhs, int fixed, double value) {
  const Eigen::Index cols = s.cols();
  MatrixXd reduced(s.rows(), cols - 1);
  reduced << s.leftCols(fixed), s.rightCols(cols - 1 - fixed);
  const VectorXd rest = reduced.completeOrthogonalDecomposition().solve(rhs - s.col(fixed) * value);
  VectorXd out(cols);
  out << rest.head(fixed), value, rest.tail(cols - 1 - fixed);
  return out;
}

double clamp_gain(double inv_k, double lower, double upper) {
  if (!(inv_k > 0.0)) return std::isfinite(upper) ? upper : lower;
  return std::clamp(1.0 / inv_k, lower, upper);
}

}  // namespace

GainEstimate estimate_gains(const BaseParameterMap& map, const KinematicChain& chain,
                            const SampleSet& samples_a, const SampleSet& samples_b,
                            const PayloadKnowledge& payload, const FrictionSet& psi,
                            const GainOptions& options) {
  check_compatible(map, chain);
  const int n = map.dof;
  if (samples_a.dof() != n || samples_b.dof() != n) {
    throw schema_error("sample sets do not match the joint count");
  }
  if (static_cast<int>(psi.size()) != n) throw schema_error("friction set does not match joints");
  if (samples_a.scenario != Scenario::kNoPayload || samples_b.scenario != Scenario::kPayload) {
    throw usage_error("gain estimation needs scenario-a samples without payload and "
                      "scenario-b samples with payload");
  }
  const int nu = payload.n_unknown();
  if (nu > 9) {
    throw usage_error("at least one payload parameter must be known (N_u <= 9)");
  }
  if (!(options.lower_bound > 0.0)) throw usage_error("gain lower bound must be positive");

  std::vector<MatrixXd> ys_a, ys_b;
  ys_a.reserve(static_cast<std::size_t>(samples_a.size()));
  ys_b.reserve(static_cast<std::size_t>(samples_b.size()));
  for (int k = 0; k < samples_a.size(); ++k) ys_a.push_back(regressor(chain, samples_a.state(k)));
  for (int k = 0; k < samples_b.size(); ++k) ys_b.push_back(regressor(chain, samples_b.state(k)));

  GainEstimate out;
  out.K = VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    const std::string who = "joint " + std::to_string(j + 1) + ": ";
    JointSystem sys = assemble(map, j, ys_a, samples_a, ys_b, samples_b, payload, psi, options);
    const Eigen::Index cols = sys.s.cols();
    const int k_col = static_cast<int>(cols) - 1;
    if (sys.s.rows() < cols) {
      throw numeric_error(who + "too few linearity-region samples for gain estimation");
    }
    if (!sys.s.allFinite() || !sys.rhs.allFinite()) {
      throw numeric_error(who + "non-finite gain regression data");
    }
    const int rj = map.joints[static_cast<std::size_t>(j)].inertial_size();
    if (nu > 0) {
      const double floor = 1e-12 * std::max(1.0, sys.s.cwiseAbs().maxCoeff()) *
                           std::sqrt(static_cast<double>(sys.s.rows()));
      bool any = false;
      for (int c = rj; c < rj + nu; ++c) any = any || sys.s.col(c).norm() > floor;
      if (!any) throw numeric_error(who + "payload is not exciting: all unknown-parameter columns vanish");
    }

    JointGain g;
    g.columns = static_cast<int>(cols);
    g.lower = options.lower_bound;
    g.upper = j == 0 ? std::numeric_limits<double>::infinity() : out.K.head(j).maxCoeff();

    RobustWeights w;
    w.weights = VectorXd::Ones(sys.s.rows());
    if (options.robust) w = robust_weights(sys.s, sys.rhs);
    const VectorXd sw = w.weights.cwiseSqrt();
    const MatrixXd sw_s = sw.asDiagonal() * sys.s;
    const VectorXd sw_b = sw.cwiseProduct(sys.rhs);

    Eigen::ColPivHouseholderQR<MatrixXd> qr(sw_s);
    qr.setThreshold(options.rank_tolerance);
    const int rank = static_cast<int>(qr.rank());
    g.rank = rank;
    g.identifiable.assign(static_cast<std::size_t>(cols), false);

    if (rank == cols && !options.force_regrouped) {
      g.zeta = wlse(sys.s, sys.rhs, w.weights);
      std::fill(g.identifiable.begin(), g.identifiable.end(), true);
      if (!(g.zeta[k_col] > 0.0)) {
        throw numeric_error(who + "estimated 1/K is not positive (" +
                            std::to_string(g.zeta[k_col]) + ")");
      }
      g.K = 1.0 / g.zeta[k_col];
    } else {
      g.regrouped = true;
      if (!(g.lower < g.upper)) {
        throw numeric_error(who + "gain bounds are infeasible: lower " +
                            std::to_string(g.lower) + " >= upper " + std::to_string(g.upper));
      }
      // Regrouped coordinates lambda = phi + R_phi^-1 R_phibar phibar.
      const MatrixXd r_full = qr.matrixR().topRows(rank).template triangularView<Eigen::Upper>();
      const MatrixXd r_phi = r_full.leftCols(rank);
      const MatrixXd coupling =
          r_phi.triangularView<Eigen::Upper>().solve(r_full.rightCols(cols - rank));
      const VectorXd qtb = (qr.householderQ().transpose() * sw_b).head(rank);
      const VectorXd lambda = r_phi.triangularView<Eigen::Upper>().solve(qtb);
      const auto& perm = qr.colsPermutation().indices();
      int k_pos = -1;
      const double tol =
          1e-8 * std::max(1.0, coupling.size() > 0 ? coupling.cwiseAbs().maxCoeff() : 0.0);
      for (int p = 0; p < rank; ++p) {
        const bool free_of_null = coupling.cols() == 0 || coupling.row(p).cwiseAbs().maxCoeff() <= tol;
        g.identifiable[static_cast<std::size_t>(perm[p])] = free_of_null;
        if (perm[p] == k_col) k_pos = p;
      }
      g.gain_identifiable = k_pos >= 0 && g.identifiable[static_cast<std::size_t>(k_col)];

      double inv_k = 0.0;
      if (g.gain_identifiable) {
        inv_k = lambda[k_pos];
        g.zeta = sw_s.completeOrthogonalDecomposition().solve(sw_b);
        g.zeta[k_col] = inv_k;
      } else {
        g.zeta = sw_s.completeOrthogonalDecomposition().solve(sw_b);
        inv_k = g.zeta[k_col];
      }
      g.K = clamp_gain(inv_k, g.lower, g.upper);
      // Active set on the single bounded coordinate.
      if (!(inv_k > 0.0) || g.K != 1.0 / inv_k) {
        g.clamped = true;
        g.zeta = solve_with_fixed(sw_s, sw_b, k_col, 1.0 / g.K);
      }
    }
    out.K[j] = g.K;
    out.joints.push_back(std::move(g));
  }
  return out;
}

}  // namespace dynid
