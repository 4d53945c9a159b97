#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <Eigen/QR>

#include "dynid/errors.hpp"
#include "dynid/estimation.hpp"
#include "dynid/kernels.hpp"

namespace dynid {

namespace {

using Vector5d = Eigen::Matrix<double, 5, 1>;

kernels::SigmoidParams to_kernel(const Vector5d& p) {
  return kernels::SigmoidParams{p[0], p[1], p[2], p[3], p[4]};
}

/// Region samples of one joint. With a filter the sigmoid is evaluated on
/// the whole series and filtered before the region rows are taken.
struct Problem {
  VectorXd qd;  // region samples
  VectorXd y;
  VectorXd qd_all;
  std::vector<Eigen::Index> idx;
  std::optional<Biquad> filter;

  Eigen::Index size() const { return qd.size(); }

  VectorXd select(const MatrixXd& full_col) const {
    VectorXd out(size());
    for (Eigen::Index i = 0; i < size(); ++i) out[i] = full_col(idx[static_cast<std::size_t>(i)], 0);
    return out;
  }

  void values(const Vector5d& p, VectorXd& out) const {
    const auto& k = kernels::active();
    if (!filter) {
      k.sigmoid_eval(qd.data(), static_cast<std::size_t>(size()), to_kernel(p), out.data());
      return;
    }
    MatrixXd full(qd_all.size(), 1);
    k.sigmoid_eval(qd_all.data(), static_cast<std::size_t>(qd_all.size()), to_kernel(p), full.data());
    out = select(filtfilt(*filter, full));
  }

  void jacobian(const Vector5d& p, VectorXd& value, MatrixXd& jac) const {
    const auto& k = kernels::active();
    if (!filter) {
      k.sigmoid_jacobian(qd.data(), static_cast<std::size_t>(size()), to_kernel(p), value.data(),
                         jac.data());
      return;
    }
    const Eigen::Index n = qd_all.size();
    MatrixXd full(n, 6);
    k.sigmoid_jacobian(qd_all.data(), static_cast<std::size_t>(n), to_kernel(p), full.col(0).data(),
                       full.rightCols(5).data());
    full = filtfilt(*filter, full);
    for (Eigen::Index i = 0; i < size(); ++i) {
      const Eigen::Index r = idx[static_cast<std::size_t>(i)];
      value[i] = full(r, 0);
      jac.row(i) = full.block(r, 1, 1, 5);
    }
  }

  double objective(const Vector5d& p, VectorXd& scratch) const {
    values(p, scratch);
    return kernels::active().sum_sq_diff(scratch.data(), y.data(), static_cast<std::size_t>(size()));
  }
};

/// Same physical curve with the sigmoid flipped: f_c s(x) == f_c - f_c s(-x).
Vector5d mirror(const Vector5d& p) {
  Vector5d m = p;
  m[0] = p[0] + p[2];
  m[2] = -p[2];
  m[3] = -p[3];
  return m;
}

struct LmResult {
  Vector5d p;
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> history;
};

LmResult levenberg_marquardt(Vector5d p, const Problem& prob, int max_iterations) {
  const Eigen::Index m = prob.size();
  VectorXd value(m), scratch(m);
  MatrixXd jac(m, 5);
  MatrixXd augmented(m + 5, 5);
  VectorXd rhs(m + 5);

  LmResult out;
  double f = prob.objective(p, scratch);
  out.p = p;
  out.objective = f;
  if (!std::isfinite(f)) return out;
  out.history.push_back(f);

  double mu = -1.0;
  for (int it = 0; it < max_iterations; ++it) {
    prob.jacobian(p, value, jac);
    const VectorXd r = value - prob.y;
    Vector5d d = jac.colwise().norm().transpose();
    const double dmax = d.maxCoeff();
    d = d.cwiseMax(1e-12 * (dmax > 0.0 ? dmax : 1.0));
    if (mu < 0.0) mu = 1e-3;

    bool accepted = false;
    Vector5d step = Vector5d::Zero();
    while (!accepted && mu < 1e20) {
      augmented.topRows(m) = jac;
      augmented.bottomRows(5) = (std::sqrt(mu) * d).asDiagonal();
      rhs.head(m) = -r;
      rhs.tail(5).setZero();
      step = augmented.colPivHouseholderQr().solve(rhs);
      const Vector5d trial = p + step;
      const double f_trial = prob.objective(trial, scratch);
      if (std::isfinite(f_trial) && f_trial < f) {
        const double decrease = f - f_trial;
        p = trial;
        accepted = true;
        mu = std::max(mu / 3.0, 1e-15);
        out.iterations = it + 1;
        out.history.push_back(f_trial);
        const bool small_gain = decrease <= 1e-15 * f;
        f = f_trial;
        if (small_gain || step.norm() <= 1e-13 * (p.norm() + 1e-13)) {
          out.p = p;
          out.objective = f;
          return out;
        }
      } else {
        mu *= 4.0;
      }
    }
    if (!accepted) break;  // no descent direction left at any damping
  }
  out.p = p;
  out.objective = f;
  return out;
}

/// f_o and f_v by linear least squares with the sigmoid part held fixed.
Vector5d seeded_start(double magnitude, double steepness, const Problem& prob) {
  Vector5d p;
  p << 0.0, 0.0, magnitude, steepness, 0.0;
  VectorXd sig(prob.size());
  prob.values(p, sig);
  MatrixXd a(prob.size(), 2);
  a.col(0).setOnes();
  if (prob.filter) {
    MatrixXd qd_col = prob.qd_all;
    a.col(1) = prob.select(filtfilt(*prob.filter, qd_col));
  } else {
    a.col(1) = prob.qd;
  }
  const Eigen::Vector2d affine = a.colPivHouseholderQr().solve(prob.y - sig);
  p[0] = affine[0];
  p[1] = affine[1];
  return p;
}

}  // namespace

double friction_objective(const JointFriction& psi, const VectorXd& qd,
                          const VectorXd& residual) {
  if (qd.size() != residual.size()) throw schema_error("velocity and residual lengths differ");
  Problem prob;
  prob.qd = qd;
  prob.y = residual;
  VectorXd scratch(qd.size());
  return prob.objective(psi.as_vector(), scratch);
}

JointFrictionFit fit_joint_friction(const VectorXd& qd_all, const VectorXd& residual_all,
                                    const FrictionFitOptions& options) {
  if (qd_all.size() != residual_all.size()) {
    throw schema_error("velocity and residual lengths differ");
  }
  if (!(options.threshold > 0.0)) throw usage_error("velocity threshold must be positive");
  std::vector<Eigen::Index> idx;
  for (Eigen::Index k = 0; k < qd_all.size(); ++k) {
    if (std::fabs(qd_all[k]) < options.threshold) idx.push_back(k);
  }
  const auto m = static_cast<Eigen::Index>(idx.size());
  if (m < options.min_samples) {
    throw numeric_error("only " + std::to_string(m) + " samples with |qd| < " +
                        std::to_string(options.threshold) + " rad/s (need " +
                        std::to_string(options.min_samples) +
                        "); excite the joint more richly at low velocity");
  }
  Problem prob;
  prob.qd.resize(m);
  prob.y.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    prob.qd[i] = qd_all[idx[static_cast<std::size_t>(i)]];
    prob.y[i] = residual_all[idx[static_cast<std::size_t>(i)]];
  }
  if (!prob.qd.allFinite() || !prob.y.allFinite()) throw numeric_error("non-finite friction residuals");
  if (options.current_filter) {
    if (!qd_all.allFinite()) throw numeric_error("non-finite joint velocities");
    prob.qd_all = qd_all;
    prob.filter = options.current_filter;
  }
  prob.idx = std::move(idx);
  const VectorXd& y = prob.y;

  double range = y.maxCoeff() - y.minCoeff();
  if (!(range > 0.0)) range = 1.0;

  JointFrictionFit fit;
  fit.samples = static_cast<int>(m);
  double best = std::numeric_limits<double>::infinity();
  Vector5d best_p = Vector5d::Zero();
  std::vector<double> best_history;
  const double tie_floor = 1e-18 * y.squaredNorm();
  for (double scale : {4.0, 40.0}) {
    for (double dsign : {1.0, -1.0}) {
      for (double csign : {1.0, -1.0}) {
        const Vector5d start =
            seeded_start(csign * range, dsign * scale / options.threshold, prob);
        LmResult res = levenberg_marquardt(start, prob, options.max_iterations);
        StartReport report;
        report.start = JointFriction::from_vector(start);
        report.objective = res.objective;
        report.iterations = res.iterations;
        report.finite = std::isfinite(res.objective) && res.p.allFinite();
        Vector5d candidate = res.p;
        if (mirror(candidate).norm() < candidate.norm()) candidate = mirror(candidate);
        report.result = JointFriction::from_vector(candidate);
        fit.starts.push_back(report);
        if (!report.finite) continue;
        const double tie = 1e-9 * std::min(best, res.objective) + tie_floor;
        const bool better = res.objective < best - tie;
        const bool tied = std::fabs(res.objective - best) <= tie;
        if (better || (tied && candidate.norm() < best_p.norm())) {
          best = std::min(best, res.objective);
          best_p = candidate;
          best_history = res.history;
        }
      }
    }
  }
  // Plain affine law. It takes precedence on a tie: without a step in the
  // data a flat sigmoid (tiny delta) fits just as well and is not unique.
  {
    const Vector5d affine = seeded_start(0.0, 0.0, prob);
    VectorXd scratch(m);
    const double f = prob.objective(affine, scratch);
    const double tie = 1e-9 * std::min(best, f) + tie_floor;
    if (std::isfinite(f) && f <= best + tie) {
      best = std::min(best, f);
      best_p = affine;
      best_history = {f};
    }
  }
  if (!std::isfinite(best)) {
    std::ostringstream msg;
    msg << "friction fit diverged from every start:";
    for (const auto& s : fit.starts) {
      msg << " [delta0=" << s.start.steepness << " fc0=" << s.start.magnitude
          << " objective=" << s.objective << "]";
    }
    throw numeric_error(msg.str());
  }
  fit.psi = JointFriction::from_vector(best_p);
  VectorXd scratch(m);
  fit.objective = prob.objective(best_p, scratch);
  fit.history = std::move(best_history);
  return fit;
}

FrictionFit fit_friction(const MatrixXd& qd, const MatrixXd& residuals,
                         const FrictionFitOptions& options) {
  if (qd.rows() != residuals.rows() || qd.cols() != residuals.cols()) {
    throw schema_error("velocity and residual series differ in shape");
  }
  FrictionFit out;
  for (Eigen::Index j = 0; j < qd.cols(); ++j) {
    try {
      out.joints.push_back(fit_joint_friction(qd.col(j), residuals.col(j), options));
    } catch (const Error& e) {
      throw Error(e.kind(), "joint " + std::to_string(j + 1) + ": " + e.what());
    }
    out.psi.push_back(out.joints.back().psi);
  }
  return out;
}

}  // namespace dynid
