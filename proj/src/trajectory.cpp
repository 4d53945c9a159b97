#include "dynid/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SVD>

#include "dynid/errors.hpp"
#include "dynid/random.hpp"

namespace dynid {

JointLimits ur10_limits() {
  JointLimits l;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  l.position = VectorXd::Constant(6, kTwoPi);
  l.velocity.resize(6);
  l.velocity << 2.0944, 2.0944, 3.1416, 3.1416, 3.1416, 3.1416;
  l.acceleration.resize(6);
  l.acceleration << 10.0, 10.0, 15.0, 20.0, 20.0, 20.0;
  return l;
}

void validate(const FourierTrajectory& traj) {
  if (traj.harmonics() < 1) throw usage_error("trajectory needs at least one harmonic");
  if (traj.a.rows() != traj.dof() || traj.b.rows() != traj.dof() ||
      traj.a.cols() != traj.b.cols()) {
    throw schema_error("Fourier coefficient shapes disagree with q0");
  }
  if (!(traj.sample_period > 0.0) || !(traj.period > 0.0) || !(traj.duration > 0.0)) {
    throw usage_error("trajectory periods and duration must be positive");
  }
  const double ratio = traj.period / traj.sample_period;
  if (std::fabs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw usage_error("fundamental period must be an integer multiple of the sample period");
  }
}

JointState evaluate(const FourierTrajectory& traj, double t) {
  const int n = traj.dof();
  JointState s{traj.q0, VectorXd::Zero(n), VectorXd::Zero(n)};
  const double w = 2.0 * std::numbers::pi / traj.period;
  for (int k = 1; k <= traj.harmonics(); ++k) {
    const double kw = k * w;
    const double sk = std::sin(kw * t);
    const double ck = std::cos(kw * t);
    const VectorXd a = traj.a.col(k - 1);
    const VectorXd b = traj.b.col(k - 1);
    s.q += a * sk + b * ck;
    s.qd += kw * (a * ck - b * sk);
    s.qdd += -(kw * kw) * (a * sk + b * ck);
  }
  return s;
}

TrajectorySampling sample(const FourierTrajectory& traj) {
  validate(traj);
  const double exact = traj.duration / traj.sample_period;
  const auto count = static_cast<Eigen::Index>(std::floor(exact + 1e-9));
  if (count < 2) throw usage_error("trajectory shorter than two samples");
  TrajectorySampling out;
  out.truncated = std::fabs(exact - static_cast<double>(count)) > 1e-9;
  const int n = traj.dof();
  SampleSet& s = out.samples;
  s.t.resize(count);
  s.q.resize(count, n);
  s.qd.resize(count, n);
  s.qdd.resize(count, n);
  s.v = MatrixXd::Zero(count, n);
  for (Eigen::Index k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) * traj.sample_period;
    const JointState st = evaluate(traj, t);
    s.t[k] = t;
    s.q.row(k) = st.q.transpose();
    s.qd.row(k) = st.qd.transpose();
    s.qdd.row(k) = st.qdd.transpose();
  }
  return out;
}

FourierTrajectory random_trajectory(const JointLimits& limits, std::uint64_t seed,
                                    const TrajectoryOptions& options) {
  const int n = limits.dof();
  if (options.harmonics < 1) throw usage_error("trajectory needs at least one harmonic");
  if (!(options.limit_fraction > 0.0 && options.limit_fraction <= 1.0)) {
    throw usage_error("limit fraction must lie in (0, 1]");
  }
  Rng rng(seed);
  FourierTrajectory traj;
  traj.period = options.period;
  traj.duration = options.duration;
  traj.sample_period = 1.0 / options.rate_hz;
  traj.q0.resize(n);
  traj.a.resize(n, options.harmonics);
  traj.b.resize(n, options.harmonics);
  for (int j = 0; j < n; ++j) {
    const double room = std::max(0.0, options.limit_fraction * limits.position[j] - options.position_span);
    traj.q0[j] = rng.uniform(-std::min(room, 0.5), std::min(room, 0.5));
    for (int k = 1; k <= options.harmonics; ++k) {
      traj.a(j, k - 1) = rng.normal() / k;
      traj.b(j, k - 1) = rng.normal() / k;
    }
  }

  // Peaks of the unscaled series: coarse grid over one period, then a
  // golden-section search around the best grid point.
  constexpr int kGrid = 4000;
  FourierTrajectory centered = traj;
  centered.q0.setZero();
  const double step = traj.period / kGrid;
  MatrixXd best = MatrixXd::Zero(n, 3), at = MatrixXd::Zero(n, 3);
  for (int g = 0; g < kGrid; ++g) {
    const JointState st = evaluate(centered, step * g);
    for (int j = 0; j < n; ++j) {
      const double v[3] = {std::fabs(st.q[j]), std::fabs(st.qd[j]), std::fabs(st.qdd[j])};
      for (int c = 0; c < 3; ++c) {
        if (v[c] > best(j, c)) {
          best(j, c) = v[c];
          at(j, c) = step * g;
        }
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int c = 0; c < 3; ++c) {
      const auto value = [&](double t) {
        const JointState st = evaluate(centered, t);
        return std::fabs(c == 0 ? st.q[j] : c == 1 ? st.qd[j] : st.qdd[j]);
      };
      const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
      double lo = at(j, c) - step, hi = at(j, c) + step;
      double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
      double f1 = value(x1), f2 = value(x2);
      for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + ratio * (hi - lo);
          f2 = value(x2);
        } else {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - ratio * (hi - lo);
          f1 = value(x1);
        }
      }
      best(j, c) = std::max({best(j, c), f1, f2});
    }
  }
  const VectorXd peak_q = best.col(0), peak_qd = best.col(1), peak_qdd = best.col(2);
  for (int j = 0; j < n; ++j) {
    double scale = options.position_span / peak_q[j];
    scale = std::min(scale, options.limit_fraction * limits.velocity[j] / peak_qd[j]);
    scale = std::min(scale, options.limit_fraction * limits.acceleration[j] / peak_qdd[j]);
    traj.a.row(j) *= scale;
    traj.b.row(j) *= scale;
  }
  return traj;
}

FourierTrajectory named_trajectory(const std::string& name, const JointLimits& limits) {
  if (name == "A") return random_trajectory(limits, 0xA11CEULL);
  if (name == "B") return random_trajectory(limits, 0xB0B5ULL);
  throw usage_error("unknown built-in trajectory '" + name + "' (expected A or B)");
}

ExcitationScore excitation_score(const BaseParameterMap& map, const KinematicChain& chain,
                                 const FourierTrajectory& traj, const JointLimits& limits) {
  check_compatible(map, chain);
  if (limits.dof() != chain.dof() || traj.dof() != chain.dof()) {
    throw schema_error("limits or trajectory do not match the chain");
  }
  const SampleSet s = sample(traj).samples;
  const int n = chain.dof();
  MatrixXd stack(static_cast<Eigen::Index>(s.size()) * n, map.n_coeff());
  for (int k = 0; k < s.size(); ++k) {
    stack.middleRows(static_cast<Eigen::Index>(k) * n, n) = minimal_regressor(map, chain, s.state(k));
  }
  ExcitationScore score;
  Eigen::BDCSVD<MatrixXd> svd(stack);
  const VectorXd& sv = svd.singularValues();
  const double smax = sv[0];
  const double smin = sv[sv.size() - 1];
  score.rank_deficient = !(smin > map.svd_tolerance * smax);
  score.condition = score.rank_deficient ? std::numeric_limits<double>::infinity() : smax / smin;

  const struct {
    const MatrixXd* series;
    const VectorXd* limit;
    const char* name;
  } checks[] = {{&s.q, &limits.position, "position"},
                {&s.qd, &limits.velocity, "velocity"},
                {&s.qdd, &limits.acceleration, "acceleration"}};
  for (const auto& c : checks) {
    for (int j = 0; j < n; ++j) {
      const double peak = c.series->col(j).cwiseAbs().maxCoeff();
      if (peak > (*c.limit)[j]) {
        score.violations.push_back({j + 1, c.name, peak, (*c.limit)[j]});
      }
    }
  }
  score.feasible = score.violations.empty();
  return score;
}

}  // namespace dynid
