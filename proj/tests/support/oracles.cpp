#include "oracles.hpp"

#include <cmath>
#include <numbers>

namespace dynid::testing {

InertialParameters random_link(Rng& rng) {
  const double mass = rng.uniform(0.5, 5.0);
  const Vector3d com(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2));
  Matrix3d a;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) a(i, k) = rng.uniform(-0.1, 0.1);
  }
  const Matrix3d ic = a * a.transpose() + 0.01 * Matrix3d::Identity();
  return InertialParameters::from_com_inertia(mass, com, ic);
}

std::vector<InertialParameters> random_links(Rng& rng, int n) {
  std::vector<InertialParameters> out;
  for (int i = 0; i < n; ++i) out.push_back(random_link(rng));
  return out;
}

JointState random_state(Rng& rng, int n) {
  JointState s{VectorXd(n), VectorXd(n), VectorXd(n)};
  for (int j = 0; j < n; ++j) {
    s.q[j] = rng.uniform(-std::numbers::pi, std::numbers::pi);
    s.qd[j] = rng.uniform(-2.0, 2.0);
    s.qdd[j] = rng.uniform(-5.0, 5.0);
  }
  return s;
}

PayloadSpec random_payload(Rng& rng) {
  PayloadSpec p;
  p.mass = rng.uniform(0.1, 5.0);
  p.com_l = Vector3d(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(0.0, 0.2));
  Matrix3d a;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) a(i, k) = rng.uniform(-0.05, 0.05);
  }
  p.inertia_l = a * a.transpose() + 1e-3 * Matrix3d::Identity();
  const Vector3d axis = Vector3d(rng.normal(), rng.normal(), rng.normal()).normalized();
  p.rotation = Eigen::AngleAxisd(rng.uniform(-3.0, 3.0), axis).toRotationMatrix();
  p.translation = Vector3d(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), rng.uniform(0.0, 0.1));
  return p;
}

Eigen::Matrix4d hand_chained_pose(const KinematicChain& chain, const VectorXd& q, int i) {
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  for (int k = 0; k < i; ++k) {
    const DhRow& r = chain.rows[static_cast<std::size_t>(k)];
    const double th = q[k] + r.joint_offset;
    const double ct = std::cos(th), st = std::sin(th), ca = std::cos(r.alpha), sa = std::sin(r.alpha);
    Eigen::Matrix4d a;
    a << ct, -st * ca, st * sa, r.a * ct,
         st, ct * ca, -ct * sa, r.a * st,
         0.0, sa, ca, r.d,
         0.0, 0.0, 0.0, 1.0;
    t = t * a;
  }
  return t;
}

MatrixXd energy_inertia(const KinematicChain& chain,
                        const std::vector<InertialParameters>& links, const VectorXd& q) {
  const int n = chain.dof();
  MatrixXd m = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const InertialParameters& l = links[static_cast<std::size_t>(i)];
    const MatrixXd j = point_jacobian(chain, q, i + 1, l.com);
    const Matrix3d r = hand_chained_pose(chain, q, i + 1).topLeftCorner<3, 3>();
    const Matrix3d ic = r * l.inertia_com() * r.transpose();
    m += l.mass * j.topRows(3).transpose() * j.topRows(3) + j.bottomRows(3).transpose() * ic * j.bottomRows(3);
  }
  return m;
}

namespace {

double potential(const KinematicChain& chain, const std::vector<InertialParameters>& links,
                 const VectorXd& q) {
  double v = 0.0;
  for (int i = 0; i < chain.dof(); ++i) {
    const InertialParameters& l = links[static_cast<std::size_t>(i)];
    const Eigen::Matrix4d t = hand_chained_pose(chain, q, i + 1);
    const Vector3d c = t.topLeftCorner<3, 3>() * l.com + t.topRightCorner<3, 1>();
    v -= l.mass * chain.gravity.dot(c);
  }
  return v;
}

}  // namespace

VectorXd lagrangian_torque(const KinematicChain& chain,
                           const std::vector<InertialParameters>& links,
                           const JointState& s) {
  const int n = chain.dof();
  constexpr double h = 1e-5;
  const MatrixXd m = energy_inertia(chain, links, s.q);
  const MatrixXd mdot = (energy_inertia(chain, links, s.q + h * s.qd) -
                         energy_inertia(chain, links, s.q - h * s.qd)) / (2.0 * h);
  VectorXd dt(n), dv(n);
  for (int i = 0; i < n; ++i) {
    VectorXd e = VectorXd::Zero(n);
    e[i] = h;
    const MatrixXd dm = (energy_inertia(chain, links, s.q + e) - energy_inertia(chain, links, s.q - e)) / (2.0 * h);
    dt[i] = 0.5 * s.qd.dot(dm * s.qd);
    dv[i] = (potential(chain, links, s.q + e) - potential(chain, links, s.q - e)) / (2.0 * h);
  }
  return m * s.qdd + mdot * s.qd - dt + dv;
}

double sigmoid_direct(const JointFriction& p, double qd) {
  return p.offset + p.viscous * qd + p.magnitude / (1.0 + std::exp(-p.steepness * (p.shift + qd)));
}

VectorXd exact_linear_chi(const RobotModel& truth, const BaseParameterMap& map) {
  DynamicParameters params = truth.dynamic_parameters();
  for (int j = 0; j < truth.dof(); ++j) {
    const JointFriction& f = truth.friction[static_cast<std::size_t>(j)];
    params.friction(j) << f.offset, f.viscous, f.magnitude;
  }
  VectorXd chi = map.joint_coefficients(map.coefficients(params.values()));
  for (int j = 0; j < truth.dof(); ++j) {
    chi.segment(map.joint_offset(j), map.joints[static_cast<std::size_t>(j)].size()) /= truth.gains[j];
  }
  return chi;
}

TrajectoryOptions rich_options() {
  TrajectoryOptions o;
  o.harmonics = 80;
  o.period = 160.0;
  o.duration = 160.0;
  o.limit_fraction = 0.9;
  o.position_span = 2.5;
  return o;
}

}  // namespace dynid::testing
