#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "dynid/dynamics.hpp"
#include "dynid/errors.hpp"
#include "oracles.hpp"

namespace dynid {
namespace {

KinematicChain pendulum_chain() {
  KinematicChain c;
  c.rows.push_back(make_dh_row(0, 0, 0));
  c.gravity = Vector3d(0, -kStandardGravity, 0);
  return c;
}

std::vector<InertialParameters> point_mass() {
  return {InertialParameters::from_com_inertia(2.0, {0.5, 0, 0}, Matrix3d::Zero())};
}

DynamicParameters random_params(Rng& rng, int n) {
  DynamicParameters p = DynamicParameters::from_links(testing::random_links(rng, n));
  for (int j = 0; j < n; ++j) p.friction(j) << rng.uniform(-1, 1), rng.uniform(0, 2), rng.uniform(-2, 2);
  return p;
}

TEST(InertialParameters, SteinerRoundTrip) {
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const InertialParameters l = testing::random_link(rng);
    const Matrix3d ic = l.inertia_com();
    const InertialParameters back = InertialParameters::from_com_inertia(l.mass, l.com, ic);
    EXPECT_LT((back.inertia_origin - l.inertia_origin).cwiseAbs().maxCoeff(), 1e-12);
    const InertialParameters fb = InertialParameters::from_block(l.block());
    EXPECT_NEAR(fb.mass, l.mass, 1e-15);
    EXPECT_LT((fb.com - l.com).norm(), 1e-14);
    EXPECT_LT((l.inertia_origin - l.inertia_origin.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(DynamicParameters, LayoutIsInertialThenFriction) {
  DynamicParameters p(6);
  EXPECT_EQ(p.values().size(), 13 * 6);
  EXPECT_EQ(DynamicParameters::link_column(2, 0), 20);
  EXPECT_EQ(p.friction_column(0, 0), 60);
  EXPECT_EQ(p.friction_column(5, 2), 77);
  EXPECT_THROW(DynamicParameters(6, VectorXd::Zero(77)), Error);
}

TEST(Rnea, ZeroParametersGiveZeroTorque) {
  Rng rng(2);
  const DynamicParameters p(6);
  EXPECT_EQ(rnea(ur10_chain(), p, testing::random_state(rng, 6)), VectorXd::Zero(6));
}

TEST(Rnea, PendulumHoldingTorque) {
  const KinematicChain c = pendulum_chain();
  const VectorXd tau = rnea(c, point_mass(), JointState::zero(1));
  EXPECT_NEAR(tau[0], 9.80665, 1e-12);
  for (double q : {0.3, 1.2, -2.0}) {
    const JointState s{VectorXd::Constant(1, q), VectorXd::Zero(1), VectorXd::Zero(1)};
    EXPECT_NEAR(rnea(c, point_mass(), s)[0], 2.0 * kStandardGravity * 0.5 * std::cos(q), 1e-12);
  }
}

TEST(Rnea, PendulumInertia) {
  const DynamicParameters p = DynamicParameters::from_links(point_mass());
  const MatrixXd m = inertia_matrix(pendulum_chain(), p, VectorXd::Zero(1));
  EXPECT_NEAR(m(0, 0), 0.5, 1e-14);
  EXPECT_NEAR(gravity_vector(pendulum_chain(), p, VectorXd::Zero(1))[0], 9.80665, 1e-12);
}

TEST(Rnea, MatchesLagrangianOracle) {
  const KinematicChain c = ur10_chain();
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto links = testing::random_links(rng, 6);
    const JointState s = testing::random_state(rng, 6);
    const VectorXd tau = rnea(c, links, s);
    const VectorXd ref = testing::lagrangian_torque(c, links, s);
    EXPECT_LT((tau - ref).cwiseAbs().maxCoeff(), 1e-6) << "trial " << trial;
  }
}

TEST(Rnea, IsLinearInParameters) {
  const KinematicChain c = ur10_chain();
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const DynamicParameters a = random_params(rng, 6), b = random_params(rng, 6);
    const JointState s = testing::random_state(rng, 6);
    const DynamicParameters sum(6, a.values() + b.values());
    const DynamicParameters scaled(6, 2.5 * a.values());
    EXPECT_LT((rnea(c, sum, s) - rnea(c, a, s) - rnea(c, b, s)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((rnea(c, scaled, s) - 2.5 * rnea(c, a, s)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Rnea, RejectsDimensionMismatch) {
  const DynamicParameters p(6);
  EXPECT_THROW(rnea(ur10_chain(), p, JointState::zero(5)), Error);
  EXPECT_THROW(rnea(ur10_chain(), DynamicParameters(5), JointState::zero(6)), Error);
}

TEST(InertiaMatrix, SymmetricPositiveDefinite) {
  const KinematicChain c = ur10_chain();
  Rng rng(5);
  EXPECT_EQ(inertia_matrix(c, DynamicParameters(6), VectorXd::Zero(6)), MatrixXd::Zero(6, 6));
  for (int trial = 0; trial < 100; ++trial) {
    const DynamicParameters p = DynamicParameters::from_links(testing::random_links(rng, 6));
    const MatrixXd m = inertia_matrix(c, p, testing::random_state(rng, 6).q);
    EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<MatrixXd>(m).eigenvalues().minCoeff(), 0.0);
  }
}

TEST(Terms, DecompositionAndHomogeneity) {
  const KinematicChain c = ur10_chain();
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const DynamicParameters p = DynamicParameters::from_links(testing::random_links(rng, 6));
    const JointState s = testing::random_state(rng, 6);
    const VectorXd cq = coriolis_vector(c, p, s.q, s.qd);
    const VectorXd recomposed = inertia_matrix(c, p, s.q) * s.qdd + cq + gravity_vector(c, p, s.q);
    EXPECT_LT((recomposed - rnea(c, p, s)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((coriolis_vector(c, p, s.q, 2.0 * s.qd) - 4.0 * cq).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_EQ(coriolis_vector(c, p, s.q, VectorXd::Zero(6)), VectorXd::Zero(6));
  }
}

TEST(Terms, MdotMinusTwoCIsSkew) {
  // C is recovered column by column from the Christoffel form by
  // differentiating M; q_dot^T (Mdot - 2C) q_dot must vanish.
  const KinematicChain c = ur10_chain();
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const DynamicParameters p = DynamicParameters::from_links(testing::random_links(rng, 6));
    const JointState s = testing::random_state(rng, 6);
    constexpr double h = 1e-5;
    const MatrixXd mdot = (inertia_matrix(c, p, s.q + h * s.qd) - inertia_matrix(c, p, s.q - h * s.qd)) / (2 * h);
    const double power = s.qd.dot(mdot * s.qd) - 2.0 * s.qd.dot(coriolis_vector(c, p, s.q, s.qd));
    EXPECT_NEAR(power, 0.0, 1e-5);
  }
}

TEST(Friction, LinearLaw) {
  const VectorXd fo = VectorXd::Constant(1, -1.0066), fv = VectorXd::Constant(1, 1.0640),
                 fc = VectorXd::Constant(1, 2.0506);
  EXPECT_NEAR(friction_linear(fo, fv, fc, VectorXd::Constant(1, 1.0))[0], 2.108, 1e-12);
  EXPECT_EQ(friction_linear(fo, fv, fc, VectorXd::Zero(1))[0], -1.0066);
  EXPECT_EQ(friction_linear(VectorXd::Zero(1), VectorXd::Ones(1), VectorXd::Zero(1), VectorXd::Constant(1, 0.3))[0], 0.3);
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const double v = rng.uniform(-3, 3);
    const VectorXd zero = VectorXd::Zero(1);
    EXPECT_EQ(friction_linear(zero, fv, fc, VectorXd::Constant(1, v))[0],
              -friction_linear(zero, fv, fc, VectorXd::Constant(1, -v))[0]);
  }
}

TEST(Friction, SigmoidLaw) {
  const JointFriction j3{-0.8120, 0.6796, 1.6478, 19.8251, -0.0053};
  EXPECT_NEAR(friction_sigmoid(j3, 0.1), testing::sigmoid_direct(j3, 0.1), 1e-14);
  EXPECT_NEAR(friction_sigmoid(j3, -j3.shift), j3.offset - j3.viscous * j3.shift + j3.magnitude / 2, 1e-14);
  JointFriction steep = j3;
  steep.steepness = 1e6;
  for (double qd : {-0.5, -0.01, 0.01, 0.5}) {
    const double step = qd + steep.shift > 0 ? 1.0 : 0.0;
    EXPECT_NEAR(friction_sigmoid(steep, qd), steep.offset + steep.viscous * qd + steep.magnitude * step, 1e-6);
  }
  EXPECT_TRUE(std::isfinite(friction_sigmoid(steep, -1e3)));
}

TEST(Regressor, ReproducesRneaPlusLinearFriction) {
  const KinematicChain c = ur10_chain();
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const DynamicParameters p = random_params(rng, 6);
    const JointState s = testing::random_state(rng, 6);
    const MatrixXd y = regressor(c, s);
    ASSERT_EQ(y.cols(), 78);
    const VectorXd ref = rnea(c, p, s) + friction_linear(p, s.qd);
    EXPECT_LT((y * p.values() - ref).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Regressor, StaticColumnsAreGravity) {
  const KinematicChain c = ur10_chain();
  Rng rng(10);
  const VectorXd q = testing::random_state(rng, 6).q;
  const JointState s{q, VectorXd::Zero(6), VectorXd::Zero(6)};
  const MatrixXd y = regressor(c, s);
  for (int j = 0; j < 6; ++j) {
    EXPECT_EQ(y(j, 60 + 3 * j), 1.0);
    EXPECT_EQ(y(j, 61 + 3 * j), 0.0);
    EXPECT_EQ(y(j, 62 + 3 * j), 0.0);
  }
  // Mass column of link i: unit point mass at the frame-i origin.
  for (int i = 0; i < 6; ++i) {
    std::vector<InertialParameters> links(6);
    links[static_cast<std::size_t>(i)].mass = 1.0;
    const VectorXd tau = rnea(c, links, s);
    EXPECT_LT((y.col(10 * i) - tau).cwiseAbs().maxCoeff(), 1e-12);
    const MatrixXd jac = point_jacobian(c, q, i + 1, Vector3d::Zero());
    EXPECT_LT((y.col(10 * i) + jac.topRows(3).transpose() * c.gravity).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Regressor, LastLinkBlockMatchesFullRegressor) {
  const KinematicChain c = ur10_chain();
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const JointState s = testing::random_state(rng, 6);
    EXPECT_LT((last_link_regressor(c, s) - regressor(c, s).middleCols(50, 10)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

}  // namespace
}  // namespace dynid
