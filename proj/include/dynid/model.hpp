#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynid/estimation.hpp"
#include "dynid/payload.hpp"
#include "dynid/reduction.hpp"
#include "dynid/trajectory.hpp"

namespace dynid {

/// Identification stages in the order they must run.
enum class Stage { kNone = 0, kLinear = 1, kFriction = 2, kGains = 3 };

const char* stage_name(Stage s);
Stage parse_stage(const std::string& name);

/// Everything a robot-model file can hold. Ground-truth models carry the
/// physical sections (links, friction, gains); identified models carry the
/// base map and the per-stage estimates instead. Both share the kinematics.
struct RobotModel {
  std::string name = "robot";
  KinematicChain chain;
  JointLimits limits;

  // Physical description, torque level.
  std::vector<InertialParameters> links;
  FrictionSet friction;
  VectorXd gains;  // K, N m / A

  // Identification results.
  double linear_threshold = kDefaultLinearThreshold;
  std::optional<BaseParameterMap> base_map;
  std::optional<VectorXd> chi;                  // stage 1, per-joint layout
  std::optional<FrictionSet> friction_current;  // stage 2
  std::optional<VectorXd> gains_estimated;      // stage 3

  int dof() const { return chain.dof(); }
  bool has_physical() const;
  Stage stage() const;
  /// Stage-order check: throws a usage error naming the missing stage.
  void require_stage(Stage needed) const;
  DynamicParameters dynamic_parameters() const;  // physical links, friction ignored
};

/// Throws when sections disagree on the number of joints.
void validate(const RobotModel& model);

/// Synthetic UR10: published DH kinematics, plausible link inertias, motor gains
/// and sigmoid friction on the torque level. The default friction uses
/// steepness >= 150 s/rad so friction is saturated in the linearity region.
RobotModel ur10_reference_model();

std::string format_model(const RobotModel& model);
RobotModel parse_model(const std::string& text, const std::string& origin = "<memory>");
void write_model(const std::string& path, const RobotModel& model);
RobotModel read_model(const std::string& path);

struct PayloadFile {
  PayloadSpec spec;
  std::vector<std::string> known;  // parameter names trusted during gain estimation
};

std::string format_payload(const PayloadFile& payload);
PayloadFile parse_payload(const std::string& text, const std::string& origin = "<memory>");
void write_payload(const std::string& path, const PayloadFile& payload);
PayloadFile read_payload(const std::string& path);

/// Franka hand as mounted in the reference setup: 0.73 kg, COM (0, 10, 30) mm,
/// diagonal inertia (1, 2.5, 1.7) g m^2, rotated 45 deg about z of frame n.
PayloadFile franka_hand_payload();
/// 8 kg off-axis payload used to exercise gain estimation, COM
/// (150, -100, 50) mm; its first moments along x and y of frame n are the
/// trusted parameters.
PayloadFile eccentric_payload();

}  // namespace dynid
