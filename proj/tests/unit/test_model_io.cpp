#include <gtest/gtest.h>

#include <filesystem>

#include "dynid/errors.hpp"
#include "dynid/model.hpp"
#include "dynid/solver.hpp"

namespace dynid {
namespace {

const BaseParameterMap& map() {
  static const BaseParameterMap m = compute_base_map(ur10_chain());
  return m;
}

void expect_same_physical(const RobotModel& a, const RobotModel& b) {
  ASSERT_EQ(a.dof(), b.dof());
  for (int i = 0; i < a.dof(); ++i) {
    const auto& ra = a.chain.rows[static_cast<std::size_t>(i)];
    const auto& rb = b.chain.rows[static_cast<std::size_t>(i)];
    EXPECT_EQ(ra.a, rb.a);
    EXPECT_EQ(ra.alpha, rb.alpha);
    EXPECT_EQ(ra.d, rb.d);
  }
  EXPECT_EQ(a.chain.gravity, b.chain.gravity);
  EXPECT_EQ(a.dynamic_parameters().values(), b.dynamic_parameters().values());
  for (std::size_t j = 0; j < a.friction.size(); ++j)
    EXPECT_EQ(a.friction[j].as_vector(), b.friction[j].as_vector());
  EXPECT_EQ(a.gains, b.gains);
  EXPECT_EQ(a.limits.velocity, b.limits.velocity);
}

TEST(ModelFile, ReferenceModelRoundTrip) {
  const RobotModel m = ur10_reference_model();
  EXPECT_TRUE(m.has_physical());
  EXPECT_EQ(m.stage(), Stage::kNone);
  const std::string text = format_model(m);
  for (const char* s : {"[dh]", "[gravity]", "[inertial.link_1]", "[friction.joint_6]", "[gains]", "mass_kg",
                        "com_m", "inertia_origin_kgm2", "K_NmA"})
    EXPECT_NE(text.find(s), std::string::npos) << s;
  const RobotModel r = parse_model(text);
  expect_same_physical(m, r);
  EXPECT_EQ(format_model(r), text);
}

TEST(ModelFile, IdentifiedModelRoundTrip) {
  const RobotModel exact = exact_identified_model(ur10_reference_model(), map());
  EXPECT_EQ(exact.stage(), Stage::kGains);
  const RobotModel r = parse_model(format_model(exact));
  EXPECT_EQ(r.stage(), Stage::kGains);
  EXPECT_EQ(*r.chi, *exact.chi);
  EXPECT_EQ(*r.gains_estimated, *exact.gains_estimated);
  EXPECT_EQ(r.base_map->independent, map().independent);
  EXPECT_EQ(r.base_map->inertial_projection, map().inertial_projection);
  for (int j = 0; j < 6; ++j) {
    EXPECT_EQ(r.base_map->joints[static_cast<std::size_t>(j)].columns, map().joints[static_cast<std::size_t>(j)].columns);
    EXPECT_EQ((*r.friction_current)[static_cast<std::size_t>(j)].as_vector(),
              (*exact.friction_current)[static_cast<std::size_t>(j)].as_vector());
  }
}

TEST(ModelFile, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "dynid_model_test.ini";
  write_model(path.string(), ur10_reference_model());
  const RobotModel r = read_model(path.string());
  std::filesystem::remove(path);
  expect_same_physical(ur10_reference_model(), r);
  EXPECT_THROW(read_model((std::filesystem::temp_directory_path() / "dynid_no_such.ini").string()), Error);
}

TEST(ModelFile, StageOrder) {
  RobotModel m = exact_identified_model(ur10_reference_model(), map());
  m.gains_estimated.reset();
  m.friction_current.reset();
  EXPECT_EQ(m.stage(), Stage::kLinear);
  EXPECT_NO_THROW(m.require_stage(Stage::kLinear));
  try {
    m.require_stage(Stage::kGains);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUsage);
    EXPECT_NE(std::string(e.what()).find("'friction'"), std::string::npos) << e.what();
  }
  EXPECT_EQ(parse_stage("friction"), Stage::kFriction);
  EXPECT_STREQ(stage_name(Stage::kGains), "gains");
  EXPECT_THROW(parse_stage("bogus"), Error);
}

TEST(ModelFile, SchemaErrors) {
  const std::string good = format_model(ur10_reference_model());
  auto expect_schema = [](const std::string& text, const std::string& needle) {
    try {
      parse_model(text);
      FAIL() << needle;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kSchema) << e.what();
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  std::string no_dh = good;
  no_dh.replace(no_dh.find("[dh]"), 4, "[dhx]");
  expect_schema(no_dh, "[dh]");
  std::string short_gains = good;
  const std::size_t g = short_gains.find("K_NmA");
  short_gains.erase(short_gains.rfind(',', short_gains.find('\n', g)), short_gains.find('\n', g) - short_gains.rfind(',', short_gains.find('\n', g)));
  expect_schema(short_gains, "K_NmA");
  std::string lying_stage = good;
  lying_stage.replace(lying_stage.find("stage=none"), 10, "stage=gains");
  expect_schema(lying_stage, "stage");
  expect_schema("[meta\nname = x\n", "line");
}

TEST(PayloadFile, RoundTripAndDefaults) {
  for (const PayloadFile& p : {franka_hand_payload(), eccentric_payload()}) {
    const PayloadFile r = parse_payload(format_payload(p));
    EXPECT_EQ(r.spec.mass, p.spec.mass);
    EXPECT_EQ(r.spec.com_l, p.spec.com_l);
    EXPECT_EQ(r.spec.inertia_l, p.spec.inertia_l);
    EXPECT_EQ(r.spec.rotation, p.spec.rotation);
    EXPECT_EQ(r.spec.translation, p.spec.translation);
    EXPECT_EQ(r.known, p.known);
  }
  const PayloadFile minimal = parse_payload("mass_kg = 1.5\ncom_l_m = 0, 0, 0.1\ninertia_l_kgm2 = 0.01, 0.02, 0.03\n");
  EXPECT_EQ(minimal.known, std::vector<std::string>{"m"});
  EXPECT_EQ(minimal.spec.rotation, Matrix3d::Identity());
  EXPECT_EQ(minimal.spec.inertia_l(1, 1), 0.02);
  const PayloadFile full = parse_payload(
      "[payload]\nmass_kg = 1\ncom_l_m = 0,0,0\ninertia_l_kgm2 = 1,0.1,0,2,0,3\nknown = m, hx ,izz\n");
  EXPECT_EQ(full.spec.inertia_l(0, 1), 0.1);
  EXPECT_EQ(full.spec.inertia_l(1, 0), 0.1);
  EXPECT_EQ(full.known, (std::vector<std::string>{"m", "hx", "izz"}));
}

TEST(PayloadFile, Errors) {
  EXPECT_THROW(parse_payload("mass_kg = 1\ncom_l_m = 0,0\ninertia_l_kgm2 = 1,1,1\n"), Error);
  EXPECT_THROW(parse_payload("mass_kg = 1\ncom_l_m = 0,0,0\ninertia_l_kgm2 = 1,1\n"), Error);
  EXPECT_THROW(parse_payload("mass_kg = 1\ncom_l_m = 0,0,0\ninertia_l_kgm2 = 1,1,1\nknown = q\n"), Error);
  EXPECT_THROW(parse_payload("mass_kg = 1\ncom_l_m = 0,0,0\ninertia_l_kgm2 = 1,1,1\nR_l_n = 1,0,0,0,1,0,0,0,2\n"), Error);
  EXPECT_THROW(parse_payload("mass_kg = -1\ncom_l_m = 0,0,0\ninertia_l_kgm2 = 1,1,1\n"), Error);
}

}  // namespace
}  // namespace dynid
