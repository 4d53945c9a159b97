#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dynid/errors.hpp"
#include "dynid/model.hpp"

namespace dynid {

namespace pt = boost::property_tree;

namespace {

// Section names contain dots, so paths use '/' as separator.
pt::ptree::path_type key(const std::string& k) { return pt::ptree::path_type(k, '/'); }

std::string join(const VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t\r");
    const auto e = item.find_last_not_of(" \t\r");
    if (b == std::string::npos) {
      out.emplace_back();
    } else {
      out.push_back(item.substr(b, e - b + 1));
    }
  }
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::string origin) : tree_(tree), origin_(std::move(origin)) {}

  const pt::ptree* section(const std::string& name) const {
    const auto it = tree_.find(name);
    return it == tree_.not_found() ? nullptr : &it->second;
  }
  const pt::ptree& require_section(const std::string& name) const {
    const pt::ptree* s = section(name);
    if (!s) throw schema_error(origin_ + ": missing section [" + name + "]");
    return *s;
  }
  std::string raw(const pt::ptree& sec, const std::string& sec_name, const std::string& k) const {
    const auto v = sec.get_optional<std::string>(key(k));
    if (!v) throw schema_error(origin_ + ": missing key '" + k + "' in [" + sec_name + "]");
    return *v;
  }
  VectorXd vec(const pt::ptree& sec, const std::string& sec_name, const std::string& k,
               Eigen::Index expected = -1) const {
    const auto items = split_list(raw(sec, sec_name, k));
    VectorXd v(static_cast<Eigen::Index>(items.size()));
    for (std::size_t i = 0; i < items.size(); ++i) {
      v[static_cast<Eigen::Index>(i)] = parse_double(items[i], origin_ + " [" + sec_name + "] " + k);
    }
    if (expected >= 0 && v.size() != expected) {
      throw schema_error(origin_ + ": key '" + k + "' in [" + sec_name + "] needs " +
                         std::to_string(expected) + " values, got " + std::to_string(v.size()));
    }
    return v;
  }
  double scalar(const pt::ptree& sec, const std::string& sec_name, const std::string& k) const {
    return vec(sec, sec_name, k, 1)[0];
  }
  std::vector<int> ints(const pt::ptree& sec, const std::string& sec_name,
                        const std::string& k) const {
    std::vector<int> out;
    for (const auto& item : split_list(raw(sec, sec_name, k))) {
      try {
        std::size_t used = 0;
        out.push_back(std::stoi(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw schema_error(origin_ + ": '" + item + "' is not an integer in [" + sec_name + "] " + k);
      }
    }
    return out;
  }
  const std::string& origin() const { return origin_; }

 private:
  const pt::ptree& tree_;
  std::string origin_;
};

pt::ptree parse_ini(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw schema_error(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return tree;
}

std::string emit_ini(const pt::ptree& tree) {
  std::ostringstream out;
  pt::write_ini(out, tree);
  return out.str();
}

Matrix3d symmetric_from6(const VectorXd& v) {
  Matrix3d m;
  m << v[0], v[1], v[2], v[1], v[3], v[4], v[2], v[4], v[5];
  return m;
}

VectorXd six_from_symmetric(const Matrix3d& m) {
  VectorXd v(6);
  v << m(0, 0), m(0, 1), m(0, 2), m(1, 1), m(1, 2), m(2, 2);
  return v;
}

std::string link_section(int i) { return "inertial.link_" + std::to_string(i + 1); }
std::string friction_section(int j) { return "friction.joint_" + std::to_string(j + 1); }
std::string current_friction_section(int j) {
  return "friction_current.joint_" + std::to_string(j + 1);
}
std::string basis_section(int j) { return "basemap.joint_" + std::to_string(j + 1); }

}  // namespace

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::kNone: return "none";
    case Stage::kLinear: return "linear";
    case Stage::kFriction: return "friction";
    case Stage::kGains: return "gains";
  }
  return "none";
}

Stage parse_stage(const std::string& name) {
  if (name == "none") return Stage::kNone;
  if (name == "linear") return Stage::kLinear;
  if (name == "friction") return Stage::kFriction;
  if (name == "gains") return Stage::kGains;
  throw schema_error("unknown stage '" + name + "'");
}

bool RobotModel::has_physical() const {
  return !links.empty() && !friction.empty() && gains.size() == dof();
}

Stage RobotModel::stage() const {
  if (!base_map || !chi) return Stage::kNone;
  if (!friction_current) return Stage::kLinear;
  if (!gains_estimated) return Stage::kFriction;
  return Stage::kGains;
}

void RobotModel::require_stage(Stage needed) const {
  if (static_cast<int>(stage()) >= static_cast<int>(needed)) return;
  const Stage missing = static_cast<Stage>(static_cast<int>(stage()) + 1);
  throw usage_error("model '" + name + "' lacks the '" + stage_name(missing) +
                    "' identification stage; run 'identify " + stage_name(missing) +
                    "' first");
}

DynamicParameters RobotModel::dynamic_parameters() const {
  if (static_cast<int>(links.size()) != dof()) {
    throw usage_error("model '" + name + "' has no physical link parameters");
  }
  return DynamicParameters::from_links(links);
}

void validate(const RobotModel& model) {
  validate(model.chain);
  const int n = model.dof();
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) throw schema_error("model '" + model.name + "': " + what + " does not match " +
                                std::to_string(n) + " joints");
  };
  check(model.limits.position.size() == n && model.limits.velocity.size() == n &&
            model.limits.acceleration.size() == n,
        "limits");
  check(model.links.empty() || static_cast<int>(model.links.size()) == n, "inertial sections");
  check(model.friction.empty() || static_cast<int>(model.friction.size()) == n,
        "friction sections");
  check(model.gains.size() == 0 || model.gains.size() == n, "gains");
  if (model.gains.size() == n && (model.gains.array() <= 0.0).any()) {
    throw schema_error("model '" + model.name + "': gains must be positive");
  }
  if (model.base_map) {
    check(model.base_map->dof == n, "base map");
    if (model.chi) {
      check(model.chi->size() == model.base_map->joint_layout_size(), "coefficient layout");
    }
  }
  if (model.friction_current) check(static_cast<int>(model.friction_current->size()) == n,
                                    "current-level friction");
  if (model.gains_estimated) check(model.gains_estimated->size() == n, "estimated gains");
}

RobotModel ur10_reference_model() {
  RobotModel m;
  m.name = "ur10_reference";
  m.chain = ur10_chain();
  m.limits = ur10_limits();

  auto inertia = [](double xx, double yy, double zz, double xy = 0.0, double xz = 0.0,
                    double yz = 0.0) {
    Matrix3d i;
    i << xx, xy, xz, xy, yy, yz, xz, yz, zz;
    return i;
  };
  m.links = {
      InertialParameters::from_com_inertia(7.1, {0.021, 0.0, 0.027}, inertia(0.0341, 0.0341, 0.0217)),
      InertialParameters::from_com_inertia(12.7, {-0.232, 0.0, 0.158},
                                           inertia(0.0450, 0.4490, 0.4450, 0.0, 0.0020)),
      InertialParameters::from_com_inertia(4.27, {-0.3323, 0.0, 0.068},
                                           inertia(0.0100, 0.1200, 0.1180, 0.0, -0.0010)),
      InertialParameters::from_com_inertia(2.0, {0.0, 0.007, 0.018}, inertia(0.0030, 0.0030, 0.0022)),
      InertialParameters::from_com_inertia(2.0, {0.0, -0.007, 0.018},
                                           inertia(0.0030, 0.0028, 0.0022, 0.0001)),
      InertialParameters::from_com_inertia(0.365, {0.0, 0.0, -0.026},
                                           inertia(0.00020, 0.00020, 0.00025)),
  };

  m.gains.resize(6);
  m.gains << 13.9557, 13.8669, 11.5049, 11.5438, 11.6143, 11.4149;

  // Current-level sigmoid laws (f_o, f_v, f_c, delta, nu); the first three
  // joints get a steeper sigmoid than the reference values so that friction
  // is saturated above the linearity threshold.
  const double current_level[6][5] = {
      {-1.0066, 1.0640, 2.0506, 150.0, -0.0185},
      {0.9563, 0.9944, -2.4017, -150.0, -0.0019},
      {-0.8120, 0.6796, 1.6478, 150.0, -0.0053},
      {-0.1767, 0.3159, 0.4688, 134.8982, -0.0186},
      {-0.1924, 0.2244, 0.4760, 331.4421, -0.0118},
      {-0.2453, 0.2358, 0.5980, 459.1933, -0.0130},
  };
  for (int j = 0; j < 6; ++j) {
    const double k = m.gains[j];
    const double* c = current_level[j];
    m.friction.push_back(JointFriction{k * c[0], k * c[1], k * c[2], c[3], c[4]});
  }
  return m;
}

std::string format_model(const RobotModel& model) {
  validate(model);
  const int n = model.dof();
  pt::ptree tree;
  pt::ptree meta;
  meta.put(key("name"), model.name);
  meta.put(key("dof"), n);
  meta.put(key("stage"), stage_name(model.stage()));
  tree.add_child(key("meta"), meta);

  VectorXd a(n), alpha(n), d(n), offset(n);
  for (int i = 0; i < n; ++i) {
    a[i] = model.chain.rows[static_cast<std::size_t>(i)].a;
    alpha[i] = model.chain.rows[static_cast<std::size_t>(i)].alpha;
    d[i] = model.chain.rows[static_cast<std::size_t>(i)].d;
    offset[i] = model.chain.rows[static_cast<std::size_t>(i)].joint_offset;
  }
  pt::ptree dh;
  dh.put(key("a_m"), join(a));
  dh.put(key("alpha_rad"), join(alpha));
  dh.put(key("d_m"), join(d));
  dh.put(key("offset_rad"), join(offset));
  tree.add_child(key("dh"), dh);

  pt::ptree gravity;
  gravity.put(key("g_mps2"), join(model.chain.gravity));
  tree.add_child(key("gravity"), gravity);

  pt::ptree limits;
  limits.put(key("q_rad"), join(model.limits.position));
  limits.put(key("qd_radps"), join(model.limits.velocity));
  limits.put(key("qdd_radps2"), join(model.limits.acceleration));
  tree.add_child(key("limits"), limits);

  for (std::size_t i = 0; i < model.links.size(); ++i) {
    const auto& l = model.links[i];
    pt::ptree s;
    s.put(key("mass_kg"), format_double(l.mass));
    s.put(key("com_m"), join(l.com));
    s.put(key("inertia_origin_kgm2"), join(six_from_symmetric(l.inertia_origin)));
    tree.add_child(key(link_section(static_cast<int>(i))), s);
  }
  for (std::size_t j = 0; j < model.friction.size(); ++j) {
    const auto& f = model.friction[j];
    pt::ptree s;
    s.put(key("f_o_Nm"), format_double(f.offset));
    s.put(key("f_v_Nms"), format_double(f.viscous));
    s.put(key("f_c_Nm"), format_double(f.magnitude));
    s.put(key("delta_spr"), format_double(f.steepness));
    s.put(key("nu_radps"), format_double(f.shift));
    tree.add_child(key(friction_section(static_cast<int>(j))), s);
  }
  if (model.gains.size() > 0) {
    pt::ptree s;
    s.put(key("K_NmA"), join(model.gains));
    tree.add_child(key("gains"), s);
  }

  if (model.base_map) {
    const BaseParameterMap& map = *model.base_map;
    pt::ptree ident;
    ident.put(key("qd_plus_radps"), format_double(model.linear_threshold));
    tree.add_child(key("identification"), ident);

    pt::ptree bm;
    bm.put(key("dof"), map.dof);
    bm.put(key("svd_tolerance"), format_double(map.svd_tolerance));
    bm.put(key("n_probe"), map.n_probe);
    bm.put(key("seed"), std::to_string(map.seed));
    bm.put(key("independent"), join_ints(map.independent));
    for (int r = 0; r < map.inertial_rank(); ++r) {
      bm.put(key("projection_row_" + std::to_string(r + 1)),
             join(map.inertial_projection.row(r).transpose()));
    }
    tree.add_child(key("basemap"), bm);
    for (int j = 0; j < map.dof; ++j) {
      const JointBasis& jb = map.joints[static_cast<std::size_t>(j)];
      pt::ptree s;
      s.put(key("columns"), join_ints(jb.columns));
      for (int r = 0; r < jb.inertial_size(); ++r) {
        s.put(key("recombination_row_" + std::to_string(r + 1)),
              join(jb.recombination.row(r).transpose()));
      }
      tree.add_child(key(basis_section(j)), s);
    }
  }
  if (model.chi && model.base_map) {
    pt::ptree s;
    for (int j = 0; j < n; ++j) {
      const int cj = model.base_map->joints[static_cast<std::size_t>(j)].size();
      s.put(key("chi_joint_" + std::to_string(j + 1)),
            join(model.chi->segment(model.base_map->joint_offset(j), cj)));
    }
    tree.add_child(key("coefficients"), s);
  }
  if (model.friction_current) {
    for (int j = 0; j < n; ++j) {
      const auto& f = (*model.friction_current)[static_cast<std::size_t>(j)];
      pt::ptree s;
      s.put(key("f_o_A"), format_double(f.offset));
      s.put(key("f_v_Aspr"), format_double(f.viscous));
      s.put(key("f_c_A"), format_double(f.magnitude));
      s.put(key("delta_spr"), format_double(f.steepness));
      s.put(key("nu_radps"), format_double(f.shift));
      tree.add_child(key(current_friction_section(j)), s);
    }
  }
  if (model.gains_estimated) {
    pt::ptree s;
    s.put(key("K_NmA"), join(*model.gains_estimated));
    tree.add_child(key("gains_estimated"), s);
  }
  return emit_ini(tree);
}

RobotModel parse_model(const std::string& text, const std::string& origin) {
  const pt::ptree tree = parse_ini(text, origin);
  const Reader rd(tree, origin);
  RobotModel m;

  const pt::ptree& meta = rd.require_section("meta");
  m.name = meta.get<std::string>(key("name"), "robot");
  const int n = static_cast<int>(rd.scalar(meta, "meta", "dof"));
  if (n < 1) throw schema_error(origin + ": dof must be at least 1");

  const pt::ptree& dh = rd.require_section("dh");
  const VectorXd a = rd.vec(dh, "dh", "a_m", n);
  const VectorXd alpha = rd.vec(dh, "dh", "alpha_rad", n);
  const VectorXd d = rd.vec(dh, "dh", "d_m", n);
  const VectorXd offset = dh.get_optional<std::string>(key("offset_rad"))
                              ? rd.vec(dh, "dh", "offset_rad", n)
                              : VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    m.chain.rows.push_back(make_dh_row(a[i], alpha[i], d[i], offset[i]));
  }
  if (const pt::ptree* g = rd.section("gravity")) {
    m.chain.gravity = rd.vec(*g, "gravity", "g_mps2", 3);
  }
  if (const pt::ptree* l = rd.section("limits")) {
    m.limits.position = rd.vec(*l, "limits", "q_rad", n);
    m.limits.velocity = rd.vec(*l, "limits", "qd_radps", n);
    m.limits.acceleration = rd.vec(*l, "limits", "qdd_radps2", n);
  } else {
    m.limits = n == 6 ? ur10_limits() : JointLimits{VectorXd::Constant(n, 2 * std::numbers::pi),
                                                    VectorXd::Constant(n, 3.0),
                                                    VectorXd::Constant(n, 15.0)};
  }

  for (int i = 0; i < n; ++i) {
    const std::string name = link_section(i);
    const pt::ptree* s = rd.section(name);
    if (!s) {
      if (i > 0 && !m.links.empty()) throw schema_error(origin + ": missing section [" + name + "]");
      continue;
    }
    if (i > 0 && m.links.empty()) throw schema_error(origin + ": missing section [" + link_section(0) + "]");
    InertialParameters l;
    l.mass = rd.scalar(*s, name, "mass_kg");
    l.com = rd.vec(*s, name, "com_m", 3);
    l.inertia_origin = symmetric_from6(rd.vec(*s, name, "inertia_origin_kgm2", 6));
    if (l.mass < 0.0) throw schema_error(origin + ": negative mass in [" + name + "]");
    m.links.push_back(l);
  }
  for (int j = 0; j < n; ++j) {
    const std::string name = friction_section(j);
    const pt::ptree* s = rd.section(name);
    if (!s) {
      if (!m.friction.empty()) throw schema_error(origin + ": missing section [" + name + "]");
      continue;
    }
    if (j > 0 && m.friction.empty()) throw schema_error(origin + ": missing section [" + friction_section(0) + "]");
    m.friction.push_back(JointFriction{rd.scalar(*s, name, "f_o_Nm"), rd.scalar(*s, name, "f_v_Nms"),
                                       rd.scalar(*s, name, "f_c_Nm"), rd.scalar(*s, name, "delta_spr"),
                                       rd.scalar(*s, name, "nu_radps")});
  }
  if (const pt::ptree* s = rd.section("gains")) m.gains = rd.vec(*s, "gains", "K_NmA", n);

  if (const pt::ptree* s = rd.section("identification")) {
    m.linear_threshold = rd.scalar(*s, "identification", "qd_plus_radps");
  }
  if (const pt::ptree* s = rd.section("basemap")) {
    BaseParameterMap map;
    map.dof = static_cast<int>(rd.scalar(*s, "basemap", "dof"));
    if (map.dof != n) throw schema_error(origin + ": base map dof differs from [meta] dof");
    map.svd_tolerance = rd.scalar(*s, "basemap", "svd_tolerance");
    map.n_probe = static_cast<int>(rd.scalar(*s, "basemap", "n_probe"));
    map.seed = std::stoull(rd.raw(*s, "basemap", "seed"));
    map.independent = rd.ints(*s, "basemap", "independent");
    const int r = map.inertial_rank();
    map.inertial_projection.resize(r, kLinkParams * n);
    for (int k = 0; k < r; ++k) {
      map.inertial_projection.row(k) =
          rd.vec(*s, "basemap", "projection_row_" + std::to_string(k + 1), kLinkParams * n).transpose();
    }
    for (int c : map.independent) {
      if (c < 0 || c >= kLinkParams * n) throw schema_error(origin + ": base map column out of range");
    }
    for (int j = 0; j < n; ++j) {
      const std::string name = basis_section(j);
      const pt::ptree& js = rd.require_section(name);
      JointBasis jb;
      jb.columns = rd.ints(js, name, "columns");
      jb.recombination.resize(jb.inertial_size(), r);
      for (int k = 0; k < jb.inertial_size(); ++k) {
        if (jb.columns[static_cast<std::size_t>(k)] < 0 || jb.columns[static_cast<std::size_t>(k)] >= r) {
          throw schema_error(origin + ": joint basis column out of range in [" + name + "]");
        }
        jb.recombination.row(k) =
            rd.vec(js, name, "recombination_row_" + std::to_string(k + 1), r).transpose();
      }
      map.joints.push_back(std::move(jb));
    }
    m.base_map = std::move(map);
  }
  if (const pt::ptree* s = rd.section("coefficients")) {
    if (!m.base_map) throw schema_error(origin + ": [coefficients] without [basemap]");
    VectorXd chi(m.base_map->joint_layout_size());
    for (int j = 0; j < n; ++j) {
      const int cj = m.base_map->joints[static_cast<std::size_t>(j)].size();
      chi.segment(m.base_map->joint_offset(j), cj) =
          rd.vec(*s, "coefficients", "chi_joint_" + std::to_string(j + 1), cj);
    }
    m.chi = chi;
  }
  if (rd.section(current_friction_section(0))) {
    FrictionSet fs;
    for (int j = 0; j < n; ++j) {
      const std::string name = current_friction_section(j);
      const pt::ptree& s = rd.require_section(name);
      fs.push_back(JointFriction{rd.scalar(s, name, "f_o_A"), rd.scalar(s, name, "f_v_Aspr"),
                                 rd.scalar(s, name, "f_c_A"), rd.scalar(s, name, "delta_spr"),
                                 rd.scalar(s, name, "nu_radps")});
    }
    m.friction_current = std::move(fs);
  }
  if (const pt::ptree* s = rd.section("gains_estimated")) {
    m.gains_estimated = rd.vec(*s, "gains_estimated", "K_NmA", n);
  }

  const Stage declared = parse_stage(meta.get<std::string>(key("stage"), "none"));
  if (declared != m.stage()) {
    throw schema_error(origin + ": [meta] stage '" + stage_name(declared) +
                       "' disagrees with the sections present ('" + stage_name(m.stage()) + "')");
  }
  validate(m);
  return m;
}

void write_model(const std::string& path, const RobotModel& model) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw usage_error("cannot open '" + path + "' for writing");
  f << format_model(model);
  if (!f) throw usage_error("failed writing '" + path + "'");
}

namespace {

std::string slurp(const std::string& path, const char* what) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw usage_error(std::string("cannot open ") + what + " file '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

}  // namespace

RobotModel read_model(const std::string& path) { return parse_model(slurp(path, "model"), path); }

std::string format_payload(const PayloadFile& payload) {
  validate(payload.spec);
  const PayloadSpec& s = payload.spec;
  pt::ptree sec;
  sec.put(key("mass_kg"), format_double(s.mass));
  sec.put(key("com_l_m"), join(s.com_l));
  sec.put(key("inertia_l_kgm2"), join(six_from_symmetric(s.inertia_l)));
  VectorXd r(9);
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) r[3 * i + k] = s.rotation(i, k);
  }
  sec.put(key("R_l_n"), join(r));
  sec.put(key("t_l_n_m"), join(s.translation));
  std::string known;
  for (std::size_t i = 0; i < payload.known.size(); ++i) {
    if (i) known += ", ";
    known += payload.known[i];
  }
  sec.put(key("known"), known);
  pt::ptree tree;
  tree.add_child(key("payload"), sec);
  return emit_ini(tree);
}

PayloadFile parse_payload(const std::string& text, const std::string& origin) {
  const pt::ptree tree = parse_ini(text, origin);
  const Reader rd(tree, origin);
  const pt::ptree* sec = rd.section("payload");
  const std::string sec_name = sec ? "payload" : "(top level)";
  if (!sec) sec = &tree;

  PayloadFile p;
  p.spec.mass = rd.scalar(*sec, sec_name, "mass_kg");
  p.spec.com_l = rd.vec(*sec, sec_name, "com_l_m", 3);
  const VectorXd inertia = rd.vec(*sec, sec_name, "inertia_l_kgm2");
  if (inertia.size() == 3) {
    p.spec.inertia_l = inertia.asDiagonal();
  } else if (inertia.size() == 6) {
    p.spec.inertia_l = symmetric_from6(inertia);
  } else {
    throw schema_error(origin + ": inertia_l_kgm2 needs 3 (diagonal) or 6 values");
  }
  if (sec->get_optional<std::string>(key("R_l_n"))) {
    const VectorXd r = rd.vec(*sec, sec_name, "R_l_n", 9);
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) p.spec.rotation(i, k) = r[3 * i + k];
    }
  }
  if (sec->get_optional<std::string>(key("t_l_n_m"))) {
    p.spec.translation = rd.vec(*sec, sec_name, "t_l_n_m", 3);
  }
  if (const auto known = sec->get_optional<std::string>(key("known"))) {
    p.known = split_list(*known);
  } else {
    p.known = {"m"};
  }
  for (const auto& name : p.known) payload_param_index(name);
  validate(p.spec);
  return p;
}

void write_payload(const std::string& path, const PayloadFile& payload) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw usage_error("cannot open '" + path + "' for writing");
  f << format_payload(payload);
  if (!f) throw usage_error("failed writing '" + path + "'");
}

PayloadFile read_payload(const std::string& path) {
  return parse_payload(slurp(path, "payload"), path);
}

PayloadFile franka_hand_payload() {
  PayloadFile p;
  p.spec.mass = 0.73;
  p.spec.com_l = Vector3d(0.0, 0.010, 0.030);
  p.spec.inertia_l = Vector3d(0.001, 0.0025, 0.0017).asDiagonal();
  const double c = std::cos(std::numbers::pi / 4.0), s = std::sin(std::numbers::pi / 4.0);
  p.spec.rotation << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  p.known = {"m"};
  return p;
}

PayloadFile eccentric_payload() {
  PayloadFile p;
  p.spec.mass = 8.0;
  p.spec.com_l = Vector3d(0.15, -0.10, 0.05);
  p.spec.inertia_l = Vector3d(0.020, 0.025, 0.015).asDiagonal();
  p.known = {"hx", "hy"};
  return p;
}

}  // namespace dynid
