#include "dynid/payload.hpp"

#include <cmath>

#include "dynid/errors.hpp"

namespace dynid {

void validate(const PayloadSpec& spec) {
  if (!std::isfinite(spec.mass) || spec.mass < 0.0) {
    throw schema_error("payload mass must be finite and non-negative");
  }
  if (!spec.com_l.allFinite() || !spec.inertia_l.allFinite() ||
      !spec.rotation.allFinite() || !spec.translation.allFinite()) {
    throw schema_error("payload description has non-finite entries");
  }
  if ((spec.inertia_l - spec.inertia_l.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw schema_error("payload inertia is not symmetric");
  }
  const Matrix3d& r = spec.rotation;
  if ((r.transpose() * r - Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-12 ||
      std::fabs(r.determinant() - 1.0) > 1e-12) {
    throw schema_error("payload rotation R_l_n is not a proper rotation matrix");
  }
}

Vector10d payload_to_frame_n(const PayloadSpec& spec) {
  validate(spec);
  const Vector3d com_n = spec.rotation * spec.com_l + spec.translation;
  const Matrix3d s = skew(com_n);
  const Matrix3d inertia_n = spec.rotation * spec.inertia_l * spec.rotation.transpose() +
                             spec.mass * s.transpose() * s;
  return make_link_block(spec.mass, spec.mass * com_n, inertia_n);
}

Vector10d apply_payload(const Vector10d& last_link_block, const Vector10d& pi_l) {
  return last_link_block + pi_l;
}

DynamicParameters apply_payload(const DynamicParameters& params, const Vector10d& pi_l) {
  DynamicParameters out = params;
  const int last = params.dof() - 1;
  out.link(last) = apply_payload(Vector10d(params.link(last)), pi_l);
  return out;
}

TorqueSplit split_torques(const KinematicChain& chain, const DynamicParameters& params,
                          const Vector10d& pi_l, const JointState& state) {
  if (params.dof() != chain.dof()) throw schema_error("parameters do not match the chain");
  const MatrixXd y = regressor(chain, state);
  TorqueSplit split;
  split.arm = y * params.values();
  split.payload = y.middleCols(kLinkParams * (chain.dof() - 1), kLinkParams) * pi_l;
  return split;
}

int payload_param_index(const std::string& name) {
  for (std::size_t k = 0; k < kPayloadParamNames.size(); ++k) {
    if (kPayloadParamNames[k] == name) return static_cast<int>(k);
  }
  throw schema_error("unknown payload parameter '" + name +
                     "' (expected one of m,hx,hy,hz,ixx,ixy,ixz,iyy,iyz,izz)");
}

int PayloadKnowledge::n_unknown() const {
  int count = 0;
  for (bool k : known) count += k ? 0 : 1;
  return count;
}

PayloadKnowledge make_knowledge(const PayloadSpec& spec,
                                const std::vector<std::string>& known_names) {
  PayloadKnowledge k;
  k.values = payload_to_frame_n(spec);
  for (const auto& name : known_names) {
    k.known[static_cast<std::size_t>(payload_param_index(name))] = true;
  }
  return k;
}

}  // namespace dynid
