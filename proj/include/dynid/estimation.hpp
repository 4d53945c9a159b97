#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynid/payload.hpp"
#include "dynid/reduction.hpp"
#include "dynid/samples.hpp"
#include "dynid/signal.hpp"

namespace dynid {

inline constexpr double kDefaultLinearThreshold = 0.17;  // rad/s

// ---- linear estimators -----------------------------------------------------

/// Least squares by column-pivoted Householder QR. Throws a numeric error
/// naming the dependent columns when the stack is rank deficient (relative
/// pivot threshold 1e-10).
VectorXd llse(const MatrixXd& stack, const VectorXd& rhs);
/// Minimizes ||W^(1/2) (rhs - stack x)|| for diagonal weights w.
VectorXd wlse(const MatrixXd& stack, const VectorXd& rhs, const VectorXd& weights);

struct RobustWeights {
  VectorXd weights;
  int iterations = 0;
  bool converged = true;
};

/// Bisquare IRLS (c = 4.685, scale = MAD / 0.6745), stopped when no weight
/// moves by 1e-6 or after 50 iterations. Rank-deficient stacks are allowed.
RobustWeights robust_weights(const MatrixXd& stack, const VectorXd& rhs);

/// sigma_max / sigma_min after scaling every column to unit norm.
double equilibrated_condition(const MatrixXd& stack);

// ---- stage 1: current-level dynamic coefficients ----------------------------

/// The stages take `current_filter` when v was low-passed with filtfilt: the
/// model side is then passed through the same filter over the whole series
/// before rows are selected, so a friction step smeared in v is matched by
/// the model instead of biasing it.
struct IdentifyOptions {
  double threshold = kDefaultLinearThreshold;
  bool robust = true;
  double max_condition = 1e8;
  std::optional<Biquad> current_filter;
};

/// chi in the per-joint layout of the base map (block j = theta_j / K_j).
struct CurrentCoefficients {
  VectorXd chi;
  VectorXd covariance_diag;
  std::vector<int> samples_used;  // per joint
  std::vector<RobustWeights> weights;
};

CurrentCoefficients identify_coefficients(const BaseParameterMap& map,
                                          const KinematicChain& chain,
                                          const SampleSet& samples,
                                          const IdentifyOptions& options = {});

/// v = U(state) chi.
VectorXd predict_currents(const BaseParameterMap& map, const KinematicChain& chain,
                          const VectorXd& chi, const JointState& state);

/// Same evaluated from a precomputed torque-level regressor.
VectorXd predict_currents_from_regressor(const BaseParameterMap& map, const MatrixXd& y,
                                         const VectorXd& chi);

/// U_f chi_f: the prediction with the three linear-friction entries of every
/// joint block left out.
VectorXd nonfriction_currents(const BaseParameterMap& map, const MatrixXd& y,
                              const VectorXd& chi);

/// v - U_f chi_f for every sample (samples x joints); with a filter the
/// prediction U_f chi_f is filtered first.
MatrixXd friction_residual_currents(const BaseParameterMap& map,
                                    const KinematicChain& chain, const VectorXd& chi,
                                    const SampleSet& samples,
                                    const std::optional<Biquad>& current_filter = std::nullopt);

// ---- stage 2: sigmoidal friction ---------------------------------------------

struct FrictionFitOptions {
  double threshold = kDefaultLinearThreshold;
  int min_samples = 50;
  int max_iterations = 500;
  /// Residuals are a filtered series: the sigmoid is evaluated on every
  /// sample, filtered, and compared on the region samples.
  std::optional<Biquad> current_filter;
};

struct StartReport {
  JointFriction start;
  JointFriction result;
  double objective = 0.0;
  int iterations = 0;
  bool finite = true;
};

struct JointFrictionFit {
  JointFriction psi;
  double objective = 0.0;
  int samples = 0;
  std::vector<StartReport> starts;
  /// Objective after every LM iteration of the winning start.
  std::vector<double> history;
};

/// 0.5-free sum of squared residuals of the sigmoid law over the samples.
double friction_objective(const JointFriction& psi, const VectorXd& qd,
                          const VectorXd& residual);

/// Levenberg-Marquardt with analytic Jacobian from 8 deterministic starts on
/// samples with |qd| < threshold. `objective` and `history` are in the filtered
/// residual when a filter is set. Throws when fewer than min_samples are in
/// the region or when no start yields a finite objective.
JointFrictionFit fit_joint_friction(const VectorXd& qd, const VectorXd& residual,
                                    const FrictionFitOptions& options = {});

struct FrictionFit {
  FrictionSet psi;  // current level
  std::vector<JointFrictionFit> joints;
};

FrictionFit fit_friction(const MatrixXd& qd, const MatrixXd& residuals,
                         const FrictionFitOptions& options = {});

/// U_f chi_f + v_Psi.
VectorXd predict_currents_full(const BaseParameterMap& map, const KinematicChain& chain,
                               const VectorXd& chi, const FrictionSet& psi,
                               const JointState& state);

// ---- stage 3: motor drive gains ------------------------------------------------

struct GainOptions {
  double threshold = kDefaultLinearThreshold;
  double lower_bound = 10.0;  // N m / A
  double rank_tolerance = 1e-10;
  bool robust = true;
  /// Take the regrouped bounded path even for full-rank joints.
  bool force_regrouped = false;
  /// Applied to each scenario's series separately.
  std::optional<Biquad> current_filter;
};

struct JointGain {
  double K = 0.0;
  VectorXd zeta;  // [chi_f; pi_uL / K; 1 / K]
  int rank = 0;
  int columns = 0;
  bool regrouped = false;
  bool gain_identifiable = true;
  bool clamped = false;
  double lower = 0.0, upper = 0.0;
  /// Per zeta coordinate: uniquely determined by the data (phi) or not.
  std::vector<bool> identifiable;
};

struct GainEstimate {
  VectorXd K;
  std::vector<JointGain> joints;
};

/// Joint by joint from 1 to n, on linearity-region samples of scenario a
/// (no payload) and b (payload attached). The upper bound of joint j is the
/// largest gain already estimated for joints before it.
GainEstimate estimate_gains(const BaseParameterMap& map, const KinematicChain& chain,
                            const SampleSet& samples_a, const SampleSet& samples_b,
                            const PayloadKnowledge& payload, const FrictionSet& psi,
                            const GainOptions& options = {});

struct GroundTruthGains {
  VectorXd K;
  std::vector<int> rejected;  // per joint, samples with zero current
};

/// Per-joint mean of tau_d / v_d over static samples.
GroundTruthGains ground_truth_gains(const MatrixXd& target_torque,
                                    const MatrixXd& target_current);

}  // namespace dynid
