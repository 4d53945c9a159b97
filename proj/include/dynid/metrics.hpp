#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynid/kinematics.hpp"

namespace dynid {

/// (1/N) sum (x_k - y_k)^2.
double mse(const VectorXd& x, const VectorXd& y);

/// Mean absolute error normalized by the range of x, in percent:
/// (200 / N) sum |x_k - y_k| / (max x - min x). Throws when x has zero range.
double mnae(const VectorXd& x, const VectorXd& y);

/// Euclidean norm of x - y, i.e. sqrt(N * mse(x, y)).
double deviation_norm(const VectorXd& x, const VectorXd& y);

/// baseline / ours; requires ours > 0.
double improvement_factor(double mnae_baseline, double mnae_ours);

struct JointMetrics {
  int joint = 0;  // 1-based
  double mse = 0.0;
  double mnae = 0.0;
  /// MNAE over samples with |qd| < threshold, normalized by the range of the
  /// measured signal on those samples; NaN when fewer than two samples or no
  /// range remain.
  double mnae_region = 0.0;
  std::optional<double> eta;
};

struct ValidationReport {
  std::vector<JointMetrics> joints;
  JointMetrics average;  // joint = 0, means over joints (NaN entries skipped)
};

/// Per-joint metrics of predictions against measurements (samples x joints).
/// With a baseline prediction, eta = MNAE(baseline) / MNAE(predicted).
ValidationReport validation_report(const MatrixXd& measured, const MatrixXd& predicted,
                                   const MatrixXd& qd, double threshold,
                                   const MatrixXd* baseline = nullptr);

/// CSV with header joint,mse,mnae,mnae_nonlinear_region[,eta] and a final
/// "avg" row.
std::string format_report(const ValidationReport& report);

}  // namespace dynid
