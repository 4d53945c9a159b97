#include "dynid/metrics.hpp"

#include <cmath>
#include <limits>

#include "dynid/errors.hpp"
#include "dynid/kernels.hpp"
#include "dynid/samples.hpp"

namespace dynid {

namespace {

void check_pair(const VectorXd& x, const VectorXd& y) {
  if (x.size() != y.size()) throw schema_error("metric inputs differ in length");
  if (x.size() == 0) throw usage_error("metric of an empty series");
}

double range_of(const VectorXd& x) { return x.maxCoeff() - x.minCoeff(); }

}  // namespace

double mse(const VectorXd& x, const VectorXd& y) {
  check_pair(x, y);
  const auto n = static_cast<std::size_t>(x.size());
  return kernels::active().sum_sq_diff(x.data(), y.data(), n) / static_cast<double>(n);
}

double mnae(const VectorXd& x, const VectorXd& y) {
  check_pair(x, y);
  const double range = range_of(x);
  if (!(range > 0.0)) throw numeric_error("MNAE undefined: reference signal has zero range");
  const auto n = static_cast<std::size_t>(x.size());
  return 200.0 / static_cast<double>(n) * kernels::active().sum_abs_diff(x.data(), y.data(), n) / range;
}

double deviation_norm(const VectorXd& x, const VectorXd& y) {
  check_pair(x, y);
  return std::sqrt(kernels::active().sum_sq_diff(x.data(), y.data(), static_cast<std::size_t>(x.size())));
}

double improvement_factor(double mnae_baseline, double mnae_ours) {
  if (!(mnae_ours > 0.0)) throw numeric_error("improvement factor undefined for zero error");
  return mnae_baseline / mnae_ours;
}

ValidationReport validation_report(const MatrixXd& measured, const MatrixXd& predicted,
                                   const MatrixXd& qd, double threshold,
                                   const MatrixXd* baseline) {
  if (measured.rows() != predicted.rows() || measured.cols() != predicted.cols() ||
      qd.rows() != measured.rows() || qd.cols() != measured.cols()) {
    throw schema_error("measured, predicted and velocity series differ in shape");
  }
  if (baseline && (baseline->rows() != measured.rows() || baseline->cols() != measured.cols())) {
    throw schema_error("baseline predictions differ in shape from the measurements");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ValidationReport report;
  for (Eigen::Index j = 0; j < measured.cols(); ++j) {
    const VectorXd x = measured.col(j);
    const VectorXd y = predicted.col(j);
    JointMetrics m;
    m.joint = static_cast<int>(j) + 1;
    m.mse = mse(x, y);
    m.mnae = mnae(x, y);

    std::vector<Eigen::Index> idx;
    for (Eigen::Index k = 0; k < qd.rows(); ++k) {
      if (std::fabs(qd(k, j)) < threshold) idx.push_back(k);
    }
    m.mnae_region = nan;
    if (idx.size() >= 2) {
      VectorXd xs(static_cast<Eigen::Index>(idx.size())), ys(xs.size());
      for (std::size_t i = 0; i < idx.size(); ++i) {
        xs[static_cast<Eigen::Index>(i)] = x[idx[i]];
        ys[static_cast<Eigen::Index>(i)] = y[idx[i]];
      }
      if (range_of(xs) > 0.0) m.mnae_region = mnae(xs, ys);
    }
    if (baseline) {
      const double b = mnae(x, baseline->col(j));
      m.eta = m.mnae > 0.0 ? b / m.mnae : nan;
    }
    report.joints.push_back(m);
  }

  auto mean_of = [&](auto get) {
    double s = 0.0;
    int count = 0;
    for (const auto& m : report.joints) {
      const double v = get(m);
      if (std::isnan(v)) continue;
      s += v;
      ++count;
    }
    return count ? s / count : nan;
  };
  report.average.mse = mean_of([](const JointMetrics& m) { return m.mse; });
  report.average.mnae = mean_of([](const JointMetrics& m) { return m.mnae; });
  report.average.mnae_region = mean_of([](const JointMetrics& m) { return m.mnae_region; });
  if (baseline) {
    // Ratio of the averages, the form used for whole-arm comparisons.
    double b = 0.0;
    for (Eigen::Index j = 0; j < measured.cols(); ++j) b += mnae(measured.col(j), baseline->col(j));
    b /= static_cast<double>(measured.cols());
    report.average.eta = report.average.mnae > 0.0 ? b / report.average.mnae : nan;
  }
  return report;
}

std::string format_report(const ValidationReport& report) {
  const bool with_eta = !report.joints.empty() && report.joints.front().eta.has_value();
  std::string out = "joint,mse,mnae,mnae_nonlinear_region";
  if (with_eta) out += ",eta";
  out += '\n';
  auto row = [&](const std::string& label, const JointMetrics& m) {
    out += label + ',' + format_double(m.mse) + ',' + format_double(m.mnae) + ',' +
           format_double(m.mnae_region);
    if (with_eta) out += ',' + format_double(m.eta.value_or(std::numeric_limits<double>::quiet_NaN()));
    out += '\n';
  };
  for (const auto& m : report.joints) row(std::to_string(m.joint), m);
  row("avg", report.average);
  return out;
}

}  // namespace dynid
