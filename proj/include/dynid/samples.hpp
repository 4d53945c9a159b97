#pragma once

#include <string>

#include "dynid/dynamics.hpp"

namespace dynid {

enum class Scenario { kNoPayload, kPayload };  // tags "a" and "b"
enum class SampleSource { kMeasured, kSimulated };

char scenario_tag(Scenario s);
Scenario parse_scenario(const std::string& tag);

/// Time series of joint states and motor currents. Matrices are
/// samples x joints. qdd is always derived from qd, never read from files.
struct SampleSet {
  VectorXd t;
  MatrixXd q, qd, qdd, v;
  Scenario scenario = Scenario::kNoPayload;
  SampleSource source = SampleSource::kMeasured;

  int size() const { return static_cast<int>(t.size()); }
  int dof() const { return static_cast<int>(q.cols()); }
  JointState state(int k) const;
  /// Mean sampling period; meaningful once check_uniform() passed.
  double period() const;
};

/// Per-sample, per-joint linearity mask |qd_j| > threshold.
Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> linear_region_mask(
    const SampleSet& set, double threshold);

/// Throws unless timestamps increase with a uniform step (tolerance 1e-9 s).
void check_uniform(const VectorXd& t);

/// Backward Euler: qdd[k] = (qd[k] - qd[k-1]) / period, qdd[0] = qdd[1].
MatrixXd differentiate(const MatrixXd& qd, double period);
/// Same, after validating the time grid.
MatrixXd differentiate(const MatrixXd& qd, const VectorXd& t);

/// CSV with header t,q1..qn,qd1..qdn,v1..vn,scenario; 17 significant digits.
void write_samples(const std::string& path, const SampleSet& set);
std::string format_samples(const SampleSet& set);
/// Parses the CSV and derives qdd. Malformed header, missing columns, ragged
/// rows and NaN fields raise distinct schema errors.
SampleSet read_samples(const std::string& path);
SampleSet parse_samples(const std::string& text, const std::string& origin = "<memory>");

/// Keeps the rows in [first, first + count).
SampleSet slice(const SampleSet& set, int first, int count);

/// Round-trip exact decimal form of a double (17 significant digits).
std::string format_double(double x);
double parse_double(const std::string& text, const std::string& context);

}  // namespace dynid
