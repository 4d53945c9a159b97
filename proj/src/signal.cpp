#include "dynid/signal.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "dynid/errors.hpp"
#include "dynid/kernels.hpp"

namespace dynid {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr int kPadLength = 9;  // 3 * filter length

/// Runs the biquad over all rows with each channel started at its steady
/// state for a step of height data(0, c).
void run_pass(const Biquad& f, RowMajor& data) {
  const double gain = (f.b[0] + f.b[1] + f.b[2]) / (f.a[0] + f.a[1] + f.a[2]);
  const double zi2 = f.b[2] - f.a[2] * gain;
  const double zi1 = f.b[1] - f.a[1] * gain + zi2;
  const auto channels = static_cast<std::size_t>(data.cols());
  std::vector<double> state(2 * channels);
  for (std::size_t c = 0; c < channels; ++c) {
    state[2 * c] = zi1 * data(0, static_cast<Eigen::Index>(c));
    state[2 * c + 1] = zi2 * data(0, static_cast<Eigen::Index>(c));
  }
  kernels::active().biquad(data.data(), static_cast<std::size_t>(data.rows()), channels,
                           f.b.data(), f.a.data(), state.data());
}

}  // namespace

Biquad butterworth_lowpass(double cutoff_hz, double rate_hz) {
  if (!(rate_hz > 0.0) || !(cutoff_hz > 0.0)) {
    throw usage_error("filter cutoff and sample rate must be positive");
  }
  if (cutoff_hz >= 0.5 * rate_hz) {
    throw usage_error("cutoff " + std::to_string(cutoff_hz) +
                      " Hz is not below the Nyquist frequency " +
                      std::to_string(0.5 * rate_hz) + " Hz");
  }
  const double k = std::tan(std::numbers::pi * cutoff_hz / rate_hz);
  const double k2 = k * k;
  const double norm = 1.0 / (1.0 + std::numbers::sqrt2 * k + k2);
  Biquad f;
  f.b = {k2 * norm, 2.0 * k2 * norm, k2 * norm};
  f.a = {1.0, 2.0 * (k2 - 1.0) * norm, (1.0 - std::numbers::sqrt2 * k + k2) * norm};
  return f;
}

MatrixXd filtfilt(const Biquad& f, const MatrixXd& series) {
  const Eigen::Index m = series.rows();
  if (m <= kPadLength) {
    throw schema_error("zero-phase filtering needs more than " +
                       std::to_string(kPadLength) + " samples");
  }
  const Eigen::Index total = m + 2 * kPadLength;
  RowMajor ext(total, series.cols());
  for (Eigen::Index k = 0; k < kPadLength; ++k) {
    ext.row(k) = 2.0 * series.row(0) - series.row(kPadLength - k);
    ext.row(kPadLength + m + k) = 2.0 * series.row(m - 1) - series.row(m - 2 - k);
  }
  ext.middleRows(kPadLength, m) = series;

  run_pass(f, ext);
  RowMajor reversed = ext.colwise().reverse();
  run_pass(f, reversed);
  ext = reversed.colwise().reverse();
  return ext.middleRows(kPadLength, m);
}

MatrixXd lowpass(const MatrixXd& series, double cutoff_hz, double rate_hz) {
  return filtfilt(butterworth_lowpass(cutoff_hz, rate_hz), series);
}

}  // namespace dynid
