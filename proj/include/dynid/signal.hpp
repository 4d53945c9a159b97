#pragma once

#include <array>

#include "dynid/kinematics.hpp"

namespace dynid {

/// Second-order section y = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2).
struct Biquad {
  std::array<double, 3> b{};
  std::array<double, 3> a{};  // a[0] == 1
};

/// Digital 2nd-order Butterworth low-pass by the bilinear transform with
/// frequency prewarping (unit DC gain). Throws if cutoff >= rate / 2.
Biquad butterworth_lowpass(double cutoff_hz, double rate_hz);

/// Zero-phase forward-backward filtering of every column of `series`
/// (samples x channels). The ends are padded by odd reflection over 3*3
/// samples and the filter state is started at its step-response steady state
/// scaled to the first padded sample, so a constant input passes unchanged.
MatrixXd filtfilt(const Biquad& f, const MatrixXd& series);

/// Default preprocessing filter: butterworth_lowpass + filtfilt.
MatrixXd lowpass(const MatrixXd& series, double cutoff_hz, double rate_hz);

}  // namespace dynid
