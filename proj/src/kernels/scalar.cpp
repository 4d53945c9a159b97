#include <algorithm>
#include <cmath>

#include "dynid/kernels.hpp"

namespace dynid::kernels {

namespace {

inline double clamp_exp_arg(double x) {
  return std::clamp(x, -kExpClamp, kExpClamp);
}

void sigmoid_eval(const double* qd, std::size_t n, const SigmoidParams& p,
                  double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::exp(clamp_exp_arg(-p.steepness * (p.shift + qd[i])));
    const double s = 1.0 / (1.0 + e);
    out[i] = p.offset + p.viscous * qd[i] + p.magnitude * s;
  }
}

void sigmoid_jacobian(const double* qd, std::size_t n, const SigmoidParams& p,
                      double* value, double* jac) {
  double* d_offset = jac;
  double* d_viscous = jac + n;
  double* d_magnitude = jac + 2 * n;
  double* d_steepness = jac + 3 * n;
  double* d_shift = jac + 4 * n;
  for (std::size_t i = 0; i < n; ++i) {
    const double arg = p.shift + qd[i];
    const double e = std::exp(clamp_exp_arg(-p.steepness * arg));
    const double s = 1.0 / (1.0 + e);
    const double slope = p.magnitude * (s * (e * s));  // f_c s (1 - s)
    value[i] = p.offset + p.viscous * qd[i] + p.magnitude * s;
    d_offset[i] = 1.0;
    d_viscous[i] = qd[i];
    d_magnitude[i] = s;
    d_steepness[i] = slope * arg;
    d_shift[i] = slope * p.steepness;
  }
}

double sum_sq(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double sum_sq_diff(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

double sum_abs_diff(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(x[i] - y[i]);
  return acc;
}

void bisquare(const double* r, std::size_t n, double cutoff, double* w) {
  for (std::size_t i = 0; i < n; ++i) {
    const double u = r[i] / cutoff;
    const double t = 1.0 - u * u;
    w[i] = std::fabs(u) < 1.0 ? t * t : 0.0;
  }
}

void biquad(double* data, std::size_t rows, std::size_t channels,
            const double* b, const double* a, double* state) {
  for (std::size_t c = 0; c < channels; ++c) {
    double z1 = state[2 * c];
    double z2 = state[2 * c + 1];
    for (std::size_t k = 0; k < rows; ++k) {
      double& x = data[k * channels + c];
      const double y = b[0] * x + z1;
      z1 = (b[1] * x - a[1] * y) + z2;
      z2 = b[2] * x - a[2] * y;
      x = y;
    }
    state[2 * c] = z1;
    state[2 * c + 1] = z2;
  }
}

}  // namespace

const Table& scalar_table() {
  static const Table table{sigmoid_eval, sigmoid_jacobian, sum_sq, sum_sq_diff,
                           sum_abs_diff, bisquare,         biquad};
  return table;
}

}  // namespace dynid::kernels
