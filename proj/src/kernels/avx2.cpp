#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "dynid/kernels.hpp"

namespace dynid::kernels {

namespace {

// exp(x) for x already clamped to [-kExpClamp, kExpClamp]. Cody-Waite
// reduction x = k ln2 + r with |r| <= ln2/2, then a degree-13 Taylor
// polynomial; relative error stays within a few ulp.
inline __m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  static constexpr double kInvFact[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
      1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,
      1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,        0.5,
      1.0,                1.0};
  __m256d p = _mm256_set1_pd(kInvFact[0]);
  for (int i = 1; i < 14; ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kInvFact[i]));

  const __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i bits = _mm256_cvtepi32_epi64(k32);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

inline __m256d clamp_pd(__m256d x) {
  return _mm256_min_pd(_mm256_max_pd(x, _mm256_set1_pd(-kExpClamp)),
                       _mm256_set1_pd(kExpClamp));
}

inline double clamp_exp_arg(double x) {
  return std::clamp(x, -kExpClamp, kExpClamp);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void sigmoid_eval(const double* qd, std::size_t n, const SigmoidParams& p,
                  double* out) {
  const __m256d fo = _mm256_set1_pd(p.offset);
  const __m256d fv = _mm256_set1_pd(p.viscous);
  const __m256d fc = _mm256_set1_pd(p.magnitude);
  const __m256d neg_delta = _mm256_set1_pd(-p.steepness);
  const __m256d nu = _mm256_set1_pd(p.shift);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(qd + i);
    const __m256d e = exp_pd(clamp_pd(_mm256_mul_pd(neg_delta, _mm256_add_pd(nu, v))));
    const __m256d s = _mm256_div_pd(one, _mm256_add_pd(one, e));
    __m256d y = _mm256_add_pd(fo, _mm256_mul_pd(fv, v));
    y = _mm256_add_pd(y, _mm256_mul_pd(fc, s));
    _mm256_storeu_pd(out + i, y);
  }
  for (; i < n; ++i) {
    const double e = std::exp(clamp_exp_arg(-p.steepness * (p.shift + qd[i])));
    out[i] = p.offset + p.viscous * qd[i] + p.magnitude / (1.0 + e);
  }
}

void sigmoid_jacobian(const double* qd, std::size_t n, const SigmoidParams& p,
                      double* value, double* jac) {
  double* d_offset = jac;
  double* d_viscous = jac + n;
  double* d_magnitude = jac + 2 * n;
  double* d_steepness = jac + 3 * n;
  double* d_shift = jac + 4 * n;
  const __m256d fo = _mm256_set1_pd(p.offset);
  const __m256d fv = _mm256_set1_pd(p.viscous);
  const __m256d fc = _mm256_set1_pd(p.magnitude);
  const __m256d delta = _mm256_set1_pd(p.steepness);
  const __m256d neg_delta = _mm256_set1_pd(-p.steepness);
  const __m256d nu = _mm256_set1_pd(p.shift);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(qd + i);
    const __m256d arg = _mm256_add_pd(nu, v);
    const __m256d e = exp_pd(clamp_pd(_mm256_mul_pd(neg_delta, arg)));
    const __m256d s = _mm256_div_pd(one, _mm256_add_pd(one, e));
    const __m256d slope = _mm256_mul_pd(fc, _mm256_mul_pd(s, _mm256_mul_pd(e, s)));
    __m256d y = _mm256_add_pd(fo, _mm256_mul_pd(fv, v));
    y = _mm256_add_pd(y, _mm256_mul_pd(fc, s));
    _mm256_storeu_pd(value + i, y);
    _mm256_storeu_pd(d_offset + i, one);
    _mm256_storeu_pd(d_viscous + i, v);
    _mm256_storeu_pd(d_magnitude + i, s);
    _mm256_storeu_pd(d_steepness + i, _mm256_mul_pd(slope, arg));
    _mm256_storeu_pd(d_shift + i, _mm256_mul_pd(slope, delta));
  }
  for (; i < n; ++i) {
    const double arg = p.shift + qd[i];
    const double e = std::exp(clamp_exp_arg(-p.steepness * arg));
    const double s = 1.0 / (1.0 + e);
    const double slope = p.magnitude * (s * (e * s));
    value[i] = p.offset + p.viscous * qd[i] + p.magnitude * s;
    d_offset[i] = 1.0;
    d_viscous[i] = qd[i];
    d_magnitude[i] = s;
    d_steepness[i] = slope * arg;
    d_shift[i] = slope * p.steepness;
  }
}

double sum_sq(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += x[i] * x[i];
  return total;
}

double sum_sq_diff(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    total += d * d;
  }
  return total;
}

double sum_abs_diff(const double* x, const double* y, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign_mask, d));
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += std::fabs(x[i] - y[i]);
  return total;
}

void bisquare(const double* r, std::size_t n, double cutoff, double* w) {
  const __m256d inv = _mm256_set1_pd(1.0 / cutoff);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d u = _mm256_mul_pd(_mm256_loadu_pd(r + i), inv);
    const __m256d t = _mm256_sub_pd(one, _mm256_mul_pd(u, u));
    const __m256d inside = _mm256_cmp_pd(_mm256_andnot_pd(sign_mask, u), one, _CMP_LT_OQ);
    _mm256_storeu_pd(w + i, _mm256_and_pd(inside, _mm256_mul_pd(t, t)));
  }
  for (; i < n; ++i) {
    const double u = r[i] * (1.0 / cutoff);
    const double t = 1.0 - u * u;
    w[i] = std::fabs(u) < 1.0 ? t * t : 0.0;
  }
}

// Lanes run across channels, so each channel sees exactly the scalar
// operation sequence and the output matches the reference bit for bit.
void biquad(double* data, std::size_t rows, std::size_t channels,
            const double* b, const double* a, double* state) {
  const __m256d b0 = _mm256_set1_pd(b[0]);
  const __m256d b1 = _mm256_set1_pd(b[1]);
  const __m256d b2 = _mm256_set1_pd(b[2]);
  const __m256d a1 = _mm256_set1_pd(a[1]);
  const __m256d a2 = _mm256_set1_pd(a[2]);
  std::size_t c = 0;
  for (; c + 4 <= channels; c += 4) {
    __m256d z1 = _mm256_setr_pd(state[2 * c], state[2 * c + 2], state[2 * c + 4],
                                state[2 * c + 6]);
    __m256d z2 = _mm256_setr_pd(state[2 * c + 1], state[2 * c + 3],
                                state[2 * c + 5], state[2 * c + 7]);
    for (std::size_t k = 0; k < rows; ++k) {
      double* row = data + k * channels + c;
      const __m256d x = _mm256_loadu_pd(row);
      const __m256d y = _mm256_add_pd(_mm256_mul_pd(b0, x), z1);
      z1 = _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(b1, x), _mm256_mul_pd(a1, y)), z2);
      z2 = _mm256_sub_pd(_mm256_mul_pd(b2, x), _mm256_mul_pd(a2, y));
      _mm256_storeu_pd(row, y);
    }
    alignas(32) double s1[4], s2[4];
    _mm256_store_pd(s1, z1);
    _mm256_store_pd(s2, z2);
    for (int l = 0; l < 4; ++l) {
      state[2 * (c + l)] = s1[l];
      state[2 * (c + l) + 1] = s2[l];
    }
  }
  for (; c < channels; ++c) {
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

const Table* avx2_table() {
  static const Table table{sigmoid_eval, sigmoid_jacobian, sum_sq, sum_sq_diff,
                           sum_abs_diff, bisquare,         biquad};
  return &table;
}

}  // namespace dynid::kernels
