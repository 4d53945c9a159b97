#pragma once

#include <cstddef>

// Data-parallel loops used by the estimators and the preprocessing filters.
// Every kernel has a portable scalar reference and an AVX2/FMA variant; the
// variant is chosen once at startup from CPUID and can be pinned with the
// DYNID_SIMD environment variable ("scalar" or "avx2").
namespace dynid::kernels {

enum class Isa { kScalar, kAvx2 };

/// Parameters of one sigmoidal friction law, in the order
/// f_o, f_v, f_c, delta, nu.
struct SigmoidParams {
  double offset, viscous, magnitude, steepness, shift;
};

struct Table {
  /// out[i] = f_o + f_v qd[i] + f_c / (1 + exp(-delta (nu + qd[i]))).
  void (*sigmoid_eval)(const double* qd, std::size_t n, const SigmoidParams& p,
                       double* out);
  /// Value plus the 5 partial derivatives; jac is column-major n x 5.
  void (*sigmoid_jacobian)(const double* qd, std::size_t n,
                           const SigmoidParams& p, double* value, double* jac);
  double (*sum_sq)(const double* x, std::size_t n);
  double (*sum_sq_diff)(const double* x, const double* y, std::size_t n);
  double (*sum_abs_diff)(const double* x, const double* y, std::size_t n);
  /// Tukey bisquare: w = (1 - (r/cutoff)^2)^2 for |r| < cutoff, else 0.
  void (*bisquare)(const double* r, std::size_t n, double cutoff, double* w);
  /// In-place transposed direct-form-II biquad over `rows` samples of a
  /// row-major block with `channels` interleaved channels. state holds
  /// (z1, z2) per channel and is updated. b and a are {b0,b1,b2} and {1,a1,a2}.
  void (*biquad)(double* data, std::size_t rows, std::size_t channels,
                 const double* b, const double* a, double* state);
};

const Table& scalar_table();
/// Null when the binary was built without the AVX2 translation unit.
const Table* avx2_table();

bool cpu_has_avx2();
Isa active_isa();
const char* isa_name(Isa isa);
const Table& table_for(Isa isa);
/// Table for the active ISA.
const Table& active();

/// Argument clamp shared by both sigmoid variants so that exp never
/// overflows; well beyond where the logistic function saturates.
inline constexpr double kExpClamp = 708.0;

}  // namespace dynid::kernels
