#pragma once

#include <cstddef>
#include <cstdint>

namespace hopc::kernels {

// Data-parallel inner loops used throughout the pipeline, in structure-of-
// arrays form. Every entry point has a scalar reference implementation and
// may have SIMD variants; the active set is chosen once at startup from CPU
// capabilities (override with HOPC_KERNELS=scalar|avx2).
//
// Contract notes:
//  * range_select must make bit-identical keep/drop decisions in every
//    variant: per-element arithmetic is plain mul/add (the build disables
//    FP contraction), so only reduction order may differ between variants.
//  * reductions (sum3, scatter6, sign_scores, hik, l2sq, dot) may differ
//    across variants by floating-point association only; equivalence tests
//    bound the drift.
struct Ops {
  const char* name;

  // Writes indices i with (x[i]-cx)^2 + (y[i]-cy)^2 + (z[i]-cz)^2 <= r2
  // into out, in ascending i order. Returns the count.
  std::size_t (*range_select)(const double* x, const double* y, const double* z,
                              std::size_t n, double cx, double cy, double cz,
                              double r2, std::uint32_t* out);

  // out[0..2] = sum of x, y, z.
  void (*sum3)(const double* x, const double* y, const double* z,
               std::size_t n, double out[3]);

  // Upper-triangle sums of centered outer products:
  // out = {Sxx, Sxy, Sxz, Syy, Syz, Szz} with d = q - mu.
  void (*scatter6)(const double* x, const double* y, const double* z,
                   std::size_t n, const double mu[3], double out[6]);

  // Signed-square projection mass per basis vector:
  // out[j] = sum_i d_ij * |d_ij| with d_ij = (q_i - c) . v_j,
  // basis = {v1, v2, v3} packed row-major (9 doubles).
  void (*sign_scores)(const double* x, const double* y, const double* z,
                      std::size_t n, const double c[3], const double basis[9],
                      double out[3]);

  // sum_i min(a[i], b[i])
  double (*hik)(const double* a, const double* b, std::size_t n);

  // sum_i (a[i]-b[i])^2
  double (*l2sq)(const double* a, const double* b, std::size_t n);

  // sum_i a[i]*b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
};

// Scalar reference; always available.
const Ops& scalar_ops();

// AVX2 variant, or nullptr when unavailable (non-x86 build or CPU without
// AVX2 support).
const Ops* avx2_ops();

// The runtime-selected set. Stable for the lifetime of the process.
const Ops& active();

}  // namespace hopc::kernels
