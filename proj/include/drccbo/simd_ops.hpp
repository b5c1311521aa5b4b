#pragma once

#include <cstddef>

// Data-parallel kernels for the arithmetic inner loops (kernel rows,
// expectation dot products). Scalar reference implementations plus an
// AVX2 variant selected once at startup; the two are equivalence-tested.
namespace drccbo::simd {

struct Ops {
    const char* name;
    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // out[i] = sigma2 * exp(-((ax - bx[i])^2 + (aw - bw[i])^2) / scale)
    void (*sq_exp_row)(double ax, double aw, const double* bx, const double* bw,
                       double sigma2, double scale, double* out, std::size_t n);
};

const Ops& scalar_ops();
// Null when the build has no AVX2 code path (non-x86).
const Ops* avx2_ops();
// AVX2 when the CPU supports it, scalar otherwise. Resolved once.
const Ops& active();

}  // namespace drccbo::simd
