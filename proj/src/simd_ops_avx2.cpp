#include "drccbo/simd_ops.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace drccbo::simd {

namespace {

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc0 = _mm256_add_pd(acc0, acc1);
    __m128d lo = _mm256_castpd256_pd128(acc0);
    __m128d hi = _mm256_extractf128_pd(acc0, 1);
    lo = _mm_add_pd(lo, hi);
    double acc = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

// Distances are vectorized; exp stays libm per lane so the result is
// bit-identical to the scalar kernel.
void sq_exp_row_avx2(double ax, double aw, const double* bx, const double* bw,
                     double sigma2, double scale, double* out, std::size_t n) {
    const double inv = -1.0 / scale;
    const __m256d vax = _mm256_set1_pd(ax);
    const __m256d vaw = _mm256_set1_pd(aw);
    const __m256d vinv = _mm256_set1_pd(inv);
    std::size_t i = 0;
    alignas(32) double buf[4];
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(vax, _mm256_loadu_pd(bx + i));
        const __m256d dw = _mm256_sub_pd(vaw, _mm256_loadu_pd(bw + i));
        __m256d d2 = _mm256_mul_pd(dx, dx);
        d2 = _mm256_add_pd(d2, _mm256_mul_pd(dw, dw));
        _mm256_store_pd(buf, _mm256_mul_pd(d2, vinv));
        out[i] = sigma2 * std::exp(buf[0]);
        out[i + 1] = sigma2 * std::exp(buf[1]);
        out[i + 2] = sigma2 * std::exp(buf[2]);
        out[i + 3] = sigma2 * std::exp(buf[3]);
    }
    for (; i < n; ++i) {
        const double dx = ax - bx[i];
        const double dw = aw - bw[i];
        double d2 = dx * dx;
        d2 += dw * dw;
        out[i] = sigma2 * std::exp(d2 * inv);
    }
}

const Ops kAvx2{"avx2", dot_avx2, sq_exp_row_avx2};

}  // namespace

const Ops* avx2_ops() {
    return __builtin_cpu_supports("avx2") ? &kAvx2 : nullptr;
}

}  // namespace drccbo::simd

#else

namespace drccbo::simd {
const Ops* avx2_ops() { return nullptr; }
}  // namespace drccbo::simd

#endif
